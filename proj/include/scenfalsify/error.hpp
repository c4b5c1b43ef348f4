#pragma once

#include <stdexcept>
#include <string>

namespace scenfalsify {

/// Base class for every diagnostic raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Text-level diagnostic carrying a 1-based source position.
class ParseError : public Error {
 public:
  ParseError(std::string message, int line, int column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        message_(std::move(message)),
        line_(line),
        column_(column) {}

  const std::string& message() const noexcept { return message_; }
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  std::string message_;
  int line_;
  int column_;
};

}  // namespace scenfalsify
