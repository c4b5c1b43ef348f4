#pragma once

// Umbrella header for the library. The command-line layer (cli.hpp) is kept
// separate because it pulls in CLI11, nlohmann/json, and OpenSSL.

#include "scenfalsify/conformance.hpp"
#include "scenfalsify/error.hpp"
#include "scenfalsify/falsify.hpp"
#include "scenfalsify/geometry.hpp"
#include "scenfalsify/mtl.hpp"
#include "scenfalsify/sampling.hpp"
#include "scenfalsify/scenario.hpp"
#include "scenfalsify/select.hpp"
#include "scenfalsify/sim_world.hpp"
#include "scenfalsify/trace_io.hpp"
#include "scenfalsify/version.hpp"
