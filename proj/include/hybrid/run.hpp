// Command dispatch: executes a validated RunConfig, printing to stdout and
// writing CSV artifacts. Engine failures propagate as exceptions; the CLI
// maps them to exit codes.
#pragma once

#include <iosfwd>

#include "hybrid/config.hpp"

namespace hybrid {

int run(const RunConfig& config, std::ostream& out);

}  // namespace hybrid
