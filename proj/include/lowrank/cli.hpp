#pragma once

#include <ostream>
#include <string>

#include "lowrank/config.hpp"

namespace lowrank {

inline constexpr int kExitOk = 0;
inline constexpr int kExitGateFailed = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNumericalFailure = 3;

// Runs one experiment kind, writing CSV to out and diagnostics to err.
// Returns one of the kExit* codes.
int run_experiment(const std::string& kind, const Config& config, std::ostream& out, std::ostream& err);

// lowrank-rep <kind> --config <path> [--seed N] [--out <path>] [--set key=value]...
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lowrank
