#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "config.hpp"

namespace rdsmb::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitAssertion = 3;
inline constexpr int kExitIo = 4;

struct RunResult {
  bool passed = false;
  std::string csv;
  // Summary report in file order.
  std::vector<std::pair<std::string, std::string>> summary;
};

// Runs the experiment in memory. Library errors (infeasible sizes, failed
// hypotheses the run depends on) propagate as rdsmb::Error.
RunResult execute(const ExperimentConfig& cfg);

// execute() plus artifacts: <output>.summary always, <output> only when every
// assertion passed. Returns the process exit status; diagnostics go to `err`.
int run(const ExperimentConfig& cfg, std::ostream& err);

std::string summary_path(const std::string& output);
std::string format_summary(const RunResult& result);

}  // namespace rdsmb::cli
