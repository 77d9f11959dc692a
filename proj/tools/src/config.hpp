#pragma once

// Experiment configuration: flat `key = value` lines, `#` starts a comment,
// lists are comma separated. Group elements inside lists are whitespace
// separated coordinates ("1 0"). Symbol indices in keys (fiber_p.<b>,
// transition.<i>) are 0-based like the symbols; cover levels in shape.<i>.<j>
// and centers.<i>.<j> are 1-based.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rdsmb/covering.hpp"
#include "rdsmb/group.hpp"
#include "rdsmb/rational.hpp"
#include "rdsmb/rds.hpp"

namespace rdsmb::cli {

enum class Subcommand { kSmbRun, kCondEntropy, kFolnerCheck, kCocycleCheck, kCoverDemo };

std::string_view to_string(Subcommand s);
std::optional<Subcommand> parse_subcommand(std::string_view text);

struct ConfigError {
  std::string key;
  std::size_t line = 0;  // 0 when the problem is not tied to one line
  std::string reason;
};

class ConfigErrors : public std::runtime_error {
 public:
  explicit ConfigErrors(std::vector<ConfigError> errors);
  const std::vector<ConfigError>& errors() const { return errors_; }

 private:
  std::vector<ConfigError> errors_;
};

struct CoverSpec {
  CoverLemma lemma = CoverLemma::kLem11;
  CoverInstance instance;
  std::size_t samples = 10000;
  bool check_hypotheses = true;
  std::optional<double> retention;
  bool expect_pass = true;
};

struct ExperimentConfig {
  Subcommand subcommand = Subcommand::kSmbRun;
  GroupTag group;
  std::optional<RdsModel> model;  // absent for folner-check and cover-demo
  int n_max = 0;
  Coord folner_scale = 1;
  std::size_t trajectories = 100;
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
  std::optional<double> tolerance;
  std::size_t check_from = 0;  // first n the tolerance applies to
  bool monte_carlo = true;
  std::size_t workers = 1;
  std::string output;

  // folner-check
  FiniteSubset k_set;
  std::optional<Rational> tempered_bound;

  // cocycle-check
  std::size_t checks = 1000;
  std::size_t invariance_checks = 100;
  Coord window = 3;
  Coord element_bound = 8;

  std::optional<CoverSpec> cover;
};

// Command-line values; they take precedence over the file.
struct Overrides {
  std::optional<Subcommand> subcommand;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output;
  std::optional<std::size_t> workers;
};

// Parses and validates. A `subcommand` key in the text must agree with the
// command line; one of the two is required. Throws ConfigErrors listing every
// problem found.
ExperimentConfig parse_config(std::string_view text, const Overrides& overrides = {});

// Largest Foelner set a run may build.
inline constexpr std::size_t kMaxFolnerSize = std::size_t{1} << 22;

}  // namespace rdsmb::cli
