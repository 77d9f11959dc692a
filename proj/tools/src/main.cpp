#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "config.hpp"
#include "runner.hpp"

namespace {

struct Args {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
};

void add_common(CLI::App* sub, Args& args) {
  sub->add_option("--config", args.config, "experiment config (key = value lines)")->required();
  sub->add_option("--out", args.out, "CSV output path; the summary goes to <out>.summary");
  sub->add_option("--seed", args.seed, "overrides the seed in the config");
  sub->add_option("--workers", args.workers, "worker threads; output does not depend on it")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace rdsmb::cli;
  CLI::App app{"Fiber-entropy experiments for random dynamical systems over amenable groups", "rdsmb"};
  app.require_subcommand(1);
  Args args;
  const std::pair<Subcommand, const char*> subs[] = {
      {Subcommand::kSmbRun, "pointwise information rate along a Foelner sequence"},
      {Subcommand::kCondEntropy, "conditional entropy H(xi | xi^{F_n \\ {e}}) along a Foelner sequence"},
      {Subcommand::kFolnerCheck, "nesting, size, tempered constants and defects of a Foelner sequence"},
      {Subcommand::kCocycleCheck, "random cocycle and measure-invariance checks"},
      {Subcommand::kCoverDemo, "greedy (lem11) or randomised (lem12) cover of a box"},
  };
  for (const auto& [sub, help] : subs) add_common(app.add_subcommand(std::string(to_string(sub)), help), args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  Overrides overrides;
  overrides.subcommand = parse_subcommand(app.get_subcommands().front()->get_name());
  overrides.seed = args.seed;
  overrides.output = args.out;
  overrides.workers = args.workers;

  std::ifstream in(args.config, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read config '" << args.config << "'\n";
    return kExitIo;
  }
  std::ostringstream text;
  text << in.rdbuf();

  ExperimentConfig cfg;
  try {
    cfg = parse_config(text.str(), overrides);
  } catch (const ConfigErrors& e) {
    for (const ConfigError& err : e.errors()) {
      std::cerr << args.config << ':';
      if (err.line) std::cerr << err.line << ':';
      std::cerr << ' ';
      if (!err.key.empty()) std::cerr << err.key << ": ";
      std::cerr << err.reason << '\n';
    }
    return kExitConfig;
  }
  return run(cfg, std::cerr);
}
