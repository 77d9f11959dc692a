#include "runner.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "rdsmb/covering.hpp"
#include "rdsmb/entropy.hpp"
#include "rdsmb/errors.hpp"
#include "rdsmb/folner.hpp"
#include "rdsmb/rng.hpp"

namespace rdsmb::cli {
using rdsmb::to_string;

namespace {

using Summary = std::vector<std::pair<std::string, std::string>>;

std::string yes_no(bool b) { return b ? "true" : "false"; }

std::string coords(const GroupElement& g) {
  std::string out;
  for (Coord c : g.coords()) {
    if (!out.empty()) out += ' ';
    out += std::to_string(c);
  }
  return out;
}

FolnerSequence folner_for(const ExperimentConfig& cfg) {
  if (cfg.group.kind == GroupKind::kHeisenberg) return heisenberg_folner(cfg.n_max);
  std::vector<Coord> sides;
  for (int n = 1; n <= cfg.n_max; ++n) sides.push_back(cfg.folner_scale * n);
  return box_folner_sides(cfg.group.rank, sides);
}

std::string folner_name(const ExperimentConfig& cfg) {
  if (cfg.group.kind == GroupKind::kHeisenberg) return "heisenberg boxes [0,n)^2 x [0,n^2)";
  return "boxes [0," + (cfg.folner_scale == 1 ? std::string() : std::to_string(cfg.folner_scale)) + "n)^" +
         std::to_string(cfg.group.rank);
}

// Checks rows n >= check_from against the tolerance.
bool check_trace(const ExperimentConfig& cfg, const ConvergenceTrace& trace, Summary& s) {
  double worst = 0.0;
  for (const TraceRow& r : trace.rows) {
    if (r.n >= cfg.check_from) worst = std::max(worst, r.abs_error().value_or(0.0));
  }
  const TraceRow& last = trace.rows.back();
  s.emplace_back("final_n", std::to_string(last.n));
  s.emplace_back("final_folner_size", std::to_string(last.folner_size));
  s.emplace_back("final_estimate", format_number(last.estimate));
  s.emplace_back("final_abs_error", format_number(last.abs_error().value_or(0.0)));
  s.emplace_back("final_std_error", last.std_error ? format_number(*last.std_error) : "");
  s.emplace_back("check_from", std::to_string(cfg.check_from));
  s.emplace_back("max_abs_error_checked", format_number(worst));
  if (!cfg.tolerance) {
    s.emplace_back("tolerance", "");
    return true;
  }
  s.emplace_back("tolerance", format_number(*cfg.tolerance));
  return worst <= *cfg.tolerance;
}

void model_summary(const ExperimentConfig& cfg, const PartitionSpec& xi, Summary& s) {
  s.emplace_back("model", cfg.model->describe());
  s.emplace_back("group", cfg.group.name());
  s.emplace_back("partition", xi.name());
  s.emplace_back("closed_form", format_number(fiber_entropy_closed_form(*cfg.model, xi)));
}

RunResult smb_run(const ExperimentConfig& cfg, Summary s) {
  const DisintegratedMeasure mu(*cfg.model);
  const PartitionSpec xi = PartitionSpec::zero_coordinate_of_x(*cfg.model);
  model_summary(cfg, xi, s);
  s.emplace_back("method", std::string(to_string(EntropyMethod::kPointwiseSmb)));
  s.emplace_back("folner", folner_name(cfg));
  s.emplace_back("n_max", std::to_string(cfg.n_max));
  s.emplace_back("trajectories", std::to_string(cfg.trajectories));
  const ConvergenceTrace trace = smb_trace(mu, xi, folner_for(cfg), {cfg.trajectories, cfg.seed, cfg.workers});
  RunResult r;
  r.passed = check_trace(cfg, trace, s);
  std::ostringstream csv;
  write_csv(csv, trace);
  r.csv = csv.str();
  r.summary = std::move(s);
  return r;
}

RunResult cond_entropy(const ExperimentConfig& cfg, Summary s) {
  const DisintegratedMeasure mu(*cfg.model);
  const PartitionSpec xi = PartitionSpec::zero_coordinate_of_x(*cfg.model);
  model_summary(cfg, xi, s);
  const FolnerSequence seq = folner_for(cfg);
  // Rows switch to Monte Carlo once the cells of F_n can no longer be listed.
  std::size_t last_exact = 0;
  for (std::size_t n = 1; n <= seq.size(); ++n) {
    const double cells = std::pow(static_cast<double>(xi.atoms), static_cast<double>(seq.at(n).size()));
    if (cells > static_cast<double>(kMaxEnumeration)) break;
    last_exact = n;
  }
  s.emplace_back("method", std::string(to_string(last_exact == seq.size() ? EntropyMethod::kExactEnumeration
                                                                          : EntropyMethod::kConditionalEntropy)));
  s.emplace_back("exact_rows_up_to_n", std::to_string(last_exact));
  s.emplace_back("folner", folner_name(cfg));
  s.emplace_back("n_max", std::to_string(cfg.n_max));
  s.emplace_back("samples", std::to_string(cfg.samples));
  const ConvergenceTrace trace =
      conditional_entropy_trace(mu, xi, seq, {cfg.samples, cfg.seed, cfg.workers, cfg.monte_carlo});
  RunResult r;
  r.passed = check_trace(cfg, trace, s);
  std::ostringstream csv;
  write_csv(csv, trace);
  r.csv = csv.str();
  r.summary = std::move(s);
  return r;
}

RunResult folner_check(const ExperimentConfig& cfg, Summary s) {
  const FolnerSequence seq = folner_for(cfg);
  const FolnerValidation v = validate_sequence(seq);
  std::ostringstream csv;
  csv << "n,folner_size,tempered_constant,tempered_exact,defect,defect_exact\n";
  for (std::size_t n = 1; n <= seq.size(); ++n) {
    const Rational defect = folner_defect(cfg.k_set, seq.at(n));
    csv << n << ',' << seq.at(n).size() << ',';
    if (n >= 2) {
      const Rational& t = v.tempered[n - 2];
      csv << format_number(to_double(t)) << ',' << to_string(t);
    } else {
      csv << ',';
    }
    csv << ',' << format_number(to_double(defect)) << ',' << to_string(defect) << '\n';
  }
  s.emplace_back("group", cfg.group.name());
  s.emplace_back("folner", folner_name(cfg));
  s.emplace_back("n_max", std::to_string(cfg.n_max));
  std::string k;
  for (const GroupElement& g : cfg.k_set) k += (k.empty() ? "" : ", ") + coords(g);
  s.emplace_back("k_set", k);
  s.emplace_back("identity_in_f1", yes_no(v.identity_ok));
  s.emplace_back("nested", yes_no(v.nesting_ok));
  s.emplace_back("first_nesting_failure", v.first_nesting_failure ? std::to_string(*v.first_nesting_failure) : "");
  s.emplace_back("size_condition", yes_no(v.size_ok));
  s.emplace_back("first_size_failure", v.first_size_failure ? std::to_string(*v.first_size_failure) : "");
  s.emplace_back("max_tempered_constant", v.tempered.empty() ? "" : format_number(to_double(v.max_tempered)));
  s.emplace_back("max_tempered_exact", v.tempered.empty() ? "" : to_string(v.max_tempered));
  s.emplace_back("max_tempered_at", v.tempered.empty() ? "" : std::to_string(v.max_tempered_at));
  bool bound_ok = true;
  if (cfg.tempered_bound) {
    s.emplace_back("tempered_bound", to_string(*cfg.tempered_bound));
    bound_ok = v.tempered.empty() || v.max_tempered <= *cfg.tempered_bound;
  } else {
    s.emplace_back("tempered_bound", "");
  }
  RunResult r;
  r.passed = v.ok() && bound_ok;
  r.csv = csv.str();
  r.summary = std::move(s);
  return r;
}

GroupElement random_element(StreamEngine& engine, GroupTag tag, Coord bound) {
  std::array<Coord, kMaxRank> c{};
  const auto width = static_cast<std::uint64_t>(2 * bound + 1);
  for (int i = 0; i < tag.rank; ++i) {
    c[static_cast<std::size_t>(i)] = static_cast<Coord>(engine() % width) - bound;
  }
  return GroupElement::of(tag, std::span<const Coord>(c.data(), static_cast<std::size_t>(tag.rank)));
}

RunResult cocycle_check(const ExperimentConfig& cfg, Summary s) {
  const RdsModel& model = *cfg.model;
  const DisintegratedMeasure mu(model);
  const PartitionSpec xi = PartitionSpec::zero_coordinate_of_x(model);
  const FiniteSubset window = FiniteSubset::cube(cfg.group, -cfg.window, cfg.window + 1);
  // Invariance enumerates 2^|F| cells; Markov cells need an increasing domain.
  const FiniteSubset cell_domain = model.kind() == ModelKind::kMarkovZ ? FiniteSubset::cube(cfg.group, 0, 4)
                                                                      : FiniteSubset::cube(cfg.group, 0, 2);

  // Check k draws its elements from stream 2k and its point from 2k + 1;
  // invariance checks continue the numbering after the cocycle checks.
  std::ostringstream csv;
  csv << "check,kind,g1,g2,holds\n";
  std::size_t cocycle_pass = 0, invariance_pass = 0;
  for (std::size_t k = 0; k < cfg.checks; ++k) {
    StreamEngine engine = make_engine(cfg.seed, 2 * k);
    const GroupElement g1 = random_element(engine, cfg.group, cfg.element_bound);
    const GroupElement g2 = random_element(engine, cfg.group, cfg.element_bound);
    const SkewPoint p = model.sample_point(stream_seed(cfg.seed, 2 * k + 1));
    const bool ok = check_cocycle(model, g1, g2, p, window);
    cocycle_pass += ok;
    csv << k << ",cocycle," << coords(g1) << ',' << coords(g2) << ',' << yes_no(ok) << '\n';
  }
  for (std::size_t k = 0; k < cfg.invariance_checks; ++k) {
    const std::size_t index = cfg.checks + k;
    StreamEngine engine = make_engine(cfg.seed, 2 * index);
    const GroupElement g = random_element(engine, cfg.group, cfg.element_bound);
    const SymbolicConfiguration omega = model.sample_base(stream_seed(cfg.seed, 2 * index + 1));
    const bool ok = check_invariance(mu, g, omega, xi, cell_domain);
    invariance_pass += ok;
    csv << index << ",invariance," << coords(g) << ",," << yes_no(ok) << '\n';
  }
  s.emplace_back("model", model.describe());
  s.emplace_back("group", cfg.group.name());
  s.emplace_back("exact_parameters", yes_no(model.is_exact()));
  s.emplace_back("window_radius", std::to_string(cfg.window));
  s.emplace_back("element_bound", std::to_string(cfg.element_bound));
  s.emplace_back("cocycle_checks", std::to_string(cfg.checks));
  s.emplace_back("cocycle_passed", std::to_string(cocycle_pass));
  s.emplace_back("invariance_checks", std::to_string(cfg.invariance_checks));
  s.emplace_back("invariance_passed", std::to_string(invariance_pass));
  RunResult r;
  r.passed = cocycle_pass == cfg.checks && invariance_pass == cfg.invariance_checks;
  r.csv = csv.str();
  r.summary = std::move(s);
  return r;
}

std::string both(const Rational& v) { return to_string(v) + " (" + format_number(to_double(v)) + ")"; }

RunResult cover_demo(const ExperimentConfig& cfg, Summary s) {
  const CoverSpec& spec = *cfg.cover;
  const CoverInstance& inst = spec.instance;
  const HypothesisReport hyp = check_hypotheses(inst);
  s.emplace_back("lemma", spec.lemma == CoverLemma::kLem11 ? "lem11" : "lem12");
  s.emplace_back("group", cfg.group.name());
  s.emplace_back("ambient_size", std::to_string(inst.ambient.size()));
  s.emplace_back("delta", to_string(inst.delta));
  s.emplace_back("hypotheses", hyp.pass() ? "pass" : "fail");
  s.emplace_back("hypothesis_failures", hyp.failures());
  s.emplace_back("hypotheses_enforced", yes_no(spec.check_hypotheses));

  RunResult r;
  std::ostringstream csv;
  bool conclusions = false;
  if (spec.check_hypotheses && !hyp.pass()) {
    s.emplace_back("conclusions", "not evaluated");
    csv << "i,j,center\n";
  } else if (spec.lemma == CoverLemma::kLem11) {
    SampleOptions greedy;
    greedy.retention = 1.0;
    greedy.check_hypotheses = false;
    const CoverSolution sol = sample_random_cover(inst, cfg.seed, greedy);
    const Lem11Report rep = verify_lem11(inst, sol);
    csv << "i,j,center\n";
    for (const Selection& sel : sol.selected) csv << sel.i + 1 << ',' << sel.j + 1 << ',' << coords(sel.a) << '\n';
    s.emplace_back("blocks", std::to_string(sol.selected.size()));
    s.emplace_back("covered", std::to_string(sol.covered));
    s.emplace_back("upper_lhs", both(rep.upper_lhs));
    s.emplace_back("middle", both(rep.middle));
    s.emplace_back("lower_rhs", both(rep.lower_rhs));
    s.emplace_back("note", Lem11Report::kNote);
    s.emplace_back("blocks_ok", yes_no(rep.blocks_ok));
    s.emplace_back("upper_holds", yes_no(rep.upper_holds));
    s.emplace_back("lower_holds", yes_no(rep.lower_holds));
    conclusions = rep.pass();
  } else {
    SampleOptions opts;
    opts.retention = spec.retention;
    opts.check_hypotheses = spec.check_hypotheses;
    const auto sols = sample_random_covers(inst, cfg.seed, spec.samples, cfg.workers, opts);
    const Lem12Report rep = verify_lem12(inst, sols);
    csv << "sample,blocks,covered,total_size\n";
    for (std::size_t k = 0; k < sols.size(); ++k) {
      csv << k << ',' << sols[k].selected.size() << ',' << sols[k].covered << ',' << sols[k].total_size << '\n';
    }
    s.emplace_back("samples", std::to_string(rep.samples));
    s.emplace_back("retention", spec.retention ? format_number(*spec.retention) : "");
    s.emplace_back("assessed_points", std::to_string(rep.assessed_points));
    s.emplace_back("max_conditional_mean", format_number(rep.max_conditional_mean));
    s.emplace_back("max_conditional_se", format_number(rep.max_conditional_se));
    s.emplace_back("worst_point", rep.worst_point ? coords(*rep.worst_point) : "");
    s.emplace_back("multiplicity_bound", format_number(rep.multiplicity_bound));
    s.emplace_back("multiplicity_holds", yes_no(rep.multiplicity_holds));
    s.emplace_back("mean_total", format_number(rep.mean_total));
    s.emplace_back("total_se", format_number(rep.total_se));
    s.emplace_back("coverage_bound", format_number(rep.coverage_bound));
    s.emplace_back("coverage_holds", yes_no(rep.coverage_holds));
    s.emplace_back("blocks_ok", yes_no(rep.blocks_ok));
    conclusions = rep.pass();
  }
  const bool outcome = hyp.pass() && conclusions;
  s.emplace_back("outcome", outcome ? "pass" : "fail");
  s.emplace_back("expected", spec.expect_pass ? "pass" : "fail");
  r.passed = outcome == spec.expect_pass;
  r.csv = csv.str();
  r.summary = std::move(s);
  return r;
}

void write_file(const std::string& path, const std::string& content) {
  // Written beside the target and renamed so a failed write leaves no partial file.
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::ios_base::failure("cannot open '" + tmp + "' for writing");
    out << content;
    out.flush();
    if (!out) throw std::ios_base::failure("write to '" + tmp + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw std::ios_base::failure("cannot move output into '" + path + "'");
  }
}

}  // namespace

RunResult execute(const ExperimentConfig& cfg) {
  Summary s;
  s.emplace_back("subcommand", std::string(to_string(cfg.subcommand)));
  s.emplace_back("seed", std::to_string(cfg.seed));
  s.emplace_back("workers", std::to_string(cfg.workers));
  RunResult r;
  switch (cfg.subcommand) {
    case Subcommand::kSmbRun: r = smb_run(cfg, std::move(s)); break;
    case Subcommand::kCondEntropy: r = cond_entropy(cfg, std::move(s)); break;
    case Subcommand::kFolnerCheck: r = folner_check(cfg, std::move(s)); break;
    case Subcommand::kCocycleCheck: r = cocycle_check(cfg, std::move(s)); break;
    case Subcommand::kCoverDemo: r = cover_demo(cfg, std::move(s)); break;
  }
  r.summary.emplace_back("status", r.passed ? "pass" : "fail");
  return r;
}

std::string summary_path(const std::string& output) { return output + ".summary"; }

std::string format_summary(const RunResult& result) {
  std::string out;
  for (const auto& [k, v] : result.summary) out += k + ": " + v + "\n";
  return out;
}

int run(const ExperimentConfig& cfg, std::ostream& err) {
  RunResult result;
  try {
    result = execute(cfg);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  try {
    write_file(summary_path(cfg.output), format_summary(result));
    if (result.passed) write_file(cfg.output, result.csv);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
  if (!result.passed) {
    err << "assertion failed; see " << summary_path(cfg.output) << '\n';
    return kExitAssertion;
  }
  return kExitOk;
}

}  // namespace rdsmb::cli
