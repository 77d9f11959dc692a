#include "rdsmb/covering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rdsmb/errors.hpp"
#include "rdsmb/parallel.hpp"
#include "rdsmb/rng.hpp"

namespace rdsmb {
namespace {

Rational count(std::size_t n) { return Rational(static_cast<long long>(n)); }

std::string pair_label(std::size_t i, std::size_t j) {
  return "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
}

void require_shape(const CoverInstance& inst) {
  if (inst.shapes.size() != inst.centers.size()) {
    throw Error(ErrorKind::kInvalidArgument, "cover instance needs one centre set per shape");
  }
  for (std::size_t i = 0; i < inst.shapes.size(); ++i) {
    if (inst.shapes[i].size() != inst.centers[i].size()) {
      throw Error(ErrorKind::kInvalidArgument, "cover instance needs one centre set per shape");
    }
    if (inst.shapes[i].empty()) throw Error(ErrorKind::kInvalidArgument, "every level needs a shape");
    if (inst.lemma == CoverLemma::kLem11 && inst.shapes[i].size() != 1) {
      throw Error(ErrorKind::kInvalidArgument, "lem11 instances have one shape per level");
    }
  }
}

// Ambient indices of every candidate block, shapes in processing order.
struct ShapePlan {
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t shape_size = 0;
  std::vector<GroupElement> centers;
  std::vector<std::vector<std::uint32_t>> blocks;
};

std::vector<ShapePlan> make_plan(const CoverInstance& inst) {
  require_shape(inst);
  std::vector<ShapePlan> plan;
  for (std::size_t i = inst.shapes.size(); i-- > 0;) {
    for (std::size_t j = inst.shapes[i].size(); j-- > 0;) {
      ShapePlan sp;
      sp.i = i;
      sp.j = j;
      sp.shape_size = inst.shapes[i][j].size();
      for (const GroupElement& a : inst.centers[i][j]) {
        std::vector<std::uint32_t> block;
        block.reserve(sp.shape_size);
        for (const GroupElement& g : translate(inst.shapes[i][j], a)) {
          const std::size_t k = inst.ambient.index_of(g);
          if (k == inst.ambient.size()) {
            throw Error(ErrorKind::kHypothesisFailure,
                        "translate of shape " + pair_label(i, j) + " escapes the ambient set");
          }
          block.push_back(static_cast<std::uint32_t>(k));
        }
        sp.centers.push_back(a);
        sp.blocks.push_back(std::move(block));
      }
      plan.push_back(std::move(sp));
    }
  }
  return plan;
}

class Builder {
 public:
  explicit Builder(const CoverInstance& inst) : inst_(inst), one_plus_delta_(1 + inst.delta) {
    sol_.lambda.assign(inst.ambient.size(), 0);
  }

  // Thinning rule shared by greedy and random covers.
  bool offer(const ShapePlan& sp, std::size_t c) {
    const auto& block = sp.blocks[c];
    std::size_t overlap = 0;
    for (std::uint32_t k : block) overlap += sol_.lambda[k] > 0;
    if (count(overlap) > inst_.delta * count(block.size())) return false;
    const std::size_t covered = sol_.covered + block.size() - overlap;
    const std::size_t total = sol_.total_size + block.size();
    if (one_plus_delta_ * count(covered) < count(total)) return false;
    for (std::uint32_t k : block) ++sol_.lambda[k];
    sol_.covered = covered;
    sol_.total_size = total;
    sol_.selected.push_back({sp.i, sp.j, sp.centers[c]});
    return true;
  }

  std::size_t covered() const { return sol_.covered; }
  CoverSolution take() { return std::move(sol_); }

 private:
  const CoverInstance& inst_;
  Rational one_plus_delta_;
  CoverSolution sol_;
};

void require_hypotheses(const CoverInstance& inst) {
  const HypothesisReport r = check_hypotheses(inst);
  if (!r.pass()) throw Error(ErrorKind::kHypothesisFailure, "cover hypotheses fail: " + r.failures());
}

CoverSolution sample_with_plan(const CoverInstance& inst, const std::vector<ShapePlan>& plan,
                               std::uint64_t seed, const SampleOptions& options) {
  StreamEngine engine = make_engine(seed, 0);
  Builder b(inst);
  const double target = to_double(inst.alpha) * static_cast<double>(inst.ambient.size());
  const double delta = to_double(inst.delta);
  for (const ShapePlan& sp : plan) {
    double q = 0.0;
    if (options.retention) {
      q = *options.retention;
    } else if (!sp.centers.empty()) {
      const double gap = std::max(0.0, target - static_cast<double>(b.covered()));
      q = std::min(1.0, delta * gap /
                            (static_cast<double>(sp.shape_size) * static_cast<double>(sp.centers.size())));
    }
    for (std::size_t c = 0; c < sp.centers.size(); ++c) {
      const double u = next_unit(engine);
      if (u < q) b.offer(sp, c);
    }
  }
  return b.take();
}

// Checks that every selection names a real centre once, that each block lies
// in F, and that the stored tallies match a fresh recount.
bool blocks_consistent(const CoverInstance& inst, const CoverSolution& sol) {
  std::vector<Selection> seen;
  std::size_t total = 0;
  for (const Selection& s : sol.selected) {
    if (s.i >= inst.shapes.size() || s.j >= inst.shapes[s.i].size()) return false;
    if (!inst.centers[s.i][s.j].contains(s.a)) return false;
    for (const Selection& t : seen) {
      if (t.i == s.i && t.j == s.j && t.a == s.a) return false;
    }
    seen.push_back(s);
    const FiniteSubset block = translate(inst.shapes[s.i][s.j], s.a);
    if (!block.is_subset_of(inst.ambient)) return false;
    total += block.size();
  }
  const std::vector<std::uint32_t> lambda = recompute_multiplicity(inst, sol);
  const auto covered = static_cast<std::size_t>(
      std::count_if(lambda.begin(), lambda.end(), [](std::uint32_t v) { return v > 0; }));
  return lambda == sol.lambda && covered == sol.covered && total == sol.total_size;
}

}  // namespace

CoverInstance CoverInstance::lem11(GroupTag tag, std::vector<FiniteSubset> shapes,
                                   std::vector<FiniteSubset> centers, FiniteSubset ambient,
                                   Rational delta, Rational epsilon) {
  CoverInstance inst;
  inst.lemma = CoverLemma::kLem11;
  inst.tag = tag;
  for (auto& s : shapes) inst.shapes.push_back({std::move(s)});
  for (auto& a : centers) inst.centers.push_back({std::move(a)});
  inst.ambient = std::move(ambient);
  inst.delta = std::move(delta);
  inst.epsilon = std::move(epsilon);
  return inst;
}

bool HypothesisReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const HypothesisCheck& c) { return c.holds; });
}

std::string HypothesisReport::failures() const {
  std::string out;
  for (const HypothesisCheck& c : checks) {
    if (c.holds) continue;
    if (!out.empty()) out += ", ";
    out += c.name;
  }
  return out;
}

HypothesisReport check_hypotheses(const CoverInstance& inst) {
  require_shape(inst);
  HypothesisReport r;
  auto add = [&r](std::string name, Rational lhs, Rational rhs, bool holds) {
    r.checks.push_back({std::move(name), std::move(lhs), std::move(rhs), holds});
  };
  const bool lem12 = inst.lemma == CoverLemma::kLem12;

  add("delta in (0,1)", inst.delta, 1, inst.delta > 0 && inst.delta < 1);
  add("epsilon in (0,1)", inst.epsilon, 1, inst.epsilon > 0 && inst.epsilon < 1);
  if (lem12) {
    add("C > 0", inst.c, 0, inst.c > 0);
    add("K non-empty", count(inst.k_set.size()), 1, !inst.k_set.empty());
  }

  for (std::size_t i = 0; i < inst.shapes.size(); ++i) {
    for (std::size_t j = 0; j < inst.shapes[i].size(); ++j) {
      require_same_group(inst.tag, inst.shapes[i][j].tag());
      require_same_group(inst.tag, inst.centers[i][j].tag());
      std::size_t escaping = 0;
      for (const GroupElement& a : inst.centers[i][j]) {
        if (!inst.ambient.contains(a) || !translate(inst.shapes[i][j], a).is_subset_of(inst.ambient)) {
          ++escaping;
        }
      }
      add("containment " + pair_label(i, j), count(escaping), 0, escaping == 0);
    }
  }

  // Growth conditions. `inverses` is the union of Fbar^-1 over all shapes up
  // to the current one in lexicographic order.
  FiniteSubset inverses(inst.tag);
  for (std::size_t i = 0; i < inst.shapes.size(); ++i) {
    const auto& level = inst.shapes[i];
    for (std::size_t k = 0; k < level.size(); ++k) {
      inverses = set_union(inverses, inverse_set(level[k]));
      if (lem12 && k + 1 < level.size()) {
        const Rational lhs = count(product_set_size(inverses, level[k + 1]));
        const Rational rhs = inst.c * count(level[k + 1].size());
        add("tempered " + pair_label(i, k + 1), lhs, rhs, lhs <= rhs);
      }
    }
    if (i + 1 == inst.shapes.size()) break;
    for (std::size_t k = 0; k < inst.shapes[i + 1].size(); ++k) {
      const FiniteSubset& next = inst.shapes[i + 1][k];
      const Rational lhs = count(product_set_size(inverses, next));
      const Rational rhs = (1 + inst.epsilon) * count(next.size());
      // lem11 states this strictly, lem12 with <=.
      add("growth " + pair_label(i + 1, k), lhs, rhs, lem12 ? lhs <= rhs : lhs < rhs);
    }
  }

  if (lem12) {
    for (std::size_t i = 0; i < inst.centers.size(); ++i) {
      FiniteSubset reach(inst.tag);
      for (const FiniteSubset& a : inst.centers[i]) reach = set_union(reach, product_set(inst.k_set, a));
      const Rational lhs = count(reach.size());
      const Rational rhs = inst.alpha * count(inst.ambient.size());
      add("alpha coverage level " + std::to_string(i + 1), lhs, rhs, lhs >= rhs);
    }
  }
  return r;
}

CoverSolution greedy_cover(const CoverInstance& inst) {
  require_hypotheses(inst);
  const std::vector<ShapePlan> plan = make_plan(inst);
  Builder b(inst);
  for (const ShapePlan& sp : plan) {
    for (std::size_t c = 0; c < sp.centers.size(); ++c) b.offer(sp, c);
  }
  return b.take();
}

std::vector<std::uint32_t> recompute_multiplicity(const CoverInstance& inst, const CoverSolution& sol) {
  std::vector<std::uint32_t> lambda(inst.ambient.size(), 0);
  for (const Selection& s : sol.selected) {
    for (const GroupElement& g : translate(inst.shapes.at(s.i).at(s.j), s.a)) {
      const std::size_t k = inst.ambient.index_of(g);
      if (k < lambda.size()) ++lambda[k];
    }
  }
  return lambda;
}

Lem11Report verify_lem11(const CoverInstance& inst, const CoverSolution& sol) {
  require_shape(inst);
  Lem11Report r;
  r.blocks_ok = blocks_consistent(inst, sol);
  r.upper_lhs = (1 + inst.delta) * count(sol.covered);
  r.middle = count(sol.total_size);
  std::size_t min_centers = std::numeric_limits<std::size_t>::max();
  for (const auto& level : inst.centers) {
    for (const FiniteSubset& a : level) min_centers = std::min(min_centers, a.size());
  }
  if (min_centers == std::numeric_limits<std::size_t>::max()) min_centers = 0;
  r.lower_rhs = count(min_centers) - inst.delta * count(inst.ambient.size());
  r.upper_holds = r.upper_lhs >= r.middle;
  r.lower_holds = r.middle >= r.lower_rhs;
  return r;
}

CoverSolution sample_random_cover(const CoverInstance& inst, std::uint64_t seed,
                                  const SampleOptions& options) {
  if (options.check_hypotheses) require_hypotheses(inst);
  return sample_with_plan(inst, make_plan(inst), seed, options);
}

std::vector<CoverSolution> sample_random_covers(const CoverInstance& inst, std::uint64_t seed,
                                                std::size_t count, std::size_t workers,
                                                const SampleOptions& options) {
  if (options.check_hypotheses) require_hypotheses(inst);
  const std::vector<ShapePlan> plan = make_plan(inst);
  std::vector<CoverSolution> out(count);
  parallel_for(count, workers, [&](std::size_t k) {
    out[k] = sample_with_plan(inst, plan, stream_seed(seed, k), options);
  });
  return out;
}

Lem12Report verify_lem12(const CoverInstance& inst, const std::vector<CoverSolution>& samples) {
  require_shape(inst);
  if (samples.size() < kMinLem12Samples) {
    throw Error(ErrorKind::kTooFewSamples, "verify_lem12 needs at least " +
                                               std::to_string(kMinLem12Samples) + " samples");
  }
  Lem12Report r;
  r.samples = samples.size();
  r.blocks_ok = std::all_of(samples.begin(), samples.end(),
                            [&](const CoverSolution& s) { return blocks_consistent(inst, s); });

  const std::size_t points = inst.ambient.size();
  std::vector<std::size_t> hits(points, 0);
  std::vector<double> sum(points, 0.0), sum_sq(points, 0.0);
  std::vector<double> totals;
  totals.reserve(samples.size());
  for (const CoverSolution& s : samples) {
    for (std::size_t k = 0; k < points && k < s.lambda.size(); ++k) {
      if (s.lambda[k] == 0) continue;
      const double v = s.lambda[k];
      ++hits[k];
      sum[k] += v;
      sum_sq[k] += v * v;
    }
    totals.push_back(static_cast<double>(s.total_size));
  }

  r.multiplicity_bound = 1.0 + to_double(inst.delta);
  r.multiplicity_holds = true;
  for (std::size_t k = 0; k < points; ++k) {
    if (hits[k] < 2) continue;
    ++r.assessed_points;
    const double n = static_cast<double>(hits[k]);
    const double mean = sum[k] / n;
    const double var = std::max(0.0, (sum_sq[k] - n * mean * mean) / (n - 1.0));
    const double se = std::sqrt(var / n);
    if (!r.worst_point || mean > r.max_conditional_mean) {
      r.max_conditional_mean = mean;
      r.max_conditional_se = se;
      r.worst_point = inst.ambient[k];
    }
    if (mean - 3.0 * se >= r.multiplicity_bound) r.multiplicity_holds = false;
  }

  const double n = static_cast<double>(totals.size());
  double acc = 0.0;
  for (double t : totals) acc += t;
  r.mean_total = acc / n;
  double ss = 0.0;
  for (double t : totals) ss += (t - r.mean_total) * (t - r.mean_total);
  r.total_se = std::sqrt(ss / (n - 1.0) / n);
  r.coverage_bound = to_double((inst.alpha - inst.delta) * count(points));
  r.coverage_holds = r.mean_total + 3.0 * r.total_se > r.coverage_bound;
  return r;
}

}  // namespace rdsmb
