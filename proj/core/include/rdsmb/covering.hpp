#pragma once

// Constructive versions of the two covering lemmas used in the SMB proof.
//
// lem11 (greedy): shapes Fbar_1..Fbar_M with
//     |union_{j<=i} Fbar_j^-1 Fbar_{i+1}| < (1 + eps) |Fbar_{i+1}|,
//   centres A_i with Fbar_i A_i inside F. Conclusion checked per instance:
//     (1 + delta) |union B| >= sum |B| >= min_i |A_i| - delta |F|.
//
// lem12 (random): shapes Fbar_{i,j}, centres A_{i,j}, a set K and alpha with
//     |union_j K A_{i,j}| >= alpha |F| for every i.
//   Conclusions, estimated over many seeded samples:
//     E(Lambda(g) | Lambda(g) > 0) < 1 + delta for every g in F,
//     E(sum |B|) > (alpha - delta) |F|.
//
// The preorder (i', k') <= (i, k) of the lem12 hypotheses is lexicographic.
// Shapes and centres are indexed from 0 here; reports print 1-based indices.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rdsmb/group.hpp"
#include "rdsmb/rational.hpp"

namespace rdsmb {

enum class CoverLemma { kLem11, kLem12 };

struct CoverInstance {
  CoverLemma lemma = CoverLemma::kLem11;
  GroupTag tag;
  // shapes[i][j] and centers[i][j]; lem11 instances have one shape per level.
  std::vector<std::vector<FiniteSubset>> shapes;
  std::vector<std::vector<FiniteSubset>> centers;
  FiniteSubset ambient;
  Rational delta = Rational(1, 10);
  Rational epsilon = Rational(1, 2);
  Rational c = 2;
  Rational alpha = 0;
  FiniteSubset k_set;

  // Convenience for lem11: one shape and one centre set per level.
  static CoverInstance lem11(GroupTag tag, std::vector<FiniteSubset> shapes,
                             std::vector<FiniteSubset> centers, FiniteSubset ambient, Rational delta,
                             Rational epsilon);
};

struct HypothesisCheck {
  std::string name;
  Rational lhs = 0;
  Rational rhs = 0;
  bool holds = false;
};

struct HypothesisReport {
  std::vector<HypothesisCheck> checks;
  bool pass() const;
  // Names of the failing checks, comma separated.
  std::string failures() const;
};

HypothesisReport check_hypotheses(const CoverInstance& inst);

struct Selection {
  std::size_t i = 0;
  std::size_t j = 0;
  GroupElement a;

  friend bool operator==(const Selection&, const Selection&) = default;
};

struct CoverSolution {
  std::vector<Selection> selected;  // B(i, j, a) = Fbar_{i,j} a; unlisted centres give the empty set
  std::size_t covered = 0;          // |union B|
  std::size_t total_size = 0;       // sum |B|
  // lambda[k] = number of chosen blocks containing ambient[k].
  std::vector<std::uint32_t> lambda;

  friend bool operator==(const CoverSolution&, const CoverSolution&) = default;
};

// Processes shapes in decreasing (i, j); scans centres in lexicographic order
// and keeps Fbar a when it meets the covered region in at most delta |Fbar|
// points and (1 + delta) |union B| >= sum |B| still holds afterwards.
// Throws kHypothesisFailure unless check_hypotheses passes.
CoverSolution greedy_cover(const CoverInstance& inst);

// Lambda rebuilt from `selected` alone; must equal sol.lambda.
std::vector<std::uint32_t> recompute_multiplicity(const CoverInstance& inst, const CoverSolution& sol);

struct Lem11Report {
  // Lower bound as printed: min_i |A_i| - delta |F|, not a coverage fraction.
  static constexpr const char* kNote =
      "lower bound evaluated as min_i |A_i| - delta |F| (count form, not a coverage fraction)";
  Rational upper_lhs = 0;  // (1 + delta) |union B|
  Rational middle = 0;     // sum |B|
  Rational lower_rhs = 0;  // min_i |A_i| - delta |F|
  bool blocks_ok = false;  // every block is a translate of its shape inside F, Lambda consistent
  bool upper_holds = false;
  bool lower_holds = false;
  bool pass() const { return blocks_ok && upper_holds && lower_holds; }
};

Lem11Report verify_lem11(const CoverInstance& inst, const CoverSolution& sol);

struct SampleOptions {
  // Forces every centre's retention probability (1.0 reduces to greedy).
  std::optional<double> retention;
  // Negative controls run on instances that violate a hypothesis on purpose.
  bool check_hypotheses = true;
};

// Randomised cover. Before shape (i, j) the retention probability is
//     q = min(1, delta * gap / (|Fbar_{i,j}| |A_{i,j}|)),  gap = max(0, alpha |F| - |covered|),
// each centre is kept independently with probability q (one uniform per
// centre, drawn in scan order), and kept centres are thinned as in
// greedy_cover. A pure function of (instance, seed).
CoverSolution sample_random_cover(const CoverInstance& inst, std::uint64_t seed,
                                  const SampleOptions& options = {});

// Sample k uses seed stream_seed(seed, k).
std::vector<CoverSolution> sample_random_covers(const CoverInstance& inst, std::uint64_t seed,
                                                std::size_t count, std::size_t workers = 1,
                                                const SampleOptions& options = {});

inline constexpr std::size_t kMinLem12Samples = 100;

struct Lem12Report {
  std::size_t samples = 0;
  // Conclusion 2: worst point by conditional mean of Lambda given Lambda > 0.
  // Points hit in fewer than two samples carry no error bar and are skipped.
  std::size_t assessed_points = 0;
  double max_conditional_mean = 0.0;
  double max_conditional_se = 0.0;
  std::optional<GroupElement> worst_point;
  double multiplicity_bound = 0.0;  // 1 + delta
  bool multiplicity_holds = false;  // no point with mean - 3 se >= 1 + delta
  // Conclusion 3.
  double mean_total = 0.0;
  double total_se = 0.0;
  double coverage_bound = 0.0;      // (alpha - delta) |F|
  bool coverage_holds = false;      // mean + 3 se > bound
  bool blocks_ok = false;
  bool pass() const { return blocks_ok && multiplicity_holds && coverage_holds; }
};

Lem12Report verify_lem12(const CoverInstance& inst, const std::vector<CoverSolution>& samples);

}  // namespace rdsmb
