#pragma once

// Information functions and fiber entropy for the zero-coordinate partition,
// plus the two convergence experiments:
//
//   smb_trace                  (1/|F_n|) I_{mu_omega}(xi^{F_n}_omega)(x), averaged over
//                              independent (omega, x)
//   conditional_entropy_trace  integral of H_{mu_omega}(xi | xi^{F_n \ {e}}) dP
//
// All logarithms are natural.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rdsmb/fibered_measure.hpp"
#include "rdsmb/folner.hpp"
#include "rdsmb/rds.hpp"

namespace rdsmb {

struct TraceRow {
  std::size_t n = 0;
  std::size_t folner_size = 0;
  double estimate = 0.0;
  std::optional<double> target;
  std::optional<double> std_error;

  std::optional<double> abs_error() const;
};

struct ConvergenceTrace {
  std::vector<TraceRow> rows;

  void add(TraceRow row);  // enforces increasing n
};

inline constexpr const char* kTraceCsvHeader = "n,folner_size,estimate,target,abs_error,std_error";

// Header line plus one line per row; %.12g, empty fields for absent values.
void write_csv(std::ostream& os, const ConvergenceTrace& trace);
std::string format_number(double v);

enum class EntropyMethod { kPointwiseSmb, kConditionalEntropy, kExactEnumeration };
std::string_view to_string(EntropyMethod m);

struct EntropyReport {
  std::string model;
  std::string partition;
  double closed_form = 0.0;
  EntropyMethod method = EntropyMethod::kPointwiseSmb;
  std::vector<double> estimates;
};

EntropyReport make_report(const RdsModel& model, const PartitionSpec& xi, EntropyMethod method,
                          const ConvergenceTrace& trace);

// -sum p ln p, 0 ln 0 = 0. Entries must be >= 0 and sum to 1 within 1e-12.
double shannon_entropy(std::span<const double> p);

// -ln mu_omega(xi^F_omega(x)). Throws kInfiniteInformation on a null cell.
double information(const DisintegratedMeasure& mu, const PartitionSpec& xi, const FiniteSubset& f,
                   const SkewPoint& p);

// -ln [ mu_omega(xi^{{e} u C}_omega(x)) / mu_omega(xi^C_omega(x)) ], e not in C.
double conditional_information(const DisintegratedMeasure& mu, const PartitionSpec& xi,
                               const FiniteSubset& cond_set, const SkewPoint& p);

struct ChainRuleResult {
  double information = 0.0;      // left side, I(xi^F)
  double telescoped = 0.0;       // sum of the conditional terms
  std::vector<double> terms;     // term m for g_m
  double residual = 0.0;
};

// Telescoping identity along the enumeration g_1..g_k of F:
//   I(xi^F)(p) = sum_m I(xi | xi^{C_m})(Theta_{g_m} p),  C_m = {g_{m+1},..,g_k} g_m^{-1}.
ChainRuleResult chain_rule_check(const DisintegratedMeasure& mu, const PartitionSpec& xi,
                                 std::span<const GroupElement> order, const SkewPoint& p);

struct ChainRuleSweep {
  std::size_t orders = 0;
  double max_residual = 0.0;
  double total_spread = 0.0;  // max - min of the telescoped total over orders
};

// chain_rule_check over every enumeration order of F (|F| <= 10). Terms are
// shared between orders, so this costs 2^|F| |F| evaluations plus |F|! sums.
ChainRuleSweep chain_rule_all_orders(const DisintegratedMeasure& mu, const PartitionSpec& xi,
                                     const FiniteSubset& f, const SkewPoint& p);

// H(p); sum_b P(b) H(p^(b)); or -sum_i pi_i sum_j P_ij ln P_ij.
double fiber_entropy_closed_form(const RdsModel& model, const PartitionSpec& xi);

struct SmbOptions {
  std::size_t trajectories = 100;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

// Trajectory t uses the point model.sample_point(stream_seed(seed, t)) for
// every n, so each trajectory is one pointwise SMB path.
ConvergenceTrace smb_trace(const DisintegratedMeasure& mu, const PartitionSpec& xi,
                           const FolnerSequence& seq, const SmbOptions& options);

struct ConditionalEntropyOptions {
  // Base draws for exact enumeration over a base-dependent model, or (omega, x)
  // draws for the Monte Carlo fallback.
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  bool allow_monte_carlo = true;
};

// Exact (H(xi^{F_n}) - H(xi^{F_n \ {e}}), averaged over base draws when mu_omega
// depends on omega) while |atoms|^|F_n| <= kMaxEnumeration, Monte Carlo over
// conditional_information beyond that.
ConvergenceTrace conditional_entropy_trace(const DisintegratedMeasure& mu, const PartitionSpec& xi,
                                           const FolnerSequence& seq,
                                           const ConditionalEntropyOptions& options);

}  // namespace rdsmb
