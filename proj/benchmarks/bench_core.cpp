#include <benchmark/benchmark.h>

#include "rdsmb/covering.hpp"
#include "rdsmb/entropy.hpp"
#include "rdsmb/folner.hpp"

using namespace rdsmb;

namespace {

Distribution exact(std::initializer_list<const char*> p) {
  std::vector<Rational> v;
  for (const char* s : p) v.push_back(parse_rational(s));
  return Distribution::exact(std::move(v));
}

// Heisenberg boxes take the general row-convolution path.
void BM_ProductSetHeisenberg(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const FiniteSubset f = heisenberg_folner(n).at(static_cast<std::size_t>(n));
  const FiniteSubset k = FiniteSubset::cube(GroupTag::heisenberg(), -1, 2);
  for (auto _ : state) benchmark::DoNotOptimize(product_set(k, f).size());
  state.SetLabel("|F|=" + std::to_string(f.size()));
}
BENCHMARK(BM_ProductSetHeisenberg)->Arg(4)->Arg(8)->Arg(12);

// A box with a corner removed is not a box, so Z^2 also falls back.
void BM_ProductSetZ2Irregular(benchmark::State& state) {
  const GroupTag z2 = GroupTag::zd(2);
  const Coord n = state.range(0);
  const FiniteSubset f = set_difference(FiniteSubset::cube(z2, 0, n), FiniteSubset::singleton(GroupElement::of(z2, {0, 0})));
  const FiniteSubset k = FiniteSubset::cube(z2, -n / 2, n / 2);
  for (auto _ : state) benchmark::DoNotOptimize(product_set(k, f).size());
}
BENCHMARK(BM_ProductSetZ2Irregular)->Arg(16)->Arg(64);

void BM_FolnerDefectZ3(benchmark::State& state) {
  const GroupTag z3 = GroupTag::zd(3);
  const Coord n = state.range(0);
  const FiniteSubset f = FiniteSubset::cube(z3, 0, n);
  const FiniteSubset k = FiniteSubset::cube(z3, 0, 2);
  for (auto _ : state) benchmark::DoNotOptimize(folner_defect(k, f));
}
BENCHMARK(BM_FolnerDefectZ3)->Arg(16)->Arg(64);

void BM_SmbTraceBernoulliZ2(benchmark::State& state) {
  const RdsModel m = RdsModel::trivial_base_bernoulli(GroupTag::zd(2), exact({"0.7", "0.3"}));
  const DisintegratedMeasure mu(m);
  const PartitionSpec xi = PartitionSpec::zero_coordinate_of_x(m);
  const FolnerSequence seq = box_folner(2, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(smb_trace(mu, xi, seq, {10, 1, 1}).rows.size());
}
BENCHMARK(BM_SmbTraceBernoulliZ2)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_InformationMarkov(benchmark::State& state) {
  const RdsModel m = RdsModel::markov_z({exact({"0.9", "0.1"}), exact({"0.2", "0.8"})});
  const DisintegratedMeasure mu(m);
  const PartitionSpec xi = PartitionSpec::zero_coordinate_of_x(m);
  const FiniteSubset f = FiniteSubset::cube(GroupTag::zd(1), 0, state.range(0));
  const SkewPoint p = m.sample_point(9);
  for (auto _ : state) benchmark::DoNotOptimize(information(mu, xi, f, p));
}
BENCHMARK(BM_InformationMarkov)->Arg(1024)->Arg(8192);

void BM_Lem12Samples(benchmark::State& state) {
  const GroupTag z1 = GroupTag::zd(1);
  CoverInstance inst;
  inst.lemma = CoverLemma::kLem12;
  inst.tag = z1;
  inst.shapes = {{FiniteSubset::box(z1, {0}, {4})}, {FiniteSubset::box(z1, {0}, {16})}};
  inst.centers = {{FiniteSubset::box(z1, {0}, {61})}, {FiniteSubset::box(z1, {0}, {49})}};
  inst.ambient = FiniteSubset::box(z1, {0}, {64});
  inst.k_set = FiniteSubset::box(z1, {-15}, {1});
  inst.delta = Rational(1, 2);
  inst.alpha = 1;
  for (auto _ : state) benchmark::DoNotOptimize(sample_random_covers(inst, 3, 1000).size());
}
BENCHMARK(BM_Lem12Samples)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
