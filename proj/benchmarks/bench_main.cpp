#include <benchmark/benchmark.h>

#include "icmaxent/model.hpp"
#include "icmaxent/solver.hpp"
#include "icmaxent/synth.hpp"

using namespace icmaxent;

namespace {

GraphSpec structure(std::size_t d) {
  VarSet all = all_vars(d);
  return GraphSpec(d, {}, {VarSet(all.begin(), all.begin() + 2)});
}

std::vector<ConstraintSpec> single_conditionals(const ScmInstance& scm) {
  std::vector<ConstraintSpec> out;
  for (std::uint32_t i = 0; i < scm.n_causes(); ++i) {
    const Config one{{VarId{i}}, {1}};
    const Config zero{{VarId{i}}, {0}};
    out.push_back(ConstraintSpec::conditional(
        {VarId{i}}, {exact_query(scm, Config{}, zero), exact_query(scm, Config{}, one)}));
  }
  return out;
}

}  // namespace

static void BM_Normalize(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto scm = sample_scm(structure(d), 1);
  const auto cs = single_conditionals(scm);
  const MultiplierVector lambda{std::vector<double>(2 * d, 0.3)};
  for (auto _ : state) benchmark::DoNotOptimize(normalize(d, cs, lambda));
}
BENCHMARK(BM_Normalize)->DenseRange(4, 16, 4);

static void BM_Fit(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto scm = sample_scm(structure(d), 2);
  const auto cs = single_conditionals(scm);
  const auto p = exact_joint_X(scm);
  const GraphSpec g(d, {});
  for (auto _ : state) benchmark::DoNotOptimize(fit(cs, p, g));
}
BENCHMARK(BM_Fit)->DenseRange(3, 9, 2);

static void BM_ExactQuery(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto scm = sample_scm(structure(d), 3);
  const Config c{{VarId{0}}, {1}};
  for (auto _ : state) benchmark::DoNotOptimize(exact_query(scm, c, Config{}));
}
BENCHMARK(BM_ExactQuery)->DenseRange(3, 11, 4);
BENCHMARK_MAIN();
