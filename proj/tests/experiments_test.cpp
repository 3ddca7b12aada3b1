#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "bench/experiments.hpp"
#include "icmaxent/errors.hpp"
#include "icmaxent/identify.hpp"

using namespace icmaxent;
using namespace icmaxent::bench;

namespace {

ExperimentConfig small_config(char structure, std::size_t graphs = 3) {
  ExperimentConfig c;
  c.structure = default_structure(structure);
  c.n_graphs = graphs;
  c.n_samples = 100;
  c.seed = 17;
  return c;
}

// Counts what a pipeline asks of the system.
class CountingSource : public SampleSource {
 public:
  explicit CountingSource(const ScmInstance& scm) : inner_(scm) {}
  std::size_t n_causes() const override { return inner_.n_causes(); }
  Dataset observe(std::size_t n, std::uint64_t seed) const override {
    ++observe_calls;
    return inner_.observe(n, seed);
  }
  Dataset intervene(const Intervention& iv, std::size_t n, std::uint64_t seed) const override {
    ++intervene_calls;
    return inner_.intervene(iv, n, seed);
  }
  JointTable joint_x() const override {
    ++joint_calls;
    return inner_.joint_x();
  }
  mutable int observe_calls = 0;
  mutable int intervene_calls = 0;
  mutable int joint_calls = 0;

 private:
  ScmSource inner_;
};

}  // namespace

TEST(Structures, Defaults) {
  EXPECT_EQ(default_structure('a').confounders().size(), 2u);
  EXPECT_EQ(default_structure('b').confounders().size(), 1u);
  EXPECT_EQ(default_structure('c').directed_edges().size(), 1u);
  EXPECT_THROW(default_structure('d'), DomainError);
  EXPECT_EQ(admissible_pool(default_structure('a')).size(), 5u);
  EXPECT_EQ(admissible_pool(default_structure('c')), make_varset({1, 2, 3, 4}));
  EXPECT_EQ(parse_px_mode("marginals"), PxMode::marginals);
  EXPECT_THROW(parse_px_mode("guess"), DomainError);
}

TEST(ObservationalPx, MarginalsModeIsProductOfExactMarginals) {
  const auto scm = sample_scm(default_structure('b'), 5);
  const ScmSource src(scm);
  const auto exact = observational_px(src, PxMode::exact);
  const auto prod = observational_px(src, PxMode::marginals);
  for (std::uint32_t i = 0; i < 5; ++i) {
    EXPECT_NEAR(prod.marginal(make_varset({i}))[1], exact.marginal(make_varset({i}))[1], 1e-12);
  }
  const auto p01 = prod.marginal(make_varset({0, 1}));
  EXPECT_NEAR(p01[3], prod.marginal(make_varset({0}))[1] * prod.marginal(make_varset({1}))[1], 1e-12);
}

TEST(Factory, CachesDatasets) {
  const auto scm = sample_scm(default_structure('a'), 6);
  const CountingSource src(scm);
  ConstraintFactory f(src, 200, 3);
  const auto a = f.interventional(make_varset({2}));
  const auto b = f.interventional(make_varset({2}));
  EXPECT_EQ(a, b);
  EXPECT_EQ(src.intervene_calls, 2);
  const auto c = f.conditional(make_varset({0}));
  const auto d = f.conditional(make_varset({1}));
  EXPECT_EQ(c, f.conditional(make_varset({0})));
  EXPECT_EQ(src.observe_calls, 1);
  EXPECT_EQ(d.kind, ConstraintKind::conditional);
}

TEST(SingleVariable, GateFallsBackToConditional) {
  const auto scm = sample_scm(default_structure('c'), 7);
  const ScmSource src(scm);
  ConstraintFactory f(src, 100, 1);
  const auto structure = default_structure('c');
  const auto gated = single_variable_constraints(f, structure, all_vars(5), false);
  ASSERT_EQ(gated.size(), 5u);
  EXPECT_EQ(gated[0].kind, ConstraintKind::conditional);
  for (std::size_t i = 1; i < 5; ++i) EXPECT_EQ(gated[i].kind, ConstraintKind::interventional);
  const auto forced = single_variable_constraints(f, structure, all_vars(5), true);
  EXPECT_EQ(forced[0].kind, ConstraintKind::interventional);
}

TEST(Setting1, RowCountsAndLabels) {
  const auto rows = run_setting1(small_config('a'));
  EXPECT_EQ(rows.size(), 3u * 5u * 4u);
  for (const auto& r : rows) {
    EXPECT_GE(r.theta, 0.0);
    EXPECT_LE(r.theta, 1.0);
    EXPECT_LT(r.graph_id, 3u);
  }
  const auto parents = std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.is_parent; });
  EXPECT_GT(parents, 0);
  EXPECT_LT(parents, static_cast<long>(rows.size()));
}

TEST(Setting2, RowCounts) {
  EXPECT_EQ(run_setting2(small_config('a')).size(), 3u * 5u * 6u);
  EXPECT_EQ(run_setting2(small_config('c')).size(), 3u * 5u * 5u);
}

TEST(Joint, RowCountsAndUniformScenario) {
  const auto rows = run_joint(small_config('c'));
  EXPECT_EQ(rows.size(), 3u * 5u * 4u);
  for (const auto& r : rows) {
    EXPECT_NEAR(r.residual, r.estimated - r.truth, 1e-15);
    if (r.scenario == 5) EXPECT_DOUBLE_EQ(r.estimated, 0.5);
  }
}

TEST(Joint, RefusesUnidentifiableQuery) {
  auto config = small_config('a', 1);
  config.structure = GraphSpec(5, {{VarId{1}, VarId{2}}});
  EXPECT_THROW(run_joint(config), IdentifiabilityError);
  config.solver.allow_unidentifiable = true;
  EXPECT_EQ(run_joint(config).size(), 20u);
}

TEST(Csv, HeadersAndDeterminism) {
  const auto config = small_config('b', 2);
  std::ostringstream a;
  std::ostringstream b;
  write_setting1_csv(a, run_setting1(config));
  write_setting1_csv(b, run_setting1(config));
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(a.str().substr(0, a.str().find('\n')), "graph_id,variable,theta,is_parent,method,px_mode,converged");

  std::ostringstream s2;
  write_setting2_csv(s2, run_setting2(small_config('a', 1)));
  EXPECT_EQ(s2.str().substr(0, s2.str().find('\n')), "graph_id,variable,theta,is_parent,n_interventional,converged");
  std::ostringstream j;
  write_joint_csv(j, run_joint(small_config('a', 1)));
  EXPECT_EQ(j.str().substr(0, j.str().find('\n')), "graph_id,scenario,x1,x2,estimated,true,residual,converged");
}

TEST(InformationFlow, PipelinesNeverSeeTheLabels) {
  const auto structure = default_structure('a');
  const auto scm = sample_scm(structure, 8);
  const auto other = scm.relabeled(set_difference(all_vars(5), scm.y_parents()));
  const auto config = small_config('a');
  const auto graph = structure.with_y_parents(std::nullopt);
  const auto a = setting1_graph(ScmSource(scm), graph, config, 99);
  const auto b = setting1_graph(ScmSource(other), graph, config, 99);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k].theta, b[k].theta);

  const CountingSource counted(scm);
  setting1_graph(counted, graph, config, 99);
  EXPECT_EQ(counted.observe_calls, 1);
  EXPECT_EQ(counted.intervene_calls, 10);
  EXPECT_GE(counted.joint_calls, 1);
}

TEST(Summaries, RankAndSpread) {
  EXPECT_DOUBLE_EQ(spearman({1, 2, 3, 4}, {10, 20, 30, 40}), 1.0);
  EXPECT_DOUBLE_EQ(spearman({1, 2, 3, 4}, {4, 3, 2, 1}), -1.0);
  EXPECT_NEAR(spearman({1, 2, 2, 3}, {1, 2, 3, 4}), 0.9486832980505138, 1e-12);
  EXPECT_DOUBLE_EQ(median({3, 1, 2}), 2.0);
  EXPECT_DOUBLE_EQ(median({4, 1, 2, 3}), 2.5);
  EXPECT_DOUBLE_EQ(interquartile_range({1, 2, 3, 4, 5}), 2.0);
  EXPECT_THROW(median({}), DomainError);
}

TEST(Summaries, AucAndBootstrap) {
  std::vector<Setting1Row> rows;
  for (std::size_t g = 0; g < 20; ++g) {
    for (std::uint32_t v = 0; v < 4; ++v) {
      const bool parent = v < 2;
      rows.push_back({g, VarId{v}, parent ? 0.8 : 0.2, parent, Method::icmaxent, PxMode::exact, true});
      rows.push_back({g, VarId{v}, v % 2 ? 0.8 : 0.2, parent, Method::cmaxent, PxMode::exact, true});
    }
  }
  EXPECT_DOUBLE_EQ(auc(rows, Method::icmaxent, PxMode::exact), 1.0);
  EXPECT_DOUBLE_EQ(auc(rows, Method::cmaxent, PxMode::exact), 0.5);
  const auto ci = bootstrap_auc_difference(rows, Method::icmaxent, Method::cmaxent, PxMode::exact, 200, 1);
  EXPECT_DOUBLE_EQ(ci.estimate, 0.5);
  EXPECT_LE(ci.lower, ci.estimate);
  EXPECT_GE(ci.upper, ci.estimate);
}

TEST(ConfigValidation, Rejected) {
  auto c = small_config('a');
  c.n_graphs = 0;
  EXPECT_THROW(run_setting1(c), DomainError);
  c = small_config('a');
  c.n_samples = 0;
  EXPECT_THROW(run_setting2(c), DomainError);
}

TEST(Statistical, NonParentsScoreBelowParentsWithIndependentCauses) {
  auto config = small_config('a', 50);
  config.structure = GraphSpec(5, {});
  config.seed = 2024;
  const auto rows = run_setting1(config);
  // Per-graph mean theta of parents minus mean theta of non-parents.
  std::vector<double> gaps;
  for (std::size_t g = 0; g < config.n_graphs; ++g) {
    double sp = 0;
    double sn = 0;
    int np = 0;
    int nn = 0;
    for (const auto& r : rows) {
      if (r.graph_id != g || r.method != Method::icmaxent || r.px != PxMode::exact) continue;
      (r.is_parent ? sp : sn) += r.theta;
      (r.is_parent ? np : nn) += 1;
    }
    gaps.push_back(sp / np - sn / nn);
  }
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> pick(0, gaps.size() - 1);
  std::vector<double> means;
  for (int b = 0; b < 2000; ++b) {
    double m = 0;
    for (std::size_t k = 0; k < gaps.size(); ++k) m += gaps[pick(rng)];
    means.push_back(m / static_cast<double>(gaps.size()));
  }
  std::sort(means.begin(), means.end());
  EXPECT_GT(means[50], 0.0) << "lower 2.5% bootstrap bound of the parent minus non-parent theta gap";
}
