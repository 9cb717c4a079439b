#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cpdeflate/diagnostics.hpp"
#include "oracles.hpp"

using namespace cpdeflate;

namespace {

constexpr double kHalfPi = std::numbers::pi / 2;

// A rank-one, two-sweep trace with chosen X[1,1] and E[1,1].
DeflationTrace synthetic_trace(const Tensor& x, const Tensor& e) {
  DeflationTrace tr;
  tr.operator_name = "synthetic";
  tr.best_rank1 = true;
  tr.rank = 1;
  for (int l = 1; l <= 2; ++l) {
    DeflationStep s;
    s.r = 1;
    s.l = l;
    s.x_norm = norm(x);
    s.e_norm = norm(e);
    tr.steps.push_back(s);
    tr.x.push_back(x);
    tr.e.push_back(e);
    tr.sweep_residuals.push_back(norm(e));
    tr.telescoping_errors.push_back(0.0);
  }
  return tr;
}

DcpdResult oracle_run(const Shape& shape, Index rank, std::uint64_t seed, int sweeps) {
  const Tensor t = random_cp(shape, rank, Field::kReal, Distribution::kUniform, seed).second;
  DcpdOptions opts;
  opts.stop = {sweeps, 0.0, 0.0};
  opts.retain_tensors = true;
  return dcpd(t, rank, oracle_operator(), opts);
}

}  // namespace

TEST(AngleTableTest, OrthogonalAndCollinear) {
  Tensor x({2, 2}), e({2, 2});
  x[0] = 1.0;
  e[3] = 0.5;
  const AngleTable ortho = angle_table(synthetic_trace(x, e));
  EXPECT_DOUBLE_EQ(ortho.at(1, 2).radians(), kHalfPi);
  EXPECT_DOUBLE_EQ(ortho.c_at(2), 1.0);

  const AngleTable coll = angle_table(synthetic_trace(x, Complex(3.0) * x));
  EXPECT_NEAR(coll.at(1, 2).radians(), 0.0, 1e-7);
  EXPECT_NEAR(coll.c_at(2), 0.0, 1e-7);
  EXPECT_THROW(coll.at(2, 2), std::out_of_range);
}

TEST(AngleTableTest, MatchesRecomputationFromTensors) {
  const DcpdResult run = oracle_run({3, 3, 2}, 2, 4, 4);
  const AngleTable table = angle_table(run.trace);
  const auto& tr = run.trace;
  for (int l = 2; l <= 4; ++l) {
    double c = 1.0;
    for (int r = 1; r <= 2; ++r) {
      const Tensor& e = r == 1 ? tr.e_at(2, l - 1) : tr.e_at(r - 1, l);
      const double g = oracle::angle_long(e, tr.x_at(r, l - 1));
      EXPECT_NEAR(table.at(r, l).radians(), g, 1e-7);
      c *= std::sin(g);
    }
    EXPECT_NEAR(table.c_at(l), c, 1e-7);
  }
}

TEST(AngleTableTest, FirstComponentConvention) {
  const DcpdResult run = oracle_run({2, 2, 2}, 2, 5, 3);
  const AngleTable table = angle_table(run.trace, GammaConvention::kFirstComponent);
  EXPECT_NEAR(table.at(2, 3).radians(), oracle::angle_long(run.trace.e_at(1, 3), run.trace.x_at(1, 2)), 1e-7);
}

TEST(AngleTableTest, NeedsRetainedTensors) {
  const Tensor t = random_tensor({2, 2, 2}, Field::kReal, Distribution::kUniform, 1);
  EXPECT_THROW(angle_table(dcpd(t, 2, seroap_operator()).trace), std::invalid_argument);
}

TEST(Lemma1, DegenerateCases) {
  Tensor x({2, 2, 2}), e({2, 2, 2});
  x[0] = 2.0;
  const Lemma1Check zero = check_lemma1(x, e, oracle_operator());
  EXPECT_NEAR(zero.lhs, 0.0, 1e-12);
  EXPECT_EQ(zero.rhs, 0.0);
  EXPECT_TRUE(zero.holds);

  e[7] = 0.5;
  EXPECT_TRUE(check_lemma1(x, e, oracle_operator()).holds);
}

TEST(Lemma1, OracleBackedPairs) {
  int holds = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const Tensor x = random_cp({2, 2, 2}, 1, Field::kReal, Distribution::kUniform, seed).second;
    const Tensor e = random_tensor({2, 2, 2}, Field::kReal, Distribution::kUniform, seed + 7000);
    holds += check_lemma1(x, e, oracle_operator()).holds;
  }
  EXPECT_EQ(holds, 200);
}

TEST(Lemma1, RefusesHeuristicOperators) {
  const Tensor x = random_cp({2, 2, 2}, 1, Field::kReal, Distribution::kUniform, 1).second;
  EXPECT_THROW(check_lemma1(x, x, seroap_operator()), std::invalid_argument);
  EXPECT_NO_THROW(check_lemma1(x, x, seroap_operator(), true));
}

TEST(Corollaries, ExactDecompositionIsTrivial) {
  const DcpdResult run = oracle_run({2, 2, 2}, 1, 3, 3);
  const CorollaryReport rep = check_corollaries(run.trace);
  EXPECT_EQ(rep.violations(), 0);
}

TEST(Corollaries, SeededOracleRuns) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const DcpdResult run = oracle_run({2, 2, 2}, 2, seed, 5);
    const CorollaryReport rep = check_corollaries(run.trace);
    EXPECT_EQ(rep.corollary1.size(), 8u);
    for (const auto& rec : rep.corollary1) EXPECT_TRUE(rec.holds) << "seed " << seed << " (" << rec.r << "," << rec.l << ")";
    for (const auto& rec : rep.corollary2) EXPECT_TRUE(rec.holds) << "seed " << seed << " l=" << rec.l;
  }
}

TEST(Corollaries, PlateauHasUnitContraction) {
  // With R = 1 every sweep refits the same tensor, so the residual plateaus
  // and the best rank-one residual is orthogonal to its approximation.
  const Tensor t = random_tensor({2, 3, 2}, Field::kReal, Distribution::kUniform, 8);
  DcpdOptions opts;
  opts.stop = {4, 0.0, 0.0};
  opts.retain_tensors = true;
  const DcpdResult run = dcpd(t, 1, oracle_operator(), opts);
  const CorollaryReport rep = check_corollaries(run.trace);
  ASSERT_EQ(rep.stagnation.size(), 3u);
  for (const auto& s : rep.stagnation) {
    EXPECT_NEAR(s.c, 1.0, 1e-3);
    EXPECT_TRUE(s.holds);
  }
}

TEST(ConeBound, PredictedDecay) {
  EXPECT_EQ(predict_decay(Angle(0.0), 2), 0.0);
  EXPECT_DOUBLE_EQ(predict_decay(Angle(kHalfPi), 5), 1.0);
  EXPECT_DOUBLE_EQ(predict_decay(Angle(0.3), 1), 1.0);
  EXPECT_THROW(predict_decay(Angle(0.3), 0), std::invalid_argument);
}

TEST(ConeBound, SeededOracleRuns) {
  for (std::uint64_t seed = 11; seed <= 20; ++seed) {
    const DcpdResult run = oracle_run({2, 3, 2}, 2, seed, 5);
    const ConeReport rep = beta_bound(run.trace);
    EXPECT_EQ(rep.violations(), 0) << "seed " << seed;
    EXPECT_EQ(rep.ratios.size(), 4u);
    EXPECT_LE(rep.beta_bound.radians(), kHalfPi);
  }
}

TEST(Wilson, KnownValues) {
  const WilsonInterval w = wilson_interval(5, 10);
  EXPECT_NEAR(w.lower, 0.2366, 1e-4);
  EXPECT_NEAR(w.upper, 0.7634, 1e-4);
  EXPECT_EQ(wilson_interval(0, 20).lower, 0.0);
  EXPECT_EQ(wilson_interval(20, 20).upper, 1.0);
  for (int n : {7, 500, 1000, 4999}) {
    EXPECT_EQ(wilson_interval(0, n).lower, 0.0) << n;
    EXPECT_EQ(wilson_interval(n, n).upper, 1.0) << n;
  }
  EXPECT_THROW(wilson_interval(3, 2), std::invalid_argument);
}

TEST(EstimateF, Endpoints) {
  EstimateFConfig cfg;
  cfg.trials = 40;
  cfg.beta_grid = {0.0, 0.7, kHalfPi};
  const FEstimate f = estimate_F(cfg, oracle_operator());
  ASSERT_EQ(f.probability.size(), 3u);
  EXPECT_EQ(f.failed_trials, 0);
  EXPECT_EQ(f.probability[2], 1.0);
  EXPECT_LE(f.probability[0], 0.05);
  EXPECT_LE(f.probability[0], f.probability[1]);
  EXPECT_LE(f.probability[1], f.probability[2]);
}

TEST(EstimateF, ValidatesInput) {
  EstimateFConfig cfg;
  cfg.beta_grid = {2.0};
  EXPECT_THROW(estimate_F(cfg, oracle_operator()), std::invalid_argument);
  cfg.beta_grid = {};
  EXPECT_THROW(estimate_F(cfg, seroap_operator()), std::invalid_argument);
  EXPECT_EQ(default_beta_grid().size(), 24u);
}

TEST(EstimateF, DefaultGridEndsAtHalfPi) {
  const std::vector<double> grid = default_beta_grid();
  EXPECT_EQ(grid.front(), 0.0);
  EXPECT_EQ(grid.back(), kHalfPi);
  EXPECT_TRUE(std::is_sorted(grid.begin(), grid.end()));
}
