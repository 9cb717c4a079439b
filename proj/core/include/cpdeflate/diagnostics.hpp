#pragma once

// Geometric diagnostics of a deflation run: the angles gamma[r,l], the
// sin(gamma) contraction bounds, stagnation detection, the cone-angle bound
// on the residual decay, and Monte-Carlo estimates of F_L[beta].
//
// The contraction results are theorems only when every rank-one update is a
// best rank-one approximation. The checks therefore refuse traces produced by
// any other operator unless `empirical` is set, in which case violations are
// statistics rather than failures.

#include <cstdint>
#include <string>
#include <vector>

#include "cpdeflate/rank1.hpp"
#include "cpdeflate/solvers.hpp"
#include "cpdeflate/tensor.hpp"

namespace cpdeflate {

/// Slack used by every inequality check below.
inline constexpr double kTheoremSlack = 1e-8;

enum class GammaConvention {
  /// gamma[r,l] = angle(E[r-1,l], X[r,l-1]) for r > 1 and
  /// angle(E[R,l-1], X[1,l-1]) for r = 1. This is the angle the contraction
  /// proof uses.
  kPreviousComponent,
  /// gamma[r,l] = angle(E[r-1,l], X[1,l-1]) for r > 1 (figure-caption reading).
  kFirstComponent,
};

/// gamma[r,l] for r = 1..R and l = 2..L (it needs X[r,l-1]) together with
/// c_l = prod_r sin(gamma[r,l]). A zero-norm E or X gives gamma = pi/2.
struct AngleTable {
  Index rank = 0;
  int sweeps = 0;                     // L of the trace
  std::vector<std::vector<Angle>> gamma;  // gamma[l-2][r-1]
  std::vector<double> c;                  // c[l-2]

  const Angle& at(int r, int l) const;
  double c_at(int l) const;
};

AngleTable angle_table(const DeflationTrace& trace, GammaConvention convention = GammaConvention::kPreviousComponent);

struct Lemma1Check {
  double lhs = 0.0;  // ||X + E - phi(X + E)||
  double rhs = 0.0;  // sin(gamma) ||E||, gamma = angle(E, X)
  bool holds = true;
};

/// ||X + E - phi(X + E)|| <= sin(angle(E, X)) ||E||.
Lemma1Check check_lemma1(const Tensor& x, const Tensor& e, const Rank1Operator& phi, bool empirical = false);

struct InequalityRecord {
  int r = 0;  // 0 for per-sweep records
  int l = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = true;
};

struct StagnationRecord {
  int l = 0;
  double ratio = 0.0;  // ||E[R,l]|| / ||E[R,l-1]||
  double c = 0.0;
  bool holds = true;   // c >= 1 - 1e-3
};

struct CorollaryReport {
  /// ||E[r,l]|| <= sin(gamma[r,l]) ||E[r-1,l]|| (E[0,l] meaning E[R,l-1]).
  std::vector<InequalityRecord> corollary1;
  /// ||E[R,l]|| <= c_l ||E[R,l-1]||.
  std::vector<InequalityRecord> corollary2;
  /// Sweeps where ||E[R,l]|| >= (1 - 1e-6) ||E[R,l-1]||, checked only while
  /// ||E[R,l-1]|| >= 1e-4 (below that the plateau is rounding noise).
  std::vector<StagnationRecord> stagnation;

  int violations() const;
};

/// Needs a trace with retained tensors.
CorollaryReport check_corollaries(const DeflationTrace& trace, bool empirical = false);

struct ConeReport {
  /// max over l > 1 of min over r of gamma[r,l]; pi/2 when the trace has a
  /// single sweep.
  Angle beta_bound;
  /// ||E[R,l]|| / ||E[R,l-1]|| for l = 2..L (0 when the denominator is 0).
  std::vector<double> ratios;
  std::vector<bool> stagnating;
  /// ||E[R,L]|| <= sin(beta)^(L-1) ||E[R,1]|| for every L = 2.. in the trace.
  std::vector<InequalityRecord> decay;

  int violations() const;
};

ConeReport beta_bound(const DeflationTrace& trace, bool empirical = false);

/// sin(beta)^(L-1).
double predict_decay(const Angle& beta, int sweeps);

struct WilsonInterval {
  double lower = 0.0;
  double upper = 1.0;
  double half_width() const { return 0.5 * (upper - lower); }
};

/// Wilson score interval for k successes out of n (z = 1.96 by default).
WilsonInterval wilson_interval(int successes, int trials, double z = 1.959963984540054);

struct EstimateFConfig {
  Shape shape = {2, 2, 2};
  Index rank = 2;
  int sweeps = 5;  // L
  std::vector<double> beta_grid;  // radians
  int trials = 500;
  std::uint64_t seed = 1;
  Field field = Field::kReal;
  bool empirical = false;
};

struct FEstimate {
  int sweeps = 0;
  std::vector<double> beta;
  std::vector<double> probability;
  std::vector<int> successes;
  std::vector<WilsonInterval> interval;
  int trials = 0;
  int failed_trials = 0;
};

/// Default grid: 0, pi/40, ..., pi/2 plus pi/2 - {1e-2, 1e-3, 1e-4}, sorted.
std::vector<double> default_beta_grid();

/// For every trial: T from random_cp(shape, rank) with uniform entries, DCPD
/// for exactly L sweeps, Z_l = ||E[R,l]||, and the event
/// Z_l <= sin(beta) Z_{l-1} + 1e-10 for l = 2..L, counted per beta.
FEstimate estimate_F(const EstimateFConfig& config, const Rank1Operator& phi);

}  // namespace cpdeflate
