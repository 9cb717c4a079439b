#pragma once

// Full CP decomposition solvers: ALS, nonlinear conjugate gradient with an
// exact polynomial line search (real field only), and deflation (DCPD) driven
// by any rank-one operator.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cpdeflate/rank1.hpp"
#include "cpdeflate/tensor.hpp"

namespace cpdeflate {

struct StopRule {
  int max_iterations = 1000;
  /// Stop when |r_{k-1} - r_k| <= relative_change * r_{k-1}; 0 disables.
  double relative_change = 1e-10;
  /// Stop when r_k <= absolute_target; 0 disables (unless r_k is exactly 0).
  double absolute_target = 0.0;

  static StopRule als_default() { return {1000, 1e-10, 0.0}; }
  static StopRule dcpd_default() { return {5000, 1e-12, 1e-6}; }

  /// Throws std::invalid_argument for a negative tolerance or max_iterations < 1.
  void validate() const;
};

enum class StopReason { kMaxIterations, kRelativeChange, kAbsoluteTarget };
std::string_view to_string(StopReason reason) noexcept;

struct SolveReport {
  /// ||T - model|| before the first iteration and after every iteration.
  std::vector<double> residual_history;
  int iterations = 0;
  bool converged = false;
  StopReason reason = StopReason::kMaxIterations;
  double wall_seconds = 0.0;

  double final_residual() const { return residual_history.empty() ? 0.0 : residual_history.back(); }
};

/// Shared bookkeeping for the stop rule; returns true when the run should stop.
bool apply_stop_rule(const StopRule& stop, SolveReport& report);

struct CPSolution {
  CPModel model;
  SolveReport report;
};

/// Factor entries i.i.d. uniform on [-1, 1] (both parts for complex).
CPModel random_cp_model(const Shape& shape, Index rank, Field field, Rng& rng);

// ---------------------------------------------------------------------------
// ALS

/// Each sweep solves mode n = 0..N-1 in turn with
/// A^(n) = T_(n) conj(K) pinv(conj(V)), K the Khatri-Rao product of the other
/// factors and V the Hadamard product of their Gramians (for real data this
/// is T_(n) K V^+).
CPSolution als(const Tensor& t, const CPModel& init, const StopRule& stop = StopRule::als_default());
CPSolution als(const Tensor& t, Index rank, std::uint64_t seed, const StopRule& stop = StopRule::als_default());

// ---------------------------------------------------------------------------
// Gradient and line search (real field)

/// Concatenation vec(A^(0)), ..., vec(A^(N-1)).
Vector flatten(const CPModel& model);
CPModel unflatten(const Vector& flat, const Shape& shape, Index rank, Field field);

/// Gradient of ||T - [[A]]||^2: block n is 2 vec(A^(n) V_n - T_(n) K_n).
/// Throws std::invalid_argument for complex tensors or models.
Vector gradient(const Tensor& t, const CPModel& model);

struct ElsOptions {
  double radius = 10.0;
};

struct ElsResult {
  double mu = 0.0;
  double f_start = 0.0;  // f(0)
  double f_mu = 0.0;     // f(mu)
  bool on_boundary = false;
};

/// Minimizes f(mu) = ||T - [[A + mu D]]||^2, a polynomial of degree 2N: f is
/// sampled at 2N+1 Chebyshev points of [-radius, radius], interpolated, and
/// the real roots of f' (companion-matrix eigenvalues) are compared with 0 and
/// the two endpoints by exact evaluation.
ElsResult els_step(const Tensor& t, const CPModel& model, const CPModel& direction, const ElsOptions& options = {});

struct CgOptions {
  double initial_radius = 10.0;
};

/// Polak-Ribiere conjugate gradient (beta clipped at 0) with els_step.
CPSolution cg_els(const Tensor& t, const CPModel& init, const StopRule& stop = StopRule::als_default(),
                  const CgOptions& options = {});
CPSolution cg_els(const Tensor& t, Index rank, std::uint64_t seed, const StopRule& stop = StopRule::als_default(),
                  const CgOptions& options = {});

// ---------------------------------------------------------------------------
// DCPD

/// One rank-one update X[r,l] = phi(Y[r,l]), E[r,l] = Y[r,l] - X[r,l].
/// r and l are 1-based, l = 1 being the initialization sweep.
struct DeflationStep {
  int r = 0;
  int l = 0;
  double y_norm = 0.0;
  double x_norm = 0.0;
  double e_norm = 0.0;
  Rank1Term term;
};

struct DeflationTrace {
  std::string operator_name;
  bool best_rank1 = false;
  Index rank = 0;
  std::vector<DeflationStep> steps;  // sweep-major, r fastest
  /// ||E[R,l]|| for l = 1, 2, ...
  std::vector<double> sweep_residuals;
  /// ||T - sum_r X[r,l] - E[R,l]|| / ||T|| for every sweep.
  std::vector<double> telescoping_errors;
  /// X[r,l] and E[r,l] aligned with `steps`; empty unless retained.
  std::vector<Tensor> x;
  std::vector<Tensor> e;

  int sweeps() const noexcept { return static_cast<int>(sweep_residuals.size()); }
  bool retains_tensors() const noexcept { return !x.empty(); }
  const DeflationStep& step(int r, int l) const;
  const Tensor& x_at(int r, int l) const;
  const Tensor& e_at(int r, int l) const;
};

struct DcpdOptions {
  StopRule stop = StopRule::dcpd_default();
  bool retain_tensors = false;
};

struct DcpdResult {
  std::vector<Rank1Term> terms;  // last sweep's components
  DeflationTrace trace;
  /// residual_history[0] = ||T||, then ||E[R,l]|| per sweep.
  SolveReport report;

  CPModel model() const;
};

DcpdResult dcpd(const Tensor& t, Index rank, const Rank1Operator& phi, const DcpdOptions& options = {});

}  // namespace cpdeflate
