#pragma once

// Rank-one approximation operators: THOSVD, SeROAP, the coupled-eigenvalue
// (CE) refinement for three-way tensors, rank-one ALS, and a multi-restart
// numerical stand-in for the best rank-one approximation.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cpdeflate/linalg.hpp"
#include "cpdeflate/tensor.hpp"

namespace cpdeflate {

/// lambda * u_0 o u_1 o ... o u_{N-1} with unit factors.
struct Rank1Term {
  Complex lambda = 0.0;
  std::vector<Vector> factors;
  Field field = Field::kReal;

  Shape shape() const;
  Tensor to_tensor() const;
};

/// ||T - term||.
double residual(const Tensor& t, const Rank1Term& term);

/// Splits a rank-one tensor into scale and unit factors (dominant left
/// singular vector of every unfolding, lambda = <X, U>).
Rank1Term rank1_from_tensor(const Tensor& x);

// ---------------------------------------------------------------------------
// THOSVD

Rank1Term thosvd(const Tensor& t);

// ---------------------------------------------------------------------------
// SeROAP

/// Intermediate quantities of one SeROAP run, named after the algorithm.
struct SeroapTrace {
  std::vector<Vector> v;   // v_1 .. v_{N-2}: descent right singular vectors
  std::vector<Matrix> vm;  // V_0 .. V_{N-2}
  Vector u;                // bottom left singular vector
  Vector v_bottom;         // bottom right singular vector
  Vector w;                // conj(v) kron u
  std::vector<Matrix> x;   // X_(N-2), ..., X_(1) in the order produced
};

struct SeroapOptions {
  /// Process modes by non-increasing extent and permute the result back.
  bool sort_modes = false;
  TripletMethod triplet = TripletMethod::kGramEigen;
};

/// Descends through right singular vectors of successively reshaped matrices,
/// then ascends by projecting rows of V_{n-1} on w. The ascent vector w is not
/// renormalized between steps. For N = 2 the dominant singular triplet is
/// returned.
Rank1Term seroap(const Tensor& t, const SeroapOptions& options = {}, SeroapTrace* trace = nullptr);

// ---------------------------------------------------------------------------
// Coupled-eigenvalue refinement (three-way only)

/// M = sum_k t_k t_k^H over the vectorized mode-2 slices t_k (0-based mode 2).
Matrix build_gram(const Tensor& t);

struct CEOptions {
  int max_iterations = 200;
  double tolerance = 1e-12;  // on |lambda_{t+1} - lambda_t| / max(1, |lambda_t|)
  double nkp_tolerance = 1e-13;
};

struct CEState {
  Vector x;
  Vector y;
  /// lambda after every half step (y update, then x update), in order.
  std::vector<double> lambda_history;
  int iterations = 0;
  bool converged = false;
};

/// Alternates dominant eigenpairs of G_y = sum (x^H P x) conj(Q) and
/// G_x = sum (y^H conj(Q) y) P, then sets alpha_k = <t_k, conj(y) kron x>.
/// The returned term is x o conj(y) o alpha with lambda = ||alpha||. A
/// precomputed decomposition of build_gram(t) may be passed in.
Rank1Term ce_refine(const Tensor& t, const Rank1Term& phi0, const CEOptions& options = {},
                    CEState* state = nullptr, const KroneckerSum* decomposition = nullptr);

// ---------------------------------------------------------------------------
// Rank-one ALS and the best rank-one stand-in

struct Rank1AlsResult {
  Rank1Term term;
  int iterations = 0;
  bool converged = false;
};

/// Alternating least squares with R = 1, starting from `init`; stops when the
/// relative change of ||T - X|| is <= tolerance.
Rank1AlsResult rank1_als(const Tensor& t, const Rank1Term& init, int max_iterations = 2000,
                         double tolerance = 1e-14);

struct OracleOptions {
  int restarts = 64;
  int als_max_iterations = 2000;
  double als_tolerance = 1e-14;
  std::uint64_t seed = 0x5eed;
};

/// Heuristic best rank-one approximation. Seeds are SeROAP, THOSVD and
/// `restarts` random uniform starts; every seed contributes itself, ALS(seed)
/// and, for three-way tensors, CE(seed) and CE(ALS(seed)). The smallest
/// residual wins, earliest candidate on ties. Deterministic for a given seed.
Rank1Term best_rank1_oracle(const Tensor& t, const OracleOptions& options = {});

// ---------------------------------------------------------------------------
// Operators

struct Rank1Operator {
  std::string name;
  std::function<Rank1Term(const Tensor&)> apply;
  /// True when the operator stands in for the best rank-one approximation.
  bool best_rank1 = false;
};

Rank1Operator thosvd_operator();
Rank1Operator seroap_operator();
Rank1Operator seroap_ce_operator();
Rank1Operator oracle_operator(const OracleOptions& options = {});

/// Looks up "thosvd", "seroap", "seroap+ce" or "oracle".
Rank1Operator operator_by_name(const std::string& name);

/// residual(a) - residual(b); (thosvd, seroap) gives the Delta-phi statistic.
double compare_rank1(const Tensor& t, const Rank1Operator& a, const Rank1Operator& b);

}  // namespace cpdeflate
