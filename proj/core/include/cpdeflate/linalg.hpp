#pragma once

// Matrix kernels used by the rank-one methods: dominant singular triplets,
// thin SVD, pseudo-inversion, dominant Hermitian eigenpairs, and the nearest
// Kronecker product (van Loan) decomposition.
//
// Real inputs (every imaginary part exactly zero) are routed through real
// arithmetic, so their outputs are exactly real. Singular and eigen vectors
// follow one phase convention: the largest-modulus component is real and
// positive (ties go to the lowest index).

#include <vector>

#include "cpdeflate/tensor.hpp"

namespace cpdeflate {

struct IterationOptions {
  int max_iterations = 200;
  double tolerance = 1e-10;
};

struct SingularTriplet {
  Vector u;
  double sigma = 0.0;
  Vector v;
  bool converged = true;
  int iterations = 0;
};

enum class TripletMethod {
  /// Power iteration on M^H M from a fixed start vector.
  kPowerIteration,
  /// Dense Hermitian eigensolve of the smaller Gram matrix. Exact up to
  /// rounding; the rank-one methods use this one.
  kGramEigen,
};

/// Dominant singular triplet (u, sigma, v) with M v = sigma u. Throws
/// std::domain_error on a zero matrix. With kPowerIteration a run that hits
/// max_iterations returns its last iterate with converged = false.
SingularTriplet dominant_triplet(const Matrix& m, const IterationOptions& options = {},
                                 TripletMethod method = TripletMethod::kPowerIteration);

/// The power-iteration start vector: normalized all-ones plus a fixed ramp.
Vector power_iteration_start(Index n);

struct Svd {
  Matrix u;          // rows x k
  RealVector sigma;  // k, non-increasing
  Matrix v;          // cols x k
};

/// Thin SVD, k = min(rows, cols).
Svd full_svd(const Matrix& m);

/// Moore-Penrose inverse; singular values <= rank_tol * sigma_1 are dropped.
Matrix pinv(const Matrix& m, double rank_tol = 1e-12);

struct EigPair {
  double lambda = 0.0;
  Vector x;
  double residual = 0.0;  // ||H x - lambda x||
};

bool is_hermitian(const Matrix& h, double tol = 1e-10);

/// Eigenpair of the largest (signed) eigenvalue of a Hermitian matrix. Throws
/// std::invalid_argument if `h` is not Hermitian within 1e-10 relative, and
/// std::runtime_error if the residual exceeds tolerance * ||H||.
EigPair hermitian_eig_max(const Matrix& h, const IterationOptions& options = {});

/// Rotates v by a unit scalar so its largest-modulus entry is real positive;
/// returns the applied scalar.
Complex normalize_phase(Vector& v);

// ---------------------------------------------------------------------------
// Nearest Kronecker product

struct KroneckerTerm {
  Matrix p;  // dim_p x dim_p, Hermitian
  Matrix q;  // dim_q x dim_q, Hermitian
};

/// M ~= sum_r kron(Q_r, P_r) for a (dim_p dim_q) x (dim_p dim_q) matrix. P acts
/// on the fastest-varying index of M's rows/columns.
struct KroneckerSum {
  Index dim_p = 0;
  Index dim_q = 0;
  std::vector<KroneckerTerm> terms;
  RealVector singular_values;  // of the rearranged matrix, all of them

  Index kronecker_rank() const noexcept { return static_cast<Index>(terms.size()); }
  Matrix reconstruct() const;
};

/// van Loan rearrangement R(M), of size dim_q^2 x dim_p^2, with
/// R[(i2,j2),(i1,j1)] = M[(i1,i2),(j1,j2)], so that
/// ||M - sum kron(Q,P)|| = ||R(M) - sum vec(Q) vec(P)^T||.
Matrix rearrange(const Matrix& m, Index dim_p, Index dim_q);

/// Decomposes a Hermitian M into a sum of Kronecker products of Hermitian
/// factors. Terms with singular value <= tol * sigma_1 are dropped, unless the
/// dropped tail would exceed max(tol, 1e-9) * ||M||.
KroneckerSum nkp_decompose(const Matrix& m, Index dim_p, Index dim_q, double tol = 1e-13);

}  // namespace cpdeflate
