#include <cmath>
#include <stdexcept>

#include <Eigen/SVD>

#include "cpdeflate/linalg.hpp"

namespace cpdeflate {

namespace {

// Columns are vec() of an orthonormal basis of the n x n Hermitian matrices:
// E_kk, (E_kl + E_lk)/sqrt2 and i(E_kl - E_lk)/sqrt2 for k < l. The basis is
// orthonormal for the complex inner product too, so the matrix is unitary.
Matrix hermitian_basis(Index n) {
  const double s = 1.0 / std::sqrt(2.0);
  Matrix b = Matrix::Zero(n * n, n * n);
  Index col = 0;
  for (Index k = 0; k < n; ++k) b(k + n * k, col++) = 1.0;
  for (Index k = 0; k < n; ++k) {
    for (Index l = k + 1; l < n; ++l) {
      b(k + n * l, col) = s;
      b(l + n * k, col) = s;
      ++col;
      b(k + n * l, col) = Complex(0.0, -s);
      b(l + n * k, col) = Complex(0.0, s);
      ++col;
    }
  }
  return b;
}

Matrix hermitize(const Matrix& a) { return 0.5 * (a + a.adjoint()); }

}  // namespace

Matrix KroneckerSum::reconstruct() const {
  Matrix m = Matrix::Zero(dim_p * dim_q, dim_p * dim_q);
  for (const auto& term : terms) m += kronecker(term.q, term.p);
  return m;
}

Matrix rearrange(const Matrix& m, Index dim_p, Index dim_q) {
  if (dim_p < 1 || dim_q < 1 || m.rows() != dim_p * dim_q || m.cols() != dim_p * dim_q)
    throw std::invalid_argument("rearrange: matrix is not (dim_p dim_q) square");
  Matrix r(dim_q * dim_q, dim_p * dim_p);
  for (Index j2 = 0; j2 < dim_q; ++j2)
    for (Index i2 = 0; i2 < dim_q; ++i2)
      for (Index j1 = 0; j1 < dim_p; ++j1)
        for (Index i1 = 0; i1 < dim_p; ++i1)
          r(i2 + dim_q * j2, i1 + dim_p * j1) = m(i1 + dim_p * i2, j1 + dim_p * j2);
  return r;
}

KroneckerSum nkp_decompose(const Matrix& m, Index dim_p, Index dim_q, double tol) {
  if (!is_hermitian(m, 1e-10)) throw std::invalid_argument("nkp_decompose: matrix is not Hermitian");
  const Matrix r = rearrange(m, dim_p, dim_q);
  const Matrix b1 = hermitian_basis(dim_p);
  const Matrix b2 = hermitian_basis(dim_q);

  // R = B2 C B1^T with C real for Hermitian M.
  const Matrix c = b2.adjoint() * r * b1.conjugate();
  Eigen::JacobiSVD<RealMatrix> svd(c.real(), Eigen::ComputeThinU | Eigen::ComputeThinV);

  KroneckerSum out;
  out.dim_p = dim_p;
  out.dim_q = dim_q;
  out.singular_values = svd.singularValues();
  const RealVector& sigma = out.singular_values;
  const double m_norm = m.norm();
  if (sigma.size() == 0 || sigma(0) == 0.0) return out;

  Index keep = 0;
  while (keep < sigma.size() && sigma(keep) > tol * sigma(0)) ++keep;
  const double tail_limit = std::max(tol, 1e-9) * m_norm;
  auto tail = [&](Index from) { return sigma.tail(sigma.size() - from).norm(); };
  while (keep < sigma.size() && tail(keep) > tail_limit) ++keep;

  for (Index k = 0; k < keep; ++k) {
    const Vector q_vec = sigma(k) * (b2 * svd.matrixU().col(k).cast<Complex>());
    const Vector p_vec = b1 * svd.matrixV().col(k).cast<Complex>();
    KroneckerTerm term{unvec(p_vec, dim_p, dim_p), unvec(q_vec, dim_q, dim_q)};
    const Matrix p_h = hermitize(term.p);
    const Matrix q_h = hermitize(term.q);
    if ((p_h - term.p).norm() > 1e-6 * term.p.norm() || (q_h - term.q).norm() > 1e-6 * term.q.norm())
      throw std::runtime_error("nkp_decompose: Kronecker factor is not Hermitian");
    term.p = p_h;
    term.q = q_h;
    out.terms.push_back(std::move(term));
  }

  const double err = (m - out.reconstruct()).norm();
  if (err > std::max(tol * m_norm, 1e-9 * m_norm))
    throw std::runtime_error("nkp_decompose: reconstruction error above tolerance");
  return out;
}

}  // namespace cpdeflate
