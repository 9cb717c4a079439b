#include "cpdeflate/linalg.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace cpdeflate {

namespace {

template <class Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

bool is_real(const Matrix& m) { return m.imag().isZero(0.0); }

template <class Derived>
Index largest_modulus_index(const Eigen::MatrixBase<Derived>& v) {
  Index best = 0;
  double best_abs = -1.0;
  for (Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v(i));
    if (a > best_abs * (1.0 + 1e-12)) {
      best = i;
      best_abs = a;
    }
  }
  return best;
}

template <class Scalar>
Scalar phase_of(const DenseVector<Scalar>& v) {
  const Scalar lead = v(largest_modulus_index(v));
  const double a = std::abs(lead);
  if (a == 0.0) return Scalar(1);
  return lead / a;  // unit scalar
}

double conj_scalar(double x) { return x; }
Complex conj_scalar(Complex x) { return std::conj(x); }

struct TripletResult {
  Vector u;
  double sigma;
  Vector v;
};

template <class Scalar>
TripletResult gram_triplet(const DenseMatrix<Scalar>& m) {
  using Solver = Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>>;
  DenseVector<Scalar> u;
  DenseVector<Scalar> v;
  double sigma = 0.0;
  if (m.rows() <= m.cols()) {
    const DenseMatrix<Scalar> g = m * m.adjoint();
    Solver es(g);
    const Index top = g.rows() - 1;
    sigma = std::sqrt(std::max(es.eigenvalues()(top), 0.0));
    u = es.eigenvectors().col(top);
    v = m.adjoint() * u;
    const double nv = v.norm();
    if (nv > 0) v /= nv;
    sigma = nv;  // ||M^H u|| is the more accurate estimate
  } else {
    const DenseMatrix<Scalar> g = m.adjoint() * m;
    Solver es(g);
    const Index top = g.rows() - 1;
    v = es.eigenvectors().col(top);
    u = m * v;
    const double nu = u.norm();
    if (nu > 0) u /= nu;
    sigma = nu;
  }
  const Scalar ph = phase_of<Scalar>(u);
  u *= conj_scalar(ph);
  v *= conj_scalar(ph);
  return {u.template cast<Complex>(), sigma, v.template cast<Complex>()};
}

}  // namespace

Complex normalize_phase(Vector& v) {
  const Complex ph = phase_of<Complex>(v);
  v *= std::conj(ph);
  if (v.size() > 0) {
    const Index k = largest_modulus_index(v);
    v(k) = Complex(std::abs(v(k)), 0.0);
  }
  return std::conj(ph);
}

Vector power_iteration_start(Index n) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = Complex(1.0 + 0.1 * static_cast<double>(i + 1) / static_cast<double>(n), 0.0);
  return v / v.norm();
}

SingularTriplet dominant_triplet(const Matrix& m, const IterationOptions& options, TripletMethod method) {
  if (m.size() == 0) throw std::invalid_argument("dominant_triplet: empty matrix");
  if (m.cwiseAbs().maxCoeff() == 0.0) throw std::domain_error("dominant_triplet: zero matrix");

  SingularTriplet out;
  if (method == TripletMethod::kGramEigen) {
    TripletResult r = is_real(m) ? gram_triplet<double>(m.real()) : gram_triplet<Complex>(m);
    out.u = std::move(r.u);
    out.sigma = r.sigma;
    out.v = std::move(r.v);
    out.converged = true;
    out.iterations = 1;
    return out;
  }

  // Power iteration on M^H M.
  Vector v = power_iteration_start(m.cols());
  Vector mv = m * v;
  double sigma = mv.norm();
  if (sigma == 0.0) {
    // The fixed start happened to lie in the null space; restart from e_1..e_n.
    for (Index j = 0; j < m.cols() && sigma == 0.0; ++j) {
      v = Vector::Unit(m.cols(), j);
      mv = m * v;
      sigma = mv.norm();
    }
  }
  out.converged = false;
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    Vector w = m.adjoint() * mv;  // M^H M v
    const double nw = w.norm();
    // Residual of the eigen-equation M^H M v = sigma^2 v.
    const double residual = (w - sigma * sigma * v).norm();
    if (residual <= options.tolerance * sigma * sigma) {
      out.converged = true;
      break;
    }
    v = w / nw;
    mv = m * v;
    sigma = mv.norm();
  }
  out.iterations = it;
  out.sigma = sigma;
  out.u = mv / sigma;
  out.v = v;
  const Complex ph = normalize_phase(out.u);
  out.v *= ph;
  return out;
}

Svd full_svd(const Matrix& m) {
  Svd out;
  if (is_real(m)) {
    Eigen::JacobiSVD<RealMatrix> svd(m.real(), Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.u = svd.matrixU().cast<Complex>();
    out.sigma = svd.singularValues();
    out.v = svd.matrixV().cast<Complex>();
  } else {
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.u = svd.matrixU();
    out.sigma = svd.singularValues();
    out.v = svd.matrixV();
  }
  return out;
}

Matrix pinv(const Matrix& m, double rank_tol) {
  Matrix result = Matrix::Zero(m.cols(), m.rows());
  if (m.size() == 0) return result;
  const Svd svd = full_svd(m);
  if (svd.sigma.size() == 0 || svd.sigma(0) == 0.0) return result;
  const double cutoff = rank_tol * svd.sigma(0);
  for (Index k = 0; k < svd.sigma.size(); ++k) {
    if (svd.sigma(k) <= cutoff) break;
    result += (svd.v.col(k) / svd.sigma(k)) * svd.u.col(k).adjoint();
  }
  return result;
}

bool is_hermitian(const Matrix& h, double tol) {
  if (h.rows() != h.cols()) return false;
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  return (h - h.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

EigPair hermitian_eig_max(const Matrix& h, const IterationOptions& options) {
  if (h.rows() == 0 || !is_hermitian(h, 1e-10))
    throw std::invalid_argument("hermitian_eig_max: matrix is not Hermitian");
  EigPair out;
  const Index top = h.rows() - 1;
  if (is_real(h)) {
    const RealMatrix hr = 0.5 * (h.real() + h.real().transpose());
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(hr);
    out.lambda = es.eigenvalues()(top);
    out.x = es.eigenvectors().col(top).cast<Complex>();
  } else {
    const Matrix hh = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(hh);
    out.lambda = es.eigenvalues()(top);
    out.x = es.eigenvectors().col(top);
  }
  normalize_phase(out.x);
  out.residual = (h * out.x - out.lambda * out.x).norm();
  const double scale = h.norm();
  if (out.residual > std::max(options.tolerance * scale, 1e-13 * scale))
    throw std::runtime_error("hermitian_eig_max: eigen residual above tolerance");
  return out;
}

}  // namespace cpdeflate
