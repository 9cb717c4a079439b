#include <cmath>
#include <stdexcept>

#include "cpdeflate/rank1.hpp"

namespace cpdeflate {

namespace {

// Mode-2 slices of a three-way tensor as the columns of an (I1 I2) x I3 matrix.
Eigen::Map<const Matrix> slices(const Tensor& t) {
  return {t.data().data(), t.extent(0) * t.extent(1), t.extent(2)};
}

Complex quad(const Vector& x, const Matrix& h) { return x.dot(h * x); }  // x^H H x

}  // namespace

Matrix build_gram(const Tensor& t) {
  if (t.order() != 3) throw std::invalid_argument("build_gram: three-way tensor required");
  const auto s = slices(t);
  Matrix m = s * s.adjoint();
  if (t.field() == Field::kReal) m = m.real().cast<Complex>();
  return m;
}

Rank1Term ce_refine(const Tensor& t, const Rank1Term& phi0, const CEOptions& options, CEState* state,
                    const KroneckerSum* decomposition) {
  if (t.order() != 3) throw std::invalid_argument("ce_refine: three-way tensor required");
  if (phi0.shape() != t.shape()) throw std::invalid_argument("ce_refine: initial term shape mismatch");
  const Index i1 = t.extent(0);
  const Index i2 = t.extent(1);
  const bool real = t.field() == Field::kReal;

  KroneckerSum local;
  if (!decomposition) {
    local = nkp_decompose(build_gram(t), i1, i2, options.nkp_tolerance);
    decomposition = &local;
  } else if (decomposition->dim_p != i1 || decomposition->dim_q != i2) {
    throw std::invalid_argument("ce_refine: decomposition dimensions mismatch");
  }
  const auto& terms = decomposition->terms;

  // x0: the mode-0 fibre of phi0 with the largest norm, first one on ties.
  const Matrix fibres = unfold(phi0.to_tensor(), 0);
  Index best = 0;
  double best_norm = -1.0;
  for (Index j = 0; j < fibres.cols(); ++j) {
    const double n = fibres.col(j).norm();
    if (n > best_norm) {
      best_norm = n;
      best = j;
    }
  }
  if (best_norm <= 0.0) throw std::domain_error("ce_refine: initial term is zero");
  Vector x = fibres.col(best) / best_norm;
  Vector y = Vector::Unit(i2, 0);

  CEState st;
  const IterationOptions eig_opts{options.max_iterations, 1e-10};
  double previous = 0.0;
  bool have_previous = false;
  while (st.iterations < options.max_iterations) {
    Matrix gy = Matrix::Zero(i2, i2);
    for (const auto& term : terms) gy += quad(x, term.p).real() * term.q.conjugate();
    if (real) gy = gy.real().cast<Complex>();
    EigPair ey = hermitian_eig_max(gy, eig_opts);
    y = ey.x;
    st.lambda_history.push_back(ey.lambda);

    Matrix gx = Matrix::Zero(i1, i1);
    for (const auto& term : terms) gx += quad(y, term.q.conjugate()).real() * term.p;
    if (real) gx = gx.real().cast<Complex>();
    EigPair ex = hermitian_eig_max(gx, eig_opts);
    x = ex.x;
    st.lambda_history.push_back(ex.lambda);
    ++st.iterations;

    if (have_previous && std::abs(ex.lambda - previous) <= options.tolerance * std::max(1.0, std::abs(previous))) {
      st.converged = true;
      break;
    }
    previous = ex.lambda;
    have_previous = true;
  }

  // alpha_k = (conj(y) kron x)^H t_k
  const Vector z = kronecker(y.conjugate(), x);
  const Vector alpha = slices(t).transpose() * z.conjugate();

  Rank1Term out;
  out.field = t.field();
  const double na = alpha.norm();
  out.lambda = na;
  out.factors = {x, y.conjugate(), na > 0 ? Vector(alpha / na) : Vector(Vector::Unit(alpha.size(), 0))};
  st.x = std::move(x);
  st.y = std::move(y);
  if (state) *state = std::move(st);
  return out;
}

}  // namespace cpdeflate
