#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "cpdeflate/solvers.hpp"

namespace cpdeflate {

namespace {

void require_real(const Tensor& t, const CPModel& model, const char* who) {
  if (t.field() != Field::kReal || model.field != Field::kReal)
    throw std::invalid_argument(std::string(who) + ": only the real field is supported");
}

double objective(const Tensor& t, const CPModel& model) { return squared_norm(t - cp_reconstruct(model)); }

CPModel axpy(const CPModel& a, double mu, const CPModel& d) {
  CPModel out = a;
  for (std::size_t n = 0; n < out.factors.size(); ++n) out.factors[n] += mu * d.factors[n];
  return out;
}

// Real roots of sum_k c_k t^k.
std::vector<double> real_roots(RealVector c) {
  const double scale = c.cwiseAbs().maxCoeff();
  Index degree = c.size() - 1;
  while (degree > 0 && std::abs(c(degree)) <= 1e-14 * scale) --degree;
  std::vector<double> roots;
  if (degree < 1) return roots;
  if (degree == 1) {
    roots.push_back(-c(0) / c(1));
    return roots;
  }
  RealMatrix companion = RealMatrix::Zero(degree, degree);
  companion.block(1, 0, degree - 1, degree - 1).setIdentity();
  for (Index k = 0; k < degree; ++k) companion(k, degree - 1) = -c(k) / c(degree);
  Eigen::EigenSolver<RealMatrix> es(companion, false);
  for (Index k = 0; k < degree; ++k) {
    const Complex z = es.eigenvalues()(k);
    if (std::abs(z.imag()) <= 1e-8 * std::max(1.0, std::abs(z))) roots.push_back(z.real());
  }
  return roots;
}

}  // namespace

Vector flatten(const CPModel& model) {
  Index total = 0;
  for (const auto& f : model.factors) total += f.size();
  Vector flat(total);
  Index pos = 0;
  for (const auto& f : model.factors) {
    flat.segment(pos, f.size()) = vec(f);
    pos += f.size();
  }
  return flat;
}

CPModel unflatten(const Vector& flat, const Shape& shape, Index rank, Field field) {
  CPModel model;
  model.field = field;
  Index pos = 0;
  for (Index extent : shape) {
    if (pos + extent * rank > flat.size()) throw std::invalid_argument("unflatten: vector too short");
    model.factors.push_back(unvec(flat.segment(pos, extent * rank), extent, rank));
    pos += extent * rank;
  }
  if (pos != flat.size()) throw std::invalid_argument("unflatten: vector length mismatch");
  return model;
}

Vector gradient(const Tensor& t, const CPModel& model) {
  require_real(t, model, "gradient");
  model.validate();
  if (model.shape() != t.shape()) throw std::invalid_argument("gradient: model shape mismatch");
  const int order = t.order();
  const Index rank = model.rank();
  CPModel g;
  g.field = Field::kReal;
  for (int n = 0; n < order; ++n) {
    Matrix v = Matrix::Ones(rank, rank);
    for (int m = 0; m < order; ++m)
      if (m != n) v = v.cwiseProduct(model.factors[static_cast<std::size_t>(m)].adjoint() * model.factors[static_cast<std::size_t>(m)]);
    const Matrix k = khatri_rao_except(model.factors, n);
    g.factors.push_back(2.0 * (model.factors[static_cast<std::size_t>(n)] * v - unfold(t, n) * k));
  }
  return flatten(g);
}

ElsResult els_step(const Tensor& t, const CPModel& model, const CPModel& direction, const ElsOptions& options) {
  require_real(t, model, "els_step");
  if (direction.shape() != model.shape() || direction.rank() != model.rank())
    throw std::invalid_argument("els_step: direction shape mismatch");
  if (!(options.radius > 0.0)) throw std::invalid_argument("els_step: radius must be positive");

  ElsResult out;
  out.f_start = objective(t, model);
  out.f_mu = out.f_start;
  if (flatten(direction).norm() == 0.0) return out;

  // f is a polynomial of degree 2N in mu; interpolate it on Chebyshev nodes in
  // the scaled variable s = mu / radius.
  const int degree = 2 * t.order();
  const int points = degree + 1;
  RealMatrix vander(points, points);
  RealVector values(points);
  for (int j = 0; j < points; ++j) {
    const double s = std::cos((2.0 * j + 1.0) * std::numbers::pi / (2.0 * points));
    double p = 1.0;
    for (int k = 0; k < points; ++k) {
      vander(j, k) = p;
      p *= s;
    }
    values(j) = objective(t, axpy(model, options.radius * s, direction));
  }
  const RealVector coeffs = vander.fullPivLu().solve(values);
  RealVector deriv(degree);
  for (int k = 0; k < degree; ++k) deriv(k) = (k + 1) * coeffs(k + 1);

  std::vector<double> candidates = {-1.0, 1.0};
  for (double s : real_roots(deriv))
    if (std::abs(s) <= 1e3) candidates.push_back(s);

  for (double s : candidates) {
    const double mu = options.radius * s;
    const double f = objective(t, axpy(model, mu, direction));
    if (f < out.f_mu) {
      out.f_mu = f;
      out.mu = mu;
    }
  }
  out.on_boundary = out.mu != 0.0 && std::abs(out.mu) >= options.radius * (1.0 - 1e-12);
  return out;
}

CPSolution cg_els(const Tensor& t, const CPModel& init, const StopRule& stop, const CgOptions& options) {
  stop.validate();
  require_real(t, init, "cg_els");
  init.validate();
  if (init.shape() != t.shape()) throw std::invalid_argument("cg_els: model shape mismatch");
  const auto start = std::chrono::steady_clock::now();
  const Shape shape = t.shape();
  const Index rank = init.rank();

  CPSolution out;
  out.model = init;
  auto& report = out.report;
  report.residual_history.push_back(std::sqrt(objective(t, out.model)));

  Vector g = gradient(t, out.model);
  Vector d = -g;
  ElsOptions els{options.initial_radius};
  int boundary_hits = 0;
  while (true) {
    const ElsResult step = els_step(t, out.model, unflatten(d, shape, rank, Field::kReal), els);
    if (step.on_boundary) {
      if (++boundary_hits >= 2) {
        els.radius *= 2.0;
        boundary_hits = 0;
      }
    } else {
      boundary_hits = 0;
    }
    if (step.mu != 0.0) out.model = axpy(out.model, step.mu, unflatten(d, shape, rank, Field::kReal));

    const Vector g_new = gradient(t, out.model);
    const double gg = g.squaredNorm();
    double beta = gg > 0.0 ? g_new.dot(g_new - g).real() / gg : 0.0;
    beta = std::max(beta, 0.0);
    d = -g_new + beta * d;
    if (d.dot(g_new).real() >= 0.0) d = -g_new;  // keep a descent direction
    g = g_new;

    ++report.iterations;
    report.residual_history.push_back(std::sqrt(step.f_mu));
    if (apply_stop_rule(stop, report)) break;
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

CPSolution cg_els(const Tensor& t, Index rank, std::uint64_t seed, const StopRule& stop, const CgOptions& options) {
  Rng rng(seed);
  return cg_els(t, random_cp_model(t.shape(), rank, t.field(), rng), stop, options);
}

}  // namespace cpdeflate
