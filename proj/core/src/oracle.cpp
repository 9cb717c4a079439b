#include <cmath>
#include <limits>
#include <stdexcept>

#include "cpdeflate/rank1.hpp"

namespace cpdeflate {

namespace {

// vec(f_0 o ... o f_{k-1}) for the given factors, first index fastest.
Vector kron_chain(const std::vector<Vector>& factors, int begin, int end) {
  Vector acc = Vector::Ones(1);
  for (int k = begin; k < end; ++k) {
    const Vector& f = factors[static_cast<std::size_t>(k)];
    Vector next(acc.size() * f.size());
    for (Index i = 0; i < f.size(); ++i) next.segment(i * acc.size(), acc.size()) = f(i) * acc;
    acc = std::move(next);
  }
  return acc;
}

// g_i = sum over all other indices of T * prod_{m != n} conj(f_m).
Vector contract_except(const Tensor& t, const std::vector<Vector>& factors, int n) {
  const int order = t.order();
  const Vector wl = kron_chain(factors, 0, n).conjugate();
  const Vector wr = kron_chain(factors, n + 1, order).conjugate();
  const Index left = wl.size();
  const Index extent = t.extent(n);
  const Index right = wr.size();
  const Complex* src = t.data().data();
  Vector g = Vector::Zero(extent);
  for (Index r = 0; r < right; ++r) {
    const Eigen::Map<const Matrix> block(src + left * extent * r, left, extent);
    g.noalias() += wr(r) * (block.transpose() * wl);
  }
  return g;
}

}  // namespace

Rank1AlsResult rank1_als(const Tensor& t, const Rank1Term& init, int max_iterations, double tolerance) {
  if (init.shape() != t.shape()) throw std::invalid_argument("rank1_als: initial term shape mismatch");
  Rank1AlsResult out;
  Rank1Term& term = out.term;
  term.field = t.field();
  term.factors = init.factors;
  for (auto& f : term.factors) {
    const double nf = f.norm();
    f = nf > 0 ? Vector(f / nf) : Vector(Vector::Unit(f.size(), 0));
  }
  term.lambda = init.lambda;

  double previous = residual(t, term);
  while (out.iterations < max_iterations) {
    for (int n = 0; n < t.order(); ++n) {
      const Vector g = contract_except(t, term.factors, n);
      const double ng = g.norm();
      if (ng == 0.0) {
        term.lambda = 0.0;
        continue;
      }
      term.factors[static_cast<std::size_t>(n)] = g / ng;
      term.lambda = ng;
    }
    ++out.iterations;
    const double current = residual(t, term);
    if (current == 0.0 || std::abs(previous - current) <= tolerance * previous) {
      out.converged = true;
      break;
    }
    previous = current;
  }
  if (t.field() == Field::kReal) {
    for (auto& f : term.factors) f = f.real().cast<Complex>();
    term.lambda.imag(0.0);
  }
  return out;
}

Rank1Term best_rank1_oracle(const Tensor& t, const OracleOptions& options) {
  if (t.order() < 2) throw std::invalid_argument("best_rank1_oracle: tensor order must be at least 2");
  if (squared_norm(t) == 0.0) {
    Rank1Term zero;
    zero.field = t.field();
    for (Index e : t.shape()) zero.factors.push_back(Vector::Unit(e, 0));
    return zero;
  }

  std::vector<Rank1Term> seeds = {seroap(t), thosvd(t)};
  Rng rng(options.seed);
  for (int k = 0; k < options.restarts; ++k) {
    Rank1Term s;
    s.field = t.field();
    s.lambda = 1.0;
    for (Index e : t.shape()) s.factors.push_back(random_matrix(e, 1, t.field(), Distribution::kUniform, rng).col(0));
    seeds.push_back(std::move(s));
  }

  const bool three_way = t.order() == 3;
  KroneckerSum nkp;
  if (three_way) nkp = nkp_decompose(build_gram(t), t.extent(0), t.extent(1));

  Rank1Term best;
  double best_residual = std::numeric_limits<double>::infinity();
  auto consider = [&](Rank1Term candidate) {
    const double r = residual(t, candidate);
    if (r < best_residual) {
      best_residual = r;
      best = std::move(candidate);
    }
  };
  for (const auto& seed : seeds) {
    Rank1Term polished = rank1_als(t, seed, options.als_max_iterations, options.als_tolerance).term;
    if (three_way) {
      consider(seed);
      consider(polished);
      consider(ce_refine(t, seed, {}, nullptr, &nkp));
      consider(ce_refine(t, polished, {}, nullptr, &nkp));
    } else {
      consider(seed);
      consider(std::move(polished));
    }
  }
  return best;
}

}  // namespace cpdeflate
