#include <chrono>
#include <stdexcept>
#include <string>

#include "cpdeflate/solvers.hpp"

namespace cpdeflate {

namespace {

Rank1Term zero_term(const Tensor& t) {
  Rank1Term term;
  term.field = t.field();
  for (Index e : t.shape()) term.factors.push_back(Vector::Unit(e, 0));
  return term;
}

}  // namespace

const DeflationStep& DeflationTrace::step(int r, int l) const {
  if (r < 1 || r > rank || l < 1 || l > sweeps()) throw std::out_of_range("deflation trace: (r, l) out of range");
  return steps[static_cast<std::size_t>((l - 1) * rank + (r - 1))];
}

const Tensor& DeflationTrace::x_at(int r, int l) const {
  if (!retains_tensors()) throw std::logic_error("deflation trace recorded norms only");
  step(r, l);
  return x[static_cast<std::size_t>((l - 1) * rank + (r - 1))];
}

const Tensor& DeflationTrace::e_at(int r, int l) const {
  if (!retains_tensors()) throw std::logic_error("deflation trace recorded norms only");
  step(r, l);
  return e[static_cast<std::size_t>((l - 1) * rank + (r - 1))];
}

CPModel DcpdResult::model() const {
  CPModel m;
  if (terms.empty()) return m;
  m.field = terms.front().field;
  const Index rank = static_cast<Index>(terms.size());
  for (std::size_t n = 0; n < terms.front().factors.size(); ++n) {
    Matrix f(terms.front().factors[n].size(), rank);
    for (Index r = 0; r < rank; ++r) {
      const auto& term = terms[static_cast<std::size_t>(r)];
      f.col(r) = n == 0 ? Vector(term.lambda * term.factors[n]) : term.factors[n];
    }
    m.factors.push_back(std::move(f));
  }
  return m;
}

DcpdResult dcpd(const Tensor& t, Index rank, const Rank1Operator& phi, const DcpdOptions& options) {
  if (rank < 1) throw std::invalid_argument("dcpd: rank must be at least 1");
  if (!phi.apply) throw std::invalid_argument("dcpd: empty rank-1 operator");
  options.stop.validate();
  const auto start = std::chrono::steady_clock::now();
  const int big_r = static_cast<int>(rank);
  const double t_norm = norm(t);

  DcpdResult out;
  DeflationTrace& trace = out.trace;
  trace.operator_name = phi.name;
  trace.best_rank1 = phi.best_rank1;
  trace.rank = rank;
  out.report.residual_history.push_back(t_norm);

  std::vector<Tensor> x(static_cast<std::size_t>(big_r));
  out.terms.resize(static_cast<std::size_t>(big_r));
  Tensor e_prev_sweep;  // E[R, l-1]
  Tensor e_prev;        // E[r-1, l]

  for (int l = 1;; ++l) {
    for (int r = 1; r <= big_r; ++r) {
      const auto ri = static_cast<std::size_t>(r - 1);
      Tensor y;
      if (l == 1)
        y = r == 1 ? t : e_prev;                  // Y[r,1] = Y[r-1,1] - X[r-1,1]
      else
        y = x[ri] + (r == 1 ? e_prev_sweep : e_prev);  // X[r,l-1] + E[.,.]

      Rank1Term term;
      if (squared_norm(y) == 0.0) {
        term = zero_term(y);
      } else {
        try {
          term = phi.apply(y);
        } catch (const std::exception& ex) {
          throw std::runtime_error("dcpd: rank-1 operator '" + phi.name + "' failed at (r=" + std::to_string(r) +
                                   ", l=" + std::to_string(l) + "): " + ex.what());
        }
      }
      x[ri] = term.to_tensor();
      Tensor e = y - x[ri];

      DeflationStep s;
      s.r = r;
      s.l = l;
      s.y_norm = norm(y);
      s.x_norm = norm(x[ri]);
      s.e_norm = norm(e);
      s.term = term;
      trace.steps.push_back(std::move(s));
      if (options.retain_tensors) {
        trace.x.push_back(x[ri]);
        trace.e.push_back(e);
      }
      out.terms[ri] = std::move(term);
      e_prev = std::move(e);
    }
    e_prev_sweep = e_prev;

    Tensor check = t - e_prev_sweep;
    for (const auto& xr : x) check -= xr;
    trace.telescoping_errors.push_back(t_norm > 0 ? norm(check) / t_norm : norm(check));
    const double residual_norm = norm(e_prev_sweep);
    trace.sweep_residuals.push_back(residual_norm);

    ++out.report.iterations;
    out.report.residual_history.push_back(residual_norm);
    if (apply_stop_rule(options.stop, out.report)) break;
  }
  out.report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace cpdeflate
