#include <chrono>
#include <cmath>
#include <stdexcept>

#include "cpdeflate/linalg.hpp"
#include "cpdeflate/solvers.hpp"

namespace cpdeflate {

void StopRule::validate() const {
  if (max_iterations < 1) throw std::invalid_argument("stop rule: max_iterations must be at least 1");
  if (!(relative_change >= 0.0) || !(absolute_target >= 0.0))
    throw std::invalid_argument("stop rule: tolerances must be non-negative");
}

std::string_view to_string(StopReason reason) noexcept {
  switch (reason) {
    case StopReason::kMaxIterations: return "max_iterations";
    case StopReason::kRelativeChange: return "relative_change";
    case StopReason::kAbsoluteTarget: return "absolute_target";
  }
  return "unknown";
}

bool apply_stop_rule(const StopRule& stop, SolveReport& report) {
  const auto& h = report.residual_history;
  const double r = h.back();
  if (r == 0.0 || (stop.absolute_target > 0.0 && r <= stop.absolute_target)) {
    report.converged = true;
    report.reason = StopReason::kAbsoluteTarget;
    return true;
  }
  if (h.size() >= 2 && stop.relative_change > 0.0) {
    const double prev = h[h.size() - 2];
    if (std::abs(prev - r) <= stop.relative_change * prev) {
      report.converged = true;
      report.reason = StopReason::kRelativeChange;
      return true;
    }
  }
  if (report.iterations >= stop.max_iterations) {
    report.converged = false;
    report.reason = StopReason::kMaxIterations;
    return true;
  }
  return false;
}

CPModel random_cp_model(const Shape& shape, Index rank, Field field, Rng& rng) {
  if (rank < 1) throw std::invalid_argument("random_cp_model: rank must be at least 1");
  CPModel model;
  model.field = field;
  for (Index extent : shape) model.factors.push_back(random_matrix(extent, rank, field, Distribution::kUniform, rng));
  return model;
}

namespace {

void check_model(const Tensor& t, const CPModel& model) {
  model.validate();
  if (model.shape() != t.shape()) throw std::invalid_argument("CP model shape does not match the tensor");
}

}  // namespace

CPSolution als(const Tensor& t, const CPModel& init, const StopRule& stop) {
  stop.validate();
  check_model(t, init);
  const auto start = std::chrono::steady_clock::now();
  const int order = t.order();
  const Index rank = init.rank();

  CPSolution out;
  out.model = init;
  out.model.field = common_field(t.field(), init.field);
  auto& factors = out.model.factors;

  std::vector<Matrix> unfoldings;
  for (int n = 0; n < order; ++n) unfoldings.push_back(unfold(t, n));

  auto& report = out.report;
  report.residual_history.push_back(norm(t - cp_reconstruct(out.model)));
  while (true) {
    for (int n = 0; n < order; ++n) {
      Matrix v = Matrix::Ones(rank, rank);
      for (int m = 0; m < order; ++m)
        if (m != n) v = v.cwiseProduct(factors[static_cast<std::size_t>(m)].adjoint() * factors[static_cast<std::size_t>(m)]);
      const Matrix k = khatri_rao_except(factors, n);
      Matrix a = unfoldings[static_cast<std::size_t>(n)] * k.conjugate() * pinv(v.conjugate(), 1e-12);
      if (out.model.field == Field::kReal) a = a.real().cast<Complex>();
      factors[static_cast<std::size_t>(n)] = std::move(a);
    }
    ++report.iterations;
    report.residual_history.push_back(norm(t - cp_reconstruct(out.model)));
    if (apply_stop_rule(stop, report)) break;
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

CPSolution als(const Tensor& t, Index rank, std::uint64_t seed, const StopRule& stop) {
  Rng rng(seed);
  return als(t, random_cp_model(t.shape(), rank, t.field(), rng), stop);
}

}  // namespace cpdeflate
