#include <stdexcept>

#include "cpdeflate/experiments.hpp"

namespace cpdeflate {

FlopEstimate complexity_estimate(const std::string& algorithm, const Shape& dims, Index rank, int k) {
  const std::uint64_t p = static_cast<std::uint64_t>(shape_size(dims));
  if (rank < 0 || k < 0) throw std::invalid_argument("complexity_estimate: rank and k must be non-negative");
  FlopEstimate est;
  est.algorithm = algorithm;
  est.dims = dims;
  est.rank = rank;
  est.order = static_cast<int>(dims.size());
  est.k = k;
  const std::uint64_t n = static_cast<std::uint64_t>(est.order);
  const std::uint64_t r = static_cast<std::uint64_t>(rank);
  const std::uint64_t kk = static_cast<std::uint64_t>(k);
  if (algorithm == "als") {
    est.count = n * r * p;
  } else if (algorithm == "cg") {
    est.count = (((std::uint64_t{1} << n) + 1) * r + n * n) * p;
  } else if (algorithm == "thosvd") {
    est.count = (2 * n * kk + 2) * p;
  } else if (algorithm == "seroap") {
    est.count = (2 * kk + 2) * p;
  } else if (algorithm == "dcpd-thosvd") {
    est.count = (2 * n * kk + 2) * r * p;
  } else if (algorithm == "dcpd-seroap") {
    est.count = (2 * kk + 2) * r * p;
  } else {
    throw std::invalid_argument("complexity_estimate: unknown algorithm '" + algorithm + "'");
  }
  return est;
}

}  // namespace cpdeflate
