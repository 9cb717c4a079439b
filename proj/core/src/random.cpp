#include <cmath>
#include <limits>
#include <stdexcept>

#include "cpdeflate/tensor.hpp"

namespace cpdeflate {

namespace {

double draw(Distribution dist, Rng& rng) {
  if (dist == Distribution::kUniform) return std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
  return std::normal_distribution<double>(0.0, 1.0)(rng);
}

Complex draw(Field field, Distribution dist, Rng& rng) {
  const double re = draw(dist, rng);
  if (field == Field::kReal) return {re, 0.0};
  const double im = draw(dist, rng);
  return {re, im};
}

}  // namespace

Tensor random_tensor(const Shape& shape, Field field, Distribution dist, Rng& rng) {
  std::vector<Complex> data(static_cast<std::size_t>(shape_size(shape)));
  for (auto& z : data) z = draw(field, dist, rng);
  return Tensor(shape, std::move(data), field);
}

Tensor random_tensor(const Shape& shape, Field field, Distribution dist, std::uint64_t seed) {
  Rng rng(seed);
  return random_tensor(shape, field, dist, rng);
}

Matrix random_matrix(Index rows, Index cols, Field field, Distribution dist, Rng& rng) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("random_matrix: dimensions must be positive");
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = draw(field, dist, rng);
  return m;
}

std::pair<CPModel, Tensor> random_cp(const Shape& shape, Index rank, Field field, Distribution dist,
                                     Rng& rng) {
  if (rank < 1) throw std::invalid_argument("random_cp: rank must be at least 1");
  shape_size(shape);
  CPModel model;
  model.field = field;
  for (Index extent : shape) model.factors.push_back(random_matrix(extent, rank, field, dist, rng));
  Tensor t = cp_reconstruct(model);
  return {std::move(model), std::move(t)};
}

std::pair<CPModel, Tensor> random_cp(const Shape& shape, Index rank, Field field, Distribution dist,
                                     std::uint64_t seed) {
  Rng rng(seed);
  return random_cp(shape, rank, field, dist, rng);
}

Tensor add_noise(const Tensor& t, double snr_db, Rng& rng) {
  const double signal = norm(t);
  if (signal == 0.0) throw std::domain_error("add_noise: zero tensor");
  if (std::isinf(snr_db) && snr_db > 0) return t;
  if (std::isnan(snr_db)) throw std::invalid_argument("add_noise: SNR is NaN");

  Tensor noise = random_tensor(t.shape(), t.field(), Distribution::kNormal, rng);
  const double drawn = norm(noise);
  // ||N|| = ||T|| * 10^(-snr/20)
  noise *= Complex(signal * std::pow(10.0, -snr_db / 20.0) / drawn);
  return t + noise;
}

Tensor add_noise(const Tensor& t, double snr_db, std::uint64_t seed) {
  Rng rng(seed);
  return add_noise(t, snr_db, rng);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(a),      static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b),      static_cast<std::uint32_t>(b >> 32)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

}  // namespace cpdeflate
