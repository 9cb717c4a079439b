#include "cpdeflate/tensor.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace cpdeflate {

namespace {

bool all_real(std::span<const Complex> data) {
  return std::all_of(data.begin(), data.end(), [](const Complex& z) { return z.imag() == 0.0; });
}

}  // namespace

Field common_field(Field a, Field b) noexcept {
  return (a == Field::kComplex || b == Field::kComplex) ? Field::kComplex : Field::kReal;
}

std::string_view to_string(Field field) noexcept {
  return field == Field::kReal ? "real" : "complex";
}

Field parse_field(std::string_view text) {
  if (text == "real") return Field::kReal;
  if (text == "complex") return Field::kComplex;
  throw std::invalid_argument("unknown field '" + std::string(text) + "'");
}

Index shape_size(const Shape& shape) {
  if (shape.empty()) throw std::invalid_argument("tensor shape must have at least one mode");
  Index n = 1;
  for (Index extent : shape) {
    if (extent <= 0) throw std::invalid_argument("tensor extents must be positive");
    n *= extent;
  }
  return n;
}

std::string shape_to_string(const Shape& shape) {
  std::string out;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out += 'x';
    out += std::to_string(shape[i]);
  }
  return out;
}

Shape parse_shape(std::string_view text) {
  Shape shape;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t next = text.find_first_of("xX", pos);
    if (next == std::string_view::npos) next = text.size();
    std::string_view token = text.substr(pos, next - pos);
    while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
    while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
    Index value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size() || value <= 0)
      throw std::invalid_argument("bad shape '" + std::string(text) + "'");
    shape.push_back(value);
    pos = next + 1;
  }
  return shape;
}

// ---------------------------------------------------------------------------
// Tensor

Tensor::Tensor(Shape shape, Field field)
    : shape_(std::move(shape)), data_(static_cast<std::size_t>(shape_size(shape_))), field_(field) {}

Tensor::Tensor(Shape shape, std::vector<Complex> data, Field field)
    : shape_(std::move(shape)), data_(std::move(data)), field_(field) {
  if (static_cast<Index>(data_.size()) != shape_size(shape_))
    throw std::invalid_argument("tensor data length does not match its shape");
  if (field_ == Field::kReal && !all_real(data_))
    throw std::invalid_argument("real tensor with non-zero imaginary parts");
}

Index Tensor::extent(int mode) const {
  if (mode < 0 || mode >= order()) throw std::out_of_range("mode index out of range");
  return shape_[static_cast<std::size_t>(mode)];
}

Index Tensor::offset(std::span<const Index> index) const {
  if (static_cast<int>(index.size()) != order())
    throw std::invalid_argument("multi-index length does not match tensor order");
  Index off = 0;
  Index stride = 1;
  for (std::size_t k = 0; k < index.size(); ++k) {
    if (index[k] < 0 || index[k] >= shape_[k]) throw std::out_of_range("multi-index out of range");
    off += index[k] * stride;
    stride *= shape_[k];
  }
  return off;
}

Eigen::Map<const Vector> Tensor::as_vector() const noexcept {
  return Eigen::Map<const Vector>(data_.data(), static_cast<Index>(data_.size()));
}

void Tensor::check_same_shape(const Tensor& other) const {
  if (shape_ != other.shape_) throw std::invalid_argument("tensor shape mismatch");
}

Tensor& Tensor::operator+=(const Tensor& other) {
  check_same_shape(other);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  field_ = common_field(field_, other.field_);
  return *this;
}

Tensor& Tensor::operator-=(const Tensor& other) {
  check_same_shape(other);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  field_ = common_field(field_, other.field_);
  return *this;
}

Tensor& Tensor::operator*=(Complex scale) {
  if (scale.imag() == 0.0) {
    const double s = scale.real();
    for (auto& z : data_) z *= s;
  } else {
    for (auto& z : data_) z *= scale;
    field_ = Field::kComplex;
  }
  return *this;
}

Tensor operator+(Tensor lhs, const Tensor& rhs) { return lhs += rhs; }
Tensor operator-(Tensor lhs, const Tensor& rhs) { return lhs -= rhs; }
Tensor operator*(Complex scale, Tensor t) { return t *= scale; }

Tensor tensor_from_vector(const Vector& flat, const Shape& shape, Field field) {
  if (flat.size() != shape_size(shape)) throw std::invalid_argument("vector length does not match shape");
  std::vector<Complex> data(flat.data(), flat.data() + flat.size());
  if (field == Field::kReal)
    for (auto& z : data) z.imag(0.0);
  return Tensor(shape, std::move(data), field);
}

// ---------------------------------------------------------------------------
// Unfoldings

namespace {

struct ModeSplit {
  Index left = 1;   // product of extents before the mode
  Index extent = 1;
  Index right = 1;  // product of extents after the mode
};

ModeSplit split_at(const Shape& shape, int mode) {
  if (mode < 0 || mode >= static_cast<int>(shape.size())) throw std::out_of_range("mode index out of range");
  ModeSplit s;
  for (int k = 0; k < mode; ++k) s.left *= shape[static_cast<std::size_t>(k)];
  s.extent = shape[static_cast<std::size_t>(mode)];
  for (std::size_t k = static_cast<std::size_t>(mode) + 1; k < shape.size(); ++k) s.right *= shape[k];
  return s;
}

}  // namespace

Matrix unfold(const Tensor& t, int mode) {
  const ModeSplit s = split_at(t.shape(), mode);
  Matrix m(s.extent, s.left * s.right);
  const Complex* src = t.data().data();
  // offset = l + left * (i + extent * r), column = l + left * r
  for (Index r = 0; r < s.right; ++r)
    for (Index i = 0; i < s.extent; ++i)
      for (Index l = 0; l < s.left; ++l) m(i, l + s.left * r) = src[l + s.left * (i + s.extent * r)];
  return m;
}

Tensor fold(const Matrix& m, int mode, const Shape& shape, Field field) {
  const ModeSplit s = split_at(shape, mode);
  if (m.rows() != s.extent || m.cols() != s.left * s.right)
    throw std::invalid_argument("matrix dimensions inconsistent with fold shape");
  std::vector<Complex> data(static_cast<std::size_t>(m.size()));
  for (Index r = 0; r < s.right; ++r)
    for (Index i = 0; i < s.extent; ++i)
      for (Index l = 0; l < s.left; ++l)
        data[static_cast<std::size_t>(l + s.left * (i + s.extent * r))] = m(i, l + s.left * r);
  // A real field tag projects onto the real part.
  if (field == Field::kReal)
    for (auto& z : data) z.imag(0.0);
  return Tensor(shape, std::move(data), field);
}

Tensor permute(const Tensor& t, const std::vector<int>& perm) {
  const int n = t.order();
  if (static_cast<int>(perm.size()) != n) throw std::invalid_argument("permute: wrong permutation length");
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  Shape shape(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const int src = perm[static_cast<std::size_t>(k)];
    if (src < 0 || src >= n || seen[static_cast<std::size_t>(src)]) throw std::invalid_argument("permute: not a permutation");
    seen[static_cast<std::size_t>(src)] = true;
    shape[static_cast<std::size_t>(k)] = t.shape()[static_cast<std::size_t>(src)];
  }
  // Stride in the source buffer of each output mode.
  std::vector<Index> src_stride(static_cast<std::size_t>(n));
  {
    std::vector<Index> stride(static_cast<std::size_t>(n));
    Index s = 1;
    for (int k = 0; k < n; ++k) {
      stride[static_cast<std::size_t>(k)] = s;
      s *= t.shape()[static_cast<std::size_t>(k)];
    }
    for (int k = 0; k < n; ++k) src_stride[static_cast<std::size_t>(k)] = stride[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])];
  }
  std::vector<Complex> data(static_cast<std::size_t>(t.size()));
  std::vector<Index> idx(static_cast<std::size_t>(n), 0);
  Index src = 0;
  for (std::size_t out = 0; out < data.size(); ++out) {
    data[out] = t[src];
    for (std::size_t k = 0; k < idx.size(); ++k) {
      src += src_stride[k];
      if (++idx[k] < shape[k]) break;
      src -= src_stride[k] * shape[k];
      idx[k] = 0;
    }
  }
  return Tensor(std::move(shape), std::move(data), t.field());
}

Vector vec(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

Matrix unvec(const Vector& v, Index rows, Index cols) {
  if (rows <= 0 || cols <= 0 || v.size() != rows * cols)
    throw std::invalid_argument("unvec: length does not match rows * cols");
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

// ---------------------------------------------------------------------------
// Scalar products

Complex inner(const Tensor& t, const Tensor& u) {
  if (t.shape() != u.shape()) throw std::invalid_argument("inner: shape mismatch");
  Complex acc = 0.0;
  const auto a = t.data();
  const auto b = u.data();
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * std::conj(b[i]);
  return acc;
}

double squared_norm(const Tensor& t) {
  double acc = 0.0;
  for (const auto& z : t.data()) acc += std::norm(z);
  return acc;
}

double norm(const Tensor& t) { return std::sqrt(squared_norm(t)); }

Angle::Angle(double radians) : radians_(radians) {
  if (!(radians >= 0.0 && radians <= std::numbers::pi / 2))
    throw std::domain_error("angle outside [0, pi/2]");
}

double Angle::sin() const noexcept { return std::sin(radians_); }
double Angle::cos() const noexcept { return std::cos(radians_); }

Angle angle(const Tensor& t, const Tensor& u) {
  const double nt = norm(t);
  const double nu = norm(u);
  if (nt == 0.0 || nu == 0.0) throw std::domain_error("angle: zero-norm tensor");
  const double c = std::clamp(std::abs(inner(t, u)) / (nt * nu), 0.0, 1.0);
  return Angle(std::acos(c));
}

// ---------------------------------------------------------------------------
// Matrix products

Matrix kronecker(const Matrix& a, const Matrix& b) {
  Matrix k(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return k;
}

Matrix khatri_rao(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw std::invalid_argument("khatri_rao: column counts differ");
  Matrix k(a.rows() * b.rows(), a.cols());
  for (Index r = 0; r < a.cols(); ++r)
    for (Index i = 0; i < a.rows(); ++i) k.col(r).segment(i * b.rows(), b.rows()) = a(i, r) * b.col(r);
  return k;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("hadamard: shape mismatch");
  return a.cwiseProduct(b);
}

// ---------------------------------------------------------------------------
// Rank-one and CP structure

Tensor outer(std::span<const Vector> vectors, Field field) {
  if (vectors.empty()) throw std::invalid_argument("outer: need at least one vector");
  Shape shape;
  for (const auto& v : vectors) shape.push_back(v.size());
  // vec(v_0 o ... o v_{N-1}) = v_{N-1} kron ... kron v_0
  Vector acc = vectors[0];
  for (std::size_t k = 1; k < vectors.size(); ++k) {
    const Vector& v = vectors[k];
    Vector next(acc.size() * v.size());
    for (Index i = 0; i < v.size(); ++i) next.segment(i * acc.size(), acc.size()) = v(i) * acc;
    acc = std::move(next);
  }
  return tensor_from_vector(acc, shape, field);
}

Index CPModel::rank() const {
  if (factors.empty()) throw std::invalid_argument("CP model has no factors");
  return factors.front().cols();
}

Shape CPModel::shape() const {
  Shape s;
  for (const auto& f : factors) s.push_back(f.rows());
  return s;
}

void CPModel::validate() const {
  const Index r = rank();
  if (r < 1) throw std::invalid_argument("CP model rank must be at least 1");
  for (const auto& f : factors)
    if (f.cols() != r || f.rows() < 1) throw std::invalid_argument("CP factor matrices disagree on rank");
}

Matrix khatri_rao_except(const std::vector<Matrix>& factors, int mode) {
  const int n = static_cast<int>(factors.size());
  if (mode < 0 || mode >= n) throw std::out_of_range("mode index out of range");
  Matrix acc;
  bool first = true;
  for (int k = n - 1; k >= 0; --k) {
    if (k == mode) continue;
    if (first) {
      acc = factors[static_cast<std::size_t>(k)];
      first = false;
    } else {
      acc = khatri_rao(acc, factors[static_cast<std::size_t>(k)]);
    }
  }
  if (first) acc = Matrix::Ones(1, factors[static_cast<std::size_t>(mode)].cols());
  return acc;
}

Tensor cp_reconstruct(const CPModel& model) {
  model.validate();
  const Shape shape = model.shape();
  const Matrix x0 = model.factors[0] * khatri_rao_except(model.factors, 0).transpose();
  return fold(x0, 0, shape, model.field);
}

}  // namespace cpdeflate
