#pragma once

// Dense N-way tensors over the real or complex field.
//
// Storage is a flat buffer of std::complex<double> in first-index-fastest
// order, so the mode-0 unfolding is a reinterpretation of the buffer and
// every other unfolding is an explicit permutation (Kolda & Bader
// convention: the column index of T_(n) runs over the remaining modes with
// the smaller mode indices varying fastest). Real tensors carry
// Field::kReal and keep every imaginary part exactly zero.

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace cpdeflate {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Shape = std::vector<Index>;
using Rng = std::mt19937_64;

enum class Field { kReal, kComplex };

/// The smallest field containing both arguments.
Field common_field(Field a, Field b) noexcept;
std::string_view to_string(Field field) noexcept;
Field parse_field(std::string_view text);

/// Product of the extents; throws std::invalid_argument on an empty shape or
/// a non-positive extent.
Index shape_size(const Shape& shape);
std::string shape_to_string(const Shape& shape);  // "3x4x5"
Shape parse_shape(std::string_view text);         // accepts "3x4x5"

class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, Field field = Field::kReal);
  Tensor(Shape shape, std::vector<Complex> data, Field field);

  const Shape& shape() const noexcept { return shape_; }
  int order() const noexcept { return static_cast<int>(shape_.size()); }
  Index extent(int mode) const;
  Index size() const noexcept { return static_cast<Index>(data_.size()); }
  Field field() const noexcept { return field_; }
  bool empty() const noexcept { return data_.empty(); }

  std::span<const Complex> data() const noexcept { return data_; }
  std::span<Complex> data() noexcept { return data_; }

  Complex operator[](Index offset) const { return data_[static_cast<std::size_t>(offset)]; }
  Complex& operator[](Index offset) { return data_[static_cast<std::size_t>(offset)]; }

  /// Flat offset of a multi-index (0-based, first index fastest).
  Index offset(std::span<const Index> index) const;
  Complex at(std::span<const Index> index) const { return (*this)[offset(index)]; }

  /// vec(T): the flat buffer viewed as a column vector.
  Eigen::Map<const Vector> as_vector() const noexcept;

  Tensor& operator+=(const Tensor& other);
  Tensor& operator-=(const Tensor& other);
  Tensor& operator*=(Complex scale);

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  void check_same_shape(const Tensor& other) const;

  Shape shape_;
  std::vector<Complex> data_;
  Field field_ = Field::kReal;
};

Tensor operator+(Tensor lhs, const Tensor& rhs);
Tensor operator-(Tensor lhs, const Tensor& rhs);
Tensor operator*(Complex scale, Tensor t);

/// Builds a tensor from a column vector laid out in flat order.
Tensor tensor_from_vector(const Vector& flat, const Shape& shape, Field field);

// ---------------------------------------------------------------------------
// Unfoldings and reshapes

/// Mode-n unfolding T_(n) of size I_n x prod_{j != n} I_j; `mode` is 0-based.
Matrix unfold(const Tensor& t, int mode);

/// Exact inverse of unfold().
Tensor fold(const Matrix& m, int mode, const Shape& shape, Field field);

/// Reorders modes: result mode k is input mode perm[k].
Tensor permute(const Tensor& t, const std::vector<int>& perm);

/// Column-stacking vectorization and its inverse.
Vector vec(const Matrix& m);
Matrix unvec(const Vector& v, Index rows, Index cols);

// ---------------------------------------------------------------------------
// Scalar products, norms, angles

/// <T, U> = sum T_i conj(U_i).
Complex inner(const Tensor& t, const Tensor& u);
double norm(const Tensor& t);
double squared_norm(const Tensor& t);

/// An angle in [0, pi/2].
class Angle {
 public:
  Angle() = default;
  explicit Angle(double radians);
  double radians() const noexcept { return radians_; }
  double sin() const noexcept;
  double cos() const noexcept;

 private:
  double radians_ = 0.0;
};

/// arccos(|<T,U>| / (||T|| ||U||)), clamped to [0, pi/2]. Throws
/// std::domain_error when either tensor has zero norm.
Angle angle(const Tensor& t, const Tensor& u);

// ---------------------------------------------------------------------------
// Matrix products

Matrix kronecker(const Matrix& a, const Matrix& b);
/// Column-wise Kronecker product: column r is kron(a(:,r), b(:,r)).
Matrix khatri_rao(const Matrix& a, const Matrix& b);
Matrix hadamard(const Matrix& a, const Matrix& b);

// ---------------------------------------------------------------------------
// Rank-one and CP structure

/// Tensor product v_0 o v_1 o ... o v_{N-1}.
Tensor outer(std::span<const Vector> vectors, Field field);

/// R-column factor matrices A^(0), ..., A^(N-1) describing a rank-R model.
struct CPModel {
  std::vector<Matrix> factors;
  Field field = Field::kReal;

  int order() const noexcept { return static_cast<int>(factors.size()); }
  Index rank() const;
  Shape shape() const;
  /// Throws std::invalid_argument unless every factor has rank() columns.
  void validate() const;
};

/// Khatri-Rao product of all factors except `mode`, in the ALS ordering
/// A^(N-1) (.) ... (.) A^(mode+1) (.) A^(mode-1) (.) ... (.) A^(0).
Matrix khatri_rao_except(const std::vector<Matrix>& factors, int mode);

/// Sum of the R outer products of corresponding factor columns.
Tensor cp_reconstruct(const CPModel& model);

// ---------------------------------------------------------------------------
// Random generation

enum class Distribution { kUniform, kNormal };

/// Entries i.i.d. per component: uniform on [-1, 1] or standard normal. For the
/// complex field the real and imaginary parts are drawn independently.
Tensor random_tensor(const Shape& shape, Field field, Distribution dist, Rng& rng);
Tensor random_tensor(const Shape& shape, Field field, Distribution dist, std::uint64_t seed);

Matrix random_matrix(Index rows, Index cols, Field field, Distribution dist, Rng& rng);

/// Factor entries drawn i.i.d.; returns the model and its reconstruction.
std::pair<CPModel, Tensor> random_cp(const Shape& shape, Index rank, Field field,
                                     Distribution dist, Rng& rng);
std::pair<CPModel, Tensor> random_cp(const Shape& shape, Index rank, Field field,
                                     Distribution dist, std::uint64_t seed);

/// Returns T + N with Gaussian N scaled so that 10 log10(||T||^2 / ||N||^2)
/// equals `snr_db` exactly. snr_db = +infinity returns T unchanged.
Tensor add_noise(const Tensor& t, double snr_db, Rng& rng);
Tensor add_noise(const Tensor& t, double snr_db, std::uint64_t seed);

/// Deterministic seed for stream (master, a, b); used to give every
/// Monte-Carlo trial its own generator.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);

// ---------------------------------------------------------------------------
// Text format
//
//   shape: I1 I2 ... IN field: real|complex
//   <one scalar per line in flat order; complex scalars as "re im">

Tensor read_tensor(std::istream& in);
Tensor read_tensor_file(const std::string& path);
void write_tensor(std::ostream& out, const Tensor& t);

}  // namespace cpdeflate
