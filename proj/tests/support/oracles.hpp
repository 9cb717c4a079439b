#pragma once

// Reference computations used only by the tests. Each one is written from the
// definitions with plain loops, long double accumulation or dense scans, and
// shares no code path with the library routine it checks.

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "cpdeflate/tensor.hpp"

namespace oracle {

using cpdeflate::Complex;
using cpdeflate::Index;
using cpdeflate::Matrix;
using cpdeflate::Shape;
using cpdeflate::Tensor;
using cpdeflate::Vector;
using LComplex = std::complex<long double>;

inline std::string data_file(const std::string& name) { return std::string(CPDEFLATE_DATA_DIR) + "/" + name; }

/// Multi-index of a flat offset, first index fastest.
inline std::vector<Index> multi_index(Index offset, const Shape& shape) {
  std::vector<Index> idx(shape.size());
  for (std::size_t k = 0; k < shape.size(); ++k) {
    idx[k] = offset % shape[k];
    offset /= shape[k];
  }
  return idx;
}

/// T_(n)(i_n, j) with j = sum_{k != n} i_k J_k, J_k the product of the
/// extents of the earlier non-n modes.
inline Matrix unfold_by_index(const Tensor& t, int mode) {
  const Shape& s = t.shape();
  const Index rows = s[static_cast<std::size_t>(mode)];
  Matrix m = Matrix::Zero(rows, t.size() / rows);
  for (Index off = 0; off < t.size(); ++off) {
    const auto idx = multi_index(off, s);
    Index col = 0, stride = 1;
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (static_cast<int>(k) == mode) continue;
      col += idx[k] * stride;
      stride *= s[k];
    }
    m(idx[static_cast<std::size_t>(mode)], col) = t[off];
  }
  return m;
}

inline LComplex inner_long(const Tensor& a, const Tensor& b) {
  LComplex sum = 0;
  for (Index i = 0; i < a.size(); ++i)
    sum += LComplex(a[i].real(), a[i].imag()) * std::conj(LComplex(b[i].real(), b[i].imag()));
  return sum;
}

inline double angle_long(const Tensor& a, const Tensor& b) {
  const long double c = std::abs(inner_long(a, b)) / std::sqrt(std::real(inner_long(a, a)) * std::real(inner_long(b, b)));
  return static_cast<double>(std::acos(std::min<long double>(1.0L, c)));
}

/// sum_r prod_n A^(n)(i_n, r), entry by entry.
inline Tensor cp_by_index(const std::vector<Matrix>& factors, const Shape& shape, cpdeflate::Field field) {
  Tensor t(shape, field);
  const Index rank = factors.front().cols();
  for (Index off = 0; off < t.size(); ++off) {
    const auto idx = multi_index(off, shape);
    Complex v = 0;
    for (Index r = 0; r < rank; ++r) {
      Complex p = 1;
      for (std::size_t n = 0; n < factors.size(); ++n) p *= factors[n](idx[n], r);
      v += p;
    }
    t[off] = v;
  }
  return t;
}

/// Scalar a with b = a * x minimizing ||b - a x||; |a| is 1 when b and x
/// differ only by a phase.
inline Complex best_scalar(const Matrix& x, const Matrix& b) {
  return (x.adjoint() * b).trace() / x.squaredNorm();
}

/// max |b - c x| over entries, with c the best unit-modulus scalar.
inline double phase_aligned_error(const Matrix& x, const Matrix& b) {
  Complex c = best_scalar(x, b);
  c /= std::abs(c);
  return (b - c * x).cwiseAbs().maxCoeff();
}

/// Largest eigenvalue of a real symmetric positive definite matrix by power
/// iteration in long double.
inline long double sym_lambda_max_long(const std::vector<std::vector<long double>>& a, int iterations = 2000) {
  const std::size_t n = a.size();
  std::vector<long double> v(n, 1.0L), w(n);
  auto apply = [&](const std::vector<long double>& x, std::vector<long double>& y) {
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = 0;
      for (std::size_t j = 0; j < n; ++j) y[i] += a[i][j] * x[j];
    }
  };
  for (int it = 0; it < iterations; ++it) {
    apply(v, w);
    long double nrm = 0;
    for (long double x : w) nrm += x * x;
    nrm = std::sqrt(nrm);
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / nrm;
  }
  apply(v, w);
  long double vv = 0, vav = 0;
  for (std::size_t i = 0; i < n; ++i) {
    vv += v[i] * v[i];
    vav += v[i] * w[i];
  }
  return vav / vv;
}

/// Central differences of f at x, one real coordinate at a time.
inline Vector central_difference(const std::function<double(const Vector&)>& f, const Vector& x, double h) {
  Vector g(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    Vector xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    g(i) = (f(xp) - f(xm)) / (2 * h);
  }
  return g;
}

// SeROAP worked example on the 2x2x2x2 fixture: input unfolding and printed
// intermediates (four decimals).
inline Matrix appendix_t1() {
  const Complex i(0, 1);
  Matrix m(2, 8);
  m << 1, -1, 0, 1, 3, i, 0, 1,  //
      0, 1, -i, 1, 1, 0, 2, -2.0 * i;
  return m;
}

inline Vector column(std::initializer_list<Complex> values) {
  Vector v(static_cast<Index>(values.size()));
  Index k = 0;
  for (const auto& z : values) v(k++) = z;
  return v;
}

struct AppendixPrinted {
  Vector v1, v2, u, v, w_first, w_second;
  Matrix v1_matrix, x2, x1;
};

inline AppendixPrinted appendix_printed() {
  using C = Complex;
  AppendixPrinted p;
  p.v1 = column({C(-0.1717, -0.0914), C(0.0245, 0.1060), C(-0.0146, -0.1472), C(-0.3189, -0.0768),
                 C(-0.6624, -0.2596), C(-0.0914, 0.1717), C(-0.2944, 0.0292), C(-0.2010, -0.3858)});
  p.v1_matrix.resize(2, 4);
  p.v1_matrix << C(-0.1717, -0.0914), C(-0.0146, -0.1472), C(-0.6624, -0.2596), C(-0.2944, 0.0292),
      C(0.0245, 0.1060), C(-0.3189, -0.0768), C(-0.0914, 0.1717), C(-0.2010, -0.3858);
  p.v2 = column({C(-0.1654, 0.1657), C(0.0611, 0.2758), C(-0.6190, 0.6261), C(-0.2033, 0.2210)});
  p.u = column({C(0.6106, -0.7024), C(0.1758, -0.3208)});
  p.v = column({C(-0.3027, -0.0545), C(-0.9481, 0.0809)});
  p.w_first = column({C(-0.1466, 0.2459), C(-0.0357, 0.1067), C(-0.6357, 0.6166), C(-0.1926, 0.2899)});
  p.x2.resize(2, 4);
  p.x2 << C(-0.1900, -0.1178), C(-0.0631, -0.0611), C(-0.6624, -0.1989), C(-0.2377, -0.1317),
      C(-0.0604, 0.0051), C(-0.0236, -0.0031), C(-0.1762, 0.0638), C(-0.0730, 0.0098);
  p.w_second = column({C(-0.1900, -0.1178), C(-0.0604, 0.0051), C(-0.0631, -0.0611), C(-0.0236, -0.0031),
                       C(-0.6624, -0.1989), C(-0.1762, 0.0638), C(-0.2377, -0.1317), C(-0.0730, 0.0098)});
  p.x1.resize(2, 8);
  p.x1 << C(0.5373, -0.0992), C(0.1329, 0.0653), C(0.1981, -0.0830), C(0.0565, 0.0140), C(1.6851, 0.1360),
      C(0.3446, 0.3020), C(0.6585, -0.0886), C(0.1576, 0.0872),  //
      C(0.2696, -0.1010), C(0.0750, 0.0216), C(0.0951, -0.0613), C(0.0306, 0.0020), C(0.8868, -0.0849),
      C(0.2066, 0.1249), C(0.3335, -0.1067), C(0.0898, 0.0307);
  return p;
}

}  // namespace oracle
