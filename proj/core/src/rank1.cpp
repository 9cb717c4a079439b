#include "cpdeflate/rank1.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace cpdeflate {

namespace {

const IterationOptions kTripletOptions{};

Vector left_vector(const Matrix& m) {
  return dominant_triplet(m, kTripletOptions, TripletMethod::kGramEigen).u;
}

void require_nonzero(const Tensor& t, const char* who) {
  if (t.empty() || squared_norm(t) == 0.0) throw std::domain_error(std::string(who) + ": zero tensor");
}

}  // namespace

Shape Rank1Term::shape() const {
  Shape s;
  for (const auto& f : factors) s.push_back(f.size());
  return s;
}

Tensor Rank1Term::to_tensor() const {
  Tensor out = outer(factors, Field::kComplex);
  out *= lambda;
  if (field == Field::kReal) return tensor_from_vector(out.as_vector(), out.shape(), Field::kReal);
  return out;
}

double residual(const Tensor& t, const Rank1Term& term) { return norm(t - term.to_tensor()); }

Rank1Term rank1_from_tensor(const Tensor& x) {
  Rank1Term term;
  term.field = x.field();
  if (squared_norm(x) == 0.0) {
    for (Index e : x.shape()) term.factors.push_back(Vector::Unit(e, 0));
    return term;
  }
  for (int n = 0; n < x.order(); ++n) term.factors.push_back(left_vector(unfold(x, n)));
  term.lambda = inner(x, outer(term.factors, Field::kComplex));
  if (x.field() == Field::kReal) term.lambda.imag(0.0);
  return term;
}

// ---------------------------------------------------------------------------

Rank1Term thosvd(const Tensor& t) {
  if (t.order() < 2) throw std::invalid_argument("thosvd: tensor order must be at least 2");
  require_nonzero(t, "thosvd");
  Rank1Term term;
  term.field = t.field();
  for (int n = 0; n < t.order(); ++n) term.factors.push_back(left_vector(unfold(t, n)));
  term.lambda = inner(t, outer(term.factors, Field::kComplex));
  if (t.field() == Field::kReal) term.lambda.imag(0.0);
  return term;
}

// ---------------------------------------------------------------------------

namespace {

Rank1Term seroap_in_order(const Tensor& t, TripletMethod method, SeroapTrace* trace) {
  const int order = t.order();
  const Shape& shape = t.shape();
  const IterationOptions opts{};

  Matrix v0 = unfold(t, 0);
  if (order == 2) {
    const SingularTriplet s = dominant_triplet(v0, opts, method);
    if (trace) {
      trace->vm = {v0};
      trace->u = s.u;
      trace->v_bottom = s.v;
      trace->w = kronecker(s.v.conjugate(), s.u);
    }
    Rank1Term term;
    term.field = t.field();
    term.lambda = s.sigma;
    term.factors = {s.u, s.v.conjugate()};
    return term;
  }

  // Descent: V_n = unvec(v_n) with I_{n+1} rows (1-based extents).
  std::vector<Matrix> vm;
  vm.push_back(std::move(v0));
  std::vector<Vector> vs;
  for (int n = 1; n <= order - 2; ++n) {
    const SingularTriplet s = dominant_triplet(vm.back(), opts, method);
    const Index rows = shape[static_cast<std::size_t>(n)];
    vs.push_back(s.v);
    vm.push_back(unvec(s.v, rows, s.v.size() / rows));
  }
  const SingularTriplet bottom = dominant_triplet(vm.back(), opts, method);
  const Vector& u = bottom.u;
  const Vector& v = bottom.v;

  // w is tracked both literally and as c * vec(f_n o ... o f_{N-1}) with unit
  // factors, which is how the output's factors are read off.
  Vector w = kronecker(v.conjugate(), u);
  std::vector<Vector> tail = {u, v.conjugate()};
  Complex c = 1.0;
  if (trace) {
    trace->v = vs;
    trace->vm = vm;
    trace->u = u;
    trace->v_bottom = v;
    trace->w = w;
    trace->x.clear();
  }

  // Ascent: X_(n) = (V_{n-1} w) w^H, w = vec(X_(n)).
  for (int n = order - 2; n >= 1; --n) {
    const Matrix& prev = vm[static_cast<std::size_t>(n - 1)];
    const Vector a = prev * w;
    const Matrix x = a * w.adjoint();
    if (trace) trace->x.push_back(x);
    w = vec(x);
    // vec(a w^H) = conj(w) kron a  =>  factors (a/|a|, conj(tail)), c <- |a| conj(c)
    const double na = a.norm();
    for (auto& f : tail) f = f.conjugate().eval();
    tail.insert(tail.begin(), na > 0 ? Vector(a / na) : Vector(Vector::Unit(a.size(), 0)));
    c = na * std::conj(c);
  }

  Rank1Term term;
  term.field = t.field();
  term.lambda = c;
  term.factors = std::move(tail);
  if (t.field() == Field::kReal) {
    // Real data keeps every factor real; absorb any stray sign into lambda.
    for (auto& f : term.factors) f = f.real().cast<Complex>();
    term.lambda = Complex(c.real(), 0.0);
  }
  return term;
}

}  // namespace

Rank1Term seroap(const Tensor& t, const SeroapOptions& options, SeroapTrace* trace) {
  if (t.order() < 2) throw std::invalid_argument("seroap: tensor order must be at least 2");
  require_nonzero(t, "seroap");
  if (!options.sort_modes) return seroap_in_order(t, options.triplet, trace);

  std::vector<int> perm(static_cast<std::size_t>(t.order()));
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) {
    return t.shape()[static_cast<std::size_t>(a)] > t.shape()[static_cast<std::size_t>(b)];
  });
  Rank1Term sorted = seroap_in_order(permute(t, perm), options.triplet, trace);
  Rank1Term term;
  term.field = sorted.field;
  term.lambda = sorted.lambda;
  term.factors.resize(sorted.factors.size());
  for (std::size_t k = 0; k < perm.size(); ++k)
    term.factors[static_cast<std::size_t>(perm[k])] = std::move(sorted.factors[k]);
  return term;
}

// ---------------------------------------------------------------------------

Rank1Operator thosvd_operator() { return {"thosvd", [](const Tensor& t) { return thosvd(t); }, false}; }

Rank1Operator seroap_operator() { return {"seroap", [](const Tensor& t) { return seroap(t); }, false}; }

Rank1Operator seroap_ce_operator() {
  return {"seroap+ce", [](const Tensor& t) { return ce_refine(t, seroap(t)); }, false};
}

Rank1Operator oracle_operator(const OracleOptions& options) {
  return {"oracle", [options](const Tensor& t) { return best_rank1_oracle(t, options); }, true};
}

Rank1Operator operator_by_name(const std::string& name) {
  if (name == "thosvd") return thosvd_operator();
  if (name == "seroap") return seroap_operator();
  if (name == "seroap+ce") return seroap_ce_operator();
  if (name == "oracle") return oracle_operator();
  throw std::invalid_argument("unknown rank-1 operator '" + name + "'");
}

double compare_rank1(const Tensor& t, const Rank1Operator& a, const Rank1Operator& b) {
  return residual(t, a.apply(t)) - residual(t, b.apply(t));
}

}  // namespace cpdeflate
