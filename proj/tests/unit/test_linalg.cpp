#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "cpdeflate/linalg.hpp"
#include "cpdeflate/rank1.hpp"
#include "oracles.hpp"

using namespace cpdeflate;

namespace {

Matrix random_complex(Index rows, Index cols, std::uint64_t seed) {
  Rng rng(seed);
  return random_matrix(rows, cols, Field::kComplex, Distribution::kNormal, rng);
}

Matrix random_hermitian(Index n, std::uint64_t seed) {
  const Matrix a = random_complex(n, n, seed);
  return (a + a.adjoint()) / 2.0;
}

double penrose_error(const Matrix& a, const Matrix& p) {
  const double s = std::max(1.0, a.norm() * p.norm());
  double e = (a * p * a - a).norm() / a.norm();
  e = std::max(e, (p * a * p - p).norm() / std::max(p.norm(), 1e-300));
  e = std::max(e, (a * p - (a * p).adjoint()).norm() / s);
  e = std::max(e, (p * a - (p * a).adjoint()).norm() / s);
  return e;
}

}  // namespace

class TripletTest : public ::testing::TestWithParam<TripletMethod> {};

TEST_P(TripletTest, Diagonal) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 3.0;
  m(1, 1) = 1.0;
  const SingularTriplet s = dominant_triplet(m, {}, GetParam());
  EXPECT_NEAR(s.sigma, 3.0, 1e-10);
  EXPECT_NEAR(std::abs(s.u(0)), 1.0, 1e-8);
  EXPECT_NEAR(std::abs(s.v(0)), 1.0, 1e-8);
}

TEST_P(TripletTest, RankOne) {
  const Matrix a = random_complex(4, 1, 1), b = random_complex(3, 1, 2);
  const SingularTriplet s = dominant_triplet(a * b.adjoint(), {}, GetParam());
  EXPECT_NEAR(s.sigma, a.norm() * b.norm(), 1e-10);
  EXPECT_LT(oracle::phase_aligned_error(a / a.norm(), s.u), 1e-8);
  EXPECT_LT(oracle::phase_aligned_error(b / b.norm(), s.v), 1e-8);
}

TEST_P(TripletTest, AgreesWithFullSvd) {
  const Matrix m = random_complex(4, 6, 3);
  const SingularTriplet s = dominant_triplet(m, {500, 1e-14}, GetParam());
  const Svd svd = full_svd(m);
  EXPECT_NEAR(s.sigma, svd.sigma(0), 1e-8);
  EXPECT_LT((m * s.v - s.sigma * s.u).norm(), 1e-8);
}

TEST_P(TripletTest, ZeroMatrixThrows) {
  EXPECT_THROW(dominant_triplet(Matrix::Zero(3, 2), {}, GetParam()), std::domain_error);
}

INSTANTIATE_TEST_SUITE_P(Methods, TripletTest,
                         ::testing::Values(TripletMethod::kPowerIteration, TripletMethod::kGramEigen));

TEST(Triplet, RealInputStaysReal) {
  Rng rng(5);
  const Matrix m = random_matrix(5, 3, Field::kReal, Distribution::kUniform, rng);
  const SingularTriplet s = dominant_triplet(m, {}, TripletMethod::kGramEigen);
  EXPECT_EQ(s.u.imag().cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(s.v.imag().cwiseAbs().maxCoeff(), 0.0);
}

TEST(Triplet, PowerIterationReportsNonConvergence) {
  Matrix m = Matrix::Identity(3, 3);
  m(1, 1) = 0.999999;
  const SingularTriplet s = dominant_triplet(m, {3, 1e-15}, TripletMethod::kPowerIteration);
  EXPECT_FALSE(s.converged);
  EXPECT_EQ(s.iterations, 3);
}

TEST(FullSvd, IdentityAndZero) {
  EXPECT_LT((full_svd(Matrix::Identity(3, 3)).sigma - RealVector::Ones(3)).norm(), 1e-15);
  EXPECT_EQ(full_svd(Matrix::Zero(2, 4)).sigma.norm(), 0.0);
}

TEST(FullSvd, HilbertMatchesLongDoubleOracle) {
  Matrix h(4, 4);
  std::vector<std::vector<long double>> hl(4, std::vector<long double>(4));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      h(i, j) = 1.0 / (i + j + 1);
      hl[i][j] = 1.0L / (i + j + 1);
    }
  // H is symmetric positive definite, so sigma_1 is its largest eigenvalue.
  EXPECT_NEAR(full_svd(h).sigma(0), static_cast<double>(oracle::sym_lambda_max_long(hl)), 1e-10);
}

TEST(Pinv, SimpleCases) {
  EXPECT_LT((pinv(Matrix::Identity(3, 3)) - Matrix::Identity(3, 3)).norm(), 1e-15);
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 2.0;
  Matrix expected = Matrix::Zero(2, 2);
  expected(0, 0) = 0.5;
  EXPECT_LT((pinv(d) - expected).norm(), 1e-15);
}

TEST(Pinv, FullRankEqualsInverse) {
  const Matrix a = random_complex(5, 5, 7);
  EXPECT_LT((pinv(a) - a.fullPivLu().solve(Matrix::Identity(5, 5))).norm(), 1e-9);
}

TEST(Pinv, PenroseIdentities) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Matrix a = random_complex(6, 2, seed) * random_complex(2, 4, seed + 50);  // rank 2
    EXPECT_LT(penrose_error(a, pinv(a)), 1e-8) << "seed " << seed;
    const Matrix b = random_complex(3, 7, seed + 10);
    EXPECT_LT(penrose_error(b, pinv(b)), 1e-8) << "seed " << seed;
  }
}

TEST(HermitianEig, LargestSignedEigenvalue) {
  Matrix h = Matrix::Zero(2, 2);
  h(0, 0) = -5.0;
  h(1, 1) = 2.0;
  const EigPair e = hermitian_eig_max(h);
  EXPECT_NEAR(e.lambda, 2.0, 1e-12);
  EXPECT_NEAR(std::abs(e.x(1)), 1.0, 1e-12);
}

TEST(HermitianEig, RankOneProjector) {
  Vector x = random_complex(4, 1, 9).col(0);
  x.normalize();
  const EigPair e = hermitian_eig_max(x * x.adjoint());
  EXPECT_NEAR(e.lambda, 1.0, 1e-12);
  EXPECT_LT(oracle::phase_aligned_error(x, e.x), 1e-10);
}

TEST(HermitianEig, MatchesGeneralEigensolver) {
  const Matrix h = random_hermitian(6, 11);
  Eigen::ComplexEigenSolver<Matrix> full(h);
  double best = -1e300;
  for (Index i = 0; i < 6; ++i) best = std::max(best, full.eigenvalues()(i).real());
  const EigPair e = hermitian_eig_max(h);
  EXPECT_NEAR(e.lambda, best, 1e-8);
  EXPECT_LT((h * e.x - e.lambda * e.x).norm(), 1e-8);
}

TEST(HermitianEig, RejectsNonHermitian) {
  EXPECT_FALSE(is_hermitian(random_complex(3, 3, 1)));
  EXPECT_THROW(hermitian_eig_max(random_complex(3, 3, 1)), std::invalid_argument);
}

TEST(PhaseConvention, LargestEntryRealPositive) {
  Vector v = random_complex(5, 1, 4).col(0);
  const Vector before = v;
  const Complex c = normalize_phase(v);
  EXPECT_NEAR(std::abs(c), 1.0, 1e-15);
  Index k;
  v.cwiseAbs().maxCoeff(&k);
  EXPECT_EQ(v(k).imag(), 0.0);
  EXPECT_GT(v(k).real(), 0.0);
  EXPECT_LT((v - c * before).norm(), 1e-15);
}

TEST(Nkp, RearrangementIsometry) {
  const Matrix p = random_complex(2, 2, 1), q = random_complex(3, 3, 2);
  const Matrix r = rearrange(kronecker(q, p), 2, 3);
  // A single Kronecker product rearranges to vec(Q) vec(P)^T.
  EXPECT_LT((r - vec(q) * vec(p).transpose()).norm(), 1e-13);
}

TEST(Nkp, SingleTermRecovered) {
  const Matrix p = random_hermitian(3, 1), q = random_hermitian(2, 2);
  const Matrix m = kronecker(q, p);
  const KroneckerSum d = nkp_decompose(m, 3, 2);
  EXPECT_EQ(d.kronecker_rank(), 1);
  EXPECT_LT((d.reconstruct() - m).norm(), 1e-10);
  for (const auto& term : d.terms) {
    EXPECT_TRUE(is_hermitian(term.p));
    EXPECT_TRUE(is_hermitian(term.q));
  }
}

TEST(Nkp, Identity) {
  const KroneckerSum d = nkp_decompose(Matrix::Identity(6, 6), 2, 3);
  EXPECT_EQ(d.kronecker_rank(), 1);
  EXPECT_LT((d.reconstruct() - Matrix::Identity(6, 6)).norm(), 1e-12);
}

TEST(Nkp, SliceGramMatrix) {
  for (Field field : {Field::kReal, Field::kComplex}) {
    const Tensor t = random_tensor({3, 3, 3}, field, Distribution::kUniform, 13);
    const Matrix m = build_gram(t);
    const KroneckerSum d = nkp_decompose(m, 3, 3);
    EXPECT_LE(d.kronecker_rank(), 9);
    EXPECT_LE((d.reconstruct() - m).norm(), 1e-9 * m.norm());
  }
}

TEST(Nkp, RejectsBadDimensions) { EXPECT_THROW(nkp_decompose(Matrix::Identity(6, 6), 4, 2), std::invalid_argument); }
