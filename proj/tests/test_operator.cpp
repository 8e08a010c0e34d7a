#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "generators.hpp"
#include "test_util.hpp"
#include "oracles.hpp"
#include "pfcone/matrix_io.hpp"
#include "pfcone/operator.hpp"

using namespace pfcone;

namespace {

Matrix m2(double a, double b, double c, double d) { return Eigen::Matrix2d{{a, b}, {c, d}}; }


}  // namespace

TEST_CASE("symmetric operator validates its input") {
  CHECK(kind_of([] { SymmetricOperator(m2(1, 2, 2.1, 1)); }) == ErrorKind::NotSymmetric);
  CHECK(kind_of([] { SymmetricOperator(m2(1, std::nan(""), std::nan(""), 1)); }) == ErrorKind::NonFinite);
  CHECK(kind_of([] { SymmetricOperator(Matrix(2, 3)); }) == ErrorKind::DimensionMismatch);
  // within tolerance: stored symmetrized
  const SymmetricOperator a(m2(1, 2, 2 + 1e-13, 1));
  CHECK(a(0, 1) == a(1, 0));
}

TEST_CASE("spectral decomposition of small matrices") {
  const auto sp = spectral_decompose(SymmetricOperator(m2(2, 0, 0, 1)));
  CHECK(sp.eigenvalues(0) == doctest::Approx(1.0));
  CHECK(sp.eigenvalues(1) == doctest::Approx(2.0));
  CHECK(sp.eigenvectors.col(0).isApprox(Eigen::Vector2d(0, 1)));
  CHECK(sp.eigenvectors.col(1).isApprox(Eigen::Vector2d(1, 0)));

  const auto swap = spectral_decompose(SymmetricOperator(m2(0, 1, 1, 0)));
  CHECK(swap.eigenvalues(0) == doctest::Approx(-1.0));
  CHECK(swap.eigenvalues(1) == doctest::Approx(1.0));
}

TEST_CASE("property: reconstruction and orthonormality") {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = gen::dim(rng, 1, 12);
    const SymmetricOperator a = gen::symmetric(rng, n);
    const auto& sp = a.spectrum();
    const Matrix& q = sp.eigenvectors;
    const Matrix recon = q * sp.eigenvalues.asDiagonal() * q.transpose();
    CHECK((recon - a.matrix()).norm() <= 1e-10 * std::max(1.0, a.matrix().norm()));
    CHECK((q.transpose() * q - Matrix::Identity(n, n)).norm() <= 1e-10);
    for (Index k = 0; k + 1 < n; ++k) CHECK(sp.eigenvalues(k) <= sp.eigenvalues(k + 1));
  }
}

TEST_CASE("top eigenvalue and simplicity") {
  const auto t = top_eigen(SymmetricOperator::diagonal(Eigen::Vector2d(2, 1)));
  CHECK(t.value == doctest::Approx(2.0));
  CHECK(t.simple);
  CHECK(t.vector.isApprox(Eigen::Vector2d(1, 0)));

  CHECK_FALSE(top_eigen(SymmetricOperator::diagonal(Eigen::Vector3d(2, 2, 1))).simple);
  CHECK_FALSE(top_eigen(SymmetricOperator::diagonal(Eigen::Vector3d(2, 2 - 1e-12, 1)), 1e-9).simple);
  CHECK(kind_of([] { top_eigen(SymmetricOperator::diagonal(Eigen::Vector3d(2, 2, 1)), 1e-9, true); }) ==
        ErrorKind::DegenerateTop);
  CHECK(kind_of([] { bottom_eigen(SymmetricOperator::diagonal(Eigen::Vector3d(1, 1, 2)), 1e-9, true); }) ==
        ErrorKind::DegenerateBottom);

  const auto one = top_eigen(SymmetricOperator::diagonal(Vector::Constant(1, 3.0)));
  CHECK(one.simple);
  CHECK(std::isinf(one.gap));
}

TEST_CASE("property: sign convention is deterministic") {
  SplitMix64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = gen::dim(rng, 1, 8);
    const Matrix m = gen::symmetric(rng, n).matrix();
    const Vector u1 = top_eigen(SymmetricOperator(m)).vector;
    const Vector u2 = top_eigen(SymmetricOperator(m)).vector;
    CHECK((u1.array() == u2.array()).all());
    Index first = 0;
    while (std::abs(u1(first)) <= 1e-10 * u1.cwiseAbs().maxCoeff()) ++first;
    CHECK(u1(first) > 0.0);
  }
}

TEST_CASE("heat semigroup") {
  const auto t = SymmetricOperator::diagonal(Eigen::Vector2d(0, 1));
  CHECK(heat_semigroup(t, std::numbers::ln2).matrix().isApprox(m2(1, 0, 0, 0.5), 1e-14));
  CHECK(heat_semigroup(t, 0.0).matrix() == Matrix::Identity(2, 2));
  CHECK(kind_of([&] { heat_semigroup(t, -1e-3); }) == ErrorKind::NegativeTime);

  const SymmetricOperator t2(m2(0, 0.3, 0.3, 1));
  const Matrix oracle = oracle::expm(-t2.matrix());
  CHECK((heat_semigroup(t2, 1.0).matrix() - oracle).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("property: semigroup law, norm and oracle agreement") {
  SplitMix64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = gen::dim(rng, 1, 8);
    const SymmetricOperator t = gen::symmetric(rng, n);
    const double s = rng.uniform(0.0, 1.5);
    const double u = rng.uniform(0.0, 1.5);
    const Matrix es = heat_semigroup(t, s).matrix();
    const Matrix eu = heat_semigroup(t, u).matrix();
    CHECK((es * eu - heat_semigroup(t, s + u).matrix()).norm() <= 1e-9);
    const double expected = std::exp(-s * t.spectrum().min());
    CHECK(std::abs(heat_semigroup(t, s).norm() - expected) <= 1e-10 * expected);
    CHECK((es - oracle::expm(-s * t.matrix())).norm() <= 1e-9 * std::max(1.0, es.norm()));
  }
}

TEST_CASE("complexify acts componentwise") {
  const auto c = complexify(SymmetricOperator::diagonal(Eigen::Vector2d(2, 1)));
  CHECK(c.real_part == Matrix(m2(2, 0, 0, 1)));
  CHECK(c.imag_part.isZero(0.0));

  SplitMix64 rng(14);
  for (int trial = 0; trial < 30; ++trial) {
    const Index n = gen::dim(rng, 1, 7);
    const SymmetricOperator t = gen::symmetric(rng, n);
    const Vector u = rng.gaussian_vector(n);
    const Vector v = rng.gaussian_vector(n);
    ComplexVector x(n);
    x.real() = u;
    x.imag() = v;
    const ComplexVector y = complexify(t).apply(x);
    CHECK((y.real() - t.apply(u)).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, t.norm() * u.norm()));
    CHECK((y.imag() - t.apply(v)).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, t.norm() * v.norm()));
  }
}

TEST_CASE("real/complex correspondence") {
  const auto diag = correspondence_check(SymmetricOperator::diagonal(Eigen::Vector2d(2, 1)));
  CHECK(diag.all_passed());
  CHECK(diag.clauses.size() == 4);
  for (const auto& c : diag.clauses) {
    if (c.name == "norm") {
      CHECK(c.real_value == doctest::Approx(2.0));
      CHECK(c.complex_value == doctest::Approx(2.0));
    }
  }
  const auto swap = correspondence_check(SymmetricOperator(m2(0, 1, 1, 0)), -1.0);
  for (const auto& c : swap.clauses) {
    if (c.name == "lower_bound") CHECK(c.complex_value == doctest::Approx(-1.0).epsilon(1e-12));
  }
  SplitMix64 rng(15);
  CHECK(correspondence_check(gen::symmetric(rng, 6)).all_passed());
  // a lower bound above the minimum eigenvalue fails on both sides, consistently
  const auto above = correspondence_check(SymmetricOperator::diagonal(Eigen::Vector2d(2, 1)), 1.5);
  CHECK(above.all_passed());
}

TEST_CASE("property: correspondence on degenerate spectra") {
  SplitMix64 rng(16);
  for (int trial = 0; trial < 40; ++trial) {
    Vector d(5);
    d << 1, 1, 2, 3, 3;
    d *= rng.uniform(-2.0, 2.0);
    CHECK(correspondence_check(gen::with_spectrum(rng, d)).all_passed());
  }
}

TEST_CASE("matrix text format round trips") {
  SplitMix64 rng(17);
  const Matrix m = gen::symmetric(rng, 4).matrix();
  std::stringstream buf;
  write_matrix(buf, m);
  CHECK(read_matrix(buf) == m);

  std::istringstream bad_header("rows 2\n1 0\n0 1\n");
  CHECK(kind_of([&] { read_matrix(bad_header); }) == ErrorKind::ParseError);
  std::istringstream truncated("dim 2\n1 0\n0\n");
  CHECK(kind_of([&] { read_matrix(truncated); }) == ErrorKind::ParseError);
  std::istringstream trailing("dim 1\n1 2\n");
  CHECK(kind_of([&] { read_matrix(trailing); }) == ErrorKind::ParseError);
  CHECK(format_double(0.1) == "0.10000000000000001");
}
