#include <doctest.h>

#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "oracles.hpp"
#include "pfcone/perturbation.hpp"
#include "test_util.hpp"

using namespace pfcone;

namespace {

constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

Vector e(Index n, Index k) { return Vector::Unit(n, k); }

SymmetricOperator diag2(double a, double b) { return SymmetricOperator::diagonal(Eigen::Vector2d(a, b)); }

SymmetricOperator swap2() { return SymmetricOperator(Eigen::Matrix2d{{0, 1}, {1, 0}}); }

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * i / (n - 1));
  return out;
}

// Independent closed forms.
double r_oracle(double alpha) { return (1 - alpha * alpha) / (4 * std::sqrt(2.0) * (1 + alpha * alpha)); }
double f_oracle(double r) {
  const double q = r * std::sqrt(1 - r * r / 4);
  return q / (1 + q);
}

}  // namespace

TEST_CASE("closed-form scalars") {
  CHECK(radius_from_alpha(0.5) == doctest::Approx(0.75 / (4 * std::sqrt(2.0) * 1.25)).epsilon(1e-15));
  CHECK(radius_from_alpha(0.0) == doctest::Approx(1 / (4 * std::sqrt(2.0))).epsilon(1e-15));
  CHECK(quartic_constant(0.5) == doctest::Approx(5 * std::sqrt(2.0) / 3).epsilon(1e-15));
  CHECK(threshold_from_radius(radius_from_alpha(0.5)) == doctest::Approx(0.0957728112587947).epsilon(1e-12));

  CHECK(quartic_margin(5 * std::sqrt(2.0) / 3, 0.05) == doctest::Approx(-0.13714).epsilon(1e-4));
  CHECK(quartic_margin(2.0, 0.0) == -0.25);
  CHECK_FALSE(lemma_region(1.0, 0.25));
  CHECK(lemma_region(1.0, 0.2499));

  CHECK(drift_inequality_lhs(0.0, 0.0) == 1.0);
  CHECK(drift_inequality_lhs(0.7, 0.0) == doctest::Approx(1 / std::sqrt(1.49)).epsilon(1e-15));
  CHECK(drift_inequality_lhs(1.0, 0.1) < kInvSqrt2);
  CHECK(projector_drift_bound(0.08) == doctest::Approx(0.0871).epsilon(2e-3));
  CHECK(kind_of([] { projector_drift_bound(0.6); }) == ErrorKind::BudgetViolated);
  CHECK(kind_of([] { quartic_margin(-1.0, 0.1); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("property: quartic is negative inside lemma_region and the radius is 1/(4c)") {
  SplitMix64 rng(41);
  for (int trial = 0; trial < 500; ++trial) {
    const double alpha = rng.uniform(0.0, 0.99);
    const double c = quartic_constant(alpha);
    CHECK(radius_from_alpha(alpha) == doctest::Approx(1 / (4 * c)).epsilon(1e-13));
    CHECK(radius_from_alpha(alpha) == doctest::Approx(r_oracle(alpha)).epsilon(1e-13));
    const double x = rng.uniform(0.0, std::min(c / 4, 1 / (4 * c)));
    if (lemma_region(c, x)) CHECK(quartic_margin(c, x) < 0.0);
  }
}

TEST_CASE("property: inside the radius the drift inequality certifies") {
  SplitMix64 rng(42);
  for (int trial = 0; trial < 500; ++trial) {
    const double alpha = rng.uniform(0.0, 0.95);
    const double d = rng.uniform(0.0, 0.999) * radius_from_alpha(alpha);
    CHECK(drift_inequality_lhs(alpha, d) > kInvSqrt2);
  }
}

TEST_CASE("improving radius") {
  const auto r1 = improving_radius(diag2(2, 1), e(2, 0));
  CHECK(r1.alpha == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(r1.r == doctest::Approx(0.1060660171779821).epsilon(1e-14));
  const auto r2 = improving_radius(diag2(1, 0), e(2, 0));
  CHECK(r2.alpha == 0.0);
  CHECK(r2.r == doctest::Approx(0.1767766952966369).epsilon(1e-14));
  const auto r3 = improving_radius(diag2(6, 3), e(2, 0));
  CHECK(r3.alpha == doctest::Approx(r1.alpha).epsilon(1e-15));
  CHECK(r3.r == doctest::Approx(r1.r).epsilon(1e-15));

  CHECK(kind_of([] { improving_radius(diag2(2, 2), e(2, 0)); }) == ErrorKind::DegenerateTop);
  CHECK(kind_of([] { improving_radius(diag2(2, 1), e(2, 1)); }) == ErrorKind::AxisNotEigenvector);
}

TEST_CASE("ergodicity under axis drift") {
  const Verdict near = ergodic_drift_check(diag2(2, 1), e(2, 0), oracle::angle(0.6), 64, 1);
  CHECK(near.status == VerdictStatus::SampledTrue);
  CHECK(std::sqrt(2 - 2 * std::cos(0.6)) == doctest::Approx(0.5910).epsilon(1e-4));
  CHECK(ergodic_drift_check(diag2(2, 1), e(2, 0), e(2, 0), 16, 2).status == VerdictStatus::SampledTrue);
  CHECK(ergodic_drift_check(diag2(2, 1), e(2, 0), oracle::angle(1.2), 16, 3).status ==
        VerdictStatus::Inapplicable);
}

TEST_CASE("certified improvement under drift") {
  const SymmetricOperator a = diag2(2, 1);
  CHECK(certified_improving_under_drift(a, e(2, 0), e(2, 0)).status == VerdictStatus::CertifiedTrue);
  const Vector u1 = oracle::angle(2 * std::asin(0.05 / 2));
  CHECK((u1 - e(2, 0)).norm() == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(drift_inequality_lhs(0.5, 0.05) > kInvSqrt2);
  CHECK(certified_improving_under_drift(a, e(2, 0), u1).status == VerdictStatus::CertifiedTrue);
  CHECK(kind_of([&] { certified_improving_under_drift(a, e(2, 0), oracle::angle(1.2)); }) ==
        ErrorKind::PrereqFailed);

  // beyond the inequality the general search decides; compare with a brute-force sweep
  const SymmetricOperator nearly_flat = diag2(2, 1.9);
  for (double theta : {0.2, 0.35, 0.5}) {
    const Vector axis = oracle::angle(theta);
    const double brute = oracle::min_image_margin_2d(nearly_flat.matrix(), axis, 20000);
    const Verdict v = certified_improving_under_drift(nearly_flat, e(2, 0), axis);
    CHECK(v.holds() == (brute > 0));
    CHECK(v.status != VerdictStatus::SampledTrue);
  }
}

TEST_CASE("Riesz projector") {
  const auto p1 = riesz_projector(diag2(0, 1), 0.0, 0.5, 64);
  CHECK((p1.real() - Matrix(Eigen::Matrix2d{{1, 0}, {0, 0}})).cwiseAbs().maxCoeff() <= 1e-10);

  const SymmetricOperator t(Eigen::Matrix2d{{0, 0.3}, {0.3, 1}});
  const Eigen::Vector2d lam = oracle::eig2(0, 0.3, 1);
  CHECK(lam(0) == doctest::Approx((1 - std::sqrt(1.36)) / 2).epsilon(1e-14));
  CHECK(lam(0) == doctest::Approx(-0.08310).epsilon(1e-4));
  const Eigen::Vector2d v = oracle::eigvec2(0, 0.3, lam(0));
  const auto p2 = riesz_projector(t, 0.0, 0.5, 64);
  CHECK((p2.real() - v * v.transpose()).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(p2.idempotency_residual <= 1e-8);

  CHECK(kind_of([] { riesz_projector(diag2(0, 1), 0.0, 1.0); }) == ErrorKind::ContourHitsSpectrum);
}

TEST_CASE("property: Riesz projector equals the spectral projector") {
  SplitMix64 rng(43);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const Index n = gen::dim(rng, 2, 8);
    const SymmetricOperator t = gen::symmetric(rng, n);
    const double center = rng.uniform(-1.5, 1.5);
    const double radius = rng.uniform(0.3, 1.5);
    const Vector& ev = t.spectrum().eigenvalues;
    // keep the circle away from the spectrum so the quadrature converges
    if ((((ev.array() - center).abs() - radius).abs() < 0.15).any()) continue;
    ++checked;
    const auto p = riesz_projector(t, center, radius, 256);
    CHECK((p.real() - spectral_projector(t, center, radius)).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(p.idempotency_residual <= 1e-8);
  }
  CHECK(checked > 10);
}

TEST_CASE("semigroup budget for the swap perturbation") {
  const auto spec = PerturbationSpec(FixedPerturbation{swap2(), 0.0, 1.0});
  const auto grid = linspace(-0.45, 0.45, 19);
  const PerturbationBudget b = semigroup_threshold(diag2(0, 1), spec, std::numbers::ln2, 0.5, grid);
  CHECK(b.delta == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(b.epsilon == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(b.alpha == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(b.r == doctest::Approx(r_oracle(0.5)).epsilon(1e-12));
  CHECK(b.threshold == doctest::Approx(f_oracle(r_oracle(0.5))).epsilon(1e-12));
  CHECK(b.kappa_admissible_closed_form == doctest::Approx(f_oracle(r_oracle(0.5)) / 2).epsilon(1e-12));
  CHECK(b.kappa_admissible_closed_form == doctest::Approx(0.0478864).epsilon(1e-6));
  for (const auto& row : b.rows) {
    CHECK(row.c == doctest::Approx(2 * std::abs(row.kappa)).epsilon(1e-12));
    CHECK(row.gap == doctest::Approx(std::sqrt(1 + 4 * row.kappa * row.kappa)).epsilon(1e-12));
    CHECK(row.admissible == (2 * std::abs(row.kappa) < b.threshold));
  }

  const auto zero = semigroup_threshold(diag2(0, 1), PerturbationSpec(FixedPerturbation{SymmetricOperator::zero(2)}),
                                        std::numbers::ln2, 0.5, grid);
  CHECK(zero.admissible_kappas().size() == zero.rows.size());

  // shrinking the gap at fixed s0 shrinks the admissible coupling
  double previous = 0.0;
  for (double gap : {0.01, 0.03, 0.1, 0.3, 1.0}) {
    const auto b2 = semigroup_threshold(diag2(0, gap), spec, std::numbers::ln2, 1e-3, {0.0});
    CHECK(b2.delta == doctest::Approx(gap).epsilon(1e-12));
    CHECK(b2.kappa_admissible_closed_form > previous);
    previous = b2.kappa_admissible_closed_form;
  }

  CHECK(kind_of([&] { semigroup_threshold(diag2(0, 0), spec, 1.0, 0.5, grid); }) == ErrorKind::DegenerateBottom);
  const auto crossing = PerturbationSpec(FixedPerturbation{diag2(1, -1), 0.0, 1.0});
  CHECK(kind_of([&] { semigroup_threshold(diag2(0, 1), crossing, 1.0, 1.0, {0.25, 0.5}); }) ==
        ErrorKind::GapCollapsed);
}

TEST_CASE("drifted axis") {
  const auto spec = PerturbationSpec(FixedPerturbation{swap2(), 0.0, 1.0});
  const PerturbationBudget b =
      semigroup_threshold(diag2(0, 1), spec, std::numbers::ln2, 0.5, linspace(-0.45, 0.45, 19));

  const auto at0 = drifted_axis(diag2(0, 1), b.u0, b, 0.0);
  CHECK((at0.v_kappa - b.u0).norm() <= 1e-12);
  CHECK(at0.drift_actual <= 1e-12);

  const double kappa = 0.04;
  const SymmetricOperator tk = diag2(0, 1) + swap2().scaled(kappa);
  const auto d = drifted_axis(tk, b.u0, b, b.c_of(0.0, kappa));
  CHECK(b.c_of(0.0, kappa) == doctest::Approx(0.08).epsilon(1e-12));
  CHECK(d.drift_bound == doctest::Approx(0.0871).epsilon(2e-3));
  // ground eigenvector of [[0, k], [k, 1]] by hand
  const Eigen::Vector2d lam = oracle::eig2(0, kappa, 1);
  Eigen::Vector2d g = oracle::eigvec2(0, kappa, lam(0));
  if (g(0) < 0) g = -g;
  CHECK(d.drift_actual == doctest::Approx((g - Eigen::Vector2d(1, 0)).norm()).epsilon(1e-9));
  CHECK(d.drift_actual < d.drift_bound);
  CHECK(d.drift_actual < b.r);

  const SymmetricOperator t3 = diag2(0, 1) + swap2().scaled(0.3);
  CHECK(kind_of([&] { drifted_axis(t3, b.u0, b, b.c_of(0.0, 0.3)); }) == ErrorKind::BudgetViolated);
}

TEST_CASE("end-to-end semigroup check") {
  const auto spec = PerturbationSpec(FixedPerturbation{swap2(), 0.0, 1.0});
  const double s0 = std::numbers::ln2;
  const PerturbationBudget b = semigroup_threshold(diag2(0, 1), spec, s0, 0.5, {-0.04, 0.0, 0.04});
  const auto rep = end_to_end_semigroup_check(diag2(0, 1), spec, b, {s0 / 4, s0 / 2, s0}, 7);
  CHECK(rep.failures == 0);
  CHECK(rep.rows.size() == 9);
  for (const auto& row : rep.rows) CHECK(row.verdict.status == VerdictStatus::CertifiedTrue);
  REQUIRE(rep.base_checks.size() == 3);
  for (const auto& [s, v] : rep.base_checks) CHECK(v.status == VerdictStatus::CertifiedTrue);

  const auto parallel = end_to_end_semigroup_check(diag2(0, 1), spec, b, {s0 / 4, s0 / 2, s0}, 7, 16, 4);
  REQUIRE(parallel.rows.size() == rep.rows.size());
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    CHECK(parallel.rows[i].kappa == rep.rows[i].kappa);
    CHECK(parallel.rows[i].drift_actual == rep.rows[i].drift_actual);
    CHECK(parallel.rows[i].verdict.margin == rep.rows[i].verdict.margin);
  }

  CHECK(kind_of([&] { end_to_end_semigroup_check(diag2(0, 1), spec, b, {0.0}, 7); }) ==
        ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { end_to_end_semigroup_check(diag2(0, 1), spec, b, {2 * s0}, 7); }) ==
        ErrorKind::OutsideTheoremScope);
}

TEST_CASE("property: admissible perturbations keep the semigroup improving") {
  SplitMix64 rng(44);
  for (int trial = 0; trial < 8; ++trial) {
    const Index n = gen::dim(rng, 2, 5);
    Vector d(n);
    for (Index i = 0; i < n; ++i) d(i) = i == 0 ? 0.0 : 0.5 + i + rng.uniform();
    const SymmetricOperator t = gen::with_spectrum(rng, d);
    const SymmetricOperator s = gen::symmetric(rng, n);
    const auto spec = PerturbationSpec(FixedPerturbation::with_norm_bound(s.scaled(1.0 / s.norm())));
    const auto b = semigroup_threshold(t, spec, 1.0, 0.2, linspace(-0.15, 0.15, 7));
    const auto rep = end_to_end_semigroup_check(t, spec, b, {0.25, 1.0}, trial);
    CHECK(rep.failures == 0);
    for (const auto& row : rep.rows) CHECK(row.verdict.holds());
  }
}
