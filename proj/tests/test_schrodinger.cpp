#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pfcone/cone.hpp"
#include "pfcone/pf_verifier.hpp"
#include "pfcone/rng.hpp"
#include "pfcone/schrodinger.hpp"
#include "test_util.hpp"

using namespace pfcone;

namespace {

MagneticModel model(int n, double h, const std::string& v, const std::string& a, double e) {
  const GridSpec g(n, h);
  return MagneticModel(g, parse_profile(v, g), parse_profile(a, g), e);
}

std::vector<double> sorted_eigs(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m);
  const Vector ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

}  // namespace

TEST_CASE("grid and profiles") {
  const GridSpec g(2, 0.5);
  CHECK(g.size() == 5);
  CHECK(g.x(-2) == -1.0);
  CHECK(g.index(0) == 2);
  CHECK(kind_of([] { GridSpec(0, 1.0); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { GridSpec(2, 0.0); }) == ErrorKind::InvalidArgument);

  const Vector harm = preset_profile("harmonic", g);
  CHECK(harm(0) == 1.0);
  CHECK(harm(3) == 0.25);
  CHECK(parse_profile("table:1,2,3", g) == Vector(Eigen::Matrix<double, 5, 1>(3, 2, 1, 2, 3)));
  CHECK(parse_profile("table:3,2,1,2,3", g) == Vector(Eigen::Matrix<double, 5, 1>(3, 2, 1, 2, 3)));
  CHECK(kind_of([&] { parse_profile("table:1,2", g); }) == ErrorKind::ConfigInvalid);
  CHECK(kind_of([&] { parse_profile("table:1,x,3", g); }) == ErrorKind::ConfigInvalid);
  CHECK(kind_of([&] { parse_profile("quartic", g); }) == ErrorKind::ConfigInvalid);

  const Vector odd = sample_even(g, [](double x) { return x; });
  CHECK(odd(0) == odd(4));
  CHECK(kind_of([&] {
          MagneticModel(g, parse_profile("table:1,2,3,4,5", g), preset_profile("zero", g), 0.1);
        }) == ErrorKind::AsymmetricPotential);
}

TEST_CASE("free Laplacian stencil") {
  const auto h0 = build_h0(model(1, 1.0, "zero", "zero", 0.0));
  CHECK(h0.real_part == Matrix(Eigen::Matrix3d{{2, -1, 0}, {-1, 2, -1}, {0, -1, 2}}));
  CHECK(h0.imag_part.isZero(0.0));

  const auto harm = build_h0(model(2, 0.5, "harmonic", "zero", 0.0));
  for (int j = -2; j <= 2; ++j) {
    const Index i = j + 2;
    CHECK(harm.real_part(i, i) == doctest::Approx(8.0 + 0.25 * j * j));
  }
}

TEST_CASE("harmonic ground state is simple and positive") {
  const auto m = model(8, 0.5, "harmonic", "zero", 0.0);
  const SymmetricOperator h = restrict_to_real(build_h0(m), RealStructure(m.grid()));
  const TopEigen g = bottom_eigen(h);
  CHECK(g.simple);
  CHECK(g.gap > 0.0);
  // the ground state of -Delta + V is positive in the grid basis
  const ComplexVector f = RealStructure(m.grid()).embed(g.vector);
  CHECK(f.imag().cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((f.real().array() > 0.0).all());
}

TEST_CASE("magnetic operator by hand at N = 1") {
  const auto m = model(1, 1.0, "zero", "constant", 1.0);
  const ComplexOperator h = build_magnetic(m);
  CHECK(h.real_part == Matrix(Eigen::Matrix3d{{3, -1, 0}, {-1, 3, -1}, {0, -1, 3}}));
  CHECK(h.imag_part == Matrix(Eigen::Matrix3d{{0, -1, 0}, {1, 0, -1}, {0, 1, 0}}));
  CHECK(h.hermiticity_residual() == 0.0);
  CHECK(antilinear_commutation_residual(h, RealStructure(m.grid())) <= 1e-12);

  const auto m0 = m.with_coupling(0.0);
  const ComplexOperator h00 = build_magnetic(m0);
  const ComplexOperator ref = build_h0(m0);
  CHECK(h00.real_part == ref.real_part);
  CHECK(h00.imag_part == ref.imag_part);
}

TEST_CASE("gaussian vector potential commutes with the conjugation") {
  const auto m = model(8, 0.5, "harmonic", "gaussian", 0.1);
  const ComplexOperator h = build_magnetic(m);
  CHECK(h.hermiticity_residual() <= 1e-12);
  CHECK(antilinear_commutation_residual(h, RealStructure(m.grid())) <= 1e-12);
}

TEST_CASE("property: real structure is an isometry onto the fixed space") {
  for (int n : {1, 2, 5, 9}) {
    const GridSpec g(n, 0.3);
    const RealStructure rs(g);
    const Index d = g.size();
    CHECK((rs.basis.adjoint() * rs.basis - ComplexMatrix::Identity(d, d)).norm() <= 1e-12);
    SplitMix64 rng(50 + n);
    for (int k = 0; k < 20; ++k) {
      const Vector x = rng.gaussian_vector(d);
      const ComplexVector f = rs.embed(x);
      CHECK((rs.conjugate(f) - f).norm() <= 1e-12 * std::max(1.0, f.norm()));
      CHECK(std::abs(f.norm() - x.norm()) <= 1e-12 * std::max(1.0, x.norm()));
    }
  }
}

TEST_CASE("restriction to the real space") {
  const auto free1 = model(1, 1.0, "zero", "zero", 0.0);
  const SymmetricOperator r = restrict_to_real(build_h0(free1), RealStructure(free1.grid()));
  const Vector ev = r.spectrum().eigenvalues;
  CHECK(ev(0) == doctest::Approx(2 - std::sqrt(2.0)).epsilon(1e-14));
  CHECK(ev(1) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(ev(2) == doctest::Approx(2 + std::sqrt(2.0)).epsilon(1e-14));

  const auto diag = model(2, 1.0, "harmonic", "zero", 0.0);
  ComplexOperator dh;
  dh.real_part = preset_profile("harmonic", diag.grid()).asDiagonal();
  dh.imag_part = Matrix::Zero(5, 5);
  const Matrix rd = restrict_to_real(dh, RealStructure(diag.grid())).matrix();
  CHECK(rd.isDiagonal(1e-14));
  CHECK((rd.diagonal() - Vector(Eigen::Matrix<double, 5, 1>(0, 1, 4, 1, 4))).cwiseAbs().maxCoeff() <= 1e-14);

  // e != 0 couples the even and odd blocks with entries of both signs
  const auto mag = model(8, 0.5, "harmonic", "gaussian", 0.5);
  const Matrix rm = restrict_to_real(build_magnetic(mag), RealStructure(mag.grid())).matrix();
  const Matrix cross = rm.block(1, 9, 8, 8);
  CHECK(cross.cwiseAbs().maxCoeff() > 1e-3);
  CHECK(cross.maxCoeff() > 0.0);
  CHECK(cross.minCoeff() < 0.0);

  ComplexOperator bad = build_h0(free1);
  bad.imag_part(0, 0) = 0.5;
  CHECK(kind_of([&] { restrict_to_real(bad, RealStructure(free1.grid())); }) == ErrorKind::NotRealCompatible);
}

TEST_CASE("property: restricted spectrum lies in the full spectrum") {
  SplitMix64 rng(51);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + static_cast<int>(rng.next() % 8);
    const GridSpec g(n, rng.uniform(0.2, 1.0));
    const double width = rng.uniform(0.5, 2.0);
    const Vector v = sample_even(g, [&](double x) { return x * x / width; });
    const Vector a = sample_even(g, [&](double x) { return std::exp(-x * x * width); });
    const MagneticModel m(g, v, a, rng.uniform(-1.0, 1.0));
    const ComplexOperator h = build_magnetic(m);
    const SymmetricOperator r = restrict_to_real(h, RealStructure(g));
    const auto full = sorted_eigs(h.to_matrix());
    for (Index k = 0; k < r.dim(); ++k) {
      double best = 1e300;
      for (double lam : full) best = std::min(best, std::abs(lam - r.spectrum().eigenvalues(k)));
      CHECK(best <= 1e-9 * std::max(1.0, h.norm()));
    }
  }
}

TEST_CASE("orthant failure demo") {
  const auto m = model(8, 0.5, "harmonic", "gaussian", 0.5);
  const auto rep = orthant_failure_demo(m, 0.5);
  CHECK(rep.max_imag > 1e-10);
  CHECK(rep.left_cone);
  CHECK_FALSE(rep.control);

  const auto m0 = m.with_coupling(0.0);
  CHECK(kind_of([&] { orthant_failure_demo(m0, 0.5); }) == ErrorKind::TrivialCoupling);
  const auto ctrl = orthant_failure_demo(m0, 0.5, std::nullopt, true);
  CHECK(ctrl.control);
  CHECK_FALSE(ctrl.left_cone);
  CHECK(ctrl.max_imag <= 1e-12);
  CHECK(ctrl.min_real > 0.0);

  CHECK(kind_of([&] { orthant_failure_demo(m, 0.5, Vector(Vector::Zero(17))); }) == ErrorKind::NotInCone);
  Vector lopsided = Vector::Zero(17);
  lopsided(3) = 1.0;
  CHECK(kind_of([&] { orthant_failure_demo(m, 0.5, lopsided); }) == ErrorKind::NotInCone);
}

TEST_CASE("magnetic experiment") {
  const auto m = model(8, 0.5, "harmonic", "gaussian", 0.0);
  std::vector<double> e_grid;
  for (int i = -10; i <= 10; ++i) e_grid.push_back(0.001 * i);
  const auto exp = magnetic_experiment(m, 1.0, e_grid, {}, 5);
  CHECK(exp.ground_gap > 0.0);
  CHECK(exp.e0 > 0.0);
  CHECK(exp.check.failures == 0);
  for (const auto& [s, v] : exp.check.base_checks) CHECK(v.status == VerdictStatus::CertifiedTrue);
  for (const auto& row : exp.check.rows) CHECK(row.verdict.holds());
  CHECK(exp.budget.delta <= exp.ground_gap + 1e-12);

  const auto flat = model(8, 0.5, "harmonic", "zero", 0.0);
  const auto whole = magnetic_experiment(flat, 1.0, e_grid, {0.5}, 5);
  CHECK(whole.budget.admissible_kappas().size() == whole.budget.rows.size());

  const auto well = model(8, 0.5, "double_well", "gaussian", 0.0);
  CHECK(kind_of([&] { magnetic_experiment(well, 1.0, e_grid, {}, 5); }) == ErrorKind::DegenerateBottom);
}
