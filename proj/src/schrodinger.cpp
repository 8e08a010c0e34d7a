#include "pfcone/schrodinger.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>

namespace pfcone {

namespace {

using cd = std::complex<double>;

bool exactly_even(const GridSpec& grid, const Vector& f) {
  for (int j = 1; j <= grid.N; ++j) {
    if (f(grid.index(j)) != f(grid.index(-j))) return false;
  }
  return true;
}

void check_profile(const GridSpec& grid, const Vector& f, const char* what) {
  if (f.size() != grid.size()) {
    throw Error(ErrorKind::DimensionMismatch, std::string(what) + " has " +
                                                  std::to_string(f.size()) + " values, grid has " +
                                                  std::to_string(grid.size()));
  }
  require_finite(f, what);
  if (!exactly_even(grid, f)) throw Error(ErrorKind::AsymmetricPotential, std::string(what) + " is not even");
}

double max_abs_entry(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace

GridSpec::GridSpec(int n, double spacing) : N(n), h(spacing) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "grid half-width N must be >= 1");
  if (!(spacing > 0.0) || !std::isfinite(spacing)) {
    throw Error(ErrorKind::InvalidArgument, "grid spacing h must be positive");
  }
}

Vector sample_even(const GridSpec& grid, const std::function<double(double)>& f) {
  Vector out(grid.size());
  for (int j = 0; j <= grid.N; ++j) {
    const double y = f(grid.x(j));
    out(grid.index(j)) = y;
    out(grid.index(-j)) = y;
  }
  return out;
}

Vector preset_profile(const std::string& name, const GridSpec& grid) {
  if (name == "zero") return Vector::Zero(grid.size());
  if (name == "constant") return Vector::Ones(grid.size());
  if (name == "harmonic") return sample_even(grid, [](double x) { return x * x; });
  if (name == "gaussian") return sample_even(grid, [](double x) { return std::exp(-x * x); });
  if (name == "gaussian_well") return sample_even(grid, [](double x) { return -std::exp(-x * x); });
  if (name == "double_well") {
    return sample_even(grid, [](double x) { return 50.0 * (x * x - 4.0) * (x * x - 4.0); });
  }
  throw Error(ErrorKind::ConfigInvalid, "unknown profile preset '" + name + "'");
}

Vector parse_profile(const std::string& text, const GridSpec& grid) {
  constexpr std::string_view prefix = "table:";
  if (text.rfind(prefix, 0) != 0) return preset_profile(text, grid);
  std::vector<double> values;
  std::stringstream in(text.substr(prefix.size()));
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::ConfigInvalid, "bad table entry '" + item + "'");
    }
  }
  const auto n = static_cast<std::size_t>(grid.N);
  Vector out(grid.size());
  if (values.size() == n + 1) {
    for (int j = 0; j <= grid.N; ++j) {
      out(grid.index(j)) = values[static_cast<std::size_t>(j)];
      out(grid.index(-j)) = values[static_cast<std::size_t>(j)];
    }
  } else if (values.size() == 2 * n + 1) {
    for (Index i = 0; i < out.size(); ++i) out(i) = values[static_cast<std::size_t>(i)];
  } else {
    throw Error(ErrorKind::ConfigInvalid, "table needs N+1 or 2N+1 values, got " +
                                              std::to_string(values.size()));
  }
  return out;
}

MagneticModel::MagneticModel(GridSpec grid, Vector v, Vector a, double e)
    : grid_(grid), v_(std::move(v)), a_(std::move(a)), e_(e) {
  if (!std::isfinite(e)) throw Error(ErrorKind::NonFinite, "coupling e");
  check_profile(grid_, v_, "potential V");
  check_profile(grid_, a_, "vector potential a");
}

MagneticModel MagneticModel::with_coupling(double e) const {
  return MagneticModel(grid_, v_, a_, e);
}

RealStructure::RealStructure(const GridSpec& g) : grid(g) {
  const Index n = g.size();
  basis = ComplexMatrix::Zero(n, n);
  const double w = 1.0 / std::numbers::sqrt2;
  basis(g.index(0), 0) = 1.0;
  for (int j = 1; j <= g.N; ++j) {
    const Index plus = j;
    const Index minus = g.N + j;
    basis(g.index(j), plus) = w;
    basis(g.index(-j), plus) = w;
    basis(g.index(j), minus) = cd(0.0, w);
    basis(g.index(-j), minus) = cd(0.0, -w);
  }
}

ComplexVector RealStructure::conjugate(const ComplexVector& f) const {
  if (f.size() != grid.size()) throw Error(ErrorKind::DimensionMismatch, "conjugation");
  return f.reverse().conjugate();
}

ComplexVector RealStructure::embed(const Vector& x) const {
  if (x.size() != grid.size()) throw Error(ErrorKind::DimensionMismatch, "real embedding");
  return basis * x.cast<cd>();
}

double antilinear_commutation_residual(const ComplexOperator& h, const RealStructure& rs) {
  const Index n = rs.grid.size();
  if (h.dim() != n) throw Error(ErrorKind::DimensionMismatch, "commutation residual");
  const ComplexMatrix m = h.to_matrix();
  double worst = 0.0;
  for (Index k = 0; k < n; ++k) {
    for (const cd scale : {cd(1.0, 0.0), cd(0.0, 1.0)}) {
      ComplexVector x = ComplexVector::Zero(n);
      x(k) = scale;
      const ComplexVector lhs = m * rs.conjugate(x);
      const ComplexVector rhs = rs.conjugate(m * x);
      worst = std::max(worst, (lhs - rhs).norm());
    }
  }
  return worst;
}

ComplexOperator momentum_operator(const GridSpec& grid) {
  const Index n = grid.size();
  Matrix im = Matrix::Zero(n, n);
  const double w = 1.0 / (2.0 * grid.h);
  for (Index i = 0; i + 1 < n; ++i) {
    im(i, i + 1) = -w;
    im(i + 1, i) = w;
  }
  return ComplexOperator{Matrix::Zero(n, n), im};
}

ComplexOperator build_h0(const MagneticModel& model) {
  const GridSpec& g = model.grid();
  const Index n = g.size();
  const double w = 1.0 / (g.h * g.h);
  Matrix re = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    re(i, i) = 2.0 * w + model.potential()(i);
    if (i + 1 < n) {
      re(i, i + 1) = -w;
      re(i + 1, i) = -w;
    }
  }
  return ComplexOperator{re, Matrix::Zero(n, n)};
}

ComplexOperator build_interaction(const MagneticModel& model) {
  const double e = model.coupling();
  const ComplexMatrix p = momentum_operator(model.grid()).to_matrix();
  const Vector& a = model.vector_potential();
  const ComplexMatrix pa = p * a.cast<cd>().asDiagonal();
  const ComplexMatrix ap = a.cast<cd>().asDiagonal() * p;
  ComplexMatrix h = e * (pa + ap);
  h.diagonal() += (e * e * a.array().square()).matrix().cast<cd>();
  return ComplexOperator::from_matrix(h);
}

ComplexOperator build_magnetic(const MagneticModel& model) {
  return build_h0(model) + build_interaction(model);
}

SymmetricOperator restrict_to_real(const ComplexOperator& h, const RealStructure& rs, double tol) {
  const ComplexMatrix m = h.to_matrix();
  const double scale = std::max(1.0, max_abs_entry(m));
  const double comm = antilinear_commutation_residual(h, rs);
  if (comm > tol * scale) {
    throw Error(ErrorKind::NotRealCompatible,
                "||HC - CH|| = " + std::to_string(comm) + " exceeds tolerance");
  }
  const ComplexMatrix r = rs.basis.adjoint() * m * rs.basis;
  const double imag = r.imag().cwiseAbs().maxCoeff();
  if (imag > tol * scale) {
    throw Error(ErrorKind::ContractViolation, "restriction has imaginary part " + std::to_string(imag));
  }
  Matrix real = r.real();
  if ((real - real.transpose()).cwiseAbs().maxCoeff() > tol * scale) {
    throw Error(ErrorKind::ContractViolation, "restriction is not symmetric");
  }
  SymmetricOperator out(0.5 * (real + real.transpose()));

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::NonConvergence, "complex eigensolver");
  const Vector& full = es.eigenvalues();
  const Vector& part = out.spectrum().eigenvalues;
  const double spec_tol = 1e-9 * std::max(1.0, full.cwiseAbs().maxCoeff());
  for (Index k = 0; k < part.size(); ++k) {
    if ((full.array() - part(k)).abs().minCoeff() > spec_tol) {
      throw Error(ErrorKind::ContractViolation,
                  "restricted eigenvalue " + std::to_string(part(k)) + " missing from spectrum of H");
    }
  }
  return out;
}

OrthantFailureReport orthant_failure_demo(const MagneticModel& model, double s,
                                          std::optional<Vector> v, bool allow_control) {
  if (!(s > 0.0)) throw Error(ErrorKind::InvalidArgument, "s must be positive");
  const GridSpec& g = model.grid();
  const bool control = model.coupling() == 0.0;
  if (control && !allow_control) {
    throw Error(ErrorKind::TrivialCoupling, "e = 0: exp(-sH) is the classical heat semigroup");
  }
  const Vector bump = v ? *v : sample_even(g, [&](double x) {
    const double w = g.N * g.h / 2.0;
    return std::exp(-x * x / (w * w));
  });
  if (bump.size() != g.size()) throw Error(ErrorKind::DimensionMismatch, "bump");
  if (bump.norm() == 0.0 || bump.minCoeff() < 0.0 || !exactly_even(g, bump)) {
    throw Error(ErrorKind::NotInCone, "bump must be nonzero, nonnegative and even");
  }

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(build_magnetic(model).to_matrix());
  if (es.info() != Eigen::Success) throw Error(ErrorKind::NonConvergence, "complex eigensolver");
  const Vector decay = (-s * es.eigenvalues().array()).exp().matrix();
  const ComplexMatrix& q = es.eigenvectors();

  OrthantFailureReport out;
  out.e = model.coupling();
  out.s = s;
  out.control = control;
  out.image = q * (decay.cast<cd>().asDiagonal() * (q.adjoint() * bump.cast<cd>()));
  out.max_imag = out.image.imag().cwiseAbs().maxCoeff();
  out.min_real = out.image.real().minCoeff();
  out.left_cone = out.max_imag > 1e-10 || out.min_real < -1e-10;
  return out;
}

MagneticExperiment magnetic_experiment(const MagneticModel& model, double s0,
                                       const std::vector<double>& e_grid,
                                       std::vector<double> s_samples, std::uint64_t seed,
                                       int n_restarts, int jobs, double tau_gap) {
  if (e_grid.empty()) throw Error(ErrorKind::InvalidArgument, "e grid is empty");
  const RealStructure rs(model.grid());
  const SymmetricOperator h0 = restrict_to_real(build_h0(model.with_coupling(0.0)), rs);
  const TopEigen ground = bottom_eigen(h0, tau_gap, /*require_simple=*/true);

  MagneticExperiment out;
  out.ground_energy = ground.value;
  out.ground_gap = ground.gap;
  out.phi = ground.vector;

  PerturbationFamily family;
  family.s = [model, rs](double e) {
    return restrict_to_real(build_interaction(model.with_coupling(e)), rs);
  };
  family.a = [](double) { return 0.0; };
  family.b = [s = family.s](double e) { return s(e).norm(); };

  double e_max = 0.0;
  for (double e : e_grid) e_max = std::max(e_max, std::abs(e));
  const double kappa0 = std::nextafter(e_max, std::numeric_limits<double>::infinity());

  if (s_samples.empty()) s_samples = {s0 / 4.0, s0 / 2.0, s0};
  out.budget = semigroup_threshold(h0, family, s0, kappa0, e_grid, tau_gap);
  out.check = end_to_end_semigroup_check(h0, family, out.budget, s_samples, seed, n_restarts, jobs);
  out.e0 = out.budget.kappa_admissible_grid;
  return out;
}

}  // namespace pfcone
