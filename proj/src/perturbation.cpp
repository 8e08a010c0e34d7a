#include "pfcone/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "pfcone/parallel.hpp"
#include "pfcone/rng.hpp"

namespace pfcone {

namespace {

constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

Vector unit(const Vector& v, const char* what) {
  require_finite(v, what);
  const double n = v.norm();
  if (n == 0.0) throw Error(ErrorKind::InvalidArgument, std::string(what) + " must be nonzero");
  return v / n;
}

void require_axis_eigenvector(const SymmetricOperator& a, const Vector& u0) {
  const double norm = a.norm();
  const double top = a.spectrum().max();
  const bool is_top = top >= norm * (1.0 - 1e-12);
  if (!is_top || (a.apply(u0) - top * u0).norm() > 1e-9 * std::max(norm, 1e-300)) {
    throw Error(ErrorKind::AxisNotEigenvector, "u0 is not an eigenvector for ||A||");
  }
}

}  // namespace

double radius_from_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorKind::InvalidArgument, "alpha must lie in [0, 1]");
  const double a2 = alpha * alpha;
  return (1.0 - a2) / (4.0 * std::numbers::sqrt2 * (1.0 + a2));
}

double quartic_constant(double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw Error(ErrorKind::InvalidArgument, "alpha must lie in [0, 1)");
  const double a2 = alpha * alpha;
  return std::numbers::sqrt2 * (1.0 + a2) / (1.0 - a2);
}

double threshold_from_radius(double r) {
  if (!(r >= 0.0 && r <= 2.0)) throw Error(ErrorKind::InvalidArgument, "radius must lie in [0, 2]");
  const double q = r * std::sqrt(1.0 - r * r / 4.0);
  return q / (1.0 + q);
}

double quartic_margin(double c, double x) {
  if (!(c > 0.0) || !(x >= 0.0)) throw Error(ErrorKind::InvalidArgument, "quartic margin needs c > 0, x >= 0");
  const double x2 = x * x;
  return x2 * x2 - 2.0 * x2 + c * x - 0.25;
}

bool lemma_region(double c, double x) {
  if (!(c > 0.0) || !(x >= 0.0)) throw Error(ErrorKind::InvalidArgument, "lemma region needs c > 0, x >= 0");
  return x < std::min(c / 4.0, 1.0 / (4.0 * c));
}

double image_cosine_lower_bound(double alpha, double t) {
  if (!(t >= 1.0)) throw Error(ErrorKind::InvalidArgument, "t must be >= 1");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorKind::InvalidArgument, "alpha must lie in [0, 1]");
  return 1.0 / std::sqrt(1.0 + alpha * alpha * (t * t - 1.0));
}

double drift_inequality_lhs(double alpha, double drift) {
  if (!(drift >= 0.0 && drift < kInvSqrt2)) {
    throw Error(ErrorKind::InvalidArgument, "drift must lie in [0, 1/sqrt(2))");
  }
  const double t = 1.0 / (kInvSqrt2 - drift);
  return image_cosine_lower_bound(alpha, t) - drift;
}

double projector_drift_bound(double c) {
  if (!(c >= 0.0 && c < 0.5)) throw Error(ErrorKind::BudgetViolated, "drift bound needs 0 <= c < 1/2");
  const double q = c / (1.0 - c);
  const double root = std::sqrt(1.0 - q * q);
  // 1 - sqrt(1 - q^2) without cancellation.
  return std::sqrt(2.0 * q * q / (1.0 + root));
}

Verdict ergodic_drift_check(const SymmetricOperator& a, const Vector& u0_in, const Vector& u1_in,
                            int sample_pairs, std::uint64_t seed) {
  const Vector u0 = unit(u0_in, "u0");
  const Vector u1 = unit(u1_in, "u1");
  if (a.dim() != u0.size() || u1.size() != u0.size()) {
    throw Error(ErrorKind::DimensionMismatch, "ergodic drift check");
  }
  require_axis_eigenvector(a, u0);

  Verdict out;
  const double drift = (u1 - u0).norm();
  const double slack = kInvSqrt2 - drift;
  if (slack <= 0.0) {
    out.status = VerdictStatus::Inapplicable;
    out.margin = slack;
    out.detail = "||u1 - u0|| = " + std::to_string(drift) + " >= 1/sqrt(2)";
    return out;
  }

  const AxisCone cone(u1);
  std::vector<std::pair<Vector, Vector>> pairs;
  if (a.dim() > 1) {
    const Matrix basis = orthogonal_complement(u1);
    for (Index k = 0; k < basis.cols(); ++k) {
      pairs.emplace_back(u1 + basis.col(k), u1 - basis.col(k));
    }
  }
  SplitMix64 rng(seed);
  for (int k = 0; k < sample_pairs; ++k) {
    Vector u = sample_cone_point(cone, rng);
    Vector v = sample_cone_point(cone, rng);
    pairs.emplace_back(std::move(u), std::move(v));
  }

  double worst_cert = std::numeric_limits<double>::infinity();
  int max_n = 0;
  for (const auto& [u, v] : pairs) {
    for (const Vector* w : {&u, &v}) {
      const double cert = u0.dot(*w) / w->norm();
      worst_cert = std::min(worst_cert, cert);
      if (cert < slack - 1e-12) {
        out.status = VerdictStatus::CertifiedFalse;
        out.witness = *w;
        out.margin = cert;
        out.detail = "certificate <u0,u> >= (1/sqrt(2) - d)||u|| violated";
        return out;
      }
    }
    const auto probe = ergodic_probe(a, cone, u, v);
    if (!probe.found) {
      out.status = VerdictStatus::CertifiedFalse;
      out.witness = u;
      out.margin = worst_cert;
      out.detail = "no power up to n_max gave <u, A^n v> > 0";
      return out;
    }
    max_n = std::max(max_n, probe.n);
  }
  out.status = VerdictStatus::SampledTrue;
  out.margin = worst_cert;
  out.detail = std::to_string(pairs.size()) + " pairs ergodic, max n " + std::to_string(max_n) +
               ", certificate slack " + std::to_string(slack);
  return out;
}

ImprovingRadius improving_radius(const SymmetricOperator& a, const Vector& u0_in, double tau_gap) {
  const Vector u0 = unit(u0_in, "u0");
  if (a.dim() != u0.size()) throw Error(ErrorKind::DimensionMismatch, "improving radius");
  if (!a.is_positive_semidefinite()) {
    throw Error(ErrorKind::PrereqFailed, "operator is not positive semidefinite");
  }
  top_eigen(a, tau_gap, /*require_simple=*/true);
  require_axis_eigenvector(a, u0);

  ImprovingRadius out;
  out.norm = a.norm();
  if (out.norm == 0.0) throw Error(ErrorKind::DegenerateTop, "zero operator");
  if (a.dim() > 1) {
    const Matrix basis = orthogonal_complement(u0);
    const Matrix restricted = basis.transpose() * a.matrix() * basis;
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (restricted + restricted.transpose()),
                                             Eigen::EigenvaluesOnly);
    out.lambda1 = es.eigenvalues().maxCoeff();
  }
  out.alpha = std::clamp(out.lambda1 / out.norm, 0.0, 1.0);
  out.r = radius_from_alpha(out.alpha);
  return out;
}

Verdict certified_improving_under_drift(const SymmetricOperator& a, const Vector& u0_in,
                                        const Vector& u1_in, int n_restarts, std::uint64_t seed,
                                        double tau_gap) {
  const Vector u0 = unit(u0_in, "u0");
  const Vector u1 = unit(u1_in, "u1");
  const ImprovingRadius radius = improving_radius(a, u0, tau_gap);
  const double drift = (u1 - u0).norm();
  if (!(drift < kInvSqrt2)) {
    throw Error(ErrorKind::PrereqFailed, "||u1 - u0|| must be below 1/sqrt(2)");
  }
  const double lhs = drift_inequality_lhs(radius.alpha, drift);
  if (lhs > kInvSqrt2) {
    Verdict v;
    v.status = VerdictStatus::CertifiedTrue;
    v.margin = lhs - kInvSqrt2;
    v.detail = "drift inequality holds (alpha " + std::to_string(radius.alpha) + ", d " +
               std::to_string(drift) + ")";
    return v;
  }
  Verdict v = improves_positivity_general(a, AxisCone(u1), n_restarts, seed);
  v.detail = "drift inequality inconclusive; " + v.detail;
  return v;
}

RieszProjector riesz_projector(const SymmetricOperator& t, double center, double radius,
                               int nodes) {
  if (!(radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "contour radius must be positive");
  if (nodes < 2) throw Error(ErrorKind::InvalidArgument, "need at least 2 quadrature nodes");
  const auto& sp = t.spectrum();
  for (Index k = 0; k < sp.eigenvalues.size(); ++k) {
    const double d = std::abs(sp.eigenvalues(k) - center);
    if (d >= radius * (1.0 - 1e-6) && d <= radius * (1.0 + 1e-6)) {
      throw Error(ErrorKind::ContourHitsSpectrum,
                  "eigenvalue " + std::to_string(sp.eigenvalues(k)) + " lies on the contour");
    }
  }
  const Index n = t.dim();
  const ComplexMatrix tc = t.matrix().cast<std::complex<double>>();
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  ComplexMatrix sum = ComplexMatrix::Zero(n, n);
  for (int k = 0; k < nodes; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / nodes;
    const std::complex<double> omega = std::polar(1.0, theta);
    const std::complex<double> z = center + radius * omega;
    const ComplexMatrix resolvent = (z * id - tc).partialPivLu().solve(id);
    sum += (radius * omega) * resolvent;
  }
  sum /= static_cast<double>(nodes);

  RieszProjector out;
  out.center = center;
  out.radius = radius;
  out.nodes = nodes;
  out.imag_residual = sum.imag().cwiseAbs().maxCoeff();
  if (out.imag_residual > 1e-8) {
    throw Error(ErrorKind::ContractViolation,
                "contour projector is not real: " + std::to_string(out.imag_residual));
  }
  sum.imag().setZero();
  out.matrix = std::move(sum);
  const Matrix p = out.matrix.real();
  out.idempotency_residual = (p * p - p).norm();
  return out;
}

FixedPerturbation FixedPerturbation::with_norm_bound(SymmetricOperator s) {
  const double b = s.norm();
  return FixedPerturbation{std::move(s), 0.0, b};
}

SymmetricOperator perturbation_at(const PerturbationSpec& spec, double kappa) {
  if (const auto* fixed = std::get_if<FixedPerturbation>(&spec)) return fixed->s.scaled(kappa);
  return std::get<PerturbationFamily>(spec).s(kappa);
}

double relative_bound_a(const PerturbationSpec& spec, double kappa) {
  if (const auto* fixed = std::get_if<FixedPerturbation>(&spec)) return fixed->a * std::abs(kappa);
  return std::get<PerturbationFamily>(spec).a(kappa);
}

double relative_bound_b(const PerturbationSpec& spec, double kappa) {
  if (const auto* fixed = std::get_if<FixedPerturbation>(&spec)) return fixed->b * std::abs(kappa);
  return std::get<PerturbationFamily>(spec).b(kappa);
}

double PerturbationBudget::c_of(double a_kappa, double b_kappa) const {
  return a_kappa + ((std::abs(mu) + epsilon) * a_kappa + b_kappa) / epsilon;
}

std::vector<double> PerturbationBudget::admissible_kappas() const {
  std::vector<double> out;
  for (const auto& row : rows) {
    if (row.admissible) out.push_back(row.kappa);
  }
  return out;
}

PerturbationBudget semigroup_threshold(const SymmetricOperator& t, const PerturbationSpec& spec,
                                       double s0, double kappa0,
                                       const std::vector<double>& kappa_grid, double tau_gap) {
  if (t.dim() < 2) throw Error(ErrorKind::InvalidArgument, "need dim >= 2 for a spectral gap");
  if (!(s0 > 0.0)) throw Error(ErrorKind::InvalidArgument, "s0 must be positive");
  if (!(kappa0 > 0.0)) throw Error(ErrorKind::InvalidArgument, "kappa0 must be positive");

  const TopEigen bottom = bottom_eigen(t, tau_gap, /*require_simple=*/true);
  PerturbationBudget budget;
  budget.regime = AlphaRegime::SemigroupGap;
  budget.mu = bottom.value;
  budget.u0 = bottom.vector;
  budget.s0 = s0;
  budget.kappa0 = kappa0;
  budget.delta = bottom.gap;

  for (double kappa : kappa_grid) {
    if (!std::isfinite(kappa)) throw Error(ErrorKind::InvalidArgument, "kappa grid has non-finite entries");
    if (std::abs(kappa) >= kappa0) continue;
    BudgetRow row;
    row.kappa = kappa;
    row.a = relative_bound_a(spec, kappa);
    row.b = relative_bound_b(spec, kappa);
    const SymmetricOperator tk = t + perturbation_at(spec, kappa);
    row.gap = bottom_eigen(tk, tau_gap).gap;
    budget.delta = std::min(budget.delta, row.gap);
    budget.rows.push_back(row);
  }
  if (!(budget.delta > tau_gap * std::max(1.0, std::abs(budget.mu)))) {
    throw Error(ErrorKind::GapCollapsed, "uniform gap " + std::to_string(budget.delta) + " on the grid");
  }

  budget.epsilon = budget.delta / 2.0;
  budget.alpha = 1.0 - std::exp(-s0 * budget.delta);
  budget.r = radius_from_alpha(budget.alpha);
  budget.threshold = threshold_from_radius(budget.r);
  for (auto& row : budget.rows) {
    row.c = budget.c_of(row.a, row.b);
    row.admissible = row.c < budget.threshold;
  }

  std::vector<const BudgetRow*> by_size;
  for (const auto& row : budget.rows) by_size.push_back(&row);
  std::stable_sort(by_size.begin(), by_size.end(), [](const BudgetRow* x, const BudgetRow* y) {
    return std::abs(x->kappa) < std::abs(y->kappa);
  });
  budget.kappa_admissible_grid = 0.0;
  for (std::size_t i = 0; i < by_size.size();) {
    // rows sharing |kappa| must all be admissible
    std::size_t j = i;
    bool ok = true;
    while (j < by_size.size() && std::abs(by_size[j]->kappa) == std::abs(by_size[i]->kappa)) {
      ok = ok && by_size[j]->admissible;
      ++j;
    }
    if (!ok) break;
    budget.kappa_admissible_grid = std::abs(by_size[i]->kappa);
    i = j;
  }

  if (const auto* fixed = std::get_if<FixedPerturbation>(&spec)) {
    const double denom =
        fixed->a + ((std::abs(budget.mu) + budget.epsilon) * fixed->a + fixed->b) / budget.epsilon;
    budget.kappa_admissible_closed_form =
        denom > 0.0 ? budget.threshold / denom : std::numeric_limits<double>::infinity();
  } else {
    budget.kappa_admissible_closed_form = std::numeric_limits<double>::quiet_NaN();
  }
  return budget;
}

DriftedAxis drifted_axis(const SymmetricOperator& t_kappa, const Vector& u0_in,
                         const PerturbationBudget& budget, double c_kappa, int nodes) {
  if (!(c_kappa < 0.5)) {
    throw Error(ErrorKind::BudgetViolated, "c(kappa) = " + std::to_string(c_kappa) + " >= 1/2");
  }
  const Vector u0 = unit(u0_in, "u0");
  const RieszProjector p = riesz_projector(t_kappa, budget.mu, budget.epsilon, nodes);
  Vector u_kappa = p.real() * u0;
  const double n = u_kappa.norm();
  if (n == 0.0) throw Error(ErrorKind::ContractViolation, "projected axis vanished");

  DriftedAxis out;
  out.v_kappa = u_kappa / n;
  if (out.v_kappa.dot(u0) < 0.0) out.v_kappa = -out.v_kappa;
  out.drift_actual = (out.v_kappa - u0).norm();
  out.drift_bound = projector_drift_bound(c_kappa);
  if (out.drift_actual > out.drift_bound + 1e-8) {
    throw Error(ErrorKind::ContractViolation, "drift " + std::to_string(out.drift_actual) +
                                                  " exceeds bound " + std::to_string(out.drift_bound));
  }
  if (c_kappa < budget.threshold && !(out.drift_actual < budget.r)) {
    throw Error(ErrorKind::ContractViolation, "admissible kappa but drift " +
                                                  std::to_string(out.drift_actual) + " >= r");
  }
  return out;
}

SemigroupCheckReport end_to_end_semigroup_check(const SymmetricOperator& t,
                                                const PerturbationSpec& spec,
                                                const PerturbationBudget& budget,
                                                const std::vector<double>& s_samples,
                                                std::uint64_t seed, int n_restarts, int jobs) {
  for (double s : s_samples) {
    if (!(s > 0.0)) {
      throw Error(ErrorKind::InvalidArgument,
                  "s must be positive: exp(0 T) is the identity, which maps boundary to boundary");
    }
    if (s > budget.s0 * (1.0 + 1e-12)) {
      throw Error(ErrorKind::OutsideTheoremScope,
                  "s = " + std::to_string(s) + " exceeds s0 = " + std::to_string(budget.s0));
    }
  }

  SemigroupCheckReport report;
  for (double s : s_samples) {
    report.base_checks.emplace_back(s, improves_positivity_axis(heat_semigroup(t, s), budget.u0));
  }

  std::vector<const BudgetRow*> admissible;
  for (const auto& row : budget.rows) {
    if (row.admissible) admissible.push_back(&row);
  }
  const std::size_t ns = s_samples.size();
  report.rows.resize(admissible.size() * ns);
  parallel_for(admissible.size(), jobs, [&](std::size_t i) {
    const BudgetRow& row = *admissible[i];
    const SymmetricOperator tk = t + perturbation_at(spec, row.kappa);
    const DriftedAxis drifted = drifted_axis(tk, budget.u0, budget, row.c);
    for (std::size_t j = 0; j < ns; ++j) {
      const double s = s_samples[j];
      const SymmetricOperator e = heat_semigroup(tk, s);
      TopEigen top = top_eigen(e);
      if (top.vector.dot(budget.u0) < 0.0) top.vector = -top.vector;
      const auto& ev = e.spectrum().eigenvalues;

      SemigroupCheckRow& out = report.rows[i * ns + j];
      out.kappa = row.kappa;
      out.s = s;
      out.c_kappa = row.c;
      out.threshold = budget.threshold;
      out.drift_bound = drifted.drift_bound;
      out.drift_actual = drifted.drift_actual;
      out.alpha_actual = ev(ev.size() - 2) / ev(ev.size() - 1);
      out.alpha_uniform = budget.alpha;
      out.verdict = certified_improving_under_drift(e, top.vector, budget.u0, n_restarts,
                                                    derive_seed(seed, i * ns + j));
    }
  });
  for (const auto& row : report.rows) {
    if (row.verdict.status == VerdictStatus::CertifiedFalse) ++report.failures;
  }
  for (const auto& [s, v] : report.base_checks) {
    if (v.status == VerdictStatus::CertifiedFalse) ++report.failures;
  }
  return report;
}

}  // namespace pfcone
