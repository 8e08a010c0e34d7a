#include "pfcone/pf_verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "pfcone/rng.hpp"

namespace pfcone {

namespace {

constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

void check_dims(const SymmetricOperator& a, Index n) {
  if (a.dim() != n) {
    throw Error(ErrorKind::DimensionMismatch, "operator of dim " + std::to_string(a.dim()) +
                                                  " against dim " + std::to_string(n));
  }
}

Verdict make_verdict(VerdictStatus status, double margin, std::string detail,
                     std::optional<Vector> witness = std::nullopt,
                     double tolerance = kMembershipTolerance) {
  Verdict v;
  v.status = status;
  v.margin = margin;
  v.detail = std::move(detail);
  v.witness = std::move(witness);
  v.tolerance = tolerance;
  return v;
}

bool is_top_eigenvector(const SymmetricOperator& a, const Vector& u0) {
  const double norm = a.norm();
  const double top = a.spectrum().max();
  if (top < norm * (1.0 - 1e-12)) return false;
  return (a.apply(u0) - top * u0).norm() <= 1e-9 * std::max(norm, 1e-300);
}

/// Boundary-ray directions in the complement of `axis` worth trying first:
/// projections of every eigenvector of A.
std::vector<Vector> spectral_directions(const SymmetricOperator& a, const Vector& axis) {
  std::vector<Vector> out;
  const auto& q = a.spectrum().eigenvectors;
  for (Index k = q.cols() - 1; k >= 0; --k) {
    Vector d = q.col(k) - axis.dot(q.col(k)) * axis;
    const double n = d.norm();
    if (n > 1e-8) out.push_back(d / n);
  }
  return out;
}

}  // namespace

std::string_view to_string(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::CertifiedTrue: return "CertifiedTrue";
    case VerdictStatus::SampledTrue: return "SampledTrue";
    case VerdictStatus::CertifiedFalse: return "CertifiedFalse";
    case VerdictStatus::Inapplicable: return "Inapplicable";
  }
  return "?";
}

VerdictStatus parse_verdict_status(std::string_view s) {
  for (auto st : {VerdictStatus::CertifiedTrue, VerdictStatus::SampledTrue,
                  VerdictStatus::CertifiedFalse, VerdictStatus::Inapplicable}) {
    if (to_string(st) == s) return st;
  }
  throw Error(ErrorKind::ParseError, "unknown verdict status '" + std::string(s) + "'");
}

bool replay_violation(const SymmetricOperator& a, const Cone& cone, Predicate predicate,
                      const Vector& witness, double tolerance) {
  check_dims(a, witness.size());
  if (witness.norm() == 0.0 || !in_cone(cone, witness, tolerance)) return false;
  const Membership image = classify(cone, a.apply(witness), tolerance);
  if (predicate == Predicate::PreservesPositivity) return image == Membership::Outside;
  return image != Membership::Interior;
}

double image_cosine_margin(const SymmetricOperator& a, const Vector& axis, const Vector& u) {
  const Vector image = a.apply(u);
  const double n = image.norm();
  if (n == 0.0) return 0.0;
  return axis.dot(image) / n - kInvSqrt2;
}

Verdict preserves_positivity(const SymmetricOperator& a, const Cone& cone, int n_samples,
                             std::uint64_t seed) {
  const Index n = cone_dim(cone);
  check_dims(a, n);

  std::optional<std::string> certificate;
  std::vector<Vector> samples;
  if (const auto* axis_cone = std::get_if<AxisCone>(&cone)) {
    if (a.is_positive_semidefinite() && is_top_eigenvector(a, axis_cone->axis())) {
      certificate = "axis is a top eigenvector of a positive semidefinite operator";
    }
    samples.push_back(axis_cone->axis());
    for (const auto& d : spectral_directions(a, axis_cone->axis())) {
      samples.push_back(axis_cone->axis() + d);
      samples.push_back(axis_cone->axis() - d);
    }
  } else {
    if (a.matrix().minCoeff() >= -1e-12) certificate = "entrywise nonnegative";
    for (Index j = 0; j < n; ++j) samples.push_back(Vector::Unit(n, j));
  }
  SplitMix64 rng(seed);
  for (int k = 0; k < n_samples; ++k) samples.push_back(sample_cone_point(cone, rng));

  double worst = std::numeric_limits<double>::infinity();
  for (const auto& u : samples) {
    const Vector image = a.apply(u);
    const double norm = image.norm();
    const double m = norm == 0.0 ? 0.0 : cone_margin(cone, image) / norm;
    worst = std::min(worst, m);
    if (!certificate && classify(cone, image) == Membership::Outside) {
      return make_verdict(VerdictStatus::CertifiedFalse, m, "image leaves the cone", u);
    }
  }
  if (certificate) return make_verdict(VerdictStatus::CertifiedTrue, worst, *certificate);
  return make_verdict(VerdictStatus::SampledTrue, worst,
                      "no sampled image left the cone (" + std::to_string(samples.size()) +
                          " samples)");
}

Verdict improves_positivity_axis(const SymmetricOperator& a, const Vector& u0_in, double tau_gap) {
  check_dims(a, u0_in.size());
  require_finite(u0_in, "axis");
  if (u0_in.norm() == 0.0) throw Error(ErrorKind::InvalidArgument, "axis must be nonzero");
  const Vector u0 = u0_in.normalized();
  if (!a.is_positive_semidefinite()) {
    throw Error(ErrorKind::PrereqFailed, "operator is not positive semidefinite");
  }
  if (!is_top_eigenvector(a, u0)) {
    throw Error(ErrorKind::AxisNotEigenvector, "axis is not an eigenvector for ||A||");
  }
  const double norm = a.norm();
  const double tol = std::max(tau_gap, kMembershipTolerance);
  if (norm == 0.0) {
    return make_verdict(VerdictStatus::CertifiedFalse, 0.0, "zero operator maps the cone to 0",
                        u0, tol);
  }
  if (a.dim() == 1) {
    return make_verdict(VerdictStatus::CertifiedTrue, 1.0, "empty orthogonal complement");
  }
  const Matrix basis = orthogonal_complement(u0);
  const Matrix restricted = basis.transpose() * a.matrix() * basis;
  const SymmetricOperator r(0.5 * (restricted + restricted.transpose()));
  const double restricted_norm = r.norm();
  const double margin = 1.0 - restricted_norm / norm;
  if (restricted_norm < norm - tau_gap * norm) {
    return make_verdict(VerdictStatus::CertifiedTrue, margin,
                        "restricted norm " + std::to_string(restricted_norm) + " < ||A|| " +
                            std::to_string(norm));
  }
  const auto& sp = r.spectrum();
  const Index k = std::abs(sp.max()) >= std::abs(sp.min()) ? sp.eigenvalues.size() - 1 : 0;
  const Vector w = basis * sp.eigenvectors.col(k);
  return make_verdict(VerdictStatus::CertifiedFalse, margin,
                      "||A|| is not simple: boundary ray maps to the boundary", Vector(u0 + w),
                      tol);
}

namespace {

struct RaySearch {
  const SymmetricOperator& a;
  const Vector& axis;
  const Matrix& basis;  // complement of axis

  double value(const Vector& y) const { return image_cosine_margin(a, axis, axis + basis * y); }

  // Riemannian gradient on the unit sphere of the complement coordinates.
  Vector gradient(const Vector& y) const {
    const Vector u = axis + basis * y;
    const Vector au = a.apply(u);
    const double n = au.norm();
    if (n == 0.0) return Vector::Zero(y.size());
    const Vector grad_u = a.apply(axis) / n - axis.dot(au) * a.apply(au) / (n * n * n);
    Vector g = basis.transpose() * grad_u;
    g -= y.dot(g) * y;
    return g;
  }

  std::pair<double, Vector> descend(Vector y) const {
    double f = value(y);
    double step = 1.0;
    for (int it = 0; it < 300; ++it) {
      const Vector g = gradient(y);
      const double gn = g.norm();
      if (gn < 1e-13) break;
      bool moved = false;
      while (step > 1e-14) {
        const Vector trial = (y - step * g).normalized();
        const double ft = value(trial);
        if (ft < f - 1e-4 * step * gn * gn) {
          y = trial;
          f = ft;
          step *= 2.0;
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
    return {f, y};
  }
};

}  // namespace

Verdict improves_positivity_general(const SymmetricOperator& a, const AxisCone& cone,
                                    int n_restarts, std::uint64_t seed) {
  const Index n = cone.dim();
  check_dims(a, n);
  const Vector& axis = cone.axis();
  const double tau = kMembershipTolerance;

  if (a.matrix().cwiseAbs().maxCoeff() == 0.0) {
    return make_verdict(VerdictStatus::CertifiedFalse, 0.0, "zero operator maps the cone to 0",
                        axis);
  }
  if (n == 1) {
    const double m = image_cosine_margin(a, axis, axis);
    if (m > tau) return make_verdict(VerdictStatus::CertifiedTrue, m, "single ray");
    return make_verdict(VerdictStatus::CertifiedFalse, m, "single ray not improved", axis);
  }

  const Matrix basis = orthogonal_complement(axis);
  if (n == 2) {
    // Unit vectors of the cone are cos(phi) u1 + sin(phi) w, |phi| <= 45 deg.
    const Vector w = basis.col(0);
    double best = std::numeric_limits<double>::infinity();
    Vector arg = axis;
    constexpr int kSteps = 4500;  // 0.01 degree over [-45, 45]
    for (int k = -kSteps; k <= kSteps; ++k) {
      const double phi = (static_cast<double>(k) / kSteps) * (std::numbers::pi / 4.0);
      const Vector u = std::cos(phi) * axis + std::sin(phi) * w;
      const double m = image_cosine_margin(a, axis, u);
      if (m < best) {
        best = m;
        arg = u;
      }
    }
    if (best > tau) return make_verdict(VerdictStatus::CertifiedTrue, best, "exhaustive sweep");
    return make_verdict(VerdictStatus::CertifiedFalse, best, "sweep found a non-improved ray", arg);
  }

  RaySearch search{a, axis, basis};
  std::vector<Vector> starts;
  for (const auto& d : spectral_directions(a, axis)) {
    const Vector y = basis.transpose() * d;
    starts.push_back(y.normalized());
    starts.push_back(-y.normalized());
  }
  for (int r = 0; r < n_restarts; ++r) {
    SplitMix64 rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    starts.push_back(rng.unit_vector(n - 1));
  }

  double best = std::numeric_limits<double>::infinity();
  Vector arg;
  for (const auto& y0 : starts) {
    auto [f, y] = search.descend(y0);
    if (f < best) {
      best = f;
      arg = y;
    }
  }
  if (best <= tau) {
    return make_verdict(VerdictStatus::CertifiedFalse, best, "local search found a non-improved ray",
                        Vector(axis + basis * arg));
  }
  return make_verdict(VerdictStatus::SampledTrue, best,
                      "minimum over " + std::to_string(starts.size()) + " starts stays positive");
}

ErgodicProbe ergodic_probe(const SymmetricOperator& a, const Cone& cone, const Vector& u,
                           const Vector& v, int n_max) {
  check_dims(a, u.size());
  check_dims(a, v.size());
  if (n_max < 1) throw Error(ErrorKind::InvalidArgument, "n_max must be >= 1");
  if (u.norm() == 0.0 || v.norm() == 0.0 || !in_cone(cone, u) || !in_cone(cone, v)) {
    throw Error(ErrorKind::NotInCone, "ergodic probe needs nonzero cone elements");
  }
  const double norm = a.norm();
  if (norm == 0.0) return {false, n_max, 0.0};
  const Matrix b = a.matrix() / norm;
  const double threshold = 1e-10 * u.norm() * v.norm();
  Vector w = v;
  double value = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    w = b * w;
    value = u.dot(w);
    if (value > threshold) return {true, n, value * std::pow(norm, n)};
  }
  return {false, n_max, value * std::pow(norm, n_max)};
}

PerronFrobeniusReport perron_frobenius_check(const SymmetricOperator& a, const Cone& cone,
                                             std::uint64_t seed, int n_random_pairs, int n_max,
                                             double tau_gap) {
  const Index n = cone_dim(cone);
  check_dims(a, n);
  if (!a.is_positive_semidefinite()) {
    throw Error(ErrorKind::PrereqFailed, "operator is not positive semidefinite");
  }
  if (preserves_positivity(a, cone, 256, seed).status == VerdictStatus::CertifiedFalse) {
    throw Error(ErrorKind::PrereqFailed, "operator does not preserve the cone");
  }

  std::vector<std::pair<Vector, Vector>> pairs;
  if (const auto* axis_cone = std::get_if<AxisCone>(&cone)) {
    const Vector& axis = axis_cone->axis();
    const auto dirs = spectral_directions(a, axis);
    for (const auto& d : dirs) {
      pairs.emplace_back(axis + d, axis - d);
      for (const auto& e : dirs) pairs.emplace_back(axis + d, axis + e);
    }
    pairs.emplace_back(axis, axis);
  } else {
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) pairs.emplace_back(Vector::Unit(n, i), Vector::Unit(n, j));
  }
  SplitMix64 rng(derive_seed(seed, 1));
  for (int k = 0; k < n_random_pairs; ++k) {
    Vector u = sample_cone_point(cone, rng);
    Vector v = sample_cone_point(cone, rng);
    pairs.emplace_back(std::move(u), std::move(v));
  }

  PerronFrobeniusReport report;
  report.ergodic_sampled = true;
  for (const auto& [u, v] : pairs) {
    ++report.pairs_checked;
    if (!ergodic_probe(a, cone, u, v, n_max).found) {
      report.ergodic_sampled = false;
      report.failing_pair = std::make_pair(u, v);
      break;
    }
  }

  const TopEigen top = top_eigen(a, tau_gap);
  report.top_simple = top.simple;
  report.top_strictly_positive =
      is_strictly_positive(cone, top.vector) || is_strictly_positive(cone, Vector(-top.vector));
  const bool spectral_side = report.top_simple && report.top_strictly_positive;
  report.agree = report.ergodic_sampled == spectral_side;
  report.detail = std::string(report.ergodic_sampled ? "ergodic on samples" : "not ergodic") +
                  "; top " + (report.top_simple ? "simple" : "not simple") + ", eigenvector " +
                  (report.top_strictly_positive ? "strictly positive" : "not strictly positive");
  return report;
}

}  // namespace pfcone
