#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "pfcone/operator.hpp"
#include "pfcone/pf_verifier.hpp"

namespace pfcone {

// ---------------------------------------------------------------------------
// Closed-form scalars
// ---------------------------------------------------------------------------

/// r(alpha) = (1 - alpha^2) / (4 sqrt(2) (1 + alpha^2)).
double radius_from_alpha(double alpha);

/// c(alpha) = sqrt(2) (1 + alpha^2) / (1 - alpha^2); r = 1 / (4 c).
double quartic_constant(double alpha);

/// f(r) = r sqrt(1 - r^2/4) / (1 + r sqrt(1 - r^2/4)).
double threshold_from_radius(double r);

/// g(x) = x^4 - 2x^2 + c x - 1/4. Requires c > 0 and x >= 0.
double quartic_margin(double c, double x);

/// x < min(c/4, 1/(4c)), the region where g is known to be negative.
bool lemma_region(double c, double x);

/// 1 / sqrt(1 + alpha^2 (t^2 - 1)): lower bound on <u0, Au>/||Au|| for every u
/// with <u0, u> >= ||u|| / t, t >= 1.
double image_cosine_lower_bound(double alpha, double t);

/// 1/sqrt(1 + alpha^2((1/sqrt(2) - d)^-2 - 1)) - d. Exceeding 1/sqrt(2) certifies
/// positivity improvement with respect to an axis at distance d from u0.
double drift_inequality_lhs(double alpha, double drift);

/// sqrt(2 (1 - sqrt(1 - (c/(1-c))^2))): bound on the drift of the normalized
/// projected ground vector when ||P_kappa - P_0|| < c/(1-c). Requires c < 1/2.
double projector_drift_bound(double c);

// ---------------------------------------------------------------------------
// Axis perturbation
// ---------------------------------------------------------------------------

/// Ergodicity of A with respect to P(u1) for ||u1 - u0|| < 1/sqrt(2): runs
/// ergodic_probe on sampled pairs of P(u1) and checks the lower bound
/// <u0, u> >= (1/sqrt(2) - ||u0 - u1||) ||u|| on every sample. Returns
/// Inapplicable when the axis drifted too far.
Verdict ergodic_drift_check(const SymmetricOperator& a, const Vector& u0, const Vector& u1,
                            int sample_pairs, std::uint64_t seed);

struct ImprovingRadius {
  double alpha = 0.0;    // lambda_1 / ||A||
  double r = 0.0;
  double norm = 0.0;     // ||A||
  double lambda1 = 0.0;  // sup of <u, Au> over unit u orthogonal to u0
};

/// Requires A positive semidefinite with simple top eigenvalue (DegenerateTop)
/// and u0 a corresponding eigenvector (AxisNotEigenvector). Any unit axis
/// within distance r of u0 keeps A positivity improving.
ImprovingRadius improving_radius(const SymmetricOperator& a, const Vector& u0,
                                 double tau_gap = kDefaultGapTolerance);

/// Certifies improvement w.r.t. P(u1) through drift_inequality_lhs; when the
/// inequality does not hold it falls back to improves_positivity_general.
Verdict certified_improving_under_drift(const SymmetricOperator& a, const Vector& u0,
                                        const Vector& u1, int n_restarts = 16,
                                        std::uint64_t seed = 0,
                                        double tau_gap = kDefaultGapTolerance);

// ---------------------------------------------------------------------------
// Spectral projectors
// ---------------------------------------------------------------------------

struct RieszProjector {
  ComplexMatrix matrix;
  double center = 0.0;
  double radius = 0.0;
  int nodes = 0;
  double imag_residual = 0.0;          // max |Im P_ij| before it is discarded
  double idempotency_residual = 0.0;   // ||P^2 - P||_F

  Matrix real() const { return matrix.real(); }
};

/// (1/2 pi i) times the contour integral of (z - T)^-1 over |z - center| = radius,
/// by the trapezoidal rule on `nodes` equispaced points. Resolvents are
/// computed by LU, independently of the eigendecomposition. Throws
/// ContourHitsSpectrum if an eigenvalue lies within a relative 1e-6 of the
/// circle.
RieszProjector riesz_projector(const SymmetricOperator& t, double center, double radius,
                               int nodes = 64);

// ---------------------------------------------------------------------------
// Semigroup perturbation budget
// ---------------------------------------------------------------------------

/// Linear family kappa S with constants ||S u|| <= a ||T u|| + b ||u||.
struct FixedPerturbation {
  SymmetricOperator s;
  double a = 0.0;
  double b = 0.0;

  /// a = 0, b = ||S||: every finite operator is bounded.
  static FixedPerturbation with_norm_bound(SymmetricOperator s);
};

/// General family kappa -> S(kappa) with tabulated relative-bound functions.
struct PerturbationFamily {
  std::function<SymmetricOperator(double)> s;
  std::function<double(double)> a;
  std::function<double(double)> b;
};

using PerturbationSpec = std::variant<FixedPerturbation, PerturbationFamily>;

SymmetricOperator perturbation_at(const PerturbationSpec& spec, double kappa);
double relative_bound_a(const PerturbationSpec& spec, double kappa);
double relative_bound_b(const PerturbationSpec& spec, double kappa);

enum class AlphaRegime { OperatorRatio, SemigroupGap };

struct BudgetRow {
  double kappa = 0.0;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double gap = 0.0;  // gap above the bottom eigenvalue of T + S(kappa)
  bool admissible = false;
};

struct PerturbationBudget {
  AlphaRegime regime = AlphaRegime::SemigroupGap;
  double mu = 0.0;
  double delta = 0.0;
  double epsilon = 0.0;
  double s0 = 0.0;
  double alpha = 0.0;
  double r = 0.0;
  double threshold = 0.0;  // f(r)
  double kappa0 = 0.0;
  /// Largest grid |kappa| such that every grid point at or below it is admissible.
  double kappa_admissible_grid = 0.0;
  /// Closed-form bound on |kappa| for a FixedPerturbation, NaN for families.
  double kappa_admissible_closed_form = 0.0;
  Vector u0;  // unit ground vector of the unperturbed T
  std::vector<BudgetRow> rows;

  /// c(kappa) = a(kappa) + ((|mu| + eps) a(kappa) + b(kappa)) / eps.
  double c_of(double a_kappa, double b_kappa) const;
  std::vector<double> admissible_kappas() const;
};

/// Builds the budget for T + S(kappa). The uniform gap delta is the minimum
/// over kappa = 0 and the grid points with |kappa| < kappa0. Throws
/// DegenerateBottom if the bottom of T is not simple and GapCollapsed if the
/// gap closes on the grid.
PerturbationBudget semigroup_threshold(const SymmetricOperator& t, const PerturbationSpec& spec,
                                       double s0, double kappa0,
                                       const std::vector<double>& kappa_grid,
                                       double tau_gap = kDefaultGapTolerance);

struct DriftedAxis {
  Vector v_kappa;
  double drift_bound = 0.0;
  double drift_actual = 0.0;
};

/// Normalized real part of P_kappa u0 (contour around mu with radius epsilon),
/// sign-aligned with u0. Throws BudgetViolated if c >= 1/2 and
/// ContractViolation if the drift exceeds the proven bound.
DriftedAxis drifted_axis(const SymmetricOperator& t_kappa, const Vector& u0,
                         const PerturbationBudget& budget, double c_kappa, int nodes = 64);

struct SemigroupCheckRow {
  double kappa = 0.0;
  double s = 0.0;
  double c_kappa = 0.0;
  double threshold = 0.0;
  double drift_bound = 0.0;
  double drift_actual = 0.0;
  double alpha_actual = 0.0;   // second / largest eigenvalue of exp(-s T(kappa))
  double alpha_uniform = 0.0;  // 1 - exp(-s0 delta)
  Verdict verdict;
};

struct SemigroupCheckReport {
  std::vector<SemigroupCheckRow> rows;
  /// exp(-s T) against P(u0) at kappa = 0, one entry per s.
  std::vector<std::pair<double, Verdict>> base_checks;
  int failures = 0;
};

/// For every admissible grid kappa and every s, checks that exp(-s T(kappa))
/// improves positivity with respect to the unperturbed P(u0). Every s must lie
/// in (0, s0]: s = 0 is rejected (the identity is not improving) and s > s0
/// raises OutsideTheoremScope. `jobs` > 1 evaluates rows concurrently.
SemigroupCheckReport end_to_end_semigroup_check(const SymmetricOperator& t,
                                                const PerturbationSpec& spec,
                                                const PerturbationBudget& budget,
                                                const std::vector<double>& s_samples,
                                                std::uint64_t seed, int n_restarts = 16,
                                                int jobs = 1);

}  // namespace pfcone
