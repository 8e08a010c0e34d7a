#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pfcone/operator.hpp"
#include "pfcone/perturbation.hpp"

namespace pfcone {

/// Points x_j = j h for j = -N..N, stored at index j + N.
struct GridSpec {
  int N = 1;
  double h = 1.0;

  GridSpec() = default;
  GridSpec(int n, double spacing);

  Index size() const { return 2 * static_cast<Index>(N) + 1; }
  double x(int j) const { return j * h; }
  Index index(int j) const { return static_cast<Index>(j) + N; }
};

/// Evaluates f on the half grid j = 0..N and mirrors it, so the result is
/// exactly even.
Vector sample_even(const GridSpec& grid, const std::function<double(double)>& f);

/// Named even profiles: zero, constant, harmonic (x^2), gaussian (exp(-x^2)),
/// gaussian_well (-exp(-x^2)), double_well (50 (x^2 - 4)^2).
Vector preset_profile(const std::string& name, const GridSpec& grid);

/// "table:v0,v1,..." with either N+1 half-grid values (mirrored) or 2N+1 full
/// values; anything else is looked up with preset_profile.
Vector parse_profile(const std::string& text, const GridSpec& grid);

class MagneticModel {
 public:
  /// Throws AsymmetricPotential unless v and a are exactly even.
  MagneticModel(GridSpec grid, Vector v, Vector a, double e);

  const GridSpec& grid() const { return grid_; }
  const Vector& potential() const { return v_; }
  const Vector& vector_potential() const { return a_; }
  double coupling() const { return e_; }
  MagneticModel with_coupling(double e) const;

 private:
  GridSpec grid_;
  Vector v_;
  Vector a_;
  double e_ = 0.0;
};

/// Conjugation (C f)_j = conj(f_{-j}) and an orthonormal real basis of its
/// fixed space: delta_0, then (delta_j + delta_{-j})/sqrt(2) for j = 1..N, then
/// (i delta_j - i delta_{-j})/sqrt(2) for j = 1..N.
struct RealStructure {
  GridSpec grid;
  ComplexMatrix basis;

  explicit RealStructure(const GridSpec& g);
  ComplexVector conjugate(const ComplexVector& f) const;
  /// B x for real coordinates x.
  ComplexVector embed(const Vector& x) const;
};

/// max ||H C x - C H x|| over x in {delta_j, i delta_j}.
double antilinear_commutation_residual(const ComplexOperator& h, const RealStructure& rs);

/// Central-difference momentum (p f)_j = -i (f_{j+1} - f_{j-1}) / (2h), Dirichlet.
ComplexOperator momentum_operator(const GridSpec& grid);

/// -Delta_h + V with the 3-point stencil and Dirichlet values beyond +-N.
ComplexOperator build_h0(const MagneticModel& model);

/// e (p a + a p) + e^2 a^2.
ComplexOperator build_interaction(const MagneticModel& model);

/// build_h0 + build_interaction.
ComplexOperator build_magnetic(const MagneticModel& model);

/// B* H B. Throws NotRealCompatible when H does not commute with C (relative
/// to max(1, max|H_ij|)) and ContractViolation if the restriction is not real
/// or its spectrum is not contained in that of H.
SymmetricOperator restrict_to_real(const ComplexOperator& h, const RealStructure& rs,
                                   double tol = 1e-12);

struct OrthantFailureReport {
  double e = 0.0;
  double s = 0.0;
  double max_imag = 0.0;  // max_j |Im g_j|
  double min_real = 0.0;  // min_j Re g_j
  bool left_cone = false;
  bool control = false;   // e = 0 run
  ComplexVector image;
};

/// g = exp(-sH) v for a nonnegative even bump v. e = 0 throws TrivialCoupling
/// unless `allow_control`, in which case the run is flagged as a control.
/// Throws NotInCone if v is zero, negative somewhere or not even.
OrthantFailureReport orthant_failure_demo(const MagneticModel& model, double s,
                                          std::optional<Vector> v = std::nullopt,
                                          bool allow_control = false);

struct MagneticExperiment {
  double ground_energy = 0.0;
  double ground_gap = 0.0;
  Vector phi;
  PerturbationBudget budget;
  SemigroupCheckReport check;  // base_checks hold exp(-s H0) against P(phi)
  double e0 = 0.0;
};

/// Restricts H0, takes its ground vector phi, checks exp(-s H0) against P(phi)
/// and runs the semigroup budget with S(e) = restricted H_I(e), a(e) = 0,
/// b(e) = ||S(e)||. Empty `s_samples` defaults to {s0/4, s0/2, s0}.
MagneticExperiment magnetic_experiment(const MagneticModel& model, double s0,
                                       const std::vector<double>& e_grid,
                                       std::vector<double> s_samples, std::uint64_t seed,
                                       int n_restarts = 16, int jobs = 1,
                                       double tau_gap = kDefaultGapTolerance);

}  // namespace pfcone
