#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "pfcone/cone.hpp"
#include "pfcone/operator.hpp"

namespace pfcone {

enum class VerdictStatus { CertifiedTrue, SampledTrue, CertifiedFalse, Inapplicable };

std::string_view to_string(VerdictStatus s);
VerdictStatus parse_verdict_status(std::string_view s);

/// Outcome of a positivity predicate. A CertifiedFalse verdict always carries
/// a witness; `tolerance` is the classify tolerance under which the witness
/// reproduces the violation.
struct Verdict {
  VerdictStatus status = VerdictStatus::Inapplicable;
  std::optional<Vector> witness;
  double margin = 0.0;
  double tolerance = kMembershipTolerance;
  std::string detail;

  bool holds() const {
    return status == VerdictStatus::CertifiedTrue || status == VerdictStatus::SampledTrue;
  }
};

enum class Predicate { PreservesPositivity, ImprovesPositivity };

/// Re-runs a recorded violation: the witness must lie in the cone and its
/// image must be Outside (preservation) or not Interior (improvement).
bool replay_violation(const SymmetricOperator& a, const Cone& cone, Predicate predicate,
                      const Vector& witness, double tolerance = kMembershipTolerance);

/// <u1, Au>/||Au|| - 1/sqrt(2): positive iff Au is interior to P(u1). A zero
/// image scores 0 (Boundary).
double image_cosine_margin(const SymmetricOperator& a, const Vector& axis, const Vector& u);

/// A C ⊂ C. For an axis cone whose axis is a top eigenvector of a positive
/// semidefinite A the answer is certified by ||A|| <u0,u> >= ||Au|| / sqrt(2);
/// for the orthant by entrywise nonnegativity. Otherwise cone samples are
/// pushed through A and any Outside image is a certified counterexample.
Verdict preserves_positivity(const SymmetricOperator& a, const Cone& cone, int n_samples = 256,
                             std::uint64_t seed = 0);

/// Positivity improvement of a positive semidefinite A with respect to P(u0),
/// u0 a top eigenvector. Decided exactly by comparing ||A|| with the norm of A
/// restricted to the complement of u0.
Verdict improves_positivity_axis(const SymmetricOperator& a, const Vector& u0,
                                 double tau_gap = kDefaultGapTolerance);

/// Positivity improvement with respect to an arbitrary axis cone. The image
/// margin is minimized over boundary rays u1 + w (the margin is concave on the
/// slice <u1, u> = 1, so its minimum sits on those rays). Dimension 2 is swept
/// exhaustively and certified; higher dimensions give at best SampledTrue.
Verdict improves_positivity_general(const SymmetricOperator& a, const AxisCone& cone,
                                    int n_restarts = 16, std::uint64_t seed = 0);

struct ErgodicProbe {
  bool found = false;
  int n = 0;
  double value = 0.0;
};

inline constexpr int kDefaultErgodicHorizon = 64;

/// Smallest n in [1, n_max] with <u, A^n v> > 1e-10 ||A||^n ||u|| ||v||.
/// Throws NotInCone unless u and v are nonzero cone elements.
ErgodicProbe ergodic_probe(const SymmetricOperator& a, const Cone& cone, const Vector& u,
                           const Vector& v, int n_max = kDefaultErgodicHorizon);

struct PerronFrobeniusReport {
  bool ergodic_sampled = false;
  int pairs_checked = 0;
  std::optional<std::pair<Vector, Vector>> failing_pair;
  bool top_simple = false;
  bool top_strictly_positive = false;
  bool agree = false;
  std::string detail;
};

/// Evaluates both sides of the Perron-Frobenius equivalence independently:
/// sampled ergodicity (with adversarial boundary pairs) versus simplicity of
/// ||A|| plus strict positivity of its eigenvector. Throws PrereqFailed unless
/// A is positive semidefinite and not certified to break positivity.
PerronFrobeniusReport perron_frobenius_check(const SymmetricOperator& a, const Cone& cone,
                                             std::uint64_t seed, int n_random_pairs = 64,
                                             int n_max = kDefaultErgodicHorizon,
                                             double tau_gap = kDefaultGapTolerance);

}  // namespace pfcone
