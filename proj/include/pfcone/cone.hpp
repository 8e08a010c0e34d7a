#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "pfcone/operator.hpp"
#include "pfcone/rng.hpp"

namespace pfcone {

enum class Membership { Outside, Boundary, Interior };

std::string_view to_string(Membership m);

inline constexpr double kMembershipTolerance = 1e-10;

/// The 45-degree cone {u : <u0, u> >= ||u|| / sqrt(2)} around a unit axis u0.
/// Writing u = s u0 + w with w orthogonal to u0, membership is s >= ||w||,
/// i.e. a rotated second-order cone.
class AxisCone {
 public:
  /// The axis is normalized; zero or non-finite axes are rejected.
  explicit AxisCone(const Vector& axis);

  const Vector& axis() const { return axis_; }
  Index dim() const { return axis_.size(); }

  /// <u0, u> - ||u|| / sqrt(2).
  double margin(const Vector& u) const;
  /// Euclidean projection onto the cone (closed form).
  Vector project(const Vector& w) const;

 private:
  Vector axis_;
};

/// Entrywise nonnegative vectors.
class OrthantCone {
 public:
  explicit OrthantCone(Index dim);

  Index dim() const { return dim_; }
  double margin(const Vector& u) const { return u.minCoeff(); }
  Vector project(const Vector& w) const { return w.cwiseMax(0.0); }

 private:
  Index dim_;
};

using Cone = std::variant<AxisCone, OrthantCone>;

Index cone_dim(const Cone& cone);
double cone_margin(const Cone& cone, const Vector& u);

/// Interior if margin > tau ||u||, Boundary if |margin| <= tau ||u||, else
/// Outside. The zero vector is Boundary: it is in the cone but not strictly
/// positive.
Membership classify(const Cone& cone, const Vector& u, double tau = kMembershipTolerance);

inline bool in_cone(const Cone& cone, const Vector& u, double tau = kMembershipTolerance) {
  return classify(cone, u, tau) != Membership::Outside;
}

/// Strictly positive vectors are exactly the interior points for both cones.
bool is_strictly_positive(const Cone& cone, const Vector& u, double tau = kMembershipTolerance);

Vector project(const Cone& cone, const Vector& w);

struct MoreauSplit {
  Vector u;
  Vector v;
  double residual = 0.0;  // ||(u - v) - w||
  double inner = 0.0;     // <u, v>
};

/// w = P(w) - P(-w) with orthogonal parts.
MoreauSplit moreau_decompose(const Cone& cone, const Vector& w);

/// A cone vector v with <u, v> < 0 for a u outside the cone. For the axis cone
/// this is u0 when <u0, u> < 0 and otherwise u0 - w/||w|| with w the part of u
/// orthogonal to u0. For the orthant it is the basis vector at argmin u.
/// Throws NotOutside if u is not classified Outside.
Vector duality_witness(const Cone& cone, const Vector& u, double tau = kMembershipTolerance);

/// u' = 2 <u0, u> u0 - u: the reflection of a boundary vector across the axis.
/// It lies on the boundary, has the same norm and is orthogonal to u, which
/// shows u is not strictly positive. Throws NotBoundary otherwise.
Vector boundary_orthogonal_partner(const AxisCone& cone, const Vector& u,
                                   double tau = kMembershipTolerance);

/// u0 + w_hat with w_hat uniform on the unit sphere of the axis complement.
Vector sample_boundary_ray(const AxisCone& cone, SplitMix64& rng);
/// Random nonzero cone element; roughly a third of the draws lie on the boundary.
Vector sample_cone_point(const Cone& cone, SplitMix64& rng);

struct SelfDualityReport {
  int pairs_checked = 0;
  int pair_violations = 0;
  double worst_pair_inner = 0.0;  // min <u, v> over unit in-cone pairs
  int outside_checked = 0;
  int witness_failures = 0;
  double worst_witness_inner = 0.0;  // max <u, v> over outside points and witnesses

  bool passed() const { return pair_violations == 0 && witness_failures == 0; }
};

/// Sampled check that the cone equals its dual: in-cone pairs have
/// nonnegative inner products (>= -1e-12 for unit vectors) and every sampled
/// outside point is separated by its duality witness.
SelfDualityReport selfduality_probe(const Cone& cone, int n_samples, std::uint64_t seed);

/// "axis <dim> <entries...>" or "orthant <dim>".
std::string format_cone(const Cone& cone);
Cone parse_cone(const std::string& line);

}  // namespace pfcone
