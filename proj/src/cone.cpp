#include "pfcone/cone.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "pfcone/matrix_io.hpp"

namespace pfcone {

namespace {
constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_dim(const Cone& cone, const Vector& u) {
  if (u.size() != cone_dim(cone)) {
    throw Error(ErrorKind::DimensionMismatch, "vector of dim " + std::to_string(u.size()) +
                                                  " against cone of dim " +
                                                  std::to_string(cone_dim(cone)));
  }
}
}  // namespace

std::string_view to_string(Membership m) {
  switch (m) {
    case Membership::Outside: return "Outside";
    case Membership::Boundary: return "Boundary";
    case Membership::Interior: return "Interior";
  }
  return "?";
}

AxisCone::AxisCone(const Vector& axis) {
  require_finite(axis, "cone axis");
  const double n = axis.norm();
  if (n == 0.0) throw Error(ErrorKind::InvalidArgument, "cone axis must be nonzero");
  axis_ = axis / n;
}

double AxisCone::margin(const Vector& u) const {
  return axis_.dot(u) - u.norm() * kInvSqrt2;
}

Vector AxisCone::project(const Vector& w) const {
  const double s = axis_.dot(w);
  const Vector perp = w - s * axis_;
  const double r = perp.norm();
  if (s >= r) return w;
  if (s <= -r) return Vector::Zero(w.size());
  // r > 0 here: s >= r and s <= -r cover r == 0.
  return 0.5 * (s + r) * (axis_ + perp / r);
}

OrthantCone::OrthantCone(Index dim) : dim_(dim) {
  if (dim < 1) throw Error(ErrorKind::InvalidArgument, "orthant dimension must be >= 1");
}

Index cone_dim(const Cone& cone) {
  return std::visit([](const auto& c) { return c.dim(); }, cone);
}

double cone_margin(const Cone& cone, const Vector& u) {
  return std::visit([&](const auto& c) { return c.margin(u); }, cone);
}

Membership classify(const Cone& cone, const Vector& u, double tau) {
  check_dim(cone, u);
  const double norm = u.norm();
  if (norm == 0.0) return Membership::Boundary;
  const double m = cone_margin(cone, u);
  if (m > tau * norm) return Membership::Interior;
  if (std::abs(m) <= tau * norm) return Membership::Boundary;
  return Membership::Outside;
}

bool is_strictly_positive(const Cone& cone, const Vector& u, double tau) {
  return classify(cone, u, tau) == Membership::Interior;
}

Vector project(const Cone& cone, const Vector& w) {
  check_dim(cone, w);
  return std::visit([&](const auto& c) { return c.project(w); }, cone);
}

MoreauSplit moreau_decompose(const Cone& cone, const Vector& w) {
  MoreauSplit out;
  out.u = project(cone, w);
  out.v = project(cone, Vector(-w));
  out.residual = ((out.u - out.v) - w).norm();
  out.inner = out.u.dot(out.v);
  return out;
}

Vector duality_witness(const Cone& cone, const Vector& u, double tau) {
  if (classify(cone, u, tau) != Membership::Outside) {
    throw Error(ErrorKind::NotOutside, "duality witness needs a vector outside the cone");
  }
  return std::visit(
      overloaded{
          [&](const AxisCone& c) -> Vector {
            const double s = c.axis().dot(u);
            if (s < 0.0) return c.axis();
            const Vector perp = u - s * c.axis();
            return c.axis() - perp / perp.norm();
          },
          [&](const OrthantCone& c) -> Vector {
            Index k = 0;
            u.minCoeff(&k);
            return Vector::Unit(c.dim(), k);
          },
      },
      cone);
}

Vector boundary_orthogonal_partner(const AxisCone& cone, const Vector& u, double tau) {
  if (u.norm() == 0.0 || classify(cone, u, tau) != Membership::Boundary) {
    throw Error(ErrorKind::NotBoundary, "orthogonal partner needs a nonzero boundary vector");
  }
  return 2.0 * cone.axis().dot(u) * cone.axis() - u;
}

Vector sample_boundary_ray(const AxisCone& cone, SplitMix64& rng) {
  const Index n = cone.dim();
  if (n == 1) return cone.axis();
  Vector w = rng.gaussian_vector(n);
  w -= cone.axis().dot(w) * cone.axis();
  double norm = w.norm();
  while (norm < 1e-12) {
    w = rng.gaussian_vector(n);
    w -= cone.axis().dot(w) * cone.axis();
    norm = w.norm();
  }
  return cone.axis() + w / norm;
}

Vector sample_cone_point(const Cone& cone, SplitMix64& rng) {
  return std::visit(
      overloaded{
          [&](const AxisCone& c) -> Vector {
            const double scale = rng.uniform(0.1, 10.0);
            const Vector ray = sample_boundary_ray(c, rng);
            if (rng.uniform() < 1.0 / 3.0) return scale * ray;
            // s u0 + t w_hat with 0 <= t < s stays inside.
            const double t = rng.uniform();
            return scale * (c.axis() + t * (ray - c.axis()));
          },
          [&](const OrthantCone& c) -> Vector {
            Vector v(c.dim());
            for (Index i = 0; i < c.dim(); ++i) {
              const double g = std::abs(rng.gaussian());
              v(i) = rng.uniform() < 0.25 ? 0.0 : g;
            }
            if (v.norm() == 0.0) v(0) = 1.0;
            return v;
          },
      },
      cone);
}

SelfDualityReport selfduality_probe(const Cone& cone, int n_samples, std::uint64_t seed) {
  if (n_samples < 1) throw Error(ErrorKind::InvalidArgument, "n_samples must be >= 1");
  SplitMix64 rng(seed);
  const Index n = cone_dim(cone);
  SelfDualityReport report;
  report.worst_pair_inner = std::numeric_limits<double>::infinity();
  report.worst_witness_inner = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_samples; ++k) {
    const Vector u = sample_cone_point(cone, rng).normalized();
    const Vector v = sample_cone_point(cone, rng).normalized();
    const double inner = u.dot(v);
    ++report.pairs_checked;
    report.worst_pair_inner = std::min(report.worst_pair_inner, inner);
    if (inner < -1e-12) ++report.pair_violations;

    const Vector w = rng.unit_vector(n);
    if (classify(cone, w) == Membership::Outside) {
      const Vector witness = duality_witness(cone, w);
      const double sep = w.dot(witness);
      ++report.outside_checked;
      report.worst_witness_inner = std::max(report.worst_witness_inner, sep);
      if (!(sep < 0.0) || !in_cone(cone, witness)) ++report.witness_failures;
    }
  }
  return report;
}

std::string format_cone(const Cone& cone) {
  return std::visit(overloaded{
                        [](const AxisCone& c) {
                          std::string s = "axis " + std::to_string(c.dim());
                          for (Index i = 0; i < c.dim(); ++i) s += " " + format_double(c.axis()(i));
                          return s;
                        },
                        [](const OrthantCone& c) { return "orthant " + std::to_string(c.dim()); },
                    },
                    cone);
}

Cone parse_cone(const std::string& line) {
  std::istringstream in(line);
  std::string kind;
  long long dim = 0;
  if (!(in >> kind >> dim) || dim < 1) {
    throw Error(ErrorKind::ParseError, "cone line must be 'axis <dim> ...' or 'orthant <dim>'");
  }
  if (kind == "orthant") {
    std::string extra;
    if (in >> extra) throw Error(ErrorKind::ParseError, "trailing data after orthant cone");
    return OrthantCone(dim);
  }
  if (kind != "axis") throw Error(ErrorKind::ParseError, "unknown cone kind '" + kind + "'");
  Vector axis(dim);
  for (Index i = 0; i < dim; ++i) {
    if (!(in >> axis(i))) throw Error(ErrorKind::ParseError, "axis cone needs dim entries");
  }
  std::string extra;
  if (in >> extra) throw Error(ErrorKind::ParseError, "trailing data after axis cone");
  return AxisCone(axis);
}

}  // namespace pfcone
