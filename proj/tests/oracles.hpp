#pragma once

// Independent reference computations used only by the tests.

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

namespace oracle {

/// exp(A) by scaling and squaring with a degree-24 Taylor polynomial.
inline Eigen::MatrixXd expm(const Eigen::MatrixXd& a) {
  const double norm = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Eigen::MatrixXd b = a / std::ldexp(1.0, squarings);
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(a.rows(), a.cols());
  Eigen::MatrixXd sum = term;
  for (int k = 1; k <= 24; ++k) {
    term = term * b / k;
    sum += term;
  }
  for (int k = 0; k < squarings; ++k) sum = sum * sum;
  return sum;
}

/// Eigenvalues of [[p, q], [q, r]], ascending.
inline Eigen::Vector2d eig2(double p, double q, double r) {
  const double mid = 0.5 * (p + r);
  const double rad = std::hypot(0.5 * (p - r), q);
  return {mid - rad, mid + rad};
}

/// Unit eigenvector of [[p, q], [q, r]] for eigenvalue lambda (q != 0).
inline Eigen::Vector2d eigvec2(double p, double q, double lambda) {
  Eigen::Vector2d v(q, lambda - p);
  return v / v.norm();
}

inline Eigen::Vector2d angle(double theta) { return {std::cos(theta), std::sin(theta)}; }

/// min over boundary rays of P(axis) in the plane of <axis, Au>/||Au|| - 1/sqrt(2),
/// by a fine brute-force sweep of the ray u = axis + t n, t in [-1, 1].
inline double min_image_margin_2d(const Eigen::Matrix2d& a, const Eigen::Vector2d& axis, int steps) {
  const Eigen::Vector2d u0 = axis.normalized();
  const Eigen::Vector2d n(-u0(1), u0(0));
  double best = 1e300;
  for (int k = 0; k <= steps; ++k) {
    const double t = -1.0 + 2.0 * k / steps;
    const Eigen::Vector2d img = a * (u0 + t * n);
    const double m = img.norm() == 0.0 ? 0.0 : u0.dot(img) / img.norm() - 1.0 / std::numbers::sqrt2;
    best = std::min(best, m);
  }
  return best;
}

}  // namespace oracle
