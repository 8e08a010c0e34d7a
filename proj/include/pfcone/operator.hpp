#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pfcone/errors.hpp"

namespace pfcone {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using Index = Eigen::Index;

inline constexpr double kSymmetryTolerance = 1e-12;
inline constexpr double kDefaultGapTolerance = 1e-9;

/// Throws NonFinite if any entry is NaN or infinite.
void require_finite(const Vector& v, const char* what);

/// Flips `v` so that its first coordinate above 1e-10 * max|v_i| is positive.
void apply_sign_convention(Eigen::Ref<Vector> v);

/// Orthonormal basis (n x (n-1)) of the orthogonal complement of a nonzero u.
Matrix orthogonal_complement(const Vector& u);

struct SpectralDecomposition {
  Vector eigenvalues;   // ascending
  Matrix eigenvectors;  // column k belongs to eigenvalues[k]
  Index source_dim = 0;

  double min() const { return eigenvalues(0); }
  double max() const { return eigenvalues(eigenvalues.size() - 1); }
  /// Operator 2-norm, max |lambda|.
  double norm() const;
};

class SymmetricOperator;

/// Eigen-backed dense symmetric eigensolver. Eigenvectors follow the
/// first-nonzero-positive sign convention column by column.
SpectralDecomposition spectral_decompose(const SymmetricOperator& a);

namespace detail {
struct SpectrumCache;
}

/// Dense real symmetric matrix. The stored matrix is (M + M^T)/2 after
/// checking |M_ij - M_ji| <= 1e-12 * max(1, max|M_ij|). The spectrum is
/// computed lazily once and shared between copies.
class SymmetricOperator {
 public:
  explicit SymmetricOperator(const Matrix& m);

  static SymmetricOperator identity(Index n);
  static SymmetricOperator zero(Index n);
  static SymmetricOperator diagonal(const Vector& d);

  const Matrix& matrix() const { return m_; }
  Index dim() const { return m_.rows(); }
  double operator()(Index i, Index j) const { return m_(i, j); }

  const SpectralDecomposition& spectrum() const;
  double norm() const { return spectrum().norm(); }
  bool is_positive_semidefinite(double rel_tol = 1e-10) const;

  Vector apply(const Vector& v) const { return m_ * v; }

  SymmetricOperator operator+(const SymmetricOperator& other) const;
  SymmetricOperator scaled(double c) const;

 private:
  struct Trusted {};
  SymmetricOperator(Matrix m, Trusted);

  Matrix m_;
  std::shared_ptr<detail::SpectrumCache> cache_;
};

struct TopEigen {
  double value = 0.0;
  Vector vector;
  bool simple = false;
  /// lambda_max - second largest; +inf in dimension 1.
  double gap = 0.0;
};

/// Largest eigenvalue with unit eigenvector. `simple` is true iff the gap to
/// the second largest eigenvalue exceeds tau_gap * max(1, |lambda_max|).
/// Throws DegenerateTop when `require_simple` is set and the top is not simple.
TopEigen top_eigen(const SymmetricOperator& a, double tau_gap = kDefaultGapTolerance,
                   bool require_simple = false);

/// Smallest eigenvalue mu, its unit eigenvector, and the gap to the next one.
/// Throws DegenerateBottom when `require_simple` is set and mu is not simple.
TopEigen bottom_eigen(const SymmetricOperator& t, double tau_gap = kDefaultGapTolerance,
                      bool require_simple = false);

/// exp(-s T) through the spectral decomposition. s = 0 yields the identity.
SymmetricOperator heat_semigroup(const SymmetricOperator& t, double s);

/// Sum of the eigenprojectors whose eigenvalues satisfy |lambda - center| < radius.
Matrix spectral_projector(const SymmetricOperator& t, double center, double radius);

/// Operator on C^n stored as real and imaginary parts.
struct ComplexOperator {
  Matrix real_part;
  Matrix imag_part;

  Index dim() const { return real_part.rows(); }
  ComplexMatrix to_matrix() const;
  static ComplexOperator from_matrix(const ComplexMatrix& m);
  ComplexVector apply(const ComplexVector& x) const;
  /// ||H - H^*||_F.
  double hermiticity_residual() const;
  /// Operator 2-norm via the complex SVD.
  double norm() const;

  ComplexOperator operator+(const ComplexOperator& other) const;
  ComplexOperator operator-(const ComplexOperator& other) const;
};

/// Complex extension acting as u + iv -> Tu + iTv.
ComplexOperator complexify(const SymmetricOperator& t);

struct CorrespondenceClause {
  std::string name;
  bool passed = false;
  double real_value = 0.0;
  double complex_value = 0.0;
  std::string detail;
};

struct CorrespondenceReport {
  std::vector<CorrespondenceClause> clauses;
  double gamma = 0.0;
  bool all_passed() const;
};

/// Numerical check of the real/complex correspondence for a symmetric T:
/// injectivity, eigenvalues with eigenspace dimensions, operator norm, and the
/// lower bound T >= gamma (gamma defaults to the minimum eigenvalue). Throws
/// CorrespondenceViolation naming the first failing clause.
CorrespondenceReport correspondence_check(const SymmetricOperator& t,
                                          std::optional<double> gamma = std::nullopt,
                                          int n_samples = 64, std::uint64_t seed = 0,
                                          double tol = 1e-9);

}  // namespace pfcone
