#include "pfcone/operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

#include "pfcone/rng.hpp"

namespace pfcone {

namespace detail {
struct SpectrumCache {
  std::once_flag once;
  std::optional<SpectralDecomposition> value;
};
}  // namespace detail

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NotSymmetric: return "NotSymmetric";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::DegenerateTop: return "DegenerateTop";
    case ErrorKind::DegenerateBottom: return "DegenerateBottom";
    case ErrorKind::NegativeTime: return "NegativeTime";
    case ErrorKind::CorrespondenceViolation: return "CorrespondenceViolation";
    case ErrorKind::NotOutside: return "NotOutside";
    case ErrorKind::NotBoundary: return "NotBoundary";
    case ErrorKind::NotInCone: return "NotInCone";
    case ErrorKind::AxisNotEigenvector: return "AxisNotEigenvector";
    case ErrorKind::PrereqFailed: return "PrereqFailed";
    case ErrorKind::ContourHitsSpectrum: return "ContourHitsSpectrum";
    case ErrorKind::GapCollapsed: return "GapCollapsed";
    case ErrorKind::BudgetViolated: return "BudgetViolated";
    case ErrorKind::OutsideTheoremScope: return "OutsideTheoremScope";
    case ErrorKind::ContractViolation: return "ContractViolation";
    case ErrorKind::AsymmetricPotential: return "AsymmetricPotential";
    case ErrorKind::NotRealCompatible: return "NotRealCompatible";
    case ErrorKind::TrivialCoupling: return "TrivialCoupling";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) {
    throw Error(ErrorKind::NonFinite, std::string(what) + " has NaN or infinite entries");
  }
}

void apply_sign_convention(Eigen::Ref<Vector> v) {
  const double scale = v.cwiseAbs().maxCoeff();
  if (scale == 0.0) return;
  for (Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-10 * scale) {
      if (v(i) < 0.0) v = -v;
      return;
    }
  }
}

Matrix orthogonal_complement(const Vector& u) {
  const Index n = u.size();
  if (u.norm() == 0.0) throw Error(ErrorKind::InvalidArgument, "orthogonal complement of the zero vector");
  Eigen::HouseholderQR<Matrix> qr(u);
  const Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  return q.rightCols(n - 1);
}

double SpectralDecomposition::norm() const {
  return std::max(std::abs(min()), std::abs(max()));
}

SpectralDecomposition spectral_decompose(const SymmetricOperator& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix());
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::NonConvergence, "symmetric eigensolver did not converge");
  }
  SpectralDecomposition out;
  out.eigenvalues = solver.eigenvalues();
  out.eigenvectors = solver.eigenvectors();
  out.source_dim = a.dim();
  for (Index k = 0; k < out.eigenvectors.cols(); ++k) {
    apply_sign_convention(out.eigenvectors.col(k));
  }
  return out;
}

SymmetricOperator::SymmetricOperator(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw Error(ErrorKind::DimensionMismatch, "symmetric operator needs a nonempty square matrix");
  }
  if (!m.allFinite()) throw Error(ErrorKind::NonFinite, "matrix has NaN or infinite entries");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTolerance * scale) {
    throw Error(ErrorKind::NotSymmetric, "max |M_ij - M_ji| = " + std::to_string(asym));
  }
  m_ = 0.5 * (m + m.transpose());
  cache_ = std::make_shared<detail::SpectrumCache>();
}

SymmetricOperator::SymmetricOperator(Matrix m, Trusted)
    : m_(std::move(m)), cache_(std::make_shared<detail::SpectrumCache>()) {}

SymmetricOperator SymmetricOperator::identity(Index n) {
  return SymmetricOperator(Matrix::Identity(n, n), Trusted{});
}

SymmetricOperator SymmetricOperator::zero(Index n) {
  return SymmetricOperator(Matrix::Zero(n, n), Trusted{});
}

SymmetricOperator SymmetricOperator::diagonal(const Vector& d) {
  require_finite(d, "diagonal");
  return SymmetricOperator(Matrix(d.asDiagonal()), Trusted{});
}

const SpectralDecomposition& SymmetricOperator::spectrum() const {
  std::call_once(cache_->once, [this] { cache_->value = spectral_decompose(*this); });
  return *cache_->value;
}

bool SymmetricOperator::is_positive_semidefinite(double rel_tol) const {
  const auto& sp = spectrum();
  return sp.min() >= -rel_tol * sp.norm();
}

SymmetricOperator SymmetricOperator::operator+(const SymmetricOperator& other) const {
  if (dim() != other.dim()) throw Error(ErrorKind::DimensionMismatch, "operator sum");
  return SymmetricOperator(Matrix(m_ + other.m_), Trusted{});
}

SymmetricOperator SymmetricOperator::scaled(double c) const {
  return SymmetricOperator(Matrix(c * m_), Trusted{});
}

namespace {

TopEigen extremal_eigen(const SymmetricOperator& a, double tau_gap, bool top) {
  const auto& sp = a.spectrum();
  const Index n = a.dim();
  TopEigen out;
  const Index k = top ? n - 1 : 0;
  out.value = sp.eigenvalues(k);
  out.vector = sp.eigenvectors.col(k);
  apply_sign_convention(out.vector);
  if (n == 1) {
    out.gap = std::numeric_limits<double>::infinity();
    out.simple = true;
  } else {
    out.gap = top ? out.value - sp.eigenvalues(n - 2) : sp.eigenvalues(1) - out.value;
    out.simple = out.gap > tau_gap * std::max(1.0, std::abs(out.value));
  }
  return out;
}

}  // namespace

TopEigen top_eigen(const SymmetricOperator& a, double tau_gap, bool require_simple) {
  auto out = extremal_eigen(a, tau_gap, true);
  if (require_simple && !out.simple) {
    throw Error(ErrorKind::DegenerateTop, "largest eigenvalue is not simple (gap " +
                                              std::to_string(out.gap) + ")");
  }
  return out;
}

TopEigen bottom_eigen(const SymmetricOperator& t, double tau_gap, bool require_simple) {
  auto out = extremal_eigen(t, tau_gap, false);
  if (require_simple && !out.simple) {
    throw Error(ErrorKind::DegenerateBottom, "smallest eigenvalue is not simple (gap " +
                                                 std::to_string(out.gap) + ")");
  }
  return out;
}

SymmetricOperator heat_semigroup(const SymmetricOperator& t, double s) {
  if (!(s >= 0.0)) throw Error(ErrorKind::NegativeTime, "heat semigroup needs s >= 0");
  if (s == 0.0) return SymmetricOperator::identity(t.dim());
  const auto& sp = t.spectrum();
  const Vector decay = (-s * sp.eigenvalues.array()).exp().matrix();
  const Matrix e = sp.eigenvectors * decay.asDiagonal() * sp.eigenvectors.transpose();
  return SymmetricOperator(Matrix(0.5 * (e + e.transpose())));
}

Matrix spectral_projector(const SymmetricOperator& t, double center, double radius) {
  const auto& sp = t.spectrum();
  Matrix p = Matrix::Zero(t.dim(), t.dim());
  for (Index k = 0; k < sp.eigenvalues.size(); ++k) {
    if (std::abs(sp.eigenvalues(k) - center) < radius) {
      p += sp.eigenvectors.col(k) * sp.eigenvectors.col(k).transpose();
    }
  }
  return p;
}

ComplexMatrix ComplexOperator::to_matrix() const {
  ComplexMatrix m(real_part.rows(), real_part.cols());
  m.real() = real_part;
  m.imag() = imag_part;
  return m;
}

ComplexOperator ComplexOperator::from_matrix(const ComplexMatrix& m) {
  return ComplexOperator{m.real(), m.imag()};
}

ComplexVector ComplexOperator::apply(const ComplexVector& x) const {
  ComplexVector y(x.size());
  y.real() = real_part * x.real() - imag_part * x.imag();
  y.imag() = real_part * x.imag() + imag_part * x.real();
  return y;
}

double ComplexOperator::hermiticity_residual() const {
  return std::sqrt((real_part - real_part.transpose()).squaredNorm() +
                   (imag_part + imag_part.transpose()).squaredNorm());
}

double ComplexOperator::norm() const {
  Eigen::JacobiSVD<ComplexMatrix> svd(to_matrix());
  return svd.singularValues()(0);
}

ComplexOperator ComplexOperator::operator+(const ComplexOperator& other) const {
  return {real_part + other.real_part, imag_part + other.imag_part};
}

ComplexOperator ComplexOperator::operator-(const ComplexOperator& other) const {
  return {real_part - other.real_part, imag_part - other.imag_part};
}

ComplexOperator complexify(const SymmetricOperator& t) {
  return {t.matrix(), Matrix::Zero(t.dim(), t.dim())};
}

bool CorrespondenceReport::all_passed() const {
  return std::all_of(clauses.begin(), clauses.end(), [](const auto& c) { return c.passed; });
}

CorrespondenceReport correspondence_check(const SymmetricOperator& t, std::optional<double> gamma,
                                          int n_samples, std::uint64_t seed, double tol) {
  const Index n = t.dim();
  const ComplexMatrix tc = complexify(t).to_matrix();
  const auto& sp = t.spectrum();
  const double scale = std::max(1.0, sp.norm());
  const double atol = tol * scale;

  CorrespondenceReport report;
  report.gamma = gamma.value_or(sp.min());

  Eigen::JacobiSVD<Matrix> svd_r(t.matrix());
  Eigen::JacobiSVD<ComplexMatrix> svd_c(tc);

  {  // (iii) injectivity
    const double sr = svd_r.singularValues()(n - 1);
    const double sc = svd_c.singularValues()(n - 1);
    const bool inj_r = sr > atol;
    const bool inj_c = sc > atol;
    report.clauses.push_back({"injectivity", inj_r == inj_c && std::abs(sr - sc) <= atol, sr, sc,
                              inj_r ? "both injective" : "both singular"});
  }

  {  // (iv) eigenvalues and eigenspace dimensions
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es_c(tc, Eigen::EigenvaluesOnly);
    if (es_c.info() != Eigen::Success) throw Error(ErrorKind::NonConvergence, "complex eigensolver");
    const Vector ev_c = es_c.eigenvalues();
    const double max_diff = (ev_c - sp.eigenvalues).cwiseAbs().maxCoeff();

    // Ker(T~ - lambda) as a real vector space lives in the 2n x 2n realification.
    Matrix realified(2 * n, 2 * n);
    realified << tc.real(), -tc.imag(), tc.imag(), tc.real();
    Eigen::SelfAdjointEigenSolver<Matrix> es_2(realified, Eigen::EigenvaluesOnly);
    const Vector ev_2 = es_2.eigenvalues();

    bool dims_ok = true;
    std::string detail;
    Index k = 0;
    while (k < n) {
      const double lambda = sp.eigenvalues(k);
      Index m_real = 0;
      while (k + m_real < n && sp.eigenvalues(k + m_real) - lambda <= atol) ++m_real;
      Index m_complex_real_dim = 0;
      for (Index j = 0; j < 2 * n; ++j) {
        if (std::abs(ev_2(j) - lambda) <= atol) ++m_complex_real_dim;
      }
      if (m_complex_real_dim != 2 * m_real) {
        dims_ok = false;
        detail = "eigenvalue " + std::to_string(lambda) + ": real dim " + std::to_string(m_real) +
                 ", complex real-dim " + std::to_string(m_complex_real_dim);
      }
      k += m_real;
    }
    report.clauses.push_back({"eigenspaces", max_diff <= atol && dims_ok, sp.max(), ev_c(n - 1),
                              dims_ok ? "eigenvalue sets agree; dims double" : detail});
  }

  {  // (v) operator norm
    const double nr = svd_r.singularValues()(0);
    const double nc = svd_c.singularValues()(0);
    report.clauses.push_back({"norm", std::abs(nr - nc) <= atol, nr, nc, ""});
  }

  {  // (vii) lower bound T >= gamma iff T~ >= gamma
    const Vector q_min = sp.eigenvectors.col(0);
    std::vector<ComplexVector> samples;
    ComplexVector adversarial(n);
    adversarial.real() = q_min;
    adversarial.imag() = q_min;
    samples.push_back(adversarial);
    SplitMix64 rng(seed);
    for (int s = 0; s < n_samples; ++s) {
      ComplexVector x(n);
      x.real() = rng.gaussian_vector(n);
      x.imag() = rng.gaussian_vector(n);
      samples.push_back(x);
    }
    double rq_min = std::numeric_limits<double>::infinity();
    for (const auto& x : samples) {
      const double num = x.dot(tc * x).real();  // Eigen's dot conjugates the first argument
      rq_min = std::min(rq_min, num / x.squaredNorm());
    }
    const bool real_bound = sp.min() >= report.gamma - atol;
    const bool complex_bound = rq_min >= report.gamma - atol;
    const bool consistent = rq_min >= sp.min() - atol;
    report.clauses.push_back({"lower_bound", real_bound == complex_bound && consistent, sp.min(),
                              rq_min, real_bound ? "bound holds" : "bound fails on both sides"});
  }

  for (const auto& c : report.clauses) {
    if (!c.passed) {
      throw Error(ErrorKind::CorrespondenceViolation,
                  "clause " + c.name + " failed (real " + std::to_string(c.real_value) +
                      ", complex " + std::to_string(c.complex_value) + ") " + c.detail);
    }
  }
  return report;
}

}  // namespace pfcone
