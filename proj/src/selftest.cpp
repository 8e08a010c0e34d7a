#include "pfcone/selftest.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "pfcone/cone.hpp"
#include "pfcone/harness.hpp"
#include "pfcone/matrix_io.hpp"
#include "pfcone/perturbation.hpp"
#include "pfcone/pf_verifier.hpp"
#include "pfcone/rng.hpp"
#include "pfcone/schrodinger.hpp"

namespace pfcone {

namespace {

constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

// Hand-derived with 40-digit arithmetic for alpha = 1/2.
constexpr double kRadiusHalf = 0.10606601717798212866;
constexpr double kThresholdHalf = 0.09577281125879470337;
constexpr double kKappaStarHalf = 0.04788640562939735169;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double time_limit;  // seconds
  std::function<Outcome(const AcceptanceOptions&)> body;
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

Outcome radius_formula(const AcceptanceOptions&) {
  const SymmetricOperator a = SymmetricOperator::diagonal(Eigen::Vector2d(2.0, 1.0));
  const ImprovingRadius rad = improving_radius(a, Eigen::Vector2d(1.0, 0.0));
  const double err = std::abs(rad.r - kRadiusHalf);
  double worst = 0.0;
  for (int k = 0; k <= 9; ++k) {
    const double alpha = 0.1 * k;
    worst = std::max(worst, std::abs(radius_from_alpha(alpha) - 1.0 / (4.0 * quartic_constant(alpha))));
  }
  return {err <= 1e-12 && worst <= 1e-12 && rad.alpha == 0.5,
          "r=" + format_double(rad.r) + " err=" + num(err) + " consistency=" + num(worst)};
}

Outcome threshold_reproduction(const AcceptanceOptions& opt) {
  const SymmetricOperator t = SymmetricOperator::diagonal(Eigen::Vector2d(0.0, 1.0));
  const SymmetricOperator s(Eigen::Matrix2d{{0.0, 1.0}, {1.0, 0.0}});
  const PerturbationSpec spec = FixedPerturbation{s, 0.0, 1.0};
  std::vector<double> grid;
  for (int k = 0; k < 10; ++k) grid.push_back(-0.045 + 0.01 * k);
  const double s0 = std::numbers::ln2;
  const auto budget = semigroup_threshold(t, spec, s0, 0.05, grid);
  std::vector<double> samples;
  for (int k = 1; k <= 5; ++k) samples.push_back(s0 * k / 5.0);
  const auto check = end_to_end_semigroup_check(t, spec, budget, samples, opt.seed, 16, opt.jobs);

  const bool scalars = std::abs(budget.epsilon - 0.5) <= 1e-9 && std::abs(budget.alpha - 0.5) <= 1e-9 &&
                       std::abs(budget.threshold - kThresholdHalf) <= 1e-9 &&
                       std::abs(budget.kappa_admissible_closed_form - kKappaStarHalf) <= 1e-9;
  const bool sweep = budget.admissible_kappas().size() == 10 && check.rows.size() == 50 && check.failures == 0;
  return {scalars && sweep, "eps=" + num(budget.epsilon) + " alpha=" + num(budget.alpha) +
                                " f=" + format_double(budget.threshold) +
                                " kappa*=" + format_double(budget.kappa_admissible_closed_form) +
                                " rows=" + std::to_string(check.rows.size()) +
                                " failures=" + std::to_string(check.failures)};
}

Outcome cone_geometry(const AcceptanceOptions& opt) {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::ConeAxioms;
  cfg.seed = derive_seed(opt.seed, 3);
  cfg.params.set("dims", "2:16:15");
  cfg.params.set("samples", "400");
  const Report r = run(cfg, opt.jobs);
  long long moreau = 0;
  long long partner = 0;
  long long witness = 0;
  for (const auto& row : r.tables.front().rows) {
    const long long n = std::stoll(row[3]);
    if (row[2] == "moreau") moreau += n;
    if (row[2] == "boundary_partner") partner += n;
    if (row[2] == "duality_witness") witness += n;
  }
  return {r.violations == 0 && moreau >= 10000,
          "moreau=" + std::to_string(moreau) + " witness=" + std::to_string(witness) +
              " partner=" + std::to_string(partner) + " violations=" + std::to_string(r.violations)};
}

Outcome simple_top_equivalence(const AcceptanceOptions& opt) {
  int simple_ok = 0;
  int degenerate_ok = 0;
  const int per_flavor = 120;
  for (int k = 0; k < per_flavor; ++k) {
    const Index dim = 2 + k % 7;
    const SymmetricOperator simple = generate_instance(InstanceFlavor::PsdSimple, dim, derive_seed(opt.seed, 2 * k));
    const auto& sps = simple.spectrum();
    if (improves_positivity_axis(simple, sps.eigenvectors.col(dim - 1)).status == VerdictStatus::CertifiedTrue) {
      ++simple_ok;
    }
    const SymmetricOperator degen =
        generate_instance(InstanceFlavor::DegenerateTop, dim, derive_seed(opt.seed, 2 * k + 1));
    const Vector u0 = degen.spectrum().eigenvectors.col(dim - 1);
    const Verdict v = improves_positivity_axis(degen, u0);
    if (v.status == VerdictStatus::CertifiedFalse && v.witness &&
        replay_violation(degen, AxisCone(u0), Predicate::ImprovesPositivity, *v.witness, v.tolerance)) {
      ++degenerate_ok;
    }
  }
  return {simple_ok == per_flavor && degenerate_ok == per_flavor,
          "simple " + std::to_string(simple_ok) + "/" + std::to_string(per_flavor) + " degenerate " +
              std::to_string(degenerate_ok) + "/" + std::to_string(per_flavor)};
}

Outcome drift_suite(const AcceptanceOptions& opt) {
  const SymmetricOperator a = SymmetricOperator::diagonal(Eigen::Vector2d(2.0, 1.0));
  const Vector u0 = Eigen::Vector2d(1.0, 0.0);
  SplitMix64 rng(derive_seed(opt.seed, 5));
  int ok = 0;
  double worst = 1.0;
  for (int k = 0; k < 50; ++k) {
    double d = rng.uniform(0.0, kInvSqrt2);
    while (d == 0.0) d = rng.uniform(0.0, kInvSqrt2);
    const double theta = (k % 2 ? -2.0 : 2.0) * std::asin(d / 2.0);
    const Vector u1 = Eigen::Vector2d(std::cos(theta), std::sin(theta));
    const Verdict v = ergodic_drift_check(a, u0, u1, 64, derive_seed(opt.seed, 100 + k));
    if (v.status == VerdictStatus::SampledTrue) ++ok;
    worst = std::min(worst, v.margin);
  }
  return {ok == 50, "ergodic " + std::to_string(ok) + "/50 worst_certificate=" + num(worst)};
}

Outcome quartic_grid(const AcceptanceOptions&) {
  int violations = 0;
  double worst = -1.0;
  for (int k = 1; k <= 9; ++k) {
    const double c = quartic_constant(0.1 * k);
    const double hi = std::min(c / 4.0, 1.0 / (4.0 * c));
    for (int j = 0; j < 1000; ++j) {
      const double g = quartic_margin(c, hi * j / 1000.0);
      worst = std::max(worst, g);
      if (!(g < 0.0)) ++violations;
    }
  }
  return {violations == 0, "violations=" + std::to_string(violations) + " max_g=" + num(worst)};
}

Outcome riesz_suite(const AcceptanceOptions& opt) {
  int matrices = 0;
  int admissible = 0;
  int failures = 0;
  double worst_match = 0.0;
  double worst_idem = 0.0;
  double worst_doubling = 0.0;
  std::uint64_t counter = 0;
  while (matrices < 20) {
    const Index dim = 2 + matrices % 11;
    const SymmetricOperator t = generate_instance(InstanceFlavor::Generic, dim, derive_seed(opt.seed, 7000 + counter++));
    const TopEigen bottom = bottom_eigen(t);
    if (bottom.gap < 0.2) continue;
    ++matrices;
    const double eps = bottom.gap / 2.0;
    const RieszProjector p64 = riesz_projector(t, bottom.value, eps, 64);
    const RieszProjector p128 = riesz_projector(t, bottom.value, eps, 128);
    const Matrix exact = spectral_projector(t, bottom.value, eps);
    const double match = (p64.real() - exact).cwiseAbs().maxCoeff();
    const double doubling = (p64.real() - p128.real()).cwiseAbs().maxCoeff();
    worst_match = std::max(worst_match, match);
    worst_idem = std::max(worst_idem, p64.idempotency_residual);
    worst_doubling = std::max(worst_doubling, doubling);
    if (match > 1e-8 || p64.idempotency_residual > 1e-8 || doubling > 1e-10) ++failures;

    SplitMix64 rng(derive_seed(opt.seed, 9000 + counter));
    Matrix g(dim, dim);
    for (Index j = 0; j < dim; ++j) g.col(j) = rng.gaussian_vector(dim);
    const SymmetricOperator raw(0.5 * (g + g.transpose()));
    const SymmetricOperator s = raw.scaled(1.0 / raw.norm());
    const PerturbationSpec spec = FixedPerturbation{s, 0.0, 1.0};
    const auto budget = semigroup_threshold(t, spec, 1.0, 0.1, {-0.05, -1e-2, -1e-3, -1e-4, 1e-4, 1e-3, 1e-2, 0.05});
    for (const auto& row : budget.rows) {
      if (!row.admissible) continue;
      ++admissible;
      try {
        const DriftedAxis d = drifted_axis(t + s.scaled(row.kappa), budget.u0, budget, row.c);
        if (!(d.drift_actual <= d.drift_bound && d.drift_actual < budget.r)) ++failures;
      } catch (const Error&) {
        ++failures;
      }
    }
  }
  return {failures == 0 && admissible > 0,
          "match=" + num(worst_match) + " idempotency=" + num(worst_idem) + " doubling=" + num(worst_doubling) +
              " admissible=" + std::to_string(admissible) + " failures=" + std::to_string(failures)};
}

Outcome correspondence_suite(const AcceptanceOptions& opt) {
  int passed = 0;
  std::string first_failure;
  for (int k = 0; k < 100; ++k) {
    const Index dim = 1 + k % 10;
    const SymmetricOperator t = generate_instance(InstanceFlavor::Generic, dim, derive_seed(opt.seed, 8000 + k));
    try {
      if (correspondence_check(t, std::nullopt, 64, derive_seed(opt.seed, 8500 + k), 1e-9).all_passed()) ++passed;
    } catch (const Error& e) {
      if (first_failure.empty()) first_failure = e.what();
    }
  }
  return {passed == 100, "passed " + std::to_string(passed) + "/100" +
                             (first_failure.empty() ? "" : " first failure: " + first_failure)};
}

Outcome schrodinger_pipeline(const AcceptanceOptions& opt) {
  const GridSpec grid(8, 0.5);
  const MagneticModel model(grid, preset_profile("harmonic", grid), preset_profile("gaussian", grid), 0.0);
  const RealStructure rs(grid);
  const SymmetricOperator h0 = restrict_to_real(build_h0(model), rs);
  const TopEigen ground = bottom_eigen(h0);

  bool base_ok = true;
  for (double s : {0.25, 0.5, 1.0}) {
    base_ok = base_ok && improves_positivity_axis(heat_semigroup(h0, s), ground.vector).status ==
                           VerdictStatus::CertifiedTrue;
  }

  std::vector<double> e_grid;
  for (int k = 0; k <= 40; ++k) e_grid.push_back(-0.02 + 0.001 * k);
  const auto exp = magnetic_experiment(model, 1.0, e_grid, {}, opt.seed, 16, opt.jobs);
  bool verdicts = exp.check.failures == 0;
  for (const auto& row : exp.check.rows) verdicts = verdicts && row.verdict.holds();
  for (const auto& [s, v] : exp.check.base_checks) verdicts = verdicts && v.status == VerdictStatus::CertifiedTrue;

  const auto demo = orthant_failure_demo(model.with_coupling(0.5), 0.5);
  const bool pass = ground.simple && base_ok && exp.e0 > 0.0 && verdicts && demo.max_imag >= 1e-10;
  return {pass, "ground=" + num(ground.value) + " gap=" + num(ground.gap) + " e0=" + format_double(exp.e0) +
                    " checks=" + std::to_string(exp.check.rows.size()) +
                    " failures=" + std::to_string(exp.check.failures) + " demo_max_imag=" + num(demo.max_imag)};
}

std::vector<Criterion> criteria() {
  return {
      {1, "radius formula", 1.0, radius_formula},
      {2, "semigroup threshold on the 2x2 instance", 5.0, threshold_reproduction},
      {3, "cone geometry", 30.0, cone_geometry},
      {4, "simple top equivalence", 30.0, simple_top_equivalence},
      {5, "ergodicity under axis drift", 10.0, drift_suite},
      {6, "quartic negativity grid", 1.0, quartic_grid},
      {7, "contour projector", 30.0, riesz_suite},
      {8, "real/complex correspondence", 10.0, correspondence_suite},
      {9, "magnetic Schrodinger pipeline", 60.0, schrodinger_pipeline},
  };
}

struct Run {
  std::vector<std::vector<std::string>> rows;
  std::vector<double> seconds;
};

Run run_all(const AcceptanceOptions& opt) {
  Run out;
  for (const auto& c : criteria()) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body(opt);
    } catch (const Error& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.time_limit;
    const bool pass = o.pass && in_time;
    out.rows.push_back({std::to_string(c.id), c.name, pass ? "pass" : "FAIL",
                        o.detail + (in_time ? "" : " (over time limit)")});
    out.seconds.push_back(secs);
  }
  return out;
}

void log_line(std::ostream* log, const std::vector<std::string>& row, double secs) {
  if (!log) return;
  char buf[64];
  std::snprintf(buf, sizeof buf, " [%.2f s]", secs);
  *log << (row[2] == "pass" ? "PASS " : "FAIL ") << row[0] << ". " << row[1] << ": " << row[3] << buf << '\n';
}

}  // namespace

Report run_acceptance(const AcceptanceOptions& options) {
  Report report;
  report.add_header("toolkit", std::string("pfcone ") + kToolkitVersion);
  report.add_header("kind", "selftest");
  report.add_header("seed", std::to_string(options.seed));
  auto& table = report.add_table("acceptance", {"id", "criterion", "status", "detail"});

  const Run first = run_all(options);
  for (std::size_t i = 0; i < first.rows.size(); ++i) {
    log_line(options.log, first.rows[i], first.seconds[i]);
    table.add_row(first.rows[i]);
  }

  if (options.check_determinism) {
    const auto start = std::chrono::steady_clock::now();
    const Run second = run_all(options);
    std::size_t differing = 0;
    for (std::size_t i = 0; i < first.rows.size(); ++i) {
      if (first.rows[i] != second.rows[i]) ++differing;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::vector<std::string> row{"10", "determinism", differing == 0 ? "pass" : "FAIL",
                                 "rerun rows differing: " + std::to_string(differing)};
    log_line(options.log, row, secs);
    table.add_row(std::move(row));
  }

  int passed = 0;
  for (const auto& row : table.rows) {
    if (row[2] == "pass") ++passed;
  }
  report.violations = static_cast<int>(table.rows.size()) - passed;
  report.add_summary("passed", std::to_string(passed));
  report.add_summary("failed", std::to_string(report.violations));
  return report;
}

}  // namespace pfcone
