#include "pfcone/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "pfcone/cone.hpp"
#include "pfcone/matrix_io.hpp"
#include "pfcone/parallel.hpp"
#include "pfcone/perturbation.hpp"
#include "pfcone/pf_verifier.hpp"
#include "pfcone/rng.hpp"
#include "pfcone/schrodinger.hpp"

namespace pfcone {

namespace {

std::string fmt(double x) { return format_double(x); }
std::string fmt(bool b) { return b ? "true" : "false"; }

[[noreturn]] void invalid(const std::string& field, const std::string& what) {
  throw Error(ErrorKind::ConfigInvalid, "field '" + field + "': " + what);
}

std::vector<Index> get_dims(const Config& p, const std::string& key, std::vector<double> fallback) {
  std::vector<Index> out;
  for (double d : p.get_list(key, std::move(fallback))) {
    if (d < 1.0 || d != std::floor(d) || d > 4096.0) invalid(key, "dimensions must be integers in [1, 4096]");
    out.push_back(static_cast<Index>(d));
  }
  return out;
}

int get_positive_int(const Config& p, const std::string& key, long long fallback) {
  const long long v = p.get_int(key, fallback);
  if (v < 1 || v > 100'000'000) invalid(key, "must be a positive integer");
  return static_cast<int>(v);
}

template <class F>
auto with_context(const std::string& context, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.kind(), context + ": " + e.what());
  }
}

void add_common_header(Report& r, const ExperimentConfig& cfg) {
  r.add_header("toolkit", std::string("pfcone ") + kToolkitVersion);
  r.add_header("kind", std::string(to_string(cfg.kind)));
  r.add_header("seed", std::to_string(cfg.seed));
  r.add_header("tolerance.membership", fmt(kMembershipTolerance));
  r.add_header("tolerance.symmetry", fmt(kSymmetryTolerance));
  r.add_header("tolerance.gap", fmt(kDefaultGapTolerance));
  const Config echoed = cfg.to_config();
  for (const auto& [k, v] : echoed.entries()) r.add_header("config." + k, v);
}

Config config_from_header(const Report& r) {
  Config cfg;
  for (const auto& [k, v] : r.header) {
    if (k.rfind("config.", 0) == 0) cfg.set(k.substr(7), v);
  }
  return cfg;
}

std::size_t column(const Table& t, const std::string& name) {
  const auto it = std::find(t.columns.begin(), t.columns.end(), name);
  if (it == t.columns.end()) throw Error(ErrorKind::ParseError, "table '" + t.name + "' lacks column " + name);
  return static_cast<std::size_t>(it - t.columns.begin());
}

double parse_number(const std::string& s) {
  try {
    return std::stod(s);
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::ParseError, "bad number '" + s + "'");
  }
}

// ---------------------------------------------------------------------------
// cone_axioms

struct ConeTask {
  std::string cone_kind;
  Index dim = 0;
};

Report run_cone_axioms(const ExperimentConfig& cfg, int jobs) {
  const Config& p = cfg.params;
  p.require_known({"dims", "samples", "cones"});
  const auto dims = get_dims(p, "dims", {2, 3, 4, 5, 8, 12, 16});
  const int samples = get_positive_int(p, "samples", 1000);
  const auto cones = p.get_words("cones", {"axis", "orthant"});
  std::vector<ConeTask> tasks;
  for (const auto& c : cones) {
    if (c != "axis" && c != "orthant") invalid("cones", "unknown cone '" + c + "'");
    for (Index d : dims) tasks.push_back({c, d});
  }

  struct Row {
    std::string check;
    int checked = 0;
    int violations = 0;
    double worst = 0.0;
  };
  std::vector<std::vector<Row>> results(tasks.size());
  parallel_for(tasks.size(), jobs, [&](std::size_t i) {
    const auto& task = tasks[i];
    const std::uint64_t seed = derive_seed(cfg.seed, i);
    SplitMix64 rng(seed);
    const Cone cone = task.cone_kind == "axis" ? Cone(AxisCone(rng.unit_vector(task.dim)))
                                               : Cone(OrthantCone(task.dim));
    auto& rows = results[i];

    const auto dual = selfduality_probe(cone, samples, derive_seed(seed, 1));
    rows.push_back({"pair_inner", dual.pairs_checked, dual.pair_violations, dual.worst_pair_inner});
    rows.push_back({"duality_witness", dual.outside_checked, dual.witness_failures,
                    dual.outside_checked ? dual.worst_witness_inner : 0.0});

    Row moreau{"moreau", 0, 0, 0.0};
    for (int k = 0; k < samples; ++k) {
      const Vector w = rng.uniform(0.01, 100.0) * rng.gaussian_vector(task.dim);
      const double scale = w.norm();
      const auto split = moreau_decompose(cone, w);
      const double rel = std::max(split.residual / scale, std::abs(split.inner) / (scale * scale));
      ++moreau.checked;
      moreau.worst = std::max(moreau.worst, rel);
      if (rel > 1e-9 || !in_cone(cone, split.u, 1e-9) || !in_cone(cone, split.v, 1e-9)) ++moreau.violations;
    }
    rows.push_back(moreau);

    if (const auto* axis = std::get_if<AxisCone>(&cone)) {
      Row partner{"boundary_partner", 0, 0, 0.0};
      for (int k = 0; k < samples; ++k) {
        const Vector u = rng.uniform(0.1, 10.0) * sample_boundary_ray(*axis, rng);
        if (task.dim == 1) break;
        const Vector up = boundary_orthogonal_partner(*axis, u);
        const double rel = std::abs(u.dot(up)) / u.squaredNorm();
        ++partner.checked;
        partner.worst = std::max(partner.worst, rel);
        if (rel > 1e-10 || classify(cone, up) != Membership::Boundary) ++partner.violations;
      }
      rows.push_back(partner);
    }
  });

  Report report;
  add_common_header(report, cfg);
  auto& table = report.add_table("cone_axioms", {"cone", "dim", "check", "checked", "violations", "worst", "seed"});
  int total = 0;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    for (const auto& row : results[i]) {
      table.add_row({tasks[i].cone_kind, std::to_string(tasks[i].dim), row.check,
                     std::to_string(row.checked), std::to_string(row.violations), fmt(row.worst),
                     std::to_string(derive_seed(cfg.seed, i))});
      total += row.violations;
    }
  }
  report.violations = total;
  report.add_summary("checks", std::to_string(table.rows.size()));
  report.add_summary("failed_checks", std::to_string(total));
  return report;
}

// ---------------------------------------------------------------------------
// pf_verify

struct PfInstance {
  InstanceFlavor flavor;
  Index dim;
  std::uint64_t seed;

  std::string id() const {
    return std::string(to_string(flavor)) + ":" + std::to_string(dim) + ":" + std::to_string(seed);
  }
};

PfInstance parse_pf_instance(const std::string& id, std::string& cone_kind) {
  std::vector<std::string> parts;
  std::stringstream in(id);
  std::string item;
  while (std::getline(in, item, ':')) parts.push_back(item);
  if (parts.size() != 4) throw Error(ErrorKind::ParseError, "instance '" + id + "'");
  cone_kind = parts[3];
  try {
    return {parse_instance_flavor(parts[0]), static_cast<Index>(std::stoll(parts[1])),
            static_cast<std::uint64_t>(std::stoull(parts[2]))};
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::ParseError, "instance '" + id + "'");
  }
}

Vector top_axis(const SymmetricOperator& a) {
  const auto& sp = a.spectrum();
  return sp.eigenvectors.col(sp.eigenvectors.cols() - 1);
}

Cone pf_cone(const SymmetricOperator& a, const std::string& kind) {
  if (kind == "axis") return AxisCone(top_axis(a));
  if (kind == "orthant") return OrthantCone(a.dim());
  throw Error(ErrorKind::ParseError, "unknown cone '" + kind + "'");
}

Predicate parse_predicate(const std::string& name) {
  if (name == "preserves_positivity") return Predicate::PreservesPositivity;
  if (name == "improves_positivity") return Predicate::ImprovesPositivity;
  throw Error(ErrorKind::ParseError, "unknown predicate '" + name + "'");
}

Verdict inapplicable(const Error& e) {
  Verdict v;
  v.status = VerdictStatus::Inapplicable;
  v.detail = e.what();
  return v;
}

struct PfResult {
  std::vector<std::vector<std::string>> verdict_rows;
  std::vector<std::vector<std::string>> pf_rows;
  int violations = 0;
  std::vector<std::string> notes;
};

Report run_pf_verify(const ExperimentConfig& cfg, int jobs) {
  const Config& p = cfg.params;
  p.require_known({"flavors", "dims", "count", "cones", "samples", "restarts"});
  std::vector<InstanceFlavor> flavors;
  for (const auto& f : p.get_words("flavors", {"generic", "psd-simple", "degenerate-top"})) {
    flavors.push_back(parse_instance_flavor(f));
  }
  const auto dims = get_dims(p, "dims", {2, 3, 5, 8});
  const int count = get_positive_int(p, "count", 8);
  const auto cones = p.get_words("cones", {"axis", "orthant"});
  for (const auto& c : cones) {
    if (c != "axis" && c != "orthant") invalid("cones", "unknown cone '" + c + "'");
  }
  const int samples = get_positive_int(p, "samples", 256);
  const int restarts = get_positive_int(p, "restarts", 16);

  std::vector<PfInstance> instances;
  for (auto flavor : flavors) {
    for (Index d : dims) {
      if (flavor == InstanceFlavor::DegenerateTop && d < 2) invalid("dims", "degenerate-top needs dim >= 2");
      for (int k = 0; k < count; ++k) {
        instances.push_back({flavor, d, derive_seed(cfg.seed, instances.size())});
      }
    }
  }

  std::vector<PfResult> results(instances.size());
  parallel_for(instances.size(), jobs, [&](std::size_t i) {
    const PfInstance& inst = instances[i];
    with_context("instance " + inst.id(), [&] {
      const SymmetricOperator a = generate_instance(inst.flavor, inst.dim, inst.seed);
      const bool psd = a.is_positive_semidefinite();
      PfResult& out = results[i];
      auto record = [&](const std::string& pred, const std::string& id, const Cone& cone, const Verdict& v,
                        std::uint64_t seed) {
        out.verdict_rows.push_back(verdict_row(pred, id, v, seed));
        if (v.status == VerdictStatus::CertifiedFalse &&
            !(v.witness && replay_violation(a, cone, parse_predicate(pred), *v.witness, v.tolerance))) {
          ++out.violations;
          out.notes.push_back(id + " " + pred + ": witness does not replay");
        }
      };

      for (const auto& cone_kind : cones) {
        const std::string id = inst.id() + ":" + cone_kind;
        const Cone cone = pf_cone(a, cone_kind);
        const std::uint64_t s1 = derive_seed(inst.seed, 1);
        const Verdict pres = preserves_positivity(a, cone, samples, s1);
        record("preserves_positivity", id, cone, pres, s1);

        if (cone_kind == "axis") {
          const std::uint64_t s2 = derive_seed(inst.seed, 2);
          Verdict imp;
          try {
            imp = psd ? improves_positivity_axis(a, top_axis(a))
                      : improves_positivity_general(a, std::get<AxisCone>(cone), restarts, s2);
          } catch (const Error& e) {
            imp = inapplicable(e);
          }
          record("improves_positivity", id, cone, imp, s2);
          const bool expected_ok =
              (inst.flavor == InstanceFlavor::PsdSimple && imp.status == VerdictStatus::CertifiedTrue) ||
              (inst.flavor == InstanceFlavor::DegenerateTop && imp.status == VerdictStatus::CertifiedFalse) ||
              inst.flavor == InstanceFlavor::Generic;
          if (!expected_ok) {
            ++out.violations;
            out.notes.push_back(id + ": improvement verdict contradicts the simple-top equivalence");
          }
        }

        if (psd && pres.status != VerdictStatus::CertifiedFalse) {
          const std::uint64_t s3 = derive_seed(inst.seed, 3);
          try {
            const auto pf = perron_frobenius_check(a, cone, s3);
            out.pf_rows.push_back({id, fmt(pf.ergodic_sampled), std::to_string(pf.pairs_checked),
                                   fmt(pf.top_simple), fmt(pf.top_strictly_positive), fmt(pf.agree),
                                   std::to_string(s3)});
            if (!pf.agree) {
              ++out.violations;
              out.notes.push_back(id + ": ergodicity and Perron-Frobenius side disagree");
            }
          } catch (const Error& e) {
            if (e.kind() != ErrorKind::PrereqFailed) throw;
          }
        }
      }
    });
  });

  Report report;
  add_common_header(report, cfg);
  auto& verdicts = report.add_table("verdicts", verdict_columns());
  auto& pf = report.add_table("perron_frobenius", {"instance", "ergodic_sampled", "pairs_checked", "top_simple",
                                                   "top_strictly_positive", "agree", "seed"});
  int counts[4] = {0, 0, 0, 0};
  for (auto& r : results) {
    for (auto& row : r.verdict_rows) {
      ++counts[static_cast<int>(parse_verdict_status(row[2]))];
      verdicts.add_row(std::move(row));
    }
    for (auto& row : r.pf_rows) pf.add_row(std::move(row));
    report.violations += r.violations;
  }
  report.add_summary("instances", std::to_string(instances.size()));
  report.add_summary("certified_true", std::to_string(counts[0]));
  report.add_summary("sampled_true", std::to_string(counts[1]));
  report.add_summary("certified_false", std::to_string(counts[2]));
  report.add_summary("inapplicable", std::to_string(counts[3]));
  int note_index = 0;
  for (const auto& r : results) {
    for (const auto& n : r.notes) report.add_summary("violation." + std::to_string(note_index++), n);
  }
  return report;
}

// ---------------------------------------------------------------------------
// perturb_sweep

struct SweepSetup {
  SymmetricOperator t;
  FixedPerturbation spec;
  double s0 = 0.0;
  double kappa0 = 0.0;
  std::vector<double> grid;
  std::vector<double> s_samples;
  int restarts = 16;
};

SweepSetup sweep_setup(const Config& p) {
  p.require_known({"instance", "T", "S", "a", "b", "s0", "kappa0", "kappa_grid", "s_samples", "restarts"});
  const bool builtin = p.get_string("instance", "") == "swap";
  if (p.has("instance") && !builtin) invalid("instance", "only 'swap' is built in");
  Matrix t_m, s_m;
  if (builtin) {
    t_m = Vector(Eigen::Vector2d(0.0, 1.0)).asDiagonal();
    s_m = Eigen::Matrix2d{{0.0, 1.0}, {1.0, 0.0}};
  }
  if (p.has("T")) t_m = parse_inline_matrix(p.get_string("T"), "T");
  if (p.has("S")) s_m = parse_inline_matrix(p.get_string("S"), "S");
  if (t_m.size() == 0) invalid("T", "missing (or set instance = swap)");
  if (s_m.size() == 0) invalid("S", "missing (or set instance = swap)");
  if (t_m.rows() != s_m.rows()) invalid("S", "dimension differs from T");

  SweepSetup out{with_context("field 'T'", [&] { return SymmetricOperator(t_m); }),
                 FixedPerturbation::with_norm_bound(with_context("field 'S'", [&] { return SymmetricOperator(s_m); })),
                 0.0, 0.0, {}, {}, 16};
  out.spec.a = p.get_double("a", 0.0);
  out.spec.b = p.get_double("b", out.spec.b);
  if (out.spec.a < 0.0 || out.spec.b < 0.0) invalid("a", "relative bounds must be nonnegative");
  out.s0 = builtin ? p.get_double("s0", std::numbers::ln2) : p.get_double("s0");
  if (!(out.s0 > 0.0)) invalid("s0", "must be positive");
  if (p.has("kappa_grid")) {
    out.grid = p.get_list("kappa_grid");
  } else if (builtin) {
    out.grid = parse_double_list("-0.045:0.045:10", "kappa_grid");
  } else {
    invalid("kappa_grid", "missing");
  }
  double kmax = 0.0;
  for (double k : out.grid) kmax = std::max(kmax, std::abs(k));
  out.kappa0 = p.get_double("kappa0", std::nextafter(kmax, std::numeric_limits<double>::infinity()));
  if (!(out.kappa0 > 0.0)) invalid("kappa0", "must be positive");
  if (p.has("s_samples")) {
    out.s_samples = p.get_list("s_samples");
  } else {
    for (double f : {0.2, 0.4, 0.6, 0.8, 1.0}) out.s_samples.push_back(f * out.s0);
  }
  out.restarts = get_positive_int(p, "restarts", 16);
  return out;
}

void add_budget(Report& report, const PerturbationBudget& b, const std::string& param) {
  report.add_header("budget.mu", fmt(b.mu));
  report.add_header("budget.delta", fmt(b.delta));
  report.add_header("budget.epsilon", fmt(b.epsilon));
  report.add_header("budget.s0", fmt(b.s0));
  report.add_header("budget.alpha", fmt(b.alpha));
  report.add_header("budget.r", fmt(b.r));
  report.add_header("budget.threshold", fmt(b.threshold));
  report.add_header("budget.kappa0", fmt(b.kappa0));
  report.add_header("budget.admissible_grid", fmt(b.kappa_admissible_grid));
  report.add_header("budget.admissible_closed_form", fmt(b.kappa_admissible_closed_form));
  auto& gap = report.add_table("budget", {param, "a", "b", "c", "gap", "admissible"});
  for (const auto& row : b.rows) {
    gap.add_row({fmt(row.kappa), fmt(row.a), fmt(row.b), fmt(row.c), fmt(row.gap), fmt(row.admissible)});
  }
}

void add_checks(Report& report, const SemigroupCheckReport& check, std::uint64_t seed,
                const std::string& param) {
  auto& base = report.add_table("base", {"s", "status", "margin", "tolerance", "witness"});
  for (const auto& [s, v] : check.base_checks) {
    base.add_row({fmt(s), std::string(to_string(v.status)), fmt(v.margin), fmt(v.tolerance), flatten(v.witness)});
  }
  auto& rows = report.add_table("checks", {param, "s", "c_kappa", "threshold", "drift_bound", "drift_actual",
                                           "alpha_actual", "status", "margin", "tolerance", "witness", "seed"});
  for (std::size_t i = 0; i < check.rows.size(); ++i) {
    const auto& r = check.rows[i];
    rows.add_row({fmt(r.kappa), fmt(r.s), fmt(r.c_kappa), fmt(r.threshold), fmt(r.drift_bound),
                  fmt(r.drift_actual), fmt(r.alpha_actual), std::string(to_string(r.verdict.status)),
                  fmt(r.verdict.margin), fmt(r.verdict.tolerance), flatten(r.verdict.witness),
                  std::to_string(derive_seed(seed, i))});
  }
  report.violations += check.failures;
  report.add_summary("checks", std::to_string(check.rows.size() + check.base_checks.size()));
  report.add_summary("failures", std::to_string(check.failures));
}

Report run_perturb_sweep(const ExperimentConfig& cfg, int jobs) {
  const SweepSetup setup = sweep_setup(cfg.params);
  const PerturbationSpec spec = setup.spec;
  const auto budget = semigroup_threshold(setup.t, spec, setup.s0, setup.kappa0, setup.grid);
  const auto check = end_to_end_semigroup_check(setup.t, spec, budget, setup.s_samples, cfg.seed,
                                                setup.restarts, jobs);
  Report report;
  add_common_header(report, cfg);
  add_budget(report, budget, "kappa");
  add_checks(report, check, cfg.seed, "kappa");
  report.add_summary("admissible_kappa_grid", fmt(budget.kappa_admissible_grid));
  report.add_summary("admissible_kappa_closed_form", fmt(budget.kappa_admissible_closed_form));
  return report;
}

// ---------------------------------------------------------------------------
// schrodinger

struct SchrodingerSetup {
  MagneticModel model;
  double s0 = 1.0;
  std::vector<double> e_grid;
  std::vector<double> s_samples;
  double demo_e = 0.5;
  double demo_s = 0.5;
  int restarts = 16;
};

SchrodingerSetup schrodinger_setup(const Config& p) {
  p.require_known({"N", "h", "potential", "vector_potential", "e_grid", "s0", "s_samples", "demo_e", "demo_s",
                   "restarts"});
  const long long n = p.get_int("N");
  if (n < 1 || n > 2000) invalid("N", "must lie in [1, 2000]");
  const double h = p.get_double("h");
  if (!(h > 0.0)) invalid("h", "must be positive");
  const GridSpec grid(static_cast<int>(n), h);
  Vector v = with_context("field 'potential'", [&] { return parse_profile(p.get_string("potential"), grid); });
  Vector a = with_context("field 'vector_potential'",
                          [&] { return parse_profile(p.get_string("vector_potential"), grid); });
  SchrodingerSetup out{MagneticModel(grid, std::move(v), std::move(a), 0.0), 1.0, {}, {}, 0.5, 0.5, 16};
  out.s0 = p.get_double("s0");
  if (!(out.s0 > 0.0)) invalid("s0", "must be positive");
  out.e_grid = p.get_list("e_grid");
  out.s_samples = p.get_list("s_samples", {});
  out.demo_e = p.get_double("demo_e", 0.5);
  out.demo_s = p.get_double("demo_s", 0.5);
  if (!(out.demo_s > 0.0)) invalid("demo_s", "must be positive");
  out.restarts = get_positive_int(p, "restarts", 16);
  return out;
}

Report run_schrodinger(const ExperimentConfig& cfg, int jobs) {
  const SchrodingerSetup setup = schrodinger_setup(cfg.params);
  const auto exp = magnetic_experiment(setup.model, setup.s0, setup.e_grid, setup.s_samples, cfg.seed,
                                       setup.restarts, jobs);
  Report report;
  add_common_header(report, cfg);
  report.add_header("ground_energy", fmt(exp.ground_energy));
  report.add_header("ground_gap", fmt(exp.ground_gap));
  add_budget(report, exp.budget, "e");
  add_checks(report, exp.check, cfg.seed, "e");

  auto& demo = report.add_table("orthant_demo", {"e", "s", "max_imag", "min_real", "left_cone", "control"});
  std::vector<double> demo_couplings{0.0};
  if (setup.demo_e != 0.0) demo_couplings.push_back(setup.demo_e);
  for (double e : demo_couplings) {
    const auto d = orthant_failure_demo(setup.model.with_coupling(e), setup.demo_s, std::nullopt, true);
    demo.add_row({fmt(d.e), fmt(d.s), fmt(d.max_imag), fmt(d.min_real), fmt(d.left_cone), fmt(d.control)});
    if (d.control && d.left_cone) {
      ++report.violations;
      report.add_summary("violation.control", "e = 0 heat image left the nonnegative cone");
    }
    if (!d.control) report.add_summary("demo_max_imag", fmt(d.max_imag));
  }
  report.add_summary("e0", fmt(exp.e0));
  return report;
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::ConeAxioms: return "cone_axioms";
    case ExperimentKind::PfVerify: return "pf_verify";
    case ExperimentKind::PerturbSweep: return "perturb_sweep";
    case ExperimentKind::Schrodinger: return "schrodinger";
  }
  return "?";
}

ExperimentKind parse_experiment_kind(const std::string& text) {
  for (auto k : {ExperimentKind::ConeAxioms, ExperimentKind::PfVerify, ExperimentKind::PerturbSweep,
                 ExperimentKind::Schrodinger}) {
    if (to_string(k) == text) return k;
  }
  invalid("kind", "unknown experiment kind '" + text + "'");
}

ExperimentConfig ExperimentConfig::from_config(const Config& cfg) {
  ExperimentConfig out;
  out.kind = parse_experiment_kind(cfg.get_string("kind"));
  out.seed = cfg.get_uint64("seed");
  out.output_path = cfg.get_string("output", "");
  for (const auto& [k, v] : cfg.entries()) {
    if (k != "kind" && k != "seed" && k != "output") out.params.set(k, v);
  }
  return out;
}

Config ExperimentConfig::to_config() const {
  Config cfg;
  cfg.set("kind", std::string(to_string(kind)));
  cfg.set("seed", std::to_string(seed));
  for (const auto& [k, v] : params.entries()) cfg.set(k, v);
  return cfg;
}

Report run(const ExperimentConfig& config, int jobs) {
  switch (config.kind) {
    case ExperimentKind::ConeAxioms: return run_cone_axioms(config, jobs);
    case ExperimentKind::PfVerify: return run_pf_verify(config, jobs);
    case ExperimentKind::PerturbSweep: return run_perturb_sweep(config, jobs);
    case ExperimentKind::Schrodinger: return run_schrodinger(config, jobs);
  }
  throw Error(ErrorKind::ConfigInvalid, "unknown experiment kind");
}

std::string_view to_string(InstanceFlavor flavor) {
  switch (flavor) {
    case InstanceFlavor::Generic: return "generic";
    case InstanceFlavor::PsdSimple: return "psd-simple";
    case InstanceFlavor::DegenerateTop: return "degenerate-top";
  }
  return "?";
}

InstanceFlavor parse_instance_flavor(const std::string& text) {
  for (auto f : {InstanceFlavor::Generic, InstanceFlavor::PsdSimple, InstanceFlavor::DegenerateTop}) {
    if (to_string(f) == text) return f;
  }
  throw Error(ErrorKind::ConfigInvalid, "unknown instance flavor '" + text + "'");
}

SymmetricOperator generate_instance(InstanceFlavor flavor, Index dim, std::uint64_t seed) {
  if (dim < 1) throw Error(ErrorKind::InvalidArgument, "dim must be >= 1");
  SplitMix64 rng(seed);
  Matrix g(dim, dim);
  for (Index j = 0; j < dim; ++j) g.col(j) = rng.gaussian_vector(dim);
  switch (flavor) {
    case InstanceFlavor::Generic:
      return SymmetricOperator(0.5 * (g + g.transpose()));
    case InstanceFlavor::PsdSimple: {
      Matrix gram = g * g.transpose();
      gram = 0.5 * (gram + gram.transpose());
      const double shift = 2.0 * SymmetricOperator(gram).norm() + 1.0;
      const Vector v = rng.unit_vector(dim);
      const Matrix m = gram + shift * v * v.transpose();
      return SymmetricOperator(0.5 * (m + m.transpose()));
    }
    case InstanceFlavor::DegenerateTop: {
      if (dim < 2) throw Error(ErrorKind::InvalidArgument, "degenerate-top needs dim >= 2");
      const Matrix q = Eigen::HouseholderQR<Matrix>(g).householderQ();
      const double top = rng.uniform(1.0, 10.0);
      Vector d(dim);
      d(0) = top;
      d(1) = top;
      for (Index i = 2; i < dim; ++i) d(i) = rng.uniform(0.1 * top, 0.5 * top);
      const Matrix m = q * d.asDiagonal() * q.transpose();
      return SymmetricOperator(0.5 * (m + m.transpose()));
    }
  }
  throw Error(ErrorKind::InvalidArgument, "unknown flavor");
}

Matrix parse_inline_matrix(const std::string& text, const std::string& field) {
  if (text.rfind("file:", 0) == 0) {
    return with_context("field '" + field + "'", [&] { return read_matrix_file(text.substr(5)); });
  }
  std::vector<std::vector<double>> rows;
  std::stringstream in(text);
  std::string row;
  while (std::getline(in, row, ';')) rows.push_back(parse_double_list(row, field));
  const std::size_t n = rows.size();
  if (n == 0) invalid(field, "empty matrix");
  Matrix m(static_cast<Index>(n), static_cast<Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) invalid(field, "matrix must be square");
    for (std::size_t j = 0; j < n; ++j) m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  }
  return m;
}

ReplayOutcome replay_report(const Report& report) {
  const auto kind_text = report.header_value("kind");
  if (!kind_text) throw Error(ErrorKind::ParseError, "report header lacks 'kind'");
  const ExperimentKind kind = parse_experiment_kind(*kind_text);
  const Config cfg = config_from_header(report);
  ReplayOutcome out;

  auto check = [&](bool ok, const std::string& what) {
    ++out.replayed;
    if (ok) {
      ++out.reproduced;
    } else {
      out.failures.push_back(what);
    }
  };

  if (kind == ExperimentKind::PfVerify) {
    const Table* t = report.find_table("verdicts");
    if (!t) return out;
    const auto c_pred = column(*t, "predicate"), c_inst = column(*t, "instance"), c_stat = column(*t, "status"),
               c_tol = column(*t, "tolerance"), c_wit = column(*t, "witness");
    for (const auto& row : t->rows) {
      if (row[c_stat] != "CertifiedFalse") continue;
      std::string cone_kind;
      const PfInstance inst = parse_pf_instance(row[c_inst], cone_kind);
      const SymmetricOperator a = generate_instance(inst.flavor, inst.dim, inst.seed);
      check(replay_violation(a, pf_cone(a, cone_kind), parse_predicate(row[c_pred]), unflatten(row[c_wit]),
                             parse_number(row[c_tol])),
            row[c_inst] + " " + row[c_pred]);
    }
    return out;
  }

  if (kind == ExperimentKind::PerturbSweep || kind == ExperimentKind::Schrodinger) {
    SymmetricOperator t = SymmetricOperator::zero(1);
    std::function<SymmetricOperator(double)> s_of;
    if (kind == ExperimentKind::PerturbSweep) {
      ExperimentConfig ec = ExperimentConfig::from_config(cfg);
      const SweepSetup setup = sweep_setup(ec.params);
      t = setup.t;
      s_of = [spec = setup.spec](double k) { return spec.s.scaled(k); };
    } else {
      ExperimentConfig ec = ExperimentConfig::from_config(cfg);
      const SchrodingerSetup setup = schrodinger_setup(ec.params);
      const RealStructure rs(setup.model.grid());
      t = restrict_to_real(build_h0(setup.model), rs);
      s_of = [model = setup.model, rs](double e) {
        return restrict_to_real(build_interaction(model.with_coupling(e)), rs);
      };
    }
    const AxisCone cone(bottom_eigen(t).vector);
    const std::string param = kind == ExperimentKind::PerturbSweep ? "kappa" : "e";
    for (const char* name : {"base", "checks"}) {
      const Table* tab = report.find_table(name);
      if (!tab) continue;
      const bool base = std::string(name) == "base";
      const auto c_s = column(*tab, "s"), c_stat = column(*tab, "status"), c_tol = column(*tab, "tolerance"),
                 c_wit = column(*tab, "witness");
      for (const auto& row : tab->rows) {
        if (row[c_stat] != "CertifiedFalse") continue;
        const double k = base ? 0.0 : parse_number(row[column(*tab, param)]);
        const double s = parse_number(row[c_s]);
        const SymmetricOperator e = heat_semigroup(base ? t : t + s_of(k), s);
        check(replay_violation(e, cone, Predicate::ImprovesPositivity, unflatten(row[c_wit]),
                               parse_number(row[c_tol])),
              std::string(name) + " " + param + "=" + fmt(k) + " s=" + row[c_s]);
      }
    }
  }
  return out;
}

}  // namespace pfcone
