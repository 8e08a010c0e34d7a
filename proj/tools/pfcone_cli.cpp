#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "pfcone/harness.hpp"
#include "pfcone/report.hpp"
#include "pfcone/selftest.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitConfig = 2;

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  bool no_timestamp = false;
  int jobs = 1;
};

void add_common(CLI::App* cmd, Common& c, bool with_config) {
  if (with_config) cmd->add_option("--config", c.config_path, "Experiment config (key = value)")->required();
  cmd->add_option("--seed", c.seed, "Override the master seed");
  cmd->add_option("--out", c.out_path, "Report path (default: config 'output', else stdout)");
  cmd->add_flag("--no-timestamp", c.no_timestamp, "Omit the timestamp line");
  cmd->add_option("--jobs", c.jobs, "Worker threads")->check(CLI::PositiveNumber);
}

void emit(const pfcone::Report& report, const Common& c, const std::string& fallback_path) {
  const std::optional<std::string> stamp =
      c.no_timestamp ? std::nullopt : std::optional<std::string>(pfcone::current_timestamp());
  const std::string path = c.out_path.empty() ? fallback_path : c.out_path;
  if (path.empty()) {
    report.write(std::cout, stamp);
    return;
  }
  std::ofstream out(path);
  if (!out) throw pfcone::Error(pfcone::ErrorKind::ConfigInvalid, "cannot write '" + path + "'");
  report.write(out, stamp);
}

int run_experiment(const Common& c, std::initializer_list<pfcone::ExperimentKind> allowed) {
  pfcone::Config cfg = pfcone::Config::load(c.config_path);
  if (!cfg.has("kind")) cfg.set("kind", std::string(pfcone::to_string(*allowed.begin())));
  if (c.seed) cfg.set("seed", std::to_string(*c.seed));
  const auto exp = pfcone::ExperimentConfig::from_config(cfg);
  if (std::find(allowed.begin(), allowed.end(), exp.kind) == allowed.end()) {
    throw pfcone::Error(pfcone::ErrorKind::ConfigInvalid,
                        "field 'kind': '" + std::string(pfcone::to_string(exp.kind)) +
                            "' does not belong to this subcommand");
  }
  const pfcone::Report report = pfcone::run(exp, c.jobs);
  emit(report, c, exp.output_path);
  if (report.violations > 0) {
    std::cerr << "contract violations: " << report.violations << '\n';
    return kExitViolation;
  }
  return kExitOk;
}

int exit_code_for(pfcone::ErrorKind kind) {
  switch (kind) {
    case pfcone::ErrorKind::ContractViolation:
    case pfcone::ErrorKind::CorrespondenceViolation:
      return kExitViolation;
    default:
      return kExitConfig;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cone positivity and Perron-Frobenius verification toolkit"};
  app.require_subcommand(1);

  Common verify_opts, perturb_opts, schrod_opts, self_opts;
  auto* verify = app.add_subcommand("verify", "Cone axioms or positivity verdicts (cone_axioms, pf_verify)");
  add_common(verify, verify_opts, true);
  auto* perturb = app.add_subcommand("perturb", "Semigroup perturbation sweep (perturb_sweep)");
  add_common(perturb, perturb_opts, true);
  auto* schrod = app.add_subcommand("schrodinger", "Magnetic Schrodinger experiment (schrodinger)");
  add_common(schrod, schrod_opts, true);

  std::string replay_path;
  auto* replay = app.add_subcommand("replay", "Re-check every CertifiedFalse row of a report");
  replay->add_option("--report", replay_path, "Report written by verify, perturb or schrodinger")->required();

  auto* selftest = app.add_subcommand("selftest", "Run the acceptance suite");
  add_common(selftest, self_opts, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    using K = pfcone::ExperimentKind;
    if (*verify) return run_experiment(verify_opts, {K::PfVerify, K::ConeAxioms});
    if (*perturb) return run_experiment(perturb_opts, {K::PerturbSweep});
    if (*schrod) return run_experiment(schrod_opts, {K::Schrodinger});
    if (*replay) {
      std::ifstream in(replay_path);
      if (!in) throw pfcone::Error(pfcone::ErrorKind::ConfigInvalid, "cannot open '" + replay_path + "'");
      const auto outcome = pfcone::replay_report(pfcone::read_report(in));
      std::cout << "replayed " << outcome.replayed << ", reproduced " << outcome.reproduced << '\n';
      for (const auto& f : outcome.failures) std::cout << "not reproduced: " << f << '\n';
      return outcome.failures.empty() ? kExitOk : kExitViolation;
    }
    if (*selftest) {
      pfcone::AcceptanceOptions opts;
      if (self_opts.seed) opts.seed = *self_opts.seed;
      opts.jobs = self_opts.jobs;
      opts.log = &std::cerr;
      const pfcone::Report report = pfcone::run_acceptance(opts);
      emit(report, self_opts, "");
      return report.violations == 0 ? kExitOk : kExitViolation;
    }
  } catch (const pfcone::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}
