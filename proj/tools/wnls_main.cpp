// wnls: samplers, flows, functionals and Monte Carlo studies for the
// renormalized fourth-order NLS with white-noise data.
//
// Exit codes: 0 pass, 1 verdict failure or numerical failure, 2 usage error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <string>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "wnls/config.hpp"
#include "wnls/experiments.hpp"
#include "wnls/flow.hpp"
#include "wnls/format.hpp"
#include "wnls/io.hpp"
#include "wnls/random.hpp"
#include "wnls/s_functionals.hpp"
#include "wnls/stats.hpp"

namespace fs = std::filesystem;
using namespace wnls;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

// Raised for bad input found after parsing (config file, key values, step sizes).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Command {
  CLI::App* app = nullptr;
  std::string config_path;
  std::map<std::string, std::string> flags;  // key -> value as typed
  std::map<std::string, CLI::Option*> options;
};

std::string csv_with_provenance(const RunConfig& cfg, const std::string& csv) {
  return "#" + provenance(cfg).dump() + "\n" + csv;
}

void apply_threads(const RunConfig& cfg) {
#ifdef _OPENMP
  if (cfg.threads() > 0) omp_set_num_threads(cfg.threads());
#else
  (void)cfg;
#endif
}

// Precedence: flags over WNLS_THREADS over the config file over defaults.
RunConfig resolve(const std::string& name, const Command& c) {
  RunConfig cfg(name);
  if (!c.config_path.empty()) {
    cfg = RunConfig::parse(read_file(c.config_path));
    if (cfg.command() != name)
      throw ConfigError("config file is for command '" + cfg.command() + "', not '" + name + "'");
  }
  if (const char* env = std::getenv("WNLS_THREADS"); env && *env) cfg.set("run.threads", env);
  for (const auto& [key, opt] : c.options)
    if (opt->count() > 0) cfg.set(key, c.flags.at(key));
  return cfg;
}

int cmd_sample(const RunConfig& cfg) {
  const int N = static_cast<int>(cfg.get_int("sample.N"));
  if (N < 0) throw ConfigError("sample.N must be >= 0");
  const SpectralField f = sample_data(cfg.seed(), N, cfg.get_double("sample.alpha"));
  const fs::path out = fs::path(cfg.out_dir()) / "sample.csv";
  write_file(out, csv_with_provenance(cfg, field_csv(f)));
  std::printf("sample: N=%d mass=%s -> %s\n", N, sci(f.mass(), 6).c_str(), out.string().c_str());
  return kExitPass;
}

int cmd_evolve(const RunConfig& cfg) {
  FlowSpec spec;
  spec.variant = flow_variant_from_string(cfg.get("evolve.variant"));
  spec.cutoff = static_cast<int>(cfg.get_int("evolve.N"));
  spec.t_end = cfg.get_double("evolve.t");
  spec.dt = cfg.get_double("evolve.dt");
  spec.sample_interval = cfg.get_double("evolve.interval");
  spec.step_tolerance = cfg.get_double("evolve.tolerance");
  spec.damping = cfg.get_double("evolve.damping");
  if (spec.cutoff < 0) throw ConfigError("evolve.N must be >= 0");
  const GaussianEnsemble e(cfg.seed(), spec.cutoff, cfg.get_double("evolve.alpha"));
  const SpectralField f0 = sample_data(e);
  TrajectoryRecord rec;
  try {
    rec = evolve_truncated(f0, spec, &e);
  } catch (const StepSizeError& ex) {
    throw UsageError(std::string("step size rejected: ") + ex.what());
  }
  const fs::path out = fs::path(cfg.out_dir()) / "trajectory.csv";
  write_file(out, trajectory_dump(cfg, rec));
  const double drift = std::abs(rec.final_state().mass() - f0.mass()) / std::max(f0.mass(), 1e-300);
  std::printf("evolve: %s N=%d t=%s dt=%s steps=%ld mass drift=%s -> %s\n", to_string(spec.variant).c_str(),
              spec.cutoff, sci(spec.t_end).c_str(), sci(rec.dt).c_str(), rec.steps, sci(drift).c_str(),
              out.string().c_str());
  return kExitPass;
}

int cmd_gauge(const RunConfig& cfg) {
  const bool random = cfg.get("gauge.kind") == "random";
  FlowSpec spec;
  spec.cutoff = static_cast<int>(cfg.get_int("gauge.N"));
  spec.t_end = cfg.get_double("gauge.t");
  spec.sample_interval = cfg.get_double("gauge.interval");
  spec.step_tolerance = cfg.get_double("gauge.tolerance");
  if (spec.cutoff < 0) throw ConfigError("gauge.N must be >= 0");
  const GaussianEnsemble e(cfg.seed(), spec.cutoff, cfg.get_double("gauge.alpha"));
  const SpectralField f0 = sample_data(e);

  // deterministic: G(original) against renormalized; random: J(renormalized) against gauged-truncated.
  spec.variant = random ? FlowVariant::renormalized : FlowVariant::original;
  const TrajectoryRecord a = evolve_truncated(f0, spec);
  spec.variant = random ? FlowVariant::gauged_truncated : FlowVariant::renormalized;
  const TrajectoryRecord b = evolve_truncated(f0, spec, &e);
  const TrajectoryRecord ga = random ? gauge_random(a, e, spec.cutoff, GaugeDirection::forward)
                                     : gauge_deterministic(a, GaugeDirection::forward);
  double gap = 0.0;
  for (std::size_t k = 0; k < ga.size() && k < b.size(); ++k) gap = std::max(gap, l2_distance(ga.states[k], b.states[k]));

  ExperimentReport rep;
  rep.kind = "gauge";
  rep.spec = {{"kind", cfg.get("gauge.kind")}, {"N", spec.cutoff}, {"t", spec.t_end}};
  rep.stats = {{"sup_l2_gap", gap}, {"samples", ga.size()}};
  rep.verdicts.push_back(make_verdict("sup_l2_gap", gap, "<", cfg.get_double("gauge.threshold")));
  const fs::path out = fs::path(cfg.out_dir()) / "report.json";
  write_file(out, report_json(cfg, rep));
  std::printf("gauge %s: sup L2 gap %s (threshold %s) %s -> %s\n", cfg.get("gauge.kind").c_str(), sci(gap).c_str(),
              sci(cfg.get_double("gauge.threshold")).c_str(), rep.passed() ? "PASS" : "FAIL", out.string().c_str());
  return rep.passed() ? kExitPass : kExitFail;
}

int cmd_functional(const RunConfig& cfg) {
  SFunctionalSpec spec;
  spec.j = static_cast<int>(cfg.get_int("functional.j"));
  spec.s = cfg.get_double("functional.s");
  spec.b = cfg.get_double("functional.b");
  spec.delta = cfg.get_double("functional.delta");
  spec.box = static_cast<int>(cfg.get_int("functional.box"));
  const auto M = cfg.get_u64("functional.samples");
  if (M < 2) throw ConfigError("functional.samples must be >= 2");
  if (spec.j < 1 || spec.j > 3) throw ConfigError("functional.j must be 1, 2 or 3");
  if (spec.box < 0) throw ConfigError("functional.box must be >= 0");
  if (!(spec.delta > 0.0)) throw ConfigError("functional.delta must be > 0");

  std::vector<double> values(M);
  for (std::uint64_t i = 0; i < M; ++i)
    values[i] = s_functional(spec, GaussianEnsemble(derive_trajectory_seed(cfg.seed(), i), spec.box));

  const std::string params = std::to_string(spec.j) + "," + format_double(spec.s) + "," + format_double(spec.b) +
                             "," + format_double(spec.delta) + "," + std::to_string(spec.box);
  std::string rows = "j,s,b,delta,box,sample,value\n";
  for (std::uint64_t i = 0; i < M; ++i) rows += params + "," + std::to_string(i) + "," + format_double(values[i]) + "\n";
  const double m = mean(values), se = std_error(values);
  const std::string summary = "j,s,b,delta,box,samples,value,std_error\n" + params + "," + std::to_string(M) + "," +
                              format_double(m) + "," + format_double(se) + "\n";
  const fs::path dir(cfg.out_dir());
  write_file(dir / "functional_samples.csv", csv_with_provenance(cfg, rows));
  write_file(dir / "functional.csv", csv_with_provenance(cfg, summary));
  std::printf("functional: S_%d mean %s +- %s over %llu draws -> %s\n", spec.j, sci(m).c_str(), sci(se).c_str(),
              static_cast<unsigned long long>(M), (dir / "functional.csv").string().c_str());
  return kExitPass;
}

int cmd_study(const RunConfig& cfg) {
  const StudySpec spec = study_spec_from(cfg);
  const ExperimentReport rep = run_study(spec);
  const fs::path dir(cfg.out_dir());
  write_file(dir / "report.json", report_json(cfg, rep));
  write_file(dir / "cells.csv", csv_with_provenance(cfg, rep.cells.to_string()));
  long passed = 0;
  for (const auto& v : rep.verdicts) passed += v.passed;
  std::printf("study %s: %s (%ld/%zu verdicts, %ld failures) -> %s\n", rep.kind.c_str(), rep.passed() ? "PASS" : "FAIL",
              passed, rep.verdicts.size(), rep.failures, (dir / "report.json").string().c_str());
  return rep.passed() ? kExitPass : kExitFail;
}

int cmd_phase_check(const RunConfig& cfg) {
  const long box = cfg.get_int("phase-check.box");
  if (box < 0 || box > kPhaseModeLimit) throw ConfigError("phase-check.box must lie in [0, 100000]");
  const PhaseCheckResult r = phase_check(box);
  ExperimentReport rep;
  rep.kind = "phase-check";
  rep.spec = {{"box", box}};
  rep.stats = {{"tuples", r.tuples}, {"mismatches", r.mismatches}};
  rep.verdicts.push_back(make_verdict("mismatches", static_cast<double>(r.mismatches), "==", 0.0));
  write_file(fs::path(cfg.out_dir()) / "report.json", report_json(cfg, rep));
  std::printf("phase-check: %llu mismatches / all tuples (%llu with |n_i| <= %ld)\n",
              static_cast<unsigned long long>(r.mismatches), static_cast<unsigned long long>(r.tuples), box);
  return r.mismatches == 0 ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Samplers, flows, functionals and Monte Carlo studies for the renormalized 4NLS with white-noise data"};
  app.require_subcommand(1);
  std::map<std::string, std::unique_ptr<Command>> commands;
  for (const auto& name : known_commands()) {
    auto c = std::make_unique<Command>();
    c->app = app.add_subcommand(name);
    c->app->add_option("--config", c->config_path, "key = value config file (flags override it)")
        ->check(CLI::ExistingFile);
    for (const auto& k : keys_for(name)) {
      const std::string flag = k.name.substr(k.name.find('.') + 1);
      std::string help = k.help;
      if (!k.fallback.empty()) help += " [" + k.fallback + "]";
      if (!k.choices.empty()) {
        help += " {";
        for (std::size_t i = 0; i < k.choices.size(); ++i) help += (i ? "," : "") + k.choices[i];
        help += "}";
      }
      c->options[k.name] = c->app->add_option("--" + flag, c->flags[k.name], help);
    }
    commands[name] = std::move(c);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  std::string name;
  for (const auto& [n, c] : commands)
    if (c->app->parsed()) name = n;

  try {
    const RunConfig cfg = resolve(name, *commands.at(name));
    apply_threads(cfg);
    if (name == "sample") return cmd_sample(cfg);
    if (name == "evolve") return cmd_evolve(cfg);
    if (name == "gauge") return cmd_gauge(cfg);
    if (name == "functional") return cmd_functional(cfg);
    if (name == "study") return cmd_study(cfg);
    if (name == "phase-check") return cmd_phase_check(cfg);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "wnls %s: %s\n", name.c_str(), e.what());
    return kExitUsage;
  } catch (const std::invalid_argument& e) {  // ConfigError and rejected parameters
    std::fprintf(stderr, "wnls %s: %s\n", name.c_str(), e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "wnls %s: %s\n", name.c_str(), e.what());
    return kExitFail;
  }
  return kExitUsage;
}
