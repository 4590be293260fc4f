// Command-line front end: run / sweep-h / sweep-tau / verify.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "phdg/config.hpp"
#include "phdg/properties.hpp"
#include "phdg/study.hpp"

using namespace phdg;

namespace {

struct Common {
  std::string config;
  std::string out;
  std::string experiment;
  int threads = 0;
  long long seed = -1;
  std::vector<std::string> sets;
};

void add_common(CLI::App* sub, Common& c, bool study) {
  sub->add_option("--config", c.config, "config file (key = value, [experiment] sections)")->check(CLI::ExistingFile);
  sub->add_option("--seed", c.seed, "seed for randomized tests")->check(CLI::NonNegativeNumber);
  if (!study) return;
  sub->add_option("--out", c.out, "output directory");
  sub->add_option("--threads", c.threads, "sweep points run concurrently")->check(CLI::PositiveNumber);
  sub->add_option("--experiment", c.experiment, "example1 | example2 | custom (overrides the config)");
  sub->add_option("--set", c.sets, "extra key=value entries, applied after the config file");
}

// File contents, then --experiment / --set entries as overrides.
RunConfig build_config(const Common& c, Study study) {
  std::string text;
  if (!c.config.empty()) {
    std::ifstream f(c.config);
    if (!f) throw ConfigError("cannot read config file '" + c.config + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    text = ss.str();
  }
  std::string over;
  if (!c.experiment.empty()) over += "experiment = \"" + c.experiment + "\"\n";
  for (const std::string& kv : c.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    over += kv.substr(0, eq) + " = " + kv.substr(eq + 1) + "\n";
  }
  RunConfig cfg = parse_config(text, over);
  cfg.study = study;
  if (!c.out.empty()) cfg.output_dir = c.out;
  if (c.threads > 0) cfg.threads = c.threads;
  if (c.seed >= 0) cfg.seed = static_cast<unsigned long long>(c.seed);
  cfg.validate();
  return cfg;
}

int verify(unsigned long long seed) {
  int failed = 0;
  for (const SuiteCheck& r : run_property_suites(seed)) {
    std::printf("%s  %-44s value %.3e  limit %.1e%s%s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.value,
                r.limit, r.detail.empty() ? "" : "  ", r.detail.c_str());
    failed += r.pass ? 0 : 1;
  }
  return failed == 0 ? kExitOk : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HDG solver for the diffusive Peterlin viscoelastic model"};
  app.set_version_flag("--version", code_version());
  app.require_subcommand(1);

  Common run_opts, sweep_h_opts, sweep_tau_opts, verify_opts;
  CLI::App* run = app.add_subcommand("run", "single run");
  CLI::App* sweep_h = app.add_subcommand("sweep-h", "spatial convergence sweep over mesh_levels");
  CLI::App* sweep_tau = app.add_subcommand("sweep-tau", "temporal convergence sweep over steps_list");
  CLI::App* ver = app.add_subcommand("verify", "randomized property suites");
  add_common(run, run_opts, true);
  add_common(sweep_h, sweep_h_opts, true);
  add_common(sweep_tau, sweep_tau_opts, true);
  add_common(ver, verify_opts, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (ver->parsed()) {
      unsigned long long seed = 1;
      if (!verify_opts.config.empty()) seed = load_config(verify_opts.config).seed;
      if (verify_opts.seed >= 0) seed = static_cast<unsigned long long>(verify_opts.seed);
      return verify(seed);
    }
    const Common& c = run->parsed() ? run_opts : sweep_h->parsed() ? sweep_h_opts : sweep_tau_opts;
    const Study study = run->parsed() ? Study::single : sweep_h->parsed() ? Study::sweep_h : Study::sweep_tau;
    const RunConfig cfg = build_config(c, study);
    const int code = run_study(cfg, std::cerr);
    if (code != kExitOk) std::cerr << "numerical failure; partial outputs in " << cfg.output_dir << "\n";
    return code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ArgumentError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
