#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "phdg/forms.hpp"
#include "phdg/mesh.hpp"
#include "phdg/verification.hpp"

namespace phdg {

/// Invalid or unknown configuration entries; maps to exit status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Experiment { example1, example2, custom };
enum class Study { single, sweep_h, sweep_tau };

struct RunConfig {
  Experiment experiment = Experiment::example1;
  /// Problem data: example1 (manufactured) or example2; custom runs choose.
  CaseId data = CaseId::example1;
  Study study = Study::single;

  ModelParams params;  // tau is derived
  int degree = 1;
  /// Experiments run on the falling diagonal unless configured otherwise.
  Diagonal diagonal = Diagonal::falling;

  double final_time = 0.2;
  int mesh_level = 4;                  // h = 2^-level (single / sweep-tau)
  std::vector<int> mesh_levels{2, 3, 4};  // sweep-h
  int steps = 820;                     // N for single / sweep-h
  std::vector<int> steps_list{2, 4, 8, 16};  // sweep-tau, from tau = T/N

  std::string output_dir = "out";
  bool store_fields = false;
  std::vector<double> store_times;  // empty: final time only
  bool spd_diagnostics = true;
  bool energy_monitor = true;
  bool static_condensation = true;
  double blowup_bound = 1e6;

  int threads = 1;
  unsigned long long seed = 1;

  /// Throws ConfigError naming the field.
  void validate() const;
};

/// Keys accepted in a config document (also the manifest schema).
const std::vector<std::string>& config_keys();

/// Parse a key = value document (TOML subset: `#` comments, `[section]`
/// headers, `[a, b]` lists, `a/b` fractions in numeric fields). Top-level
/// keys apply to every experiment; a `[<experiment>]` section overrides them
/// for that experiment only. Defaults come from the experiment's table.
/// `overrides` holds top-level entries that win over everything in `text`.
RunConfig parse_config(const std::string& text, const std::string& overrides = "");
RunConfig load_config(const std::string& path);

/// Defaults of an experiment before any user key is applied.
RunConfig default_config(Experiment e, double epsilon);

std::string to_string(Experiment e);
std::string to_string(Study s);

/// Steps for a final time and step size; ConfigError unless T/tau is an integer.
int steps_for(double final_time, double tau);

}  // namespace phdg
