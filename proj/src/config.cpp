#include "phdg/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"

namespace phdg {

namespace {

using Entries = std::map<std::string, std::vector<std::string>>;

std::string join(const std::vector<std::string>& v, const char* sep = ", ") {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
  return s;
}

double to_number(const std::string& key, const std::string& text) {
  auto parse = [&](const std::string& s) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != s.size()) throw ConfigError("field '" + key + "': not a number: '" + text + "'");
    return v;
  };
  const auto slash = text.find('/');
  if (slash == std::string::npos) return parse(text);
  const double den = parse(text.substr(slash + 1));
  if (den == 0.0) throw ConfigError("field '" + key + "': zero denominator in '" + text + "'");
  return parse(text.substr(0, slash)) / den;
}

int to_int(const std::string& key, const std::string& text) {
  const double v = to_number(key, text);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError("field '" + key + "': not an integer: '" + text + "'");
  return static_cast<int>(v);
}

bool to_bool(const std::string& key, const std::string& text) {
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError("field '" + key + "': not a boolean: '" + text + "'");
}

const std::string& single(const std::string& key, const std::vector<std::string>& v) {
  if (v.size() != 1) throw ConfigError("field '" + key + "' expects one value");
  return v.front();
}

Experiment to_experiment(const std::string& s) {
  if (s == "example1") return Experiment::example1;
  if (s == "example2") return Experiment::example2;
  if (s == "custom") return Experiment::custom;
  throw ConfigError("field 'experiment': unknown experiment '" + s + "' (example1 | example2 | custom)");
}

Study to_study(const std::string& s) {
  if (s == "single" || s == "run") return Study::single;
  if (s == "sweep-h") return Study::sweep_h;
  if (s == "sweep-tau") return Study::sweep_tau;
  throw ConfigError("field 'study': unknown study '" + s + "' (single | sweep-h | sweep-tau)");
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "experiment",   "data",          "study",          "epsilon",         "nu",
      "alpha",        "beta",          "degree",         "diagonal",        "final_time",
      "mesh_level",   "mesh_levels",   "steps",          "tau",             "steps_list",
      "tau_list",     "output_dir",    "store_fields",   "store_times",     "spd_diagnostics",
      "energy_monitor", "static_condensation", "blowup_bound", "threads",   "seed"};
  return keys;
}

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::example1: return "example1";
    case Experiment::example2: return "example2";
    default: return "custom";
  }
}

std::string to_string(Study s) {
  switch (s) {
    case Study::single: return "single";
    case Study::sweep_h: return "sweep-h";
    default: return "sweep-tau";
  }
}

int steps_for(double final_time, double tau) {
  if (!(tau > 0.0) || !(final_time > 0.0)) throw ConfigError("time step and final time must be > 0");
  const double n = final_time / tau;
  const double r = std::round(n);
  if (r < 1.0 || std::abs(n - r) > 1e-9 * std::max(1.0, r))
    throw ConfigError("T / tau = " + std::to_string(n) + " is not an integer; give the step count N instead");
  return static_cast<int>(r);
}

RunConfig default_config(Experiment e, double epsilon) {
  RunConfig c;
  c.experiment = e;
  if (e == Experiment::example2) {
    c.data = CaseId::example2;
    c.params.nu = 1e-2;
    c.params.epsilon = 1e-4;
    c.params.alpha = 600.0;
    c.params.beta = 600.0;
    c.final_time = 1.0;
    c.mesh_level = 6;
    c.mesh_levels = {6};
    c.steps = 100;
    c.steps_list = {100};
    return c;
  }
  c.data = CaseId::example1;
  c.params.nu = 1.0;
  c.params.epsilon = epsilon;
  c.params.alpha = 8.0;
  // Small positive diffusion needs the larger conformation penalty.
  c.params.beta = (epsilon > 0.0 && epsilon < 1.0) ? 300.0 : 10.0;
  c.final_time = 0.2;
  return c;
}

void RunConfig::validate() const {
  ModelParams p = params;
  p.tau = 1.0;
  try {
    p.validate();
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  }
  auto fail = [](const std::string& f, const std::string& why) { throw ConfigError("field '" + f + "': " + why); };
  if (degree < 1 || degree > 2) fail("degree", "must be 1 or 2");
  if (!(final_time > 0.0)) fail("final_time", "must be > 0");
  if (mesh_level < 0 || mesh_level > 10) fail("mesh_level", "must be in [0, 10]");
  if (mesh_levels.empty()) fail("mesh_levels", "must be nonempty");
  for (int l : mesh_levels)
    if (l < 0 || l > 10) fail("mesh_levels", "entries must be in [0, 10]");
  if (steps < 1) fail("steps", "must be >= 1");
  if (steps_list.empty()) fail("steps_list", "must be nonempty");
  for (int n : steps_list)
    if (n < 1) fail("steps_list", "entries must be >= 1");
  for (double t : store_times)
    if (!(t >= 0.0) || t > final_time * (1.0 + 1e-12)) fail("store_times", "entries must lie in [0, T]");
  if (!(blowup_bound > 0.0)) fail("blowup_bound", "must be > 0");
  if (threads < 1) fail("threads", "must be >= 1");
  if (output_dir.empty()) fail("output_dir", "must be nonempty");
  if (data == CaseId::example2 && study != Study::single)
    fail("study", "example2 data has no exact solution; only single runs are supported");
}

namespace {

struct Collected {
  Entries global;
  std::map<std::string, Entries> sections;
};

Collected collect(const std::string& text) {
  std::istringstream in(text);
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_config(in);
  } catch (const CLI::Error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }

  const std::set<std::string> known(config_keys().begin(), config_keys().end());
  Collected col;
  Entries& global = col.global;
  std::map<std::string, Entries>& sections = col.sections;
  std::vector<std::string> unknown;
  for (const CLI::ConfigItem& it : items) {
    if (it.name == "++" || it.name == "--") continue;  // section markers
    if (it.parents.size() > 1) {
      unknown.push_back(join(it.parents, ".") + "." + it.name);
      continue;
    }
    if (!known.count(it.name)) {
      unknown.push_back(it.parents.empty() ? it.name : it.parents[0] + "." + it.name);
      continue;
    }
    if (it.parents.empty())
      global[it.name] = it.inputs;
    else
      sections[it.parents[0]][it.name] = it.inputs;
  }
  for (const auto& [name, entries] : sections) {
    (void)entries;
    if (name != "example1" && name != "example2" && name != "custom") unknown.push_back("[" + name + "]");
  }
  if (!unknown.empty()) throw ConfigError("unknown config keys: " + join(unknown));
  return col;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& overrides) {
  Collected col = collect(text);
  Entries& global = col.global;
  std::map<std::string, Entries>& sections = col.sections;
  const Collected over = collect(overrides);
  if (!over.sections.empty()) throw ConfigError("override entries cannot contain sections");
  for (const auto& [k, v] : over.global)
    if (k == "experiment") global[k] = v;

  Experiment exp = Experiment::example1;
  if (global.count("experiment")) {
    exp = to_experiment(single("experiment", global["experiment"]));
  } else if (sections.size() == 1) {
    exp = to_experiment(sections.begin()->first);
  }
  Entries e = global;
  if (sections.count(to_string(exp)))
    for (const auto& [k, v] : sections[to_string(exp)]) e[k] = v;
  if (e.count("experiment") && to_experiment(single("experiment", e["experiment"])) != exp)
    throw ConfigError("field 'experiment': section overrides the experiment id");
  for (const auto& [k, v] : over.global) {
    // steps/tau (and their lists) are alternatives: an override of one drops the other.
    if (k == "steps") e.erase("tau");
    if (k == "tau") e.erase("steps");
    if (k == "steps_list") e.erase("tau_list");
    if (k == "tau_list") e.erase("steps_list");
    e[k] = v;
  }

  double eps = 1.0;
  if (e.count("epsilon")) eps = to_number("epsilon", single("epsilon", e["epsilon"]));
  RunConfig c;
  if (exp == Experiment::custom) {
    CaseId data = CaseId::example1;
    if (e.count("data")) {
      const std::string d = single("data", e["data"]);
      if (d == "example1")
        data = CaseId::example1;
      else if (d == "example2")
        data = CaseId::example2;
      else
        throw ConfigError("field 'data': unknown data '" + d + "' (example1 | example2)");
    }
    c = default_config(data == CaseId::example1 ? Experiment::example1 : Experiment::example2, eps);
    c.experiment = Experiment::custom;
    c.data = data;
  } else {
    if (e.count("data")) throw ConfigError("field 'data': only valid for the custom experiment");
    c = default_config(exp, eps);
  }

  auto num = [&](const char* k, double& slot) {
    if (e.count(k)) slot = to_number(k, single(k, e[k]));
  };
  auto integer = [&](const char* k, int& slot) {
    if (e.count(k)) slot = to_int(k, single(k, e[k]));
  };
  auto flag = [&](const char* k, bool& slot) {
    if (e.count(k)) slot = to_bool(k, single(k, e[k]));
  };

  if (e.count("study")) c.study = to_study(single("study", e["study"]));
  num("epsilon", c.params.epsilon);
  num("nu", c.params.nu);
  num("alpha", c.params.alpha);
  num("beta", c.params.beta);
  integer("degree", c.degree);
  if (e.count("diagonal")) {
    const std::string d = single("diagonal", e["diagonal"]);
    if (d == "falling")
      c.diagonal = Diagonal::falling;
    else if (d == "rising")
      c.diagonal = Diagonal::rising;
    else
      throw ConfigError("field 'diagonal': expected falling | rising, got '" + d + "'");
  }
  num("final_time", c.final_time);
  integer("mesh_level", c.mesh_level);
  if (e.count("mesh_levels")) {
    c.mesh_levels.clear();
    for (const std::string& s : e["mesh_levels"]) c.mesh_levels.push_back(to_int("mesh_levels", s));
  }
  if (e.count("steps") && e.count("tau")) throw ConfigError("field 'tau': give either steps or tau, not both");
  integer("steps", c.steps);
  if (e.count("tau")) c.steps = steps_for(c.final_time, to_number("tau", single("tau", e["tau"])));
  if (e.count("steps_list") && e.count("tau_list"))
    throw ConfigError("field 'tau_list': give either steps_list or tau_list, not both");
  if (e.count("steps_list")) {
    c.steps_list.clear();
    for (const std::string& s : e["steps_list"]) c.steps_list.push_back(to_int("steps_list", s));
  }
  if (e.count("tau_list")) {
    c.steps_list.clear();
    for (const std::string& s : e["tau_list"])
      c.steps_list.push_back(steps_for(c.final_time, to_number("tau_list", s)));
  }
  if (e.count("output_dir")) c.output_dir = single("output_dir", e["output_dir"]);
  flag("store_fields", c.store_fields);
  if (e.count("store_times")) {
    c.store_times.clear();
    for (const std::string& s : e["store_times"]) c.store_times.push_back(to_number("store_times", s));
  }
  flag("spd_diagnostics", c.spd_diagnostics);
  flag("energy_monitor", c.energy_monitor);
  flag("static_condensation", c.static_condensation);
  num("blowup_bound", c.blowup_bound);
  integer("threads", c.threads);
  if (e.count("seed")) {
    const int s = to_int("seed", single("seed", e["seed"]));
    if (s < 0) throw ConfigError("field 'seed': must be >= 0");
    c.seed = static_cast<unsigned long long>(s);
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

}  // namespace phdg
