#include "bundler/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "bundler/io.hpp"
#include "bundler/metrics.hpp"

namespace bundler {

using json = nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& msg) { fail(ErrorKind::config, msg); }

void flatten(const json& j, const std::string& prefix, std::map<std::string, json>& out) {
  if (j.is_object() && !(prefix == "sweep.axes")) {
    for (auto it = j.begin(); it != j.end(); ++it)
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    return;
  }
  if (out.count(prefix)) bad("duplicate config key '" + prefix + "'");
  out[prefix] = j;
}

double number(const json& v, const std::string& key) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    char* end = nullptr;
    double x = std::strtod(s.c_str(), &end);
    if (end != s.c_str() && *end == '\0') return x;
  }
  bad("config key '" + key + "' expects a number");
}

std::string text(const json& v, const std::string& key) {
  if (!v.is_string()) bad("config key '" + key + "' expects a string");
  return v.get<std::string>();
}

std::vector<std::string> strings(const json& v, const std::string& key) {
  std::vector<std::string> out;
  if (v.is_string()) {
    std::stringstream ss(v.get<std::string>());
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) out.push_back(item);
    return out;
  }
  if (!v.is_array()) bad("config key '" + key + "' expects a list of strings");
  for (const auto& e : v) out.push_back(text(e, key));
  return out;
}

bool boolean(const json& v, const std::string& key) {
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_string() && (v == "true" || v == "false")) return v == "true";
  bad("config key '" + key + "' expects true or false");
}

const std::vector<std::string>& param_keys() {
  static const std::vector<std::string> keys{"g",           "omega",     "delta_a",      "delta",
                                             "gamma_a",     "gamma_sigma", "gamma_phi", "cavity_drive"};
  return keys;
}

double* param_slot(SystemParams& p, const std::string& name) {
  if (name == "g") return &p.g;
  if (name == "omega") return &p.omega;
  if (name == "delta_a") return &p.delta_a;
  if (name == "delta") return &p.delta;
  if (name == "gamma_a") return &p.gamma_a;
  if (name == "gamma_sigma") return &p.gamma_sigma;
  if (name == "gamma_phi") return &p.gamma_phi;
  if (name == "cavity_drive") return &p.cavity_drive;
  return nullptr;
}

PhononEnvironment& env_of(ScenarioConfig& cfg) {
  if (!cfg.env) cfg.env = PhononEnvironment{};
  return *cfg.env;
}

double* phonon_slot(PhononEnvironment& e, const std::string& name) {
  if (name == "temperature") return &e.temperature;
  if (name == "alpha_p") return &e.alpha_p;
  if (name == "omega_b") return &e.omega_b;
  if (name == "dephasing_slope") return &e.dephasing_slope_ueV_per_K;
  if (name == "hbar_g_ueV") return &e.hbar_g_ueV;
  return nullptr;
}

GridAxis parse_axis(const json& a) {
  if (!a.is_object()) bad("sweep.axes entries must be objects");
  GridAxis ax;
  for (auto it = a.begin(); it != a.end(); ++it) {
    const std::string k = it.key();
    if (k == "name") ax.name = text(it.value(), "sweep.axes.name");
    else if (k == "start") ax.start = number(it.value(), "sweep.axes.start");
    else if (k == "stop") ax.stop = number(it.value(), "sweep.axes.stop");
    else if (k == "count") ax.count = static_cast<int>(number(it.value(), "sweep.axes.count"));
    else if (k == "scale") {
      auto s = text(it.value(), "sweep.axes.scale");
      if (s != "lin" && s != "log") bad("sweep axis scale must be lin or log");
      ax.log = s == "log";
    } else bad("unknown sweep axis field '" + k + "'");
  }
  if (!is_axis_key(ax.name)) bad("sweep axis '" + ax.name + "' is not a known parameter");
  if (ax.count < 2) bad("sweep axis '" + ax.name + "' needs count >= 2");
  if (ax.log && !(ax.start > 0 && ax.stop > 0)) bad("log sweep axis '" + ax.name + "' needs positive bounds");
  return ax;
}

void refresh_resonance(ScenarioConfig& cfg) {
  if (cfg.delta_a_at_resonance) cfg.params.delta_a = cfg.params.resonance();
}

double hbar_g(const ScenarioConfig& cfg, const std::map<std::string, json>& keys) {
  auto it = keys.find("phonon.hbar_g_ueV");
  if (it != keys.end()) return number(it->second, it->first);
  if (!cfg.preset.empty()) return find_preset(cfg.preset).hbar_g_ueV;
  bad("absolute (_ueV) entries need a preset or phonon.hbar_g_ueV");
}

void apply_keys(ScenarioConfig& cfg, const std::map<std::string, json>& keys) {
  // the preset goes first so explicit entries override it
  if (auto it = keys.find("preset"); it != keys.end()) {
    cfg.preset = text(it->second, "preset");
    const auto& pr = find_preset(cfg.preset);
    cfg.params.gamma_a = pr.gamma_a;
    cfg.params.gamma_sigma = pr.gamma_sigma;
    if (cfg.env) cfg.env->hbar_g_ueV = pr.hbar_g_ueV;
  }
  for (const auto& [key, v] : keys) {
    if (key == "preset") continue;
    if (key.rfind("params.", 0) == 0) {
      std::string name = key.substr(7);
      if (name == "n") {
        double n = number(v, key);
        if (n != std::floor(n)) bad("params.n must be an integer");
        cfg.params.n = static_cast<int>(n);
        continue;
      }
      if (name == "delta_a" && v.is_string() && v == "resonance") {
        cfg.delta_a_at_resonance = true;
        continue;
      }
      bool absolute = name.size() > 4 && name.compare(name.size() - 4, 4, "_ueV") == 0;
      if (absolute) name = name.substr(0, name.size() - 4);
      double* slot = param_slot(cfg.params, name);
      if (!slot) bad("unknown config key '" + key + "'");
      double x = number(v, key);
      *slot = absolute ? x / hbar_g(cfg, keys) : x;
      if (name == "delta_a") cfg.delta_a_at_resonance = false;
    } else if (key.rfind("phonon.", 0) == 0) {
      std::string name = key.substr(7);
      if (name == "enabled") {
        if (boolean(v, key)) env_of(cfg);
        continue;
      }
      double* slot = phonon_slot(env_of(cfg), name);
      if (!slot) bad("unknown config key '" + key + "'");
      *slot = number(v, key);
    } else if (key == "drive_mode") {
      auto m = text(v, key);
      if (m != "tls" && m != "cavity") bad("drive_mode must be tls or cavity");
      cfg.drive_mode = m == "tls" ? DriveMode::tls : DriveMode::cavity;
    } else if (key == "sweep.axes") {
      if (!v.is_array()) bad("sweep.axes must be a list");
      cfg.sweep.clear();
      for (const auto& a : v) cfg.sweep.push_back(parse_axis(a));
    } else if (key == "sweep.metrics") {
      cfg.metrics = strings(v, key);
    } else if (key == "outputs") {
      cfg.outputs = strings(v, key);
      for (const auto& o : cfg.outputs)
        if (o != "spectrum" && o != "lines" && o != "metrics" && o != "sweep_table")
          bad("unknown output '" + o + "'");
    } else if (key == "out_dir") {
      cfg.out_dir = text(v, key);
    } else if (key == "truncation.tol") {
      cfg.truncation_tol = number(v, key);
    } else if (key == "filter.window") {
      cfg.window = number(v, key);
    } else if (key == "spectrum.omega") {
      cfg.omega_grid = text(v, key);
    } else if (key == "threads") {
      cfg.threads = static_cast<int>(number(v, key));
    } else {
      bad("unknown config key '" + key + "'");
    }
  }
  if (cfg.env && keys.find("phonon.enabled") != keys.end() && !boolean(keys.at("phonon.enabled"), "phonon.enabled"))
    cfg.env.reset();
  if (cfg.env && !cfg.preset.empty() && !keys.count("phonon.hbar_g_ueV"))
    cfg.env->hbar_g_ueV = find_preset(cfg.preset).hbar_g_ueV;
  refresh_resonance(cfg);
  if (!(cfg.truncation_tol > 0 && cfg.truncation_tol <= 1e-2)) bad("truncation.tol must be in (0, 1e-2]");
  if (cfg.window < 0) bad("filter.window must be >= 0");
  try {
    cfg.params.validate();
    if (cfg.env) cfg.env->validate();
  } catch (const Error& e) {
    bad(std::string("invalid parameters: ") + e.what());
  }
}

std::map<std::string, json> flat_keys(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    bad(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) bad("config must be a JSON object");
  if (j.contains("bundler_manifest")) {
    if (!j.contains("config") || !j["config"].is_object()) bad("manifest carries no config");
    j = j["config"];
  }
  std::map<std::string, json> keys;
  flatten(j, "", keys);
  return keys;
}

}  // namespace

std::vector<double> GridAxis::values() const {
  std::vector<double> v(count);
  for (int i = 0; i < count; ++i) {
    double t = double(i) / (count - 1);
    v[i] = log ? start * std::pow(stop / start, t) : start + (stop - start) * t;
  }
  v.back() = stop;
  return v;
}

std::map<std::string, std::string> flatten_json(const std::string& text) {
  std::map<std::string, std::string> out;
  for (const auto& [k, v] : flat_keys(text)) out[k] = v.is_string() ? v.get<std::string>() : v.dump();
  return out;
}

ScenarioConfig parse_config(const std::string& json_text) {
  ScenarioConfig cfg;
  apply_keys(cfg, flat_keys(json_text));
  return cfg;
}

ScenarioConfig load_config(const std::string& path) { return parse_config(read_text(path)); }

void apply_override(ScenarioConfig& cfg, const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) bad("override '" + assignment + "' is not key=value");
  const std::string key = assignment.substr(0, eq), value = assignment.substr(eq + 1);
  json v;
  try {
    v = json::parse(value);
  } catch (const json::parse_error&) {
    v = value;
  }
  std::map<std::string, json> keys{{key, v}};
  if (key == "params.delta_a" && !(v.is_string() && v == "resonance")) cfg.delta_a_at_resonance = false;
  apply_keys(cfg, keys);
}

bool is_axis_key(const std::string& key) {
  if (key.rfind("params.", 0) == 0) {
    auto name = key.substr(7);
    return std::find(param_keys().begin(), param_keys().end(), name) != param_keys().end();
  }
  static const std::vector<std::string> phonon{"phonon.temperature", "phonon.alpha_p", "phonon.omega_b",
                                               "phonon.dephasing_slope"};
  return std::find(phonon.begin(), phonon.end(), key) != phonon.end();
}

void set_parameter(ScenarioConfig& cfg, const std::string& key, double value) {
  if (!is_axis_key(key)) bad("'" + key + "' is not a sweepable parameter");
  if (key.rfind("params.", 0) == 0) {
    auto name = key.substr(7);
    *param_slot(cfg.params, name) = value;
    if (name == "delta_a") cfg.delta_a_at_resonance = false;
  } else {
    *phonon_slot(env_of(cfg), key.substr(7)) = value;
  }
  refresh_resonance(cfg);
}

std::map<std::string, std::string> ScenarioConfig::flat() const {
  std::map<std::string, std::string> m;
  const auto& p = params;
  m["params.g"] = format_double(p.g);
  m["params.omega"] = format_double(p.omega);
  m["params.delta_a"] = format_double(p.delta_a);
  m["params.delta"] = format_double(p.delta);
  m["params.gamma_a"] = format_double(p.gamma_a);
  m["params.gamma_sigma"] = format_double(p.gamma_sigma);
  m["params.gamma_phi"] = format_double(p.gamma_phi);
  m["params.cavity_drive"] = format_double(p.cavity_drive);
  m["params.n"] = std::to_string(p.n);
  if (env) {
    m["phonon.temperature"] = format_double(env->temperature);
    m["phonon.alpha_p"] = format_double(env->alpha_p);
    m["phonon.omega_b"] = format_double(env->omega_b);
    m["phonon.dephasing_slope"] = format_double(env->dephasing_slope_ueV_per_K);
    m["phonon.hbar_g_ueV"] = format_double(env->hbar_g_ueV);
  }
  m["drive_mode"] = drive_mode == DriveMode::tls ? "tls" : "cavity";
  if (!preset.empty()) m["preset"] = preset;
  m["truncation.tol"] = format_double(truncation_tol);
  if (window > 0) m["filter.window"] = format_double(window);
  return m;
}

std::string config_json(const ScenarioConfig& cfg) {
  json j = json::object();
  for (const auto& [k, v] : cfg.flat()) {
    if (k == "preset" || k == "drive_mode") {
      j[k] = v;
      continue;
    }
    if (k == "params.n") j[k] = std::stoi(v);
    else j[k] = std::strtod(v.c_str(), nullptr);
  }
  if (!cfg.sweep.empty()) {
    json axes = json::array();
    for (const auto& a : cfg.sweep)
      axes.push_back({{"name", a.name}, {"start", a.start}, {"stop", a.stop}, {"count", a.count},
                      {"scale", a.log ? "log" : "lin"}});
    j["sweep.axes"] = axes;
  }
  if (!cfg.metrics.empty()) j["sweep.metrics"] = cfg.metrics;
  if (!cfg.outputs.empty()) j["outputs"] = cfg.outputs;
  if (!cfg.omega_grid.empty()) j["spectrum.omega"] = cfg.omega_grid;
  j["out_dir"] = cfg.out_dir;
  return j.dump(2);
}

std::vector<double> parse_range(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) {
    char* end = nullptr;
    double x = std::strtod(item.c_str(), &end);
    if (item.empty() || *end != '\0') bad("range '" + text + "' is not start:stop:step");
    parts.push_back(x);
  }
  if (parts.size() != 3) bad("range '" + text + "' is not start:stop:step");
  const double a = parts[0], b = parts[1], h = parts[2];
  if (!(h > 0) || b < a) bad("range '" + text + "' needs step > 0 and stop >= start");
  const long count = std::lround(std::floor((b - a) / h + 1e-9)) + 1;
  if (count > 1000000) bad("range '" + text + "' has too many points");
  std::vector<double> out(count);
  for (long i = 0; i < count; ++i) out[i] = a + i * h;
  return out;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    char* end = nullptr;
    double x = std::strtod(item.c_str(), &end);
    if (item.empty() || *end != '\0') bad("list '" + text + "' has a non-numeric entry");
    out.push_back(x);
  }
  if (out.empty()) bad("empty list");
  return out;
}

int worker_count(int requested) {
  int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* cap = std::getenv("BUNDLER_THREADS")) {
    char* end = nullptr;
    long c = std::strtol(cap, &end, 10);
    if (end == cap || *end != '\0' || c < 1) bad("BUNDLER_THREADS must be a positive integer");
    n = std::min<long>(n, c);
  }
  return n;
}

}  // namespace bundler
