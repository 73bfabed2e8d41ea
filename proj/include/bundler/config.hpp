#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bundler/liouville.hpp"
#include "bundler/phonon.hpp"

namespace bundler {

struct GridAxis {
  std::string name;
  double start = 0;
  double stop = 0;
  int count = 2;
  bool log = false;
  std::vector<double> values() const;
};

enum class DriveMode { tls, cavity };

struct ScenarioConfig {
  SystemParams params;
  std::optional<PhononEnvironment> env;
  DriveMode drive_mode = DriveMode::tls;
  std::vector<GridAxis> sweep;
  std::vector<std::string> metrics;  // sweep columns
  std::vector<std::string> outputs;
  std::string out_dir = "out";
  std::string preset;
  double truncation_tol = 1e-8;
  double window = 0;  // filter half-width, 0 selects gamma_a / 2
  std::string omega_grid;  // start:stop:step for spectrum output
  int threads = 0;
  bool delta_a_at_resonance = false;  // "params.delta_a": "resonance" keeps delta_a = 2R/n

  // Flat dotted-key view, the form written to manifests.
  std::map<std::string, std::string> flat() const;
};

// Flattening of nested objects into dotted keys; arrays stay values.
std::map<std::string, std::string> flatten_json(const std::string& text);

// Dotted-key JSON that parse_config maps back to the same configuration.
std::string config_json(const ScenarioConfig& cfg);

ScenarioConfig parse_config(const std::string& json_text);
ScenarioConfig load_config(const std::string& path);
// key=value, with the same keys accepted in files
void apply_override(ScenarioConfig& cfg, const std::string& assignment);

// Sets one parameter by config key; sweep axes go through here.
void set_parameter(ScenarioConfig& cfg, const std::string& key, double value);
bool is_axis_key(const std::string& key);

std::vector<double> parse_range(const std::string& text);  // start:stop:step
std::vector<double> parse_list(const std::string& text);   // comma separated

int worker_count(int requested);

}  // namespace bundler
