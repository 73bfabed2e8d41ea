#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "bundler/config.hpp"

namespace bundler {

const char* version();

using Files = std::vector<std::filesystem::path>;

// Manifest recording the command, its arguments, the code version and the
// resolved configuration. Loading it with load_config reproduces the run.
std::string manifest_json(const std::string& command, const ScenarioConfig* cfg,
                          const std::map<std::string, std::string>& arguments, const Files& files);

// Each command writes into cfg.out_dir and returns the files written, the
// manifest last.
Files command_metrics(const ScenarioConfig& cfg);
Files command_sweep(const ScenarioConfig& cfg);
Files command_spectrum(ScenarioConfig cfg, const std::string& omega_range);
Files command_phonon_rates(const ScenarioConfig& cfg, const std::vector<double>& temperatures);

}  // namespace bundler
