#pragma once

#include <functional>
#include <string>
#include <vector>

#include "bundler/config.hpp"

namespace bundler {

// Runs task(i) for i in [0, count) on up to `threads` workers. The first
// exception escaping a task is rethrown after all workers finish.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& task);

const std::vector<std::string>& metric_names();
bool is_metric(const std::string& name);

// Parameters the physics sees for one configuration. In cavity mode the drive
// is replaced by the effective emitter drive g|alpha| of the displaced frame.
SystemParams effective_params(const ScenarioConfig& cfg);

struct PointResult {
  std::vector<double> coords;
  std::vector<double> values;  // NaN where the metric failed
  std::string errors;          // "metric: kind: message; ..." for failed metrics
};

// All requested metrics at the configuration as given; shared solves are
// computed once per point.
PointResult evaluate_point(const ScenarioConfig& cfg, const std::vector<std::string>& metrics);

struct SweepResult {
  std::vector<std::string> axes;
  std::vector<std::string> metrics;
  std::vector<PointResult> rows;  // grid order, last axis fastest
  std::string csv() const;
};

SweepResult run_sweep(const ScenarioConfig& cfg, int threads);

}  // namespace bundler
