#include "bundler/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <thread>

#include "bundler/drive.hpp"
#include "bundler/io.hpp"
#include "bundler/metrics.hpp"

namespace bundler {

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& task) {
  const std::size_t workers = std::min<std::size_t>(std::max(threads, 1), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first;
  std::mutex m;
  auto loop = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(m);
        if (!first) first = std::current_exception();
      }
    }
  };
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(loop);
  pool.clear();
  if (first) std::rethrow_exception(first);
}

namespace {

struct Point {
  SystemParams p;
  const PhononEnvironment* env = nullptr;
  std::optional<SolvedModel> full, one;
  std::optional<double> bundle, bundle_num, background_f_num, lower_num;

  const SolvedModel& full_model() {
    if (!full) full = solve_converged(p, default_truncation_tol, Frame::bare, env);
    return *full;
  }
  const SolvedModel& one_photon() {
    if (!one) one = solve(p, 1, Frame::bare, env);
    return *one;
  }
  double filtered(const SolvedModel& s) { return filtered_population(decompose(s), p.delta_a, p.gamma_a / 2).value; }
  double n_a_n() {
    if (!bundle) bundle = bundle_population(p, p.n);
    return *bundle;
  }
  double n_a_n_num() {
    if (!bundle_num) bundle_num = bundle_population_numeric(p, p.n).n_a;
    return *bundle_num;
  }
  double n_af_1_num() {
    if (!background_f_num) background_f_num = filtered(one_photon());
    return *background_f_num;
  }
  double lower_orders_num() {
    if (!lower_num) {
      double s = 0;
      for (int k = 2; k < p.n; ++k) s += bundle_population_numeric(p, k).n_a;
      lower_num = s;
    }
    return *lower_num;
  }
};

double positive_ratio(double num, double den, const char* what) {
  if (!(den > 0)) fail(ErrorKind::ratio_undefined, std::string(what) + ": vanishing denominator");
  return clamp_purity(num / den, what);
}

using MetricFn = std::function<double(Point&)>;

const std::vector<std::pair<std::string, MetricFn>>& registry() {
  static const std::vector<std::pair<std::string, MetricFn>> r{
      {"n_a_num", [](Point& x) { return x.full_model().n_a; }},
      {"n_a_1",
       [](Point& x) { return x.p.delta == 0 ? na1(x.p) : steady_correlators(x.p).n_a; }},
      {"n_a_1_num", [](Point& x) { return x.one_photon().n_a; }},
      {"n_a_n", [](Point& x) { return x.n_a_n(); }},
      {"n_a_n_num", [](Point& x) { return x.n_a_n_num(); }},
      {"n_af_num", [](Point& x) { return x.filtered(x.full_model()); }},
      {"n_af_1", [](Point& x) { return na1_filtered(x.p); }},
      {"n_af_1_num", [](Point& x) { return x.n_af_1_num(); }},
      {"pi_n", [](Point& x) { return purity(x.p, x.p.n, Mode::analytic); }},
      {"pi_n_num",
       [](Point& x) { return positive_ratio(x.n_a_n_num(), x.full_model().n_a, "purity"); }},
      {"pi_n_f", [](Point& x) { return purity_filtered(x.p, x.p.n, Mode::analytic); }},
      {"pi_n_f_num",
       [](Point& x) {
         double b = x.n_a_n_num();
         return positive_ratio(b, x.n_af_1_num() + x.lower_orders_num() + b, "purity_filtered");
       }},
      {"rate_n", [](Point& x) { return x.p.gamma_a * x.n_a_n(); }},
      {"gn", [](Point& x) { return gn_closed(x.p, x.p.n).gn; }},
      {"gn_num", [](Point& x) { return gn_numeric(x.p, x.p.n).coupling.gn; }},
      {"S_cav", [](Point& x) { return spectrum_direct(x.full_model(), x.p.delta_a); }},
      {"rejection_ratio", [](Point& x) { return rejection_ratio(x.p).ratio; }},
  };
  return r;
}

const std::vector<std::string> default_metrics{"n_a_num", "n_a_1", "n_a_n", "pi_n", "pi_n_f"};

}  // namespace

const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, f] : registry()) v.push_back(k);
    return v;
  }();
  return names;
}

bool is_metric(const std::string& name) {
  const auto& v = metric_names();
  return std::find(v.begin(), v.end(), name) != v.end();
}

SystemParams effective_params(const ScenarioConfig& cfg) {
  SystemParams p = cfg.params;
  if (cfg.drive_mode == DriveMode::tls) return p;
  if (p.omega != 0) fail(ErrorKind::config, "cavity drive mode takes params.cavity_drive, not params.omega");
  auto t = displace(p, p.cavity_drive);
  p.omega = p.g * t.omega_eff;
  p.cavity_drive = 0;
  return p;
}

PointResult evaluate_point(const ScenarioConfig& cfg, const std::vector<std::string>& metrics) {
  PointResult r;
  Point x;
  x.p = effective_params(cfg);
  x.p.validate();
  if (cfg.env) x.env = &*cfg.env;
  for (const auto& name : metrics) {
    auto it = std::find_if(registry().begin(), registry().end(), [&](const auto& e) { return e.first == name; });
    if (it == registry().end()) fail(ErrorKind::config, "unknown metric '" + name + "'");
    double v = NAN;
    try {
      v = it->second(x);
    } catch (const Error& e) {
      if (!r.errors.empty()) r.errors += "; ";
      r.errors += name + ": " + to_string(e.kind()) + ": " + e.what();
    }
    r.values.push_back(v);
  }
  return r;
}

std::string SweepResult::csv() const {
  std::vector<std::string> header = axes;
  header.insert(header.end(), metrics.begin(), metrics.end());
  header.push_back("errors");
  CsvTable t(header);
  for (const auto& row : rows) {
    std::vector<CsvTable::Cell> cells(row.coords.begin(), row.coords.end());
    cells.insert(cells.end(), row.values.begin(), row.values.end());
    cells.push_back(row.errors);
    t.add(std::move(cells));
  }
  return t.str();
}

SweepResult run_sweep(const ScenarioConfig& cfg, int threads) {
  SweepResult res;
  res.metrics = cfg.metrics.empty() ? default_metrics : cfg.metrics;
  for (const auto& m : res.metrics)
    if (!is_metric(m)) fail(ErrorKind::config, "unknown metric '" + m + "'");
  std::vector<std::vector<double>> values;
  std::size_t total = 1;
  for (const auto& ax : cfg.sweep) {
    res.axes.push_back(ax.name);
    values.push_back(ax.values());
    total *= values.back().size();
  }
  effective_params(cfg);  // surfaces drive-mode errors before any work starts
  res.rows.resize(total);
  parallel_for(total, threads, [&](std::size_t idx) {
    ScenarioConfig c = cfg;
    std::vector<double> coords(values.size());
    std::size_t rem = idx;
    for (std::size_t k = values.size(); k-- > 0;) {
      coords[k] = values[k][rem % values[k].size()];
      rem /= values[k].size();
    }
    PointResult r;
    try {
      for (std::size_t k = 0; k < coords.size(); ++k) set_parameter(c, res.axes[k], coords[k]);
      r = evaluate_point(c, res.metrics);
    } catch (const Error& e) {
      r.values.assign(res.metrics.size(), NAN);
      r.errors = std::string(to_string(e.kind())) + ": " + e.what();
    }
    r.coords = coords;
    res.rows[idx] = std::move(r);
  });
  return res;
}

}  // namespace bundler
