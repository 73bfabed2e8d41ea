#include "bundler/figures.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <json.hpp>
#include <map>
#include <mutex>
#include <set>

#include "bundler/diag.hpp"
#include "bundler/drive.hpp"
#include "bundler/io.hpp"
#include "bundler/metrics.hpp"
#include "bundler/sweep.hpp"

namespace bundler {

namespace {

using json = nlohmann::json;

struct Dataset {
  std::string name;
  std::string csv;
};

struct Figure {
  json parameters = json::object();
  std::vector<Dataset> data;
};

std::vector<double> linspace(double a, double b, double step) {
  std::vector<double> v;
  const long count = std::lround((b - a) / step) + 1;
  for (long i = 0; i < count; ++i) v.push_back(a + i * step);
  return v;
}

std::vector<double> logspace(double a, double b, int count) {
  GridAxis ax{"", a, b, count, true};
  return ax.values();
}

SystemParams base(double gamma_a, double gamma_sigma) {
  SystemParams p;
  p.gamma_a = gamma_a;
  p.gamma_sigma = gamma_sigma;
  return p;
}

json params_json(const SystemParams& p) {
  return {{"g", p.g},           {"omega", p.omega},           {"delta_a", p.delta_a},
          {"delta", p.delta},   {"gamma_a", p.gamma_a},       {"gamma_sigma", p.gamma_sigma},
          {"gamma_phi", p.gamma_phi}, {"n", p.n}};
}

json env_json(const PhononEnvironment& e) {
  return {{"alpha_p", e.alpha_p}, {"omega_b", e.omega_b}, {"dephasing_slope", e.dephasing_slope_ueV_per_K},
          {"hbar_g_ueV", e.hbar_g_ueV}};
}

double filtered(const SolvedModel& s, double target, double window) {
  return filtered_population(decompose(s), target, window).value;
}

// Incoherent spectrum map over (omega_drive, omega); `setup` fixes everything
// but the drive.
Dataset spectrum_map(const std::string& name, const SystemParams& p0, const PhononEnvironment* env,
                     const std::vector<double>& drives, const std::vector<double>& omegas, int threads) {
  std::vector<std::vector<double>> S(drives.size());
  parallel_for(drives.size(), threads, [&](std::size_t i) {
    SystemParams p = p0;
    p.omega = drives[i];
    auto dec = decompose(solve_converged(p, default_truncation_tol, Frame::bare, env));
    for (double w : omegas) S[i].push_back(spectrum_at(dec, w));
  });
  CsvTable t({"omega_drive", "omega_over_g", "S"});
  for (std::size_t i = 0; i < drives.size(); ++i)
    for (std::size_t k = 0; k < omegas.size(); ++k) t.add({drives[i], omegas[k], S[i][k]});
  return {name, t.str()};
}

// S at the cavity frequency versus drive, for each cavity detuning.
Dataset cavity_scan(const std::string& name, const SystemParams& p0, const std::vector<PhononEnvironment>& envs,
                    const std::vector<double>& detunings, const std::function<std::vector<double>(double)>& drives,
                    int threads) {
  struct Job {
    double temperature, delta_a, omega;
    const PhononEnvironment* env;
  };
  std::vector<Job> jobs;
  const std::size_t n_env = std::max<std::size_t>(envs.size(), 1);
  for (std::size_t e = 0; e < n_env; ++e)
    for (double da : detunings)
      for (double w : drives(da))
        jobs.push_back({envs.empty() ? 0.0 : envs[e].temperature, da, w, envs.empty() ? nullptr : &envs[e]});
  std::vector<double> S(jobs.size()), N(jobs.size());
  parallel_for(jobs.size(), threads, [&](std::size_t i) {
    SystemParams p = p0;
    p.delta_a = jobs[i].delta_a;
    p.omega = jobs[i].omega;
    auto s = solve_converged(p, default_truncation_tol, Frame::bare, jobs[i].env);
    S[i] = spectrum_direct(s, p.delta_a);
    N[i] = s.model.N;
  });
  CsvTable t({"T_K", "delta_a", "omega_drive", "S_cav", "N"});
  for (std::size_t i = 0; i < jobs.size(); ++i)
    t.add({jobs[i].temperature, jobs[i].delta_a, jobs[i].omega, S[i], N[i]});
  return {name, t.str()};
}

Figure fig1b(int threads) {
  auto p = base(1.3, 0.01);
  p.delta_a = 5;
  Figure f;
  f.parameters = params_json(p);
  f.parameters["omega_drive"] = "0.25:10:0.25";
  f.parameters["omega"] = "-25:25:0.1";
  f.data.push_back(spectrum_map("spectrum_map", p, nullptr, linspace(0.25, 10, 0.25), linspace(-25, 25, 0.1), threads));
  return f;
}

Figure fig1c(int) {
  auto p = base(1.3, 0.01);
  p.delta_a = 5;
  p.omega = 5;
  auto s = solve_converged(p);
  auto dec = decompose(s);
  dec.labels = classify_peaks(dec, p).labels;
  Figure f;
  f.parameters = params_json(p);
  f.parameters["N"] = s.model.N;
  f.data.push_back({"spectrum", spectrum_csv(dec, linspace(-25, 25, 0.02))});
  f.data.push_back({"lines", lines_csv(dec)});
  CsvTable peaks({"omega_peak", "S"});
  for (double w : find_peaks(dec, -25, 25, 0.02)) peaks.add({w, spectrum_at(dec, w)});
  f.data.push_back({"peaks", peaks.str()});
  return f;
}

struct GridPoint {
  double gamma_a, gamma_sigma;
};

std::vector<GridPoint> decay_grid(int count) {
  std::vector<GridPoint> g;
  for (double ga : logspace(0.05, 3, count))
    for (double gs : logspace(0.003, 0.3, count)) g.push_back({ga, gs});
  return g;
}

Figure fig2a(int threads) {
  auto grid = decay_grid(12);
  std::vector<std::vector<double>> rows(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t i) {
    auto p = base(grid[i].gamma_a, grid[i].gamma_sigma);
    p.omega = p.delta_a = 20;
    double n1 = na1(p), n2 = bundle_population(p, 2), num = solve_converged(p).n_a;
    rows[i] = {p.gamma_a, p.gamma_sigma, n1, n2, n1 + n2, num, p.gamma_a * n1, p.gamma_a * n2};
  });
  CsvTable t({"gamma_a", "gamma_sigma", "n_a_1", "n_a_2", "n_a_analytic", "n_a_num", "rate_1", "rate_2"});
  for (auto& r : rows) t.add({r.begin(), r.end()});
  Figure f;
  f.parameters = {{"omega", 20}, {"delta_a", 20}, {"gamma_a", "log 0.05..3 x12"}, {"gamma_sigma", "log 0.003..0.3 x12"}};
  f.data.push_back({"grid", t.str()});
  return f;
}

Figure fig2b(int threads) {
  auto grid = decay_grid(12);
  std::vector<std::vector<double>> rows(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t i) {
    auto p = base(grid[i].gamma_a, grid[i].gamma_sigma);
    p.omega = p.delta_a = 20;
    double nf1 = na1_filtered(p), n2 = bundle_population(p, 2);
    double nf1_num = filtered(solve(p, 1), p.delta_a, p.gamma_a / 2);
    rows[i] = {p.gamma_a, p.gamma_sigma, nf1, nf1_num, n2, p.gamma_a * nf1, p.gamma_a * n2};
  });
  CsvTable t({"gamma_a", "gamma_sigma", "n_af_1", "n_af_1_num", "n_a_2", "rate_f_1", "rate_2"});
  for (auto& r : rows) t.add({r.begin(), r.end()});
  Figure f;
  f.parameters = {{"omega", 20}, {"delta_a", 20}, {"gamma_a", "log 0.05..3 x12"}, {"gamma_sigma", "log 0.003..0.3 x12"},
                  {"filter_window", "gamma_a/2"}};
  f.data.push_back({"grid", t.str()});
  return f;
}

Figure drive_curves(int n, int threads) {
  auto p0 = base(0.1, 0.01);
  p0.n = n;
  auto drives = logspace(0.1, 100, 31);
  std::vector<std::vector<double>> rows(drives.size());
  parallel_for(drives.size(), threads, [&](std::size_t i) {
    auto p = p0;
    p.omega = drives[i];
    p.delta_a = p.resonance();
    double one = na1(p), bundle = bundle_population(p, n), num = solve_converged(p).n_a;
    rows[i] = {p.omega, p.delta_a, num, one, bundle, one + bundle, weak_drive_plateau(p, n)};
  });
  CsvTable t({"omega_drive", "delta_a", "n_a_num", "n_a_1", "n_a_n", "n_a_analytic", "plateau"});
  for (auto& r : rows) t.add({r.begin(), r.end()});
  Figure f;
  f.parameters = params_json(p0);
  f.parameters["omega"] = "log 0.1..100 x31";
  f.parameters["delta_a"] = "2 omega / n";
  f.data.push_back({"curves", t.str()});
  return f;
}

const double fig3_gamma_sigma[] = {0.025, 0.005, 0.001};

Figure fig3a(int threads) {
  struct Job {
    int n;
    double gamma_a;
  };
  std::vector<Job> jobs;
  for (int n = 2; n <= 4; ++n)
    for (double ga : logspace(0.05, 10, 15)) jobs.push_back({n, ga});
  std::vector<std::vector<double>> rows(jobs.size());
  parallel_for(jobs.size(), threads, [&](std::size_t i) {
    auto p = base(jobs[i].gamma_a, fig3_gamma_sigma[jobs[i].n - 2]);
    p.n = jobs[i].n;
    p.omega = 20;
    p.delta_a = p.resonance();
    auto one = solve(p, 1);
    double n1 = one.n_a, nf1 = filtered(one, p.delta_a, p.gamma_a / 2);
    double low = 0;
    for (int m = 2; m < p.n; ++m) low += bundle_population_numeric(p, m).n_a;
    double b = bundle_population_numeric(p, p.n).n_a;
    double pi = b / (n1 + low + b), pif = b / (nf1 + low + b);
    double pa = NAN, pfa = NAN;
    try {
      pa = purity(p, p.n, Mode::analytic);
      pfa = purity_filtered(p, p.n, Mode::analytic);
    } catch (const Error&) {
    }
    rows[i] = {double(p.n), p.gamma_a, p.gamma_sigma, n1, nf1, low, b, pi, pif, pa, pfa};
  });
  CsvTable t({"n", "gamma_a", "gamma_sigma", "n_a_1_num", "n_af_1_num", "n_a_lower_num", "n_a_n_num", "pi_n",
              "pi_n_f", "pi_n_analytic", "pi_n_f_analytic"});
  for (auto& r : rows) t.add({r.begin(), r.end()});
  Figure f;
  f.parameters = {{"omega", 20}, {"gamma_sigma", {{"2", 0.025}, {"3", 0.005}, {"4", 0.001}}},
                  {"gamma_a", "log 0.05..10 x15"}, {"delta_a", "2 omega / n"}, {"filter_window", "gamma_a/2"}};
  f.data.push_back({"purity", t.str()});
  return f;
}

Figure fig3b(int threads) {
  struct Job {
    int n;
    double gamma_a;
  };
  std::vector<Job> jobs;
  for (int n = 2; n <= 4; ++n)
    for (double ga : logspace(0.05, 10, 15)) jobs.push_back({n, ga});
  std::vector<std::vector<double>> rows(jobs.size());
  parallel_for(jobs.size(), threads, [&](std::size_t i) {
    auto p = base(jobs[i].gamma_a, fig3_gamma_sigma[jobs[i].n - 2]);
    p.n = jobs[i].n;
    p.omega = 20;
    p.delta_a = p.resonance();
    auto full = solve_converged(p);
    auto dec = decompose(full);
    double nf = filtered_population(dec, p.delta_a, p.gamma_a / 2).value;
    std::vector<double> r{double(p.n), p.gamma_a, p.gamma_a * full.n_a, p.gamma_a * nf};
    for (int m = 2; m <= 4; ++m) r.push_back(m <= p.n ? p.gamma_a * bundle_population_numeric(p, m).n_a : NAN);
    rows[i] = r;
  });
  CsvTable t({"n", "gamma_a", "rate_total", "rate_filtered", "rate_2", "rate_3", "rate_4"});
  for (auto& r : rows) t.add({r.begin(), r.end()});

  // two-photon resonance split into spectral windows
  auto gammas = logspace(0.05, 10, 15);
  std::vector<std::vector<double>> win(gammas.size());
  parallel_for(gammas.size(), threads, [&](std::size_t i) {
    auto p = base(gammas[i], fig3_gamma_sigma[0]);
    p.omega = p.delta_a = 20;
    auto full = solve_converged(p);
    auto dec = decompose(full);
    const double w = p.gamma_a / 2;
    win[i] = {p.gamma_a, p.gamma_a * filtered_population(dec, 0, w).value,
              p.gamma_a * filtered_population(dec, p.delta_a, w).value, p.gamma_a * full.n_a,
              p.gamma_a * bundle_population_numeric(p, 2).n_a};
  });
  CsvTable tw({"gamma_a", "rate_central", "rate_cavity", "rate_total", "rate_bundle"});
  for (auto& r : win) tw.add({r.begin(), r.end()});

  Figure f;
  f.parameters = {{"omega", 20}, {"gamma_sigma", {{"2", 0.025}, {"3", 0.005}, {"4", 0.001}}},
                  {"gamma_a", "log 0.05..10 x15"}, {"delta_a", "2 omega / n"}, {"filter_window", "gamma_a/2"}};
  f.data.push_back({"rates", t.str()});
  f.data.push_back({"windows", tw.str()});
  return f;
}

PhononEnvironment fischer_env(double T) {
  PhononEnvironment e;
  e.hbar_g_ueV = find_preset("Fischer").hbar_g_ueV;
  e.temperature = T;
  return e;
}

SystemParams fischer_params() {
  const auto& pr = find_preset("Fischer");
  return base(pr.gamma_a, pr.gamma_sigma);
}

const std::vector<double> fig4_temperatures{0, 10, 20, 30};

std::vector<PhononEnvironment> fig4_envs() {
  std::vector<PhononEnvironment> v;
  for (double T : fig4_temperatures) v.push_back(fischer_env(T));
  return v;
}

json fig4_parameters(const SystemParams& p) {
  json j = params_json(p);
  j["preset"] = find_preset("Fischer").name;
  j["phonon"] = env_json(fischer_env(0));
  return j;
}

Figure fig4a(int) {
  auto rows = phonon_rate_table(fischer_env(0), 5, linspace(0, 40, 1));
  Figure f;
  f.parameters = fig4_parameters(fischer_params());
  f.parameters["delta_a"] = 5;
  f.parameters["T_K"] = "0:40:1";
  f.data.push_back({"rates", phonon_rate_csv(rows)});
  return f;
}

Figure fig4b(int threads) {
  auto p0 = fischer_params();
  auto envs = fig4_envs();
  auto drives = linspace(2, 40, 2);
  struct Job {
    std::size_t env;
    double omega;
  };
  std::vector<Job> jobs;
  for (std::size_t e = 0; e < envs.size(); ++e)
    for (double w : drives) jobs.push_back({e, w});
  std::vector<std::vector<double>> rows(jobs.size());
  parallel_for(jobs.size(), threads, [&](std::size_t i) {
    auto p = p0;
    p.omega = p.delta_a = jobs[i].omega;
    const auto& env = envs[jobs[i].env];
    auto full = solve_converged(p, default_truncation_tol, Frame::bare, &env);
    double nf = filtered(full, p.delta_a, p.gamma_a / 2);
    rows[i] = {env.temperature, p.omega, nf, full.n_a, bundle_population_numeric(p, 2).n_a,
               bundle_population(p, 2), double(full.model.N)};
  });
  CsvTable t({"T_K", "omega_drive", "n_af_num", "n_a_num", "n_a_2_num", "n_a_2", "N"});
  for (auto& r : rows) t.add({r.begin(), r.end()});
  Figure f;
  f.parameters = fig4_parameters(p0);
  f.parameters["delta_a"] = "omega";
  f.parameters["omega"] = "2:40:2";
  f.parameters["T_K"] = fig4_temperatures;
  f.data.push_back({"filtered", t.str()});
  return f;
}

Figure fig4c(int threads) {
  auto p = fischer_params();
  p.delta_a = 5;
  auto env = fischer_env(30);
  Figure f;
  f.parameters = fig4_parameters(p);
  f.parameters["T_K"] = 30;
  f.parameters["omega_drive"] = "0.25:10:0.25";
  f.parameters["omega"] = "-25:25:0.1";
  f.data.push_back(spectrum_map("spectrum_map", p, &env, linspace(0.25, 10, 0.25), linspace(-25, 25, 0.1), threads));
  return f;
}

Figure fig4d(int threads) {
  auto p = fischer_params();
  Figure f;
  f.parameters = fig4_parameters(p);
  f.parameters["delta_a"] = 5;
  f.parameters["T_K"] = fig4_temperatures;
  f.parameters["omega_drive"] = "0.25:10:0.05";
  f.data.push_back(cavity_scan("cavity_scan", p, fig4_envs(), {5.0}, [](double) { return linspace(0.25, 10, 0.05); },
                               threads));
  return f;
}

Figure fig5(int threads) {
  auto p = base(1.0, 0.01);
  std::vector<double> drives = linspace(1, 10, 1);
  for (double w : linspace(15, 100, 5)) drives.push_back(w);
  std::vector<Rejection> rows(drives.size());
  parallel_for(drives.size(), threads, [&](std::size_t i) { rows[i] = rejection_curve(p, {drives[i]}).front(); });
  Figure f;
  f.parameters = params_json(p);
  f.parameters["delta_a"] = "omega_eff";
  f.parameters["filter_width"] = "gamma_a";
  f.parameters["S_I"] = "full incoherent spectrum at the cavity frequency";
  f.data.push_back({"rejection", rejection_csv(rows)});
  return f;
}

Figure fig6a(int threads) {
  auto p = base(0.1, 0.1);
  p.delta_a = 5;
  Figure f;
  f.parameters = params_json(p);
  f.parameters["omega_drive"] = "0.2:10:0.2";
  f.parameters["omega"] = "-25:25:0.05";
  f.data.push_back(spectrum_map("spectrum_map", p, nullptr, linspace(0.2, 10, 0.2), linspace(-25, 25, 0.05), threads));
  return f;
}

std::vector<double> fig6b_drives(double delta_a) {
  std::set<double> s;
  for (double w : linspace(0.5, 25, 0.25)) s.insert(w);
  for (double w : linspace(delta_a - 0.5, delta_a + 0.5, 0.02)) s.insert(std::round(w * 1e9) / 1e9);
  return {s.begin(), s.end()};
}

Figure fig6b(int threads) {
  auto p = base(0.1, 0.1);
  const std::vector<double> detunings{3, 5, 10, 20};
  Figure f;
  f.parameters = params_json(p);
  f.parameters["delta_a"] = detunings;
  f.parameters["omega_drive"] = "0.5:25:0.25 plus delta_a +- 0.5 in steps of 0.02";
  f.data.push_back(cavity_scan("cavity_scan", p, {}, detunings, fig6b_drives, threads));
  return f;
}

const std::map<std::string, std::function<Figure(int)>>& builders() {
  static const std::map<std::string, std::function<Figure(int)>> b{
      {"1b", fig1b},
      {"1c", fig1c},
      {"2a", fig2a},
      {"2b", fig2b},
      {"2c", [](int t) { return drive_curves(2, t); }},
      {"2d", [](int t) { return drive_curves(3, t); }},
      {"3a", fig3a},
      {"3b", fig3b},
      {"4a", fig4a},
      {"4b", fig4b},
      {"4c", fig4c},
      {"4d", fig4d},
      {"5", fig5},
      {"6a", fig6a},
      {"6b", fig6b},
  };
  return b;
}

}  // namespace

const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids{"1b", "1c", "2a", "2b", "2c", "2d", "3a", "3b",
                                            "4a", "4b", "4c", "4d", "5",  "6a", "6b"};
  return ids;
}

Files run_figure(const std::string& id, const std::filesystem::path& out_dir, int threads) {
  auto it = builders().find(id);
  if (it == builders().end()) fail(ErrorKind::config, "unknown figure id '" + id + "'");

  std::mutex m;
  std::set<std::string> warnings;
  auto previous = set_warning_sink([&](const std::string& w) {
    std::lock_guard lock(m);
    warnings.insert(w);
  });
  Figure fig;
  try {
    fig = it->second(threads);
  } catch (...) {
    set_warning_sink(previous);
    throw;
  }
  set_warning_sink(previous);

  Files files;
  for (const auto& d : fig.data) {
    files.push_back(out_dir / ("fig" + id + "_" + d.name + ".csv"));
    write_text(files.back(), d.csv);
  }
  json j;
  j["bundler_manifest"] = 1;
  j["command"] = "figure";
  j["figure"] = id;
  j["version"] = version();
  j["parameters"] = fig.parameters;
  json names = json::array();
  for (const auto& f : files) names.push_back(f.filename().string());
  j["files"] = names;
  j["warnings"] = std::vector<std::string>(warnings.begin(), warnings.end());
  files.push_back(out_dir / ("fig" + id + ".manifest.json"));
  write_text(files.back(), j.dump(2) + "\n");
  return files;
}

}  // namespace bundler
