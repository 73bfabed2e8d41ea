#include "bundler/cli.hpp"

#include <json.hpp>

#include "bundler/io.hpp"
#include "bundler/metrics.hpp"
#include "bundler/spectra.hpp"
#include "bundler/sweep.hpp"

namespace bundler {

using json = nlohmann::json;

const char* version() { return BUNDLER_VERSION; }

std::string manifest_json(const std::string& command, const ScenarioConfig* cfg,
                          const std::map<std::string, std::string>& arguments, const Files& files) {
  json j;
  j["bundler_manifest"] = 1;
  j["command"] = command;
  j["version"] = version();
  j["arguments"] = arguments;
  if (cfg) j["config"] = json::parse(config_json(*cfg));
  json names = json::array();
  for (const auto& f : files) names.push_back(f.filename().string());
  j["files"] = names;
  return j.dump(2) + "\n";
}

namespace {

Files finish(const std::string& command, const ScenarioConfig& cfg,
             const std::map<std::string, std::string>& arguments, Files files) {
  auto path = std::filesystem::path(cfg.out_dir) / (command + ".manifest.json");
  write_text(path, manifest_json(command, &cfg, arguments, files));
  files.push_back(path);
  return files;
}

const PhononEnvironment* env_ptr(const ScenarioConfig& cfg) { return cfg.env ? &*cfg.env : nullptr; }

}  // namespace

Files command_metrics(const ScenarioConfig& cfg) {
  auto m = report(effective_params(cfg), env_ptr(cfg));
  if (cfg.drive_mode == DriveMode::cavity)
    m.notes.push_back("cavity drive mode: fields describe the displaced fluctuation field");
  auto path = std::filesystem::path(cfg.out_dir) / "metrics.json";
  write_text(path, to_json(m) + "\n");
  return finish("metrics", cfg, {}, {path});
}

Files command_sweep(const ScenarioConfig& cfg) {
  if (cfg.sweep.empty()) fail(ErrorKind::config, "sweep needs at least one entry in sweep.axes");
  auto res = run_sweep(cfg, worker_count(cfg.threads));
  auto path = std::filesystem::path(cfg.out_dir) / "sweep.csv";
  write_text(path, res.csv());
  return finish("sweep", cfg, {}, {path});
}

Files command_spectrum(ScenarioConfig cfg, const std::string& omega_range) {
  if (!omega_range.empty()) cfg.omega_grid = omega_range;
  if (cfg.omega_grid.empty()) fail(ErrorKind::config, "spectrum needs --omega start:stop:step or spectrum.omega");
  auto omegas = parse_range(cfg.omega_grid);
  auto p = effective_params(cfg);
  auto solved = solve_converged(p, cfg.truncation_tol, Frame::bare, env_ptr(cfg));
  auto dec = decompose(solved);
  dec.labels = classify_peaks(dec, p).labels;
  const auto dir = std::filesystem::path(cfg.out_dir);
  Files files{dir / "spectrum.csv", dir / "lines.csv"};
  write_text(files[0], spectrum_csv(dec, omegas));
  write_text(files[1], lines_csv(dec));
  if (cfg.window > 0) {
    files.push_back(dir / "filtered.csv");
    auto f = filtered_population(dec, p.delta_a, cfg.window);
    CsvTable t({"omega_target", "window", "n_af", "lines"});
    t.add({p.delta_a, cfg.window, f.value, double(f.selected)});
    write_text(files.back(), t.str());
  }
  return finish("spectrum", cfg, {{"N", std::to_string(solved.model.N)}}, files);
}

Files command_phonon_rates(const ScenarioConfig& cfg, const std::vector<double>& temperatures) {
  PhononEnvironment env = cfg.env.value_or(PhononEnvironment{});
  auto rows = phonon_rate_table(env, cfg.params.delta_a, temperatures);
  auto path = std::filesystem::path(cfg.out_dir) / "phonon_rates.csv";
  write_text(path, phonon_rate_csv(rows));
  std::string temps;
  for (double t : temperatures) temps += (temps.empty() ? "" : ",") + format_double(t);
  return finish("phonon-rates", cfg, {{"temps", temps}}, {path});
}

}  // namespace bundler
