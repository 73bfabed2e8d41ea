#include <CLI11.hpp>
#include <iostream>

#include "bundler/cli.hpp"
#include "bundler/error.hpp"
#include "bundler/figures.hpp"

namespace {

constexpr int exit_config = 2;
constexpr int exit_numeric = 3;

bundler::ScenarioConfig configure(const std::string& path, const std::vector<std::string>& overrides,
                                  const std::string& out_dir) {
  auto cfg = bundler::load_config(path);
  for (const auto& o : overrides) bundler::apply_override(cfg, o);
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  return cfg;
}

void list(const bundler::Files& files) {
  for (const auto& f : files) std::cout << f.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiphoton bundle emission simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(bundler::version()));

  std::string config, out_dir, omega, temps, figure_id;
  std::vector<std::string> overrides;
  int threads = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config, "JSON configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--set", overrides, "override a config entry, key=value");
    sub->add_option("-o,--out", out_dir, "output directory");
  };

  auto* fig = app.add_subcommand("figure", "reproduce a figure dataset");
  fig->add_option("id", figure_id, "figure id")->required();
  fig->add_option("-o,--out", out_dir, "output directory");
  fig->add_option("-j,--threads", threads, "worker count");

  auto* sweep = app.add_subcommand("sweep", "evaluate metrics over a parameter grid");
  add_common(sweep);
  sweep->add_option("-j,--threads", threads, "worker count");

  auto* metrics = app.add_subcommand("metrics", "metrics report for one configuration");
  add_common(metrics);

  auto* spectrum = app.add_subcommand("spectrum", "incoherent cavity spectrum");
  add_common(spectrum);
  spectrum->add_option("--omega", omega, "start:stop:step");

  auto* rates = app.add_subcommand("phonon-rates", "phonon feeding rates versus temperature");
  add_common(rates);
  rates->add_option("--temps", temps, "comma separated temperatures in K")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : exit_config;
  }

  try {
    if (*fig) {
      list(bundler::run_figure(figure_id, out_dir.empty() ? "out" : out_dir, bundler::worker_count(threads)));
    } else if (*sweep) {
      auto cfg = configure(config, overrides, out_dir);
      if (threads > 0) cfg.threads = threads;
      list(bundler::command_sweep(cfg));
    } else if (*metrics) {
      list(bundler::command_metrics(configure(config, overrides, out_dir)));
    } else if (*spectrum) {
      list(bundler::command_spectrum(configure(config, overrides, out_dir), omega));
    } else if (*rates) {
      auto cfg = configure(config, overrides, out_dir);
      list(bundler::command_phonon_rates(cfg, bundler::parse_list(temps)));
    }
  } catch (const bundler::Error& e) {
    std::cerr << "error (" << bundler::to_string(e.kind()) << "): " << e.what() << '\n';
    return bundler::is_config_error(e) ? exit_config : exit_numeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_numeric;
  }
  return 0;
}
