#include <doctest.h>

#include <filesystem>
#include <json.hpp>

#include "bundler/cli.hpp"
#include "bundler/figures.hpp"
#include "bundler/io.hpp"
#include "bundler/metrics.hpp"
#include "bundler/sweep.hpp"

using namespace bundler;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / "bundler_tests" / name;
  fs::remove_all(p);
  return p;
}

std::vector<std::string> csv_rows(const std::string& text) {
  std::vector<std::string> rows;
  std::size_t start = 0;
  for (std::size_t end; (end = text.find('\n', start)) != std::string::npos; start = end + 1)
    rows.push_back(text.substr(start, end - start));
  return rows;
}

std::vector<double> cells(const std::string& row) {
  std::vector<double> v;
  std::size_t start = 0;
  while (start <= row.size()) {
    auto end = row.find(',', start);
    if (end == std::string::npos) end = row.size();
    auto cell = row.substr(start, end - start);
    v.push_back(cell.empty() ? NAN : std::strtod(cell.c_str(), nullptr));
    start = end + 1;
  }
  return v;
}

const char* base_config = R"({
  "params": {"omega": 20, "delta_a": "resonance", "gamma_a": 0.1, "gamma_sigma": 0.01},
  "sweep": {"axes": [{"name": "params.gamma_a", "start": 0.1, "stop": 1.0, "count": 3, "scale": "log"}],
            "metrics": ["n_a_num", "n_a_n", "pi_n", "pi_n_f", "pi_n_num", "gn"]}
})";

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("nested and dotted keys are equivalent") {
    auto a = parse_config(R"({"params": {"omega": 3, "gamma_a": 0.5}, "drive_mode": "tls"})");
    auto b = parse_config(R"({"params.omega": 3, "params.gamma_a": 0.5})");
    CHECK(a.flat() == b.flat());
    CHECK(a.params.omega == 3);
    CHECK(flatten_json(R"({"a": {"b": 1, "c": {"d": "x"}}})").at("a.c.d") == "x");
  }

  TEST_CASE("resonance tracking and overrides") {
    auto c = parse_config(base_config);
    CHECK(c.params.delta_a == doctest::Approx(20));
    apply_override(c, "params.omega=30");
    CHECK(c.params.delta_a == doctest::Approx(30));
    apply_override(c, "params.n=3");
    CHECK(c.params.delta_a == doctest::Approx(20));
    apply_override(c, "params.delta_a=7");
    apply_override(c, "params.omega=10");
    CHECK(c.params.delta_a == 7);
    CHECK_THROWS_AS(apply_override(c, "params.omega"), Error);
  }

  TEST_CASE("absolute units go through the coupling energy") {
    auto c = parse_config(R"({"preset": "Fischer", "params.omega_ueV": 900})");
    CHECK(c.params.omega == doctest::Approx(20));
    CHECK(c.params.gamma_a == 1.3);
    CHECK(c.params.gamma_sigma == 0.01);
    auto d = parse_config(R"({"phonon": {"hbar_g_ueV": 50, "temperature": 4}, "params.gamma_a_ueV": 25})");
    CHECK(d.params.gamma_a == doctest::Approx(0.5));
    REQUIRE(d.env);
    CHECK(d.env->temperature == 4);
    CHECK_THROWS_AS(parse_config(R"({"params.omega_ueV": 10})"), Error);
  }

  TEST_CASE("config errors") {
    for (const char* bad : {R"({"params.bogus": 1})", R"({"params.omega": "fast"})", R"({"drive_mode": "laser"})",
                            R"({"sweep.axes": [{"name": "params.gamma_a", "start": 1, "stop": 2, "count": 1}]})",
                            R"({"sweep.axes": [{"name": "params.banana", "start": 1, "stop": 2, "count": 3}]})",
                            R"({"sweep.axes": [{"name": "params.omega", "start": 0, "stop": 2, "count": 3, "scale": "log"}]})",
                            R"({"params.gamma_a": -1})", R"({"outputs": ["plot"]})", R"([1, 2])", "{not json"}) {
      CAPTURE(bad);
      try {
        parse_config(bad);
        CHECK(false);
      } catch (const Error& e) {
        CHECK(is_config_error(e));
      }
    }
  }

  TEST_CASE("axis spacing") {
    GridAxis log{"params.gamma_a", 0.05, 3, 10, true};
    auto v = log.values();
    for (std::size_t i = 2; i < v.size(); ++i) CHECK(std::abs(v[i] / v[i - 1] - v[1] / v[0]) < 1e-12);
    GridAxis lin{"params.omega", 1, 2, 5, false};
    CHECK(lin.values() == std::vector<double>{1, 1.25, 1.5, 1.75, 2});
    CHECK(parse_range("0:1:0.25").size() == 5);
    CHECK(parse_list("0,10,20") == std::vector<double>{0, 10, 20});
    CHECK_THROWS_AS(parse_range("1:0:0.1"), Error);
  }

  TEST_CASE("sweep determinism across worker counts") {
    auto c = parse_config(base_config);
    auto one = run_sweep(c, 1).csv();
    auto many = run_sweep(c, 3).csv();
    CHECK(one == many);
    auto rows = csv_rows(one);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == "params.gamma_a,n_a_num,n_a_n,pi_n,pi_n_f,pi_n_num,gn,errors");
  }

  TEST_CASE("one-point sweep equals the metrics report") {
    auto c = parse_config(base_config);
    c.sweep = {{"params.gamma_sigma", 0.01, 0.01, 2, false}};
    auto res = run_sweep(c, 1);
    auto m = report(c.params);
    const auto& row = res.rows.front();
    CHECK(row.values[0] == *m.n_a.numeric);
    CHECK(row.values[1] == *m.n_a_n.analytic);
    CHECK(row.values[2] == *m.pi_n.analytic);
    CHECK(row.values[3] == *m.pi_n_f.analytic);
    CHECK(row.values[4] == *m.pi_n.numeric);
    CHECK(row.values[5] == *m.gn.analytic);
  }

  TEST_CASE("per-point failures land in the errors column") {
    auto c = parse_config(base_config);
    c.sweep = {{"params.gamma_a", -1, 1, 2, false}};
    c.metrics = {"n_a_n", "gn_num"};
    auto res = run_sweep(c, 2);
    REQUIRE(res.rows.size() == 2);
    CHECK(res.rows[0].errors.find("invalid_parameter") != std::string::npos);
    CHECK(std::isnan(res.rows[0].values[0]));
    CHECK(res.rows[1].errors.empty());
    CHECK(res.rows[1].values[0] > 0);
    CHECK_FALSE(is_axis_key("params.n"));
  }

  TEST_CASE("gamma grids at omega = 20") {
    auto c = parse_config(R"({"params": {"omega": 20, "delta_a": 20},
      "sweep": {"axes": [{"name": "params.gamma_a", "start": 0.05, "stop": 3, "count": 3, "scale": "log"},
                         {"name": "params.gamma_sigma", "start": 0.003, "stop": 0.3, "count": 3, "scale": "log"}],
                "metrics": ["n_a_1", "n_a_n", "n_af_1"]}})");
    auto res = run_sweep(c, 2);
    REQUIRE(res.rows.size() == 9);
    CHECK(res.rows[1].coords[0] == doctest::Approx(0.05));
    CHECK(res.rows[1].coords[1] == doctest::Approx(0.03));
    for (const auto& r : res.rows) {
      CHECK(r.errors.empty());
      CHECK(r.values[2] <= r.values[0]);
    }
  }

  TEST_CASE("metrics output is idempotent and reproducible from its manifest") {
    auto dir = scratch("metrics");
    auto c = parse_config(R"({"preset": "Hamsen", "params.omega": 5, "params.delta_a": "resonance"})");
    c.out_dir = dir.string();
    auto files = command_metrics(c);
    REQUIRE(files.size() == 2);
    auto first = read_text(files[0]);
    command_metrics(c);
    CHECK(read_text(files[0]) == first);

    auto again = load_config(files[1].string());
    CHECK(again.flat() == c.flat());
    command_metrics(again);
    CHECK(read_text(files[0]) == first);
    auto j = nlohmann::json::parse(read_text(files[1]));
    CHECK(j["version"] == version());
    CHECK(j["files"][0] == "metrics.json");
  }

  TEST_CASE("preset with a phonon environment in its zero-rate limit") {
    auto plain = parse_config(R"({"preset": "Fischer", "params.omega": 20, "params.delta_a": 20})");
    auto cold = parse_config(
        R"({"preset": "Fischer", "params.omega": 20, "params.delta_a": 20, "phonon.temperature": 0, "phonon.alpha_p": 0})");
    REQUIRE(cold.env);
    auto a = report(plain.params), b = report(cold.params, &*cold.env);
    for (auto f : {&BundleMetrics::n_a, &BundleMetrics::n_a_1, &BundleMetrics::n_af, &BundleMetrics::pi_n,
                   &BundleMetrics::pi_n_f, &BundleMetrics::n_a_n}) {
      REQUIRE((a.*f).analytic);
      CHECK(*(a.*f).analytic == doctest::Approx(*(b.*f).analytic).epsilon(1e-10));
      REQUIRE((a.*f).numeric);
      CHECK(*(a.*f).numeric == doctest::Approx(*(b.*f).numeric).epsilon(1e-10));
    }
    // at T = 0 with coupling, spontaneous phonon emission still feeds the cavity
    auto coupled = parse_config(R"({"preset": "Fischer", "params.omega": 20, "params.delta_a": 20, "phonon.temperature": 0})");
    auto c = report(coupled.params, &*coupled.env);
    CHECK(*c.n_a.numeric != *a.n_a.numeric);
    CHECK(*c.n_a.numeric == doctest::Approx(*a.n_a.numeric).epsilon(1e-3));
  }

  TEST_CASE("sweep files and manifest rerun") {
    auto dir = scratch("sweep");
    auto c = parse_config(base_config);
    c.out_dir = dir.string();
    auto files = command_sweep(c);
    auto first = read_text(files[0]);
    auto rerun = load_config(files[1].string());
    CHECK(config_json(rerun) == config_json(c));
    command_sweep(rerun);
    CHECK(read_text(files[0]) == first);
  }

  TEST_CASE("spectrum and phonon-rate commands") {
    auto dir = scratch("spectrum");
    auto c = parse_config(R"({"params": {"omega": 5, "delta_a": 5, "gamma_a": 1.3, "gamma_sigma": 0.01},
                              "filter.window": 0.65})");
    c.out_dir = dir.string();
    auto files = command_spectrum(c, "-12:12:0.5");
    REQUIRE(files.size() == 4);
    auto rows = csv_rows(read_text(files[0]));
    CHECK(rows[0] == "omega_over_g,S");
    CHECK(rows.size() == 50);
    CHECK_THROWS_AS(command_spectrum(c, ""), Error);

    auto rates = command_phonon_rates(c, {0, 10});
    CHECK(csv_rows(read_text(rates[0])).size() == 3);
  }

  TEST_CASE("cavity drive mode uses the displaced emitter drive") {
    auto c = parse_config(R"({"drive_mode": "cavity", "params": {"cavity_drive": 40, "delta_a": 2, "gamma_a": 1}})");
    auto p = effective_params(c);
    CHECK(p.omega == doctest::Approx(40 / std::sqrt(4.25)));
    CHECK(p.cavity_drive == 0);
    c.params.omega = 1;
    CHECK_THROWS_AS(effective_params(c), Error);
  }

  TEST_CASE("worker count honours the environment cap") {
    setenv("BUNDLER_THREADS", "2", 1);
    CHECK(worker_count(8) == 2);
    CHECK(worker_count(1) == 1);
    setenv("BUNDLER_THREADS", "zero", 1);
    CHECK_THROWS_AS(worker_count(4), Error);
    unsetenv("BUNDLER_THREADS");
    CHECK(worker_count(3) == 3);
    CHECK(worker_count(0) >= 1);
  }

  TEST_CASE("parallel_for propagates task failures") {
    std::vector<int> hit(20, 0);
    parallel_for(20, 4, [&](std::size_t i) { hit[i] = 1; });
    CHECK(std::count(hit.begin(), hit.end(), 1) == 20);
    CHECK_THROWS_AS(parallel_for(5, 2, [](std::size_t i) { if (i == 3) fail(ErrorKind::numerical, "boom"); }), Error);
  }

  TEST_CASE("figure 1c") {
    auto dir = scratch("fig1c");
    auto files = run_figure("1c", dir, 1);
    REQUIRE(files.size() == 4);
    auto rows = csv_rows(read_text(dir / "fig1c_peaks.csv"));
    REQUIRE(rows.size() == 5);
    const double expect[] = {-10, 0, 5, 10};
    for (int k = 0; k < 4; ++k) CHECK(std::abs(cells(rows[k + 1])[0] - expect[k]) < 0.65);
    auto m = nlohmann::json::parse(read_text(dir / "fig1c.manifest.json"));
    CHECK(m["figure"] == "1c");
    CHECK(m["parameters"]["gamma_a"] == 1.3);
  }

  TEST_CASE("figure 2c") {
    auto dir = scratch("fig2c");
    run_figure("2c", dir, 2);
    auto rows = csv_rows(read_text(dir / "fig2c_curves.csv"));
    CHECK(rows[0] == "omega_drive,delta_a,n_a_num,n_a_1,n_a_n,n_a_analytic,plateau");
    auto weakest = cells(rows[1]);
    CHECK(weakest[4] == doctest::Approx(0.05).epsilon(0.01));
    CHECK(weakest[6] == doctest::Approx(0.05));
  }

  TEST_CASE("figure ids") {
    CHECK(figure_ids().size() == 15);
    try {
      run_figure("7", scratch("bad"), 1);
      CHECK(false);
    } catch (const Error& e) {
      CHECK(is_config_error(e));
    }
  }
}
