#include "bundler/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <json.hpp>

#include "bundler/diag.hpp"
#include "bundler/io.hpp"
#include "bundler/phonon.hpp"

namespace bundler {

const char* to_string(Mode m) { return m == Mode::analytic ? "analytic" : "numeric"; }

namespace {

void check_order(int n, int lowest = 2) {
  if (n < lowest) fail(ErrorKind::invalid_order, "bundle order must be >= " + std::to_string(lowest));
}

SystemParams with_delta_a(SystemParams p, double delta_a) {
  p.delta_a = delta_a;
  return p;
}

double background_total(const SystemParams& p) {
  return p.delta == 0 ? na1(p, Na1Form::full) : steady_correlators(p).n_a;
}

double ratio(double num, double den, const char* what) {
  if (!(den > 0)) fail(ErrorKind::ratio_undefined, std::string(what) + ": vanishing denominator");
  return num / den;
}

double filtered_numeric(const SolvedModel& s, const SystemParams& p) {
  return filtered_population(decompose(s), p.delta_a, p.gamma_a / 2).value;
}

}  // namespace

double clamp_purity(double raw, const std::string& what) {
  if (std::isnan(raw)) fail(ErrorKind::numerical, what + ": purity is NaN");
  if (raw >= 0 && raw <= 1) return raw;
  double excess = raw < 0 ? -raw : raw - 1;
  warn(what + ": purity " + format_double(raw) + " outside [0, 1] by " + format_double(excess) +
       (excess < 1e-6 ? " (rounding)" : " (approximation outside its validity)") + ", clamped");
  return std::clamp(raw, 0.0, 1.0);
}

double offresonant_population(const SystemParams& p, int m, OffResonance model) {
  check_order(m, 1);
  const auto c = gn_closed(p, m);
  const auto r = dressed_rates(p);
  const double P = r.pump_tilde;
  if (!std::isfinite(c.gn)) return m * P / p.gamma_a;
  if (c.gn == 0 || P == 0) return 0;
  if (model == OffResonance::closure) return bundle_population_closure(p, m, c.gn, p.delta_a);
  const double G = r.total_tilde + std::abs(m * p.delta_a - 2 * p.rabi());
  return m * m * c.kappa * P / (G * (m * p.gamma_a + G + r.dephasing_tilde) + c.kappa * m * p.gamma_a);
}

double purity(const SystemParams& p, int n, Mode mode) {
  check_order(n);
  if (mode == Mode::analytic) {
    double bundle = bundle_population(p, n, BundleMethod::closed);
    return clamp_purity(ratio(bundle, background_total(p) + bundle, "purity"), "purity");
  }
  double bundle = bundle_population_numeric(p, n).n_a;
  double total = solve_converged(p).n_a;
  return clamp_purity(ratio(bundle, total, "purity"), "purity");
}

FilteredPurity purity_filtered_parts(const SystemParams& p, int n, Mode mode, OffResonance model) {
  check_order(n);
  FilteredPurity f;
  if (mode == Mode::analytic) {
    f.bundle = bundle_population(p, n, BundleMethod::closed);
    f.background = na1_filtered(p, FilteredForm::qrt);
    for (int m = 2; m < n; ++m) f.lower_orders += offresonant_population(p, m, model);
  } else {
    f.bundle = bundle_population_numeric(p, n).n_a;
    f.background = filtered_numeric(solve(p, 1), p);
    for (int m = 2; m < n; ++m) f.lower_orders += bundle_population_numeric(p, m).n_a;
    f.direct = ratio(f.bundle, filtered_numeric(solve_converged(p), p), "purity_filtered");
  }
  f.value = clamp_purity(ratio(f.bundle, f.background + f.lower_orders + f.bundle, "purity_filtered"),
                         "purity_filtered");
  return f;
}

double purity_filtered(const SystemParams& p, int n, Mode mode, OffResonance model) {
  return purity_filtered_parts(p, n, mode, model).value;
}

double optimal_gamma_sigma(const SystemParams& p, int n) {
  check_order(n);
  if (!(p.omega > 0)) fail(ErrorKind::invalid_parameter, "optimal_gamma_sigma: omega must be > 0");
  return std::pow(p.g * n * n / (4 * p.omega), n) * 8 * p.omega / std::sqrt(3 * std::pow(factorial(n), 3));
}

double asymptotic_coefficient(const SystemParams& p, int n) {
  check_order(n);
  return 1 / (std::pow(16.0, n - 1) * p.gamma_a * (2 * n * p.gamma_a + 3 * p.gamma_sigma) *
              std::pow(double(n), 2 * (1 - 2 * n)) * std::pow(factorial(n - 1), 3));
}

OptimalDrive optimal_omega(const SystemParams& p, int n) {
  check_order(n);
  OptimalDrive out;
  if (n == 2) {
    out.monotone = true;
    out.note = "two-photon purity grows monotonically with the drive; no finite optimum";
    return out;
  }
  if (!(p.gamma_sigma > 0)) fail(ErrorKind::invalid_parameter, "optimal_omega: gamma_sigma must be > 0");
  out.omega = std::pow(4 * p.gamma_a * std::pow(p.g, 2 * n) * asymptotic_coefficient(p, n) / (n * p.gamma_sigma),
                       1.0 / (2 * (n - 1)));
  return out;
}

double weak_drive_plateau(const SystemParams& p, int n) { return n * p.gamma_sigma / (4 * p.gamma_a); }

double strong_drive_bundle(const SystemParams& p, int n) {
  return std::pow(p.g, 2 * n) * asymptotic_coefficient(p, n) / std::pow(p.omega, 2 * (n - 1));
}

double strong_drive_background(const SystemParams& p, int n) {
  check_order(n);
  const double n2 = double(n) * n, n4 = n2 * n2;
  return p.g * p.g / (p.omega * p.omega) *
         (n4 * (2 + n2) * p.gamma_sigma + n2 * (n4 - n2 + 2) * p.gamma_a) /
         (16 * (n2 - 1) * (n2 - 1) * p.gamma_a);
}

double pi2_asymptote(const SystemParams& p) {
  const double C = p.cooperativity(), x = p.gamma_a / p.g;
  return 1 / (1 + 7.0 / 18 * x * x + 8 / (3 * C) + 21 / (18 * C) + 8 / (x * x * C * C));
}

double pi2_filtered_asymptote(const SystemParams& p) {
  const double C = p.cooperativity(), x = p.gamma_a / p.g;
  return 1 / (1 + 8 / (3 * C) + 8 / (x * x * C * C));
}

ResonanceSearch resonance_detuning(const SystemParams& p, int n, bool refine) {
  check_order(n, 1);
  ResonanceSearch out;
  const double centre = 2 * p.rabi() / n;
  out.delta_a = centre;
  if (!refine) return out;
  const double gn = n > 1 ? gn_closed(p, n).gn : p.g;
  const double half = 5 * (std::isfinite(gn) ? gn : 0) + p.gamma_a;
  const int N = choose_truncation(with_delta_a(p, centre));
  auto f = [&](double x) {
    ++out.evaluations;
    auto q = with_delta_a(p, x);
    return filtered_numeric(solve(q, N), q);
  };
  const double tol = 1e-3 * p.g;
  const double phi = (std::sqrt(5.0) - 1) / 2;
  double a = centre - half, b = centre + half;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 > f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    }
  }
  const double best = (a + b) / 2;
  if (best - (centre - half) < 2 * tol || (centre + half) - best < 2 * tol) {
    warn("resonance_detuning: no interior maximum in [" + format_double(centre - half) + ", " +
         format_double(centre + half) + "], keeping 2R/n");
    return out;
  }
  out.delta_a = best;
  out.refined = true;
  return out;
}

const std::vector<Preset>& table_presets() {
  static const std::vector<Preset> rows{
      {"De Santis et al. (2017)", "semiconductor", 19, 9.4, 0.036, 12},
      {"Giesz et al. (2016)", "semiconductor", 21, 8.56, 0.028, 17},
      {"Loo et al. (2012)", "semiconductor", 33, 2.76, 0.6, 2},
      {"Kim et al. (2014)", "semiconductor", 63, 2.35, 0.01, 170},
      {"Laucht et al. (2009)", "semiconductor", 60, 1.6, 0.1, 25},
      {"Fischer et al. (2016)", "semiconductor", 45, 1.3, 0.01, 300},
      {"Ota et al. (2011)", "semiconductor", 51, 0.5, 0.016, 500},
      {"Hennessy et al. (2007)", "semiconductor", 90, 1.1, 0.005, 1600},
      {"Volz et al. (2012)", "semiconductor", 141, 0.37, 0.006, 1800},
      {"Srinivasan et al. (2007)", "semiconductor", 12, 0.33, 0.2, 60},
      {"Arakawa et al. (2012)", "semiconductor", 80, 0.3, 0.01, 2500},
      {"Hamsen et al. (2016)", "atom", 0.08, 0.2, 0.25, 80},
      {"Birnbaum et al. (2005)", "atom", 0.14, 0.12, 0.071, 470},
  };
  return rows;
}

const Preset& find_preset(const std::string& name) {
  for (const auto& p : table_presets()) {
    if (p.name == name) return p;
    // first word of the reference also selects it, case-insensitively
    auto space = p.name.find(' ');
    std::string key = p.name.substr(0, space);
    if (key.size() == name.size() &&
        std::equal(key.begin(), key.end(), name.begin(), [](char a, char b) { return std::tolower(a) == std::tolower(b); }))
      return p;
  }
  fail(ErrorKind::config, "unknown preset '" + name + "'");
}

SystemParams preset_params(const Preset& preset, double omega) {
  SystemParams p;
  p.g = 1;
  p.omega = omega;
  p.delta_a = omega;
  p.gamma_a = preset.gamma_a;
  p.gamma_sigma = preset.gamma_sigma;
  p.n = 2;
  return p;
}

namespace {

void attempt(std::optional<double>& slot, std::string& error, const std::function<double()>& f) {
  try {
    slot = f();
  } catch (const Error& e) {
    error = std::string(to_string(e.kind())) + ": " + e.what();
  }
}

nlohmann::json field_json(const MetricField& f) {
  nlohmann::json j = nlohmann::json::object();
  auto side = [&](const char* tag, const std::optional<double>& v, const std::string& method,
                  const std::string& err) {
    if (v) {
      j[tag] = std::isfinite(*v) ? nlohmann::json(*v) : nlohmann::json(format_double(*v));
      j[std::string(tag) + "_method"] = method;
    } else if (!err.empty()) {
      j[tag] = nullptr;
      j[std::string(tag) + "_error"] = err;
    }
  };
  side("analytic", f.analytic, f.analytic_method, f.analytic_error);
  side("numeric", f.numeric, f.numeric_method, f.numeric_error);
  return j;
}

}  // namespace

BundleMetrics report(const SystemParams& p, const PhononEnvironment* env) {
  p.validate();
  if (env) env->validate();
  BundleMetrics m;
  m.params = p;
  m.phonons = env != nullptr;
  const int n = p.n;
  if (env) m.notes.push_back("analytic paths and the effective model exclude the phonon environment");

  m.gn.analytic_method = "leading-order n-photon coupling";
  attempt(m.gn.analytic, m.gn.analytic_error, [&] { return gn_closed(p, n).gn; });
  m.gn.numeric_method = "matrix perturbation theory on the resonant manifold";
  attempt(m.gn.numeric, m.gn.numeric_error, [&] { return gn_numeric(p, n).coupling.gn; });

  m.A_n.analytic_method = "strong-drive expansion";
  attempt(m.A_n.analytic, m.A_n.analytic_error, [&] { return asymptotic_coefficient(p, n); });

  m.n_a_n.analytic_method = "closed-form bundle population";
  attempt(m.n_a_n.analytic, m.n_a_n.analytic_error, [&] { return bundle_population(p, n); });
  m.n_a_n.numeric_method = "effective n-photon master equation";
  attempt(m.n_a_n.numeric, m.n_a_n.numeric_error, [&] { return bundle_population_numeric(p, n).n_a; });

  m.n_a_1.analytic_method = p.delta == 0 ? "closed-form one-photon background" : "one-photon correlator closure";
  attempt(m.n_a_1.analytic, m.n_a_1.analytic_error, [&] { return background_total(p); });
  std::optional<SolvedModel> one;
  m.n_a_1.numeric_method = "full master equation, one-photon truncation";
  attempt(m.n_a_1.numeric, m.n_a_1.numeric_error, [&] {
    one = solve(p, 1, Frame::bare, env);
    return one->n_a;
  });

  std::optional<SolvedModel> full;
  m.n_a.analytic_method = "one-photon background plus bundle population";
  if (m.n_a_1.analytic && m.n_a_n.analytic) m.n_a.analytic = *m.n_a_1.analytic + *m.n_a_n.analytic;
  else m.n_a.analytic_error = "missing constituent";
  m.n_a.numeric_method = "full master equation";
  attempt(m.n_a.numeric, m.n_a.numeric_error, [&] {
    full = solve_converged(p, default_truncation_tol, Frame::bare, env);
    m.truncation = full->model.N;
    return full->n_a;
  });

  m.n_af_1.analytic_method = "quantum regression, cavity line";
  attempt(m.n_af_1.analytic, m.n_af_1.analytic_error, [&] { return na1_filtered(p, FilteredForm::qrt); });
  m.n_af_1.numeric_method = "spectral filtering, one-photon truncation";
  if (one) attempt(m.n_af_1.numeric, m.n_af_1.numeric_error, [&] { return filtered_numeric(*one, p); });
  else m.n_af_1.numeric_error = "missing constituent";

  double lower = 0;
  std::string lower_error;
  for (int k = 2; k < n; ++k) {
    std::optional<double> v;
    attempt(v, lower_error, [&] { return offresonant_population(p, k); });
    if (v) lower += *v;
  }
  m.n_af.analytic_method = "filtered background plus bundle and off-resonant populations";
  if (m.n_af_1.analytic && m.n_a_n.analytic && lower_error.empty())
    m.n_af.analytic = *m.n_af_1.analytic + lower + *m.n_a_n.analytic;
  else m.n_af.analytic_error = lower_error.empty() ? "missing constituent" : lower_error;
  m.n_af.numeric_method = "spectral filtering of the full model";
  if (full) attempt(m.n_af.numeric, m.n_af.numeric_error, [&] { return filtered_numeric(*full, p); });
  else m.n_af.numeric_error = "missing constituent";

  m.pi_n.analytic_method = "bundle over one-photon plus bundle";
  attempt(m.pi_n.analytic, m.pi_n.analytic_error, [&] { return purity(p, n, Mode::analytic); });
  m.pi_n.numeric_method = "effective bundle over full population";
  if (m.n_a_n.numeric && m.n_a.numeric)
    attempt(m.pi_n.numeric, m.pi_n.numeric_error,
            [&] { return clamp_purity(ratio(*m.n_a_n.numeric, *m.n_a.numeric, "purity"), "purity"); });
  else m.pi_n.numeric_error = "missing constituent";

  m.pi_n_f.analytic_method = "bundle over filtered background plus bundle";
  attempt(m.pi_n_f.analytic, m.pi_n_f.analytic_error, [&] { return purity_filtered(p, n, Mode::analytic); });
  m.pi_n_f.numeric_method = "effective bundle over filtered one-photon background plus bundles";
  if (m.n_a_n.numeric && m.n_af_1.numeric)
    attempt(m.pi_n_f.numeric, m.pi_n_f.numeric_error, [&] {
      double low = 0;
      for (int k = 2; k < n; ++k) low += bundle_population_numeric(p, k).n_a;
      double b = *m.n_a_n.numeric;
      return clamp_purity(ratio(b, *m.n_af_1.numeric + low + b, "purity_filtered"), "purity_filtered");
    });
  else m.pi_n_f.numeric_error = "missing constituent";

  m.rate_n.analytic_method = "gamma_a times bundle population";
  m.rate_n.numeric_method = m.rate_n.analytic_method;
  if (m.n_a_n.analytic) m.rate_n.analytic = p.gamma_a * *m.n_a_n.analytic;
  else m.rate_n.analytic_error = "missing constituent";
  if (m.n_a_n.numeric) m.rate_n.numeric = p.gamma_a * *m.n_a_n.numeric;
  else m.rate_n.numeric_error = "missing constituent";

  if (m.n_a.numeric && m.n_a_n.numeric && *m.n_a.numeric < *m.n_a_n.numeric - 1e-9)
    m.notes.push_back("numeric bundle population exceeds the total population");
  return m;
}

std::string to_json(const BundleMetrics& m) {
  const auto& p = m.params;
  nlohmann::json j;
  j["params"] = {{"g", p.g},
                 {"omega", p.omega},
                 {"delta_a", p.delta_a},
                 {"delta", p.delta},
                 {"gamma_a", p.gamma_a},
                 {"gamma_sigma", p.gamma_sigma},
                 {"gamma_phi", p.gamma_phi},
                 {"n", p.n}};
  j["cooperativity"] = std::isfinite(p.cooperativity()) ? nlohmann::json(p.cooperativity()) : nlohmann::json("inf");
  j["phonons"] = m.phonons;
  j["truncation"] = m.truncation;
  auto& f = j["fields"];
  f["n_a"] = field_json(m.n_a);
  f["n_a_1"] = field_json(m.n_a_1);
  f["n_a_n"] = field_json(m.n_a_n);
  f["n_af"] = field_json(m.n_af);
  f["n_af_1"] = field_json(m.n_af_1);
  f["pi_n"] = field_json(m.pi_n);
  f["pi_n_f"] = field_json(m.pi_n_f);
  f["rate_n"] = field_json(m.rate_n);
  f["A_n"] = field_json(m.A_n);
  f["gn"] = field_json(m.gn);
  j["notes"] = m.notes;
  return j.dump(2);
}

}  // namespace bundler
