#include "bundler/phonon.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <tuple>

#include "bundler/error.hpp"
#include "bundler/io.hpp"

namespace bundler {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
constexpr double pi = 3.14159265358979323846;

// omega * coth(beta omega / 2), continuous at omega = 0 and at T = 0.
double omega_coth(double w, double beta) {
  if (!std::isfinite(beta)) return std::abs(w);
  double x = beta * w / 2;
  if (std::abs(x) < 1e-6) return 2.0 / beta * (1 + x * x / 3);
  return w / std::tanh(x);
}

double upper_limit(const PhononEnvironment& env) { return 12.0 * env.omega_b; }

double gaussian(double w, const PhononEnvironment& env) {
  return std::exp(-w * w / (2 * env.omega_b * env.omega_b));
}

// Gauss-Kronrod panel with bisection until the error estimate drops below
// an absolute tolerance.
template <class F>
auto panel_integrate(F f, double a, double b, double abs_tol, int depth, double& err)
    -> decltype(f(a)) {
  double e = 0;
  auto v = GK::integrate(f, a, b, 0, 0.0, &e);
  if (e <= abs_tol || depth == 0) {
    err += e;
    return v;
  }
  double m = (a + b) / 2;
  return panel_integrate(f, a, m, abs_tol / 2, depth - 1, err) +
         panel_integrate(f, m, b, abs_tol / 2, depth - 1, err);
}

// Real part of the integral of e^{i d tau} phi(tau) over tau >= 0, done in
// closed form: only the on-shell phonon frequency |d| survives.
double linear_term(double d, const PhononEnvironment& env) {
  return pi / 2 * env.alpha_p * gaussian(d, env) * (omega_coth(d, env.beta()) + d);
}

}  // namespace

void PhononEnvironment::validate() const {
  if (!(temperature >= 0)) fail(ErrorKind::invalid_parameter, "temperature must be >= 0");
  if (!(alpha_p >= 0)) fail(ErrorKind::invalid_parameter, "alpha_p must be >= 0");
  if (!(omega_b > 0)) fail(ErrorKind::invalid_parameter, "omega_b must be > 0");
  if (!(dephasing_slope_ueV_per_K >= 0))
    fail(ErrorKind::invalid_parameter, "dephasing slope must be >= 0");
  if (!(hbar_g_ueV > 0)) fail(ErrorKind::invalid_parameter, "hbar_g_ueV must be > 0");
}

double PhononEnvironment::beta() const {
  return temperature > 0 ? 1.0 / (k_B * temperature) : INFINITY;
}

double to_meV(double units_of_g, const PhononEnvironment& env) {
  return units_of_g * env.hbar_g_ueV * 1e-3;
}

double to_units_of_g(double meV, const PhononEnvironment& env) {
  return meV / (env.hbar_g_ueV * 1e-3);
}

double spectral_density(double omega_meV, const PhononEnvironment& env) {
  if (omega_meV < 0) fail(ErrorKind::invalid_parameter, "spectral_density: omega must be >= 0");
  return env.alpha_p * omega_meV * omega_meV * omega_meV * gaussian(omega_meV, env);
}

DisplacementFactor displacement_B(const PhononEnvironment& env) {
  env.validate();
  DisplacementFactor out;
  if (env.alpha_p == 0) return out;
  const double beta = env.beta();
  auto f = [&](double w) { return env.alpha_p * omega_coth(w, beta) * gaussian(w, env); };
  double err = 0;
  double integral = GK::integrate(f, 0.0, upper_limit(env), 20, 1e-14, &err);
  if (err > 1e-10) fail(ErrorKind::integration, "displacement_B: quadrature did not reach 1e-10");
  out.exponent = integral / 2;
  if (out.exponent > 50) {
    out.value = 0;
    out.underflow = true;
  } else {
    out.value = std::exp(-out.exponent);
  }
  return out;
}

std::complex<double> phi(double t, const PhononEnvironment& env) {
  if (t < 0) fail(ErrorKind::invalid_parameter, "phi: t must be >= 0");
  if (env.alpha_p == 0) return 0.0;
  const double beta = env.beta();
  const double top = upper_limit(env);
  auto f = [&](double w) {
    double damp = env.alpha_p * gaussian(w, env);
    return std::complex<double>(damp * omega_coth(w, beta) * std::cos(w * t),
                                -damp * w * std::sin(w * t));
  };
  int panels = 8;
  if (t > 0) panels = std::max(panels, static_cast<int>(std::ceil(top / (pi / (4 * t)))));
  const double h = top / panels;
  std::complex<double> sum = 0;
  // panels narrower than an eighth of the cos/sin period need no refinement
  for (int k = 0; k < panels; ++k) sum += GK::integrate(f, k * h, (k + 1) * h, 0, 0.0);
  return sum;
}

FeedingRates feeding_rates(const PhononEnvironment& env, double delta_a_meV) {
  env.validate();
  FeedingRates out;
  if (env.alpha_p == 0) return out;
  const double d = delta_a_meV;
  const double B = displacement_B(env).value;
  const double gm = env.hbar_g_ueV * 1e-3;
  const double prefactor = 2 * B * B * gm * gm;

  // e^phi - 1 = phi + (e^phi - 1 - phi): the linear piece is done analytically
  // and the remainder, which decays at least as phi^2, numerically.
  auto remainder = [&](double tau) {
    auto p = phi(tau, env);
    return std::exp(p) - 1.0 - p;
  };
  const double r0 = std::abs(remainder(0.0));
  // one complex integrand carries cos(d tau) Re r and sin(d tau) Im r
  auto k = [&](double tau) {
    auto r = remainder(tau);
    return std::complex<double>(std::cos(d * tau) * r.real(), std::sin(d * tau) * r.imag());
  };
  double h = 1.0 / env.omega_b;
  if (d != 0) h = std::min(h, pi / (4 * std::abs(d)));
  const double tau_min = 10.0 / env.omega_b;
  const double tau_cap = 1e4 / env.omega_b;
  std::complex<double> acc = 0;
  double err_total = 0;
  double tau = 0;
  int quiet = 0;
  double r_end = r0;
  while (true) {
    acc += panel_integrate(k, tau, tau + h, 1e-10 * r0 * h, 6, err_total);
    tau += h;
    r_end = std::abs(remainder(tau));
    if (r0 == 0 || r_end < 1e-8 * r0)
      ++quiet;
    else
      quiet = 0;
    if (quiet >= 3 && tau >= tau_min) break;
    if (tau > tau_cap)
      fail(ErrorKind::integration,
           "feeding_rates: integrand not below 1e-8 of its initial value within tau = " +
               format_double(tau) + " hbar/meV");
  }
  const double A = acc.real(), Bs = acc.imag();
  out.rate_up = prefactor * (linear_term(d, env) + A - Bs);
  out.rate_down = prefactor * (linear_term(-d, env) + A + Bs);
  out.window = tau;
  // the remainder falls off at least as tau^-4, so the neglected tail is below r_end * tau
  out.error_estimate = prefactor * (err_total + r_end * tau);
  if (!std::isfinite(out.rate_up) || !std::isfinite(out.rate_down))
    fail(ErrorKind::integration, "feeding_rates: non-finite result");
  // tiny negative values are quadrature noise around an exact zero
  if (out.rate_up < 0 && out.rate_up > -10 * out.error_estimate - 1e-15) out.rate_up = 0;
  if (out.rate_down < 0 && out.rate_down > -10 * out.error_estimate - 1e-15) out.rate_down = 0;
  if (out.rate_up < 0 || out.rate_down < 0)
    fail(ErrorKind::numerical, "feeding_rates: negative rate");
  return out;
}

namespace {

using CacheKey = std::tuple<double, double, double, double, double, double>;

struct RateCache {
  std::shared_mutex mutex;
  std::map<CacheKey, FeedingRates> table;
};

RateCache& cache() {
  static RateCache c;
  return c;
}

}  // namespace

FeedingRates feeding_rates_cached(const PhononEnvironment& env, double delta_a_meV) {
  CacheKey key{env.temperature, env.alpha_p, env.omega_b, env.dephasing_slope_ueV_per_K,
               env.hbar_g_ueV, delta_a_meV};
  auto& c = cache();
  {
    std::shared_lock lock(c.mutex);
    auto it = c.table.find(key);
    if (it != c.table.end()) return it->second;
  }
  auto rates = feeding_rates(env, delta_a_meV);
  std::unique_lock lock(c.mutex);
  c.table[key] = rates;
  return rates;
}

void clear_phonon_cache() {
  auto& c = cache();
  std::unique_lock lock(c.mutex);
  c.table.clear();
}

double dephasing_rate(const PhononEnvironment& env) {
  return env.dephasing_slope_ueV_per_K * env.temperature * 1e-3;
}

std::vector<PhononRateRow> phonon_rate_table(PhononEnvironment env, double delta_a,
                                             const std::vector<double>& temperatures) {
  std::vector<PhononRateRow> rows;
  for (double T : temperatures) {
    env.temperature = T;
    auto r = feeding_rates_cached(env, to_meV(delta_a, env));
    rows.push_back({T, to_units_of_g(r.rate_up, env), to_units_of_g(r.rate_down, env),
                    to_units_of_g(dephasing_rate(env), env)});
  }
  return rows;
}

std::string phonon_rate_csv(const std::vector<PhononRateRow>& rows) {
  CsvTable t({"T_K", "rate_up", "rate_down", "gamma_phi"});
  for (const auto& r : rows) t.add({r.temperature, r.rate_up, r.rate_down, r.gamma_phi});
  return t.str();
}

}  // namespace bundler
