#pragma once

#include <complex>
#include <string>
#include <vector>

namespace bundler {

// Energies in meV, temperatures in K, times in hbar/meV. `hbar_g_ueV` is the
// coupling energy that defines the solver's unit of frequency.
struct PhononEnvironment {
  static constexpr double k_B = 8.617333262e-2;  // meV/K

  double temperature = 0.0;
  double alpha_p = 0.18;  // meV^-2
  double omega_b = 0.22;  // meV
  double dephasing_slope_ueV_per_K = 1.0;
  double hbar_g_ueV = 45.0;

  void validate() const;
  double beta() const;  // 1/(k_B T), +inf at T = 0
  bool operator==(const PhononEnvironment&) const = default;
};

double to_meV(double units_of_g, const PhononEnvironment& env);
double to_units_of_g(double meV, const PhononEnvironment& env);

double spectral_density(double omega_meV, const PhononEnvironment& env);

struct DisplacementFactor {
  double value = 1.0;
  double exponent = 0.0;  // value = exp(-exponent)
  bool underflow = false;
};
DisplacementFactor displacement_B(const PhononEnvironment& env);

std::complex<double> phi(double t, const PhononEnvironment& env);

struct FeedingRates {
  double rate_up = 0;    // gamma_{sigma^dag a}, e^{+i Delta_a tau} kernel
  double rate_down = 0;  // gamma_{sigma a^dag}, e^{-i Delta_a tau} kernel
  double window = 0;     // tau range actually integrated
  double error_estimate = 0;
};

// Rates in meV for a cavity detuning given in meV.
FeedingRates feeding_rates(const PhononEnvironment& env, double delta_a_meV);

// Same, memoized per (env, delta_a). Safe for concurrent use.
FeedingRates feeding_rates_cached(const PhononEnvironment& env, double delta_a_meV);
void clear_phonon_cache();

double dephasing_rate(const PhononEnvironment& env);  // meV

struct PhononRateRow {
  double temperature;
  double rate_up;
  double rate_down;
  double gamma_phi;
};

// Rates in units of g versus temperature at fixed cavity detuning (units of g).
std::vector<PhononRateRow> phonon_rate_table(PhononEnvironment env, double delta_a,
                                             const std::vector<double>& temperatures);
std::string phonon_rate_csv(const std::vector<PhononRateRow>& rows);

}  // namespace bundler
