#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bundler/effective.hpp"
#include "bundler/onephoton.hpp"

namespace bundler {

enum class Mode { analytic, numeric };
const char* to_string(Mode m);

// How an m-photon process with m < n is evaluated when the cavity sits on
// the n-photon resonance.
enum class OffResonance {
  closure,     // correlator closure at the actual cavity detuning
  broadening,  // closed-form rate with |m delta_a - 2R| added to the dressed linewidth
};

double offresonant_population(const SystemParams& p, int m, OffResonance model = OffResonance::closure);

double purity(const SystemParams& p, int n, Mode mode);

struct FilteredPurity {
  double value = 0;
  double bundle = 0;        // n_a^(n)
  double background = 0;    // filtered one-photon background
  double lower_orders = 0;  // sum of n_a^(m), 2 <= m < n
  double direct = NAN;      // numeric only: n_a^(n) / n_af of the full model
};
FilteredPurity purity_filtered_parts(const SystemParams& p, int n, Mode mode,
                                     OffResonance model = OffResonance::closure);
double purity_filtered(const SystemParams& p, int n, Mode mode, OffResonance model = OffResonance::closure);

// Purities slightly outside [0, 1] are clamped and reported through warn().
double clamp_purity(double raw, const std::string& what);

double optimal_gamma_sigma(const SystemParams& p, int n);

struct OptimalDrive {
  double omega = INFINITY;
  bool monotone = false;  // purity keeps growing with drive; omega is +inf
  std::string note;
};
OptimalDrive optimal_omega(const SystemParams& p, int n);

// Strong-drive coefficient: n_a^(n) -> g^{2n} A_n / omega^{2(n-1)}.
double asymptotic_coefficient(const SystemParams& p, int n);
double weak_drive_plateau(const SystemParams& p, int n);
double strong_drive_bundle(const SystemParams& p, int n);
// One-photon background at delta_a = 2 omega / n for omega -> inf.
double strong_drive_background(const SystemParams& p, int n);
double pi2_asymptote(const SystemParams& p);
double pi2_filtered_asymptote(const SystemParams& p);

struct ResonanceSearch {
  double delta_a = 0;
  bool refined = false;
  int evaluations = 0;
};
ResonanceSearch resonance_detuning(const SystemParams& p, int n, bool refine = false);

struct Preset {
  std::string name;
  std::string platform;  // semiconductor | atom
  double hbar_g_ueV = 0;
  double gamma_a = 0;
  double gamma_sigma = 0;
  double cooperativity = 0;  // as quoted
};
const std::vector<Preset>& table_presets();
const Preset& find_preset(const std::string& name);
// Two-photon resonant configuration at the given drive.
SystemParams preset_params(const Preset& preset, double omega = 20.0);

struct MetricField {
  std::optional<double> analytic;
  std::optional<double> numeric;
  std::string analytic_error;
  std::string numeric_error;
  std::string analytic_method;
  std::string numeric_method;
};

struct BundleMetrics {
  SystemParams params;
  bool phonons = false;
  int truncation = 0;
  MetricField n_a, n_a_1, n_a_n, n_af, n_af_1, pi_n, pi_n_f, rate_n, A_n, gn;
  std::vector<std::string> notes;
};

BundleMetrics report(const SystemParams& p, const PhononEnvironment* env = nullptr);
std::string to_json(const BundleMetrics& m);

}  // namespace bundler
