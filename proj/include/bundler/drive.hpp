#pragma once

#include <string>
#include <vector>

#include "bundler/spectra.hpp"

namespace bundler {

// Cavity-driven configuration H += omega_cav (a + a^dag) rewritten with
// a -> alpha + a: the cavity drive cancels and the emitter sees
// g (alpha* sigma + alpha sigma^dag).
struct DriveTransform {
  cplx alpha;
  double omega_cav = 0;
  double omega_eff = 0;  // |alpha|
  double phase = 0;      // arg(alpha)
  double gamma_filter = 0;
};

DriveTransform displace(const SystemParams& p, double omega_cav);
// Cavity drive amplitude that produces |alpha| = omega_eff.
double cavity_drive_for(const SystemParams& p, double omega_eff);

// Fluctuation model left after the displacement; p.omega must be zero.
Model displaced_model(const SystemParams& p, int N, const DriveTransform& t);

double coherent_spectrum(cplx a_mean, double gamma_filter, double omega);

struct RejectionOptions {
  double gamma_filter = 0;  // 0 selects gamma_a
  bool line_only = false;   // S_I from the cavity lines alone
};

struct Rejection {
  double omega_eff = 0;
  double omega_cav = 0;
  cplx alpha;
  cplx a_mean;  // alpha plus the emitter-induced field
  double S_C = 0;
  double S_I = 0;
  double ratio = 0;
  int N = 0;
};

// Coherent to incoherent emission at the cavity frequency for the cavity
// driven emitter whose effective drive is p.omega.
Rejection rejection_ratio(const SystemParams& p, const RejectionOptions& opt = {});
double rejection_ratio_from(cplx a_mean, double gamma_filter, double omega_a, double S_I);

// Two-photon condition delta_a = omega_eff for every entry of `omega_eff`.
std::vector<Rejection> rejection_curve(SystemParams p, const std::vector<double>& omega_eff,
                                       const RejectionOptions& opt = {});
std::string rejection_csv(const std::vector<Rejection>& rows);

}  // namespace bundler
