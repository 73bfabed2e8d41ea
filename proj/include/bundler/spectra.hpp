#pragma once

#include <string>
#include <vector>

#include "bundler/steady.hpp"

namespace bundler {

enum class PeakLabel {
  cavity_peak,
  mollow_central,
  mollow_sideband_plus,
  mollow_sideband_minus,
  coherent,
  other,
};
const char* to_string(PeakLabel label);

// One term of the expansion of <a^dag(0) a(tau)> over Liouvillian eigenmodes.
// omega is laser-relative; the cavity line of a cavity detuned by delta_a
// sits at omega = +delta_a.
struct SpectralLine {
  double omega = 0;
  double gamma = 0;  // full width, -2 Re(lambda)
  double L = 0;
  double K = 0;
  cplx lambda;
  bool coherent = false;  // the stationary mode: weight |<a>|^2, a delta at the laser frequency
};

struct SpectrumDecomposition {
  std::vector<SpectralLine> lines;
  double n_a = 0;
  double coherent_weight = 0;
  std::vector<PeakLabel> labels;  // parallel to lines; filled by classify_peaks
};

SpectrumDecomposition decompose(const Superoperator& L, const QOperator& a, const DensityMatrix& rho);
SpectrumDecomposition decompose(const SolvedModel& s);

// Incoherent spectrum; the coherent delta line is excluded.
double spectrum_at(const SpectrumDecomposition& dec, double omega);

// Same quantity from one resolvent solve, without diagonalizing L.
double spectrum_direct(const Superoperator& L, const QOperator& a, const DensityMatrix& rho, double omega);
double spectrum_direct(const SolvedModel& s, double omega);

struct FilteredPopulation {
  double value = 0;
  std::size_t selected = 0;
  bool empty = true;
};
// Sum of L over lines with |omega - target| < window, coherent line included
// when it falls inside the window.
FilteredPopulation filtered_population(const SpectrumDecomposition& dec, double omega_target,
                                       double window);

struct PeakClassification {
  std::vector<PeakLabel> labels;
  std::vector<std::string> merges;  // expected positions that coincide within tolerance
};
PeakClassification classify_peaks(const SpectrumDecomposition& dec, const SystemParams& p);

// Local maxima of S on a uniform grid that exceed `fraction` of the grid maximum.
std::vector<double> find_peaks(const SpectrumDecomposition& dec, double lo, double hi, double step,
                               double fraction = 0.02);

std::string spectrum_csv(const SpectrumDecomposition& dec, const std::vector<double>& omegas);
std::string lines_csv(const SpectrumDecomposition& dec);

}  // namespace bundler
