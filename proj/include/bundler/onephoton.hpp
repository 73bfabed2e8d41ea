#pragma once

#include <array>

#include "bundler/spectra.hpp"

namespace bundler {

// Steady correlators of the model with the cavity truncated at one photon,
// keeping only the correlators that close the hierarchy.
struct CorrelatorSet {
  double n_a = 0;       // <a^dag a>
  double n_sigma = 0;   // <sigma^dag sigma>
  cplx sigma;           // <sigma>
  cplx a;               // <a>
  cplx sigma_dag_a;     // <sigma^dag a>
  cplx a_n_sigma;       // <a sigma^dag sigma>
  cplx a_sigma;         // <a sigma>
  double residual = 0;  // max |lhs| of the substituted equations
};

CorrelatorSet steady_correlators(const SystemParams& p);

enum class Na1Form { full, resonant_expansion };
double na1(const SystemParams& p, Na1Form form = Na1Form::full);

// Four-mode quantum-regression expansion of <a^dag(0) a(tau)> fluctuations.
struct QrtResult {
  std::array<SpectralLine, 4> lines;
  std::size_t cavity = 0;  // index of the line nearest the cavity frequency
  double fluctuation = 0;  // <a^dag a> - |<a>|^2, the L sum rule
};
QrtResult qrt_lines(const SystemParams& p);

enum class FilteredForm { qrt, closed };
double na1_filtered(const SystemParams& p, FilteredForm form = FilteredForm::qrt);

}  // namespace bundler
