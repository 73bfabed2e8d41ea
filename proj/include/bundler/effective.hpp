#pragma once

#include <string>
#include <vector>

#include "bundler/steady.hpp"

namespace bundler {

struct EffectiveCoupling {
  int n = 0;
  double gn = 0;
  double kappa = 0;  // 4 (n-1)! gn^2 / gamma_a
};

double factorial(int n);

EffectiveCoupling make_coupling(int n, double gn, double gamma_a);

// Leading-order n-photon coupling between |+,m> and |-,m+n> at general
// emitter detuning; +inf when the drive vanishes.
EffectiveCoupling gn_closed(const SystemParams& p, int n);

// The block structure of the Hamiltonian restricted to
// {|+,0>, |-,n>} (x) {|+,1>, |-,1>, ..., |+,n-1>, |-,n-1>}, dressed energies
// measured from the mean emitter energy.
struct ManifoldHamiltonian {
  Eigen::Matrix2d h;
  Eigen::MatrixXd H;
  Eigen::MatrixXd V;  // 2 x 2(n-1)
  std::vector<std::string> p_labels;
  std::vector<std::string> q_labels;
  Eigen::MatrixXd full() const;
};
ManifoldHamiltonian manifold_hamiltonian(const SystemParams& p, int n, double delta_a);

struct NumericCoupling {
  EffectiveCoupling coupling;
  Eigen::Matrix2d h_eff;
  double shift_plus = 0;   // level shift of |+,0>
  double shift_minus = 0;  // level shift of |-,n>
  double delta_a = 0;      // detuning used (2R/n)
};
NumericCoupling gn_numeric(const SystemParams& p, int n);

// Effective n-photon master equation in the dressed basis: emitter slot
// ordered (-, +), sigma~ = |-><+|.
Model bundle_model(const SystemParams& p, int n, int N);
Superoperator bundle_liouvillian(const SystemParams& p, int n, int N);

enum class BundleMethod { closed, simplified, ode };

double bundle_population(const SystemParams& p, int n, BundleMethod method = BundleMethod::closed);

// Three-correlator closure at an arbitrary cavity detuning with a supplied
// coupling; reduces to the closed form on resonance.
double bundle_population_closure(const SystemParams& p, int n, double gn, double delta_a);

struct BundleNumeric {
  double n_a = 0;
  int N = 0;
  SolvedModel solved;
};
BundleNumeric bundle_population_numeric(const SystemParams& p, int n,
                                        double tol = default_truncation_tol);

// True when n gamma_a comfortably exceeds kappa + gamma~ (factor 10); warns otherwise.
bool antibunching_regime(const SystemParams& p, int n);

}  // namespace bundler
