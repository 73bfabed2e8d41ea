#pragma once

#include <functional>

#include "bundler/liouville.hpp"

namespace bundler {

struct DensityMatrix {
  Eigen::MatrixXcd data;
  std::vector<Index> dims;

  double min_eigenvalue() const;
  // Reduced populations of cavity Fock levels 0..N.
  Eigen::VectorXd cavity_populations() const;
};

struct SteadyStateReport {
  double rcond = 0;
  double residual = 0;  // ||L vec(rho)|| / ||L||
  bool used_svd = false;
};

DensityMatrix steady_state(const Superoperator& L, SteadyStateReport* report = nullptr);

cplx expectation(const DensityMatrix& rho, const QOperator& op);

inline constexpr double default_truncation_tol = 1e-8;
inline constexpr int default_truncation_cap = 31;

// Smallest N (>= floor) for which `accept(N)` holds, assuming acceptance is
// monotone in N. Doubling from `floor`, then bisection.
int converge_truncation(const std::function<bool(int)>& accept, int floor, int cap);

// Population of the two highest Fock levels relative to n_a.
double top_level_fraction(const DensityMatrix& rho);

int choose_truncation(const SystemParams& p, double tol = default_truncation_tol,
                      int cap = default_truncation_cap, Frame frame = Frame::bare,
                      const PhononEnvironment* env = nullptr);

// Fixed-step fourth-order Runge-Kutta propagation; validation use only.
Eigen::VectorXcd evolve(const Superoperator& L, Eigen::VectorXcd x, double t_final, double dt);

// Steady state of the full model with an automatically chosen truncation.
struct SolvedModel {
  Model model;
  DensityMatrix rho;
  double n_a = 0;
};
SolvedModel solve(const SystemParams& p, int N, Frame frame = Frame::bare,
                  const PhononEnvironment* env = nullptr);
SolvedModel solve_converged(const SystemParams& p, double tol = default_truncation_tol,
                            Frame frame = Frame::bare, const PhononEnvironment* env = nullptr);

}  // namespace bundler
