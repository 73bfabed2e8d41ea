#include "bundler/steady.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <sstream>

#include "bundler/io.hpp"

namespace bundler {

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(data, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Eigen::VectorXd DensityMatrix::cavity_populations() const {
  const Index dc = dims.back();
  const Index dt = data.rows() / dc;
  Eigen::VectorXd p = Eigen::VectorXd::Zero(dc);
  for (Index s = 0; s < dt; ++s)
    for (Index k = 0; k < dc; ++k) p(k) += data(s * dc + k, s * dc + k).real();
  return p;
}

DensityMatrix steady_state(const Superoperator& L, SteadyStateReport* report) {
  const Index d = L.hilbert_dim();
  const Index n = d * d;
  if (L.data.rows() != n || L.data.cols() != n)
    fail(ErrorKind::shape_mismatch, "steady_state: superoperator side is not d^2");
  const double norm = L.data.norm();
  SteadyStateReport info;

  // Trace functional Tr X = vec(I)^T vec(X) replaces one population equation.
  Eigen::VectorXcd trace_row = vec(Eigen::MatrixXcd::Identity(d, d));
  Eigen::MatrixXcd A = L.data;
  A.row(0) = trace_row.transpose();
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(n);
  b(0) = 1.0;

  Eigen::VectorXcd x;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
  info.rcond = lu.rcond();
  bool ok = false;
  if (std::isfinite(info.rcond) && info.rcond > 1e-13) {
    x = lu.solve(b);
    info.residual = norm > 0 ? (L.data * x).norm() / (norm * x.norm()) : 0.0;
    ok = x.allFinite() && info.residual < 1e-10;
  }
  if (!ok) {
    info.used_svd = true;
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(L.data, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double top = sv(0) > 0 ? sv(0) : 1.0;
    if (n > 1 && sv(n - 2) / top < 1e-12) {
      std::ostringstream msg;
      msg << "steady_state: null space of dimension >= 2 (singular values " << format_double(sv(n - 2))
          << ", " << format_double(sv(n - 1)) << " relative to " << format_double(top) << ")";
      fail(ErrorKind::non_unique_steady_state, msg.str());
    }
    x = svd.matrixV().col(n - 1);
    cplx tr = trace_row.dot(x);
    if (std::abs(tr) < 1e-300) fail(ErrorKind::numerical, "steady_state: null vector is traceless");
    x /= tr;
    info.residual = norm > 0 ? (L.data * x).norm() / (norm * x.norm()) : 0.0;
    if (!(info.residual < 1e-10)) {
      std::ostringstream msg;
      msg << "steady_state: solve failed, rcond = " << format_double(info.rcond)
          << ", residual = " << format_double(info.residual);
      fail(ErrorKind::numerical, msg.str());
    }
  }

  Eigen::MatrixXcd rho = unvec(x, d);
  rho = (rho + rho.adjoint()).eval() / 2.0;
  rho /= rho.trace().real();
  if (report) *report = info;
  return {std::move(rho), L.dims};
}

cplx expectation(const DensityMatrix& rho, const QOperator& op) {
  if (rho.dims != op.dims()) fail(ErrorKind::shape_mismatch, "expectation: dims differ");
  // Tr(O rho) without forming the product
  return (op.matrix().transpose().array() * rho.data.array()).sum();
}

int converge_truncation(const std::function<bool(int)>& accept, int floor, int cap) {
  if (floor > cap)
    fail(ErrorKind::truncation_overflow, "truncation floor " + std::to_string(floor) +
                                             " exceeds cap " + std::to_string(cap));
  if (accept(floor)) return floor;
  int lo = floor, hi = floor;
  while (true) {
    if (hi == cap)
      fail(ErrorKind::truncation_overflow,
           "truncation not converged at cap N = " + std::to_string(cap));
    lo = hi;
    hi = std::min(cap, 2 * hi);
    if (accept(hi)) break;
  }
  while (hi - lo > 1) {
    int mid = lo + (hi - lo) / 2;
    if (accept(mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

double top_level_fraction(const DensityMatrix& rho) {
  auto p = rho.cavity_populations();
  Index top = p.size() - 1;
  double n_a = 0;
  for (Index k = 0; k <= top; ++k) n_a += k * p(k);
  if (n_a <= 0) return 0;
  return (p(top) + p(top - 1)) / n_a;
}

int choose_truncation(const SystemParams& p, double tol, int cap, Frame frame,
                      const PhononEnvironment* env) {
  if (!(tol > 0 && tol <= 1e-2)) fail(ErrorKind::invalid_parameter, "truncation tol must be in (0, 1e-2]");
  p.validate();
  auto accept = [&](int N) {
    auto m = build_model(p, N, frame, env);
    return top_level_fraction(steady_state(m.L)) < tol;
  };
  return converge_truncation(accept, p.n + 2, cap);
}

Eigen::VectorXcd evolve(const Superoperator& L, Eigen::VectorXcd x, double t_final, double dt) {
  if (!(dt > 0)) fail(ErrorKind::invalid_parameter, "evolve: dt must be > 0");
  const auto& M = L.data;
  long steps = std::lround(std::ceil(t_final / dt));
  if (steps <= 0) return x;
  const double h = t_final / steps;
  for (long s = 0; s < steps; ++s) {
    Eigen::VectorXcd k1 = M * x;
    Eigen::VectorXcd k2 = M * (x + (h / 2) * k1);
    Eigen::VectorXcd k3 = M * (x + (h / 2) * k2);
    Eigen::VectorXcd k4 = M * (x + h * k3);
    x += (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return x;
}

SolvedModel solve(const SystemParams& p, int N, Frame frame, const PhononEnvironment* env) {
  SolvedModel s{build_model(p, N, frame, env), {}, 0};
  s.rho = steady_state(s.model.L);
  s.n_a = expectation(s.rho, s.model.ops.a.adjoint() * s.model.ops.a).real();
  return s;
}

SolvedModel solve_converged(const SystemParams& p, double tol, Frame frame,
                            const PhononEnvironment* env) {
  return solve(p, choose_truncation(p, tol, default_truncation_cap, frame, env), frame, env);
}

}  // namespace bundler
