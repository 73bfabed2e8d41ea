#include "bundler/effective.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "bundler/diag.hpp"
#include "bundler/io.hpp"

namespace bundler {

double factorial(int n) {
  if (n < 0) fail(ErrorKind::invalid_order, "factorial of a negative number");
  return std::tgamma(n + 1.0);
}

EffectiveCoupling make_coupling(int n, double gn, double gamma_a) {
  EffectiveCoupling c;
  c.n = n;
  c.gn = gn;
  c.kappa = 4 * factorial(n - 1) * gn * gn / gamma_a;
  return c;
}

EffectiveCoupling gn_closed(const SystemParams& p, int n) {
  if (n < 1) fail(ErrorKind::invalid_order, "gn_closed: n must be >= 1");
  if (p.g > 0 && p.omega < 5 * p.g)
    warn("gn_closed: omega = " + format_double(p.omega) + " g is not large against g");
  const double R = p.rabi();
  if (n > 1 && R == 0) return make_coupling(n, INFINITY, p.gamma_a);
  auto b = dressed_basis(p.delta, p.omega);
  const double m = n - 1;
  double gn = std::pow(p.g, n) / std::pow(R, m) * std::pow(n * n / 2.0, m) * std::pow(b.c, m) *
              std::pow(b.s, n + 1) / std::pow(factorial(n - 1), 2);
  return make_coupling(n, std::abs(gn), p.gamma_a);
}

Eigen::MatrixXd ManifoldHamiltonian::full() const {
  const Index q = H.rows();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2 + q, 2 + q);
  m.topLeftCorner(2, 2) = h;
  m.topRightCorner(2, q) = V;
  m.bottomLeftCorner(q, 2) = V.transpose();
  m.bottomRightCorner(q, q) = H;
  return m;
}

ManifoldHamiltonian manifold_hamiltonian(const SystemParams& p, int n, double delta_a) {
  if (n < 2) fail(ErrorKind::invalid_order, "manifold_hamiltonian: n must be >= 2");
  const auto b = dressed_basis(p.delta, p.omega);
  const double R = b.rabi, c = b.c, s = b.s;
  // sigma in the dressed basis, indices 0 = +, 1 = -
  const double sig[2][2] = {{c * s, -c * c}, {s * s, -c * s}};
  const double sign[2] = {1, -1};
  const char* name[2] = {"+", "-"};

  // states (dressed index, photons): P first, then Q ordered by photon number
  std::vector<std::pair<int, int>> states{{0, 0}, {1, n}};
  for (int k = 1; k < n; ++k) {
    states.push_back({0, k});
    states.push_back({1, k});
  }
  const Index dim = states.size();
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(dim, dim);
  for (Index i = 0; i < dim; ++i) {
    auto [si, ki] = states[i];
    F(i, i) = sign[si] * R + ki * delta_a;
    for (Index j = 0; j < dim; ++j) {
      auto [sj, kj] = states[j];
      // g a^dag sigma raises the photon number by one
      if (ki == kj + 1) {
        F(i, j) = p.g * std::sqrt(double(ki)) * sig[si][sj];
        F(j, i) = F(i, j);
      }
    }
  }
  ManifoldHamiltonian m;
  const Index q = dim - 2;
  m.h = F.topLeftCorner(2, 2);
  m.V = F.topRightCorner(2, q);
  m.H = F.bottomRightCorner(q, q);
  for (Index i = 0; i < dim; ++i) {
    std::string label = std::string("|") + name[states[i].first] + "," + std::to_string(states[i].second) + ">";
    (i < 2 ? m.p_labels : m.q_labels).push_back(label);
  }
  return m;
}

NumericCoupling gn_numeric(const SystemParams& p, int n) {
  if (n < 2 || n > 6) fail(ErrorKind::invalid_order, "gn_numeric: n must be in [2, 6]");
  if (p.g > 0 && p.omega < 5 * p.g)
    warn("gn_numeric: omega = " + format_double(p.omega) + " g is not large against g");
  const double R = p.rabi();
  if (!(R > 0)) fail(ErrorKind::invalid_parameter, "gn_numeric: requires a nonzero Rabi frequency");
  NumericCoupling out;
  out.delta_a = 2 * R / n;
  auto m = manifold_hamiltonian(p, n, out.delta_a);
  const double E0 = m.h(0, 0);
  const Index q = m.H.rows();
  Eigen::MatrixXd G = E0 * Eigen::MatrixXd::Identity(q, q) - m.H;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(G);
  const double scale = std::max(1.0, G.cwiseAbs().maxCoeff());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.H);
  Index nearest = 0;
  (es.eigenvalues().array() - E0).abs().minCoeff(&nearest);
  if (std::abs(es.eigenvalues()(nearest) - E0) < 1e-12 * scale || !lu.isInvertible()) {
    Index dominant = 0;
    es.eigenvectors().col(nearest).cwiseAbs().maxCoeff(&dominant);
    fail(ErrorKind::manifold_degeneracy, "gn_numeric: intermediate level " + m.q_labels[dominant] +
                                             " crosses the resonant pair at E0 = " + format_double(E0));
  }
  out.h_eff = m.h + m.V * lu.solve(m.V.transpose());
  // <-,n| (a^dag)^n sigma~ |+,0> carries sqrt(n!)
  out.coupling = make_coupling(n, std::abs(out.h_eff(0, 1)) / std::sqrt(factorial(n)), p.gamma_a);
  out.shift_plus = out.h_eff(0, 0) - m.h(0, 0);
  out.shift_minus = out.h_eff(1, 1) - m.h(1, 1);
  return out;
}

namespace {

double coupling_for(const SystemParams& p, int n) {
  double gn = gn_closed(p, n).gn;
  if (!std::isfinite(gn))
    fail(ErrorKind::invalid_parameter, "effective model needs a finite n-photon coupling (omega > 0)");
  return gn;
}

}  // namespace

Model bundle_model(const SystemParams& p, int n, int N) {
  p.validate();
  if (n < 1) fail(ErrorKind::invalid_order, "bundle_model: n must be >= 1");
  if (N < 2 * n + 2)
    fail(ErrorKind::invalid_truncation,
         "bundle_model: truncation N = " + std::to_string(N) + " below 2n+2 = " + std::to_string(2 * n + 2));
  if (p.omega < 10 * p.gamma_sigma)
    warn("bundle_model: dressed rates assume omega >> gamma_sigma");
  const double gn = coupling_for(p, n);
  Model m;
  m.params = p;
  m.N = N;
  m.frame = Frame::dressed;
  m.ops = model_ops(N);
  const auto& a = m.ops.a;
  const auto& st = m.ops.sigma;
  QOperator an = identity(m.ops.dims);
  for (int k = 0; k < n; ++k) an = an * a;
  QOperator sz = st.adjoint() * st - st * st.adjoint();
  m.H = p.rabi() * sz + p.delta_a * (a.adjoint() * a) + gn * (st.adjoint() * an + st * an.adjoint());
  auto r = dressed_rates(p);
  m.channels = {{a, p.gamma_a}, {st, r.gamma_tilde}, {st.adjoint(), r.pump_tilde},
                {st.adjoint() * st, r.dephasing_tilde}};
  m.L = liouvillian(m.H, m.channels);
  return m;
}

Superoperator bundle_liouvillian(const SystemParams& p, int n, int N) { return bundle_model(p, n, N).L; }

double bundle_population_closure(const SystemParams& p, int n, double gn, double delta_a) {
  const auto r = dressed_rates(p);
  const double R = p.rabi();
  const double nf = factorial(n);
  // unknowns: Re X, Im X, S, n_a with X = <a^n sigma~^dag>, S = <sigma~^dag sigma~>
  const double decay = (n * p.gamma_a + r.total_tilde + r.dephasing_tilde) / 2;
  const double detune = 2 * R - n * delta_a;
  Eigen::Matrix4d M = Eigen::Matrix4d::Zero();
  Eigen::Vector4d rhs = Eigen::Vector4d::Zero();
  // (i detune - decay) X - i n! gn S = 0
  M(0, 0) = -decay;
  M(0, 1) = -detune;
  M(1, 0) = detune;
  M(1, 1) = -decay;
  M(1, 2) = -nf * gn;
  // -Gamma~ S + 2 gn Im X + P~ = 0
  M(2, 1) = 2 * gn;
  M(2, 2) = -r.total_tilde;
  rhs(2) = -r.pump_tilde;
  // -gamma_a n_a - 2 n gn Im X = 0
  M(3, 1) = -2.0 * n * gn;
  M(3, 3) = -p.gamma_a;
  Eigen::FullPivLU<Eigen::Matrix4d> lu(M);
  if (!lu.isInvertible()) fail(ErrorKind::numerical, "bundle closure: singular linear system");
  return lu.solve(rhs)(3);
}

double bundle_population(const SystemParams& p, int n, BundleMethod method) {
  p.validate();
  if (n < 1) fail(ErrorKind::invalid_order, "bundle_population: n must be >= 1");
  const auto r = dressed_rates(p);
  const auto c = gn_closed(p, n);
  if (c.gn >= p.gamma_a && std::isfinite(c.gn))
    warn("bundle_population: g(n) = " + format_double(c.gn) + " is not small against gamma_a");
  const double P = r.pump_tilde, G = r.total_tilde;
  if (P == 0 || c.gn == 0) return 0;
  switch (method) {
    case BundleMethod::closed: {
      // written with 1/kappa so that kappa = inf gives the saturated value
      const double inv_k = 1 / c.kappa;
      return n * n * P / (G * (n * p.gamma_a + G + r.dephasing_tilde) * inv_k + n * p.gamma_a);
    }
    case BundleMethod::simplified: {
      const double inv_k = 1 / c.kappa;
      return n * P / (p.gamma_a * (1 + G * inv_k));
    }
    case BundleMethod::ode: {
      if (!std::isfinite(c.gn)) return n * P / p.gamma_a;
      return bundle_population_closure(p, n, c.gn, p.delta_a);
    }
  }
  return 0;
}

BundleNumeric bundle_population_numeric(const SystemParams& p, int n, double tol) {
  if (!(tol > 0 && tol <= 1e-2)) fail(ErrorKind::invalid_parameter, "truncation tol must be in (0, 1e-2]");
  auto accept = [&](int N) { return top_level_fraction(steady_state(bundle_liouvillian(p, n, N))) < tol; };
  BundleNumeric out;
  out.N = converge_truncation(accept, 2 * n + 2, default_truncation_cap);
  out.solved.model = bundle_model(p, n, out.N);
  out.solved.rho = steady_state(out.solved.model.L);
  const auto& a = out.solved.model.ops.a;
  out.solved.n_a = expectation(out.solved.rho, a.adjoint() * a).real();
  out.n_a = out.solved.n_a;
  return out;
}

bool antibunching_regime(const SystemParams& p, int n) {
  const auto c = gn_closed(p, n);
  const double rate = c.kappa + dressed_rates(p).gamma_tilde;
  bool ok = n * p.gamma_a >= 10 * rate;
  if (!ok)
    warn("antibunching regime not met: n gamma_a = " + format_double(n * p.gamma_a) +
         " vs kappa + gamma~ = " + format_double(rate));
  return ok;
}

}  // namespace bundler
