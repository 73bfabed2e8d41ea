#include "bundler/onephoton.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <initializer_list>
#include <utility>

#include "bundler/diag.hpp"
#include "bundler/io.hpp"

namespace bundler {

namespace {

constexpr cplx I{0, 1};

// Real unknowns: n_a, n_sigma, then (re, im) pairs of s, A, B, C, D.
enum Var { NA, NS, S, A, B, C, D };
constexpr int column(Var v) { return v <= NS ? v : 2 + 2 * (v - S); }
constexpr bool is_real(Var v) { return v <= NS; }

using Term = std::pair<Var, cplx>;

struct RealSystem {
  Eigen::Matrix<double, 12, 12> M = Eigen::Matrix<double, 12, 12>::Zero();
  Eigen::Matrix<double, 12, 1> b = Eigen::Matrix<double, 12, 1>::Zero();
  int row = 0;

  void put(int r, std::initializer_list<Term> terms, bool imag_part) {
    for (auto [v, c] : terms) {
      cplx k = imag_part ? -I * c : c;  // Im(w) = Re(-i w)
      M(r, column(v)) += k.real();
      if (!is_real(v)) M(r, column(v) + 1) += -k.imag();
    }
  }
  // sum c_k z_k = rhs as one real row (its real part)
  void real_row(std::initializer_list<Term> terms, double rhs) {
    put(row, terms, false);
    b(row++) = rhs;
  }
  void complex_rows(std::initializer_list<Term> terms, cplx rhs) {
    put(row, terms, false);
    b(row++) = rhs.real();
    put(row, terms, true);
    b(row++) = rhs.imag();
  }
};

cplx value(const Eigen::Matrix<double, 12, 1>& x, Var v) {
  return is_real(v) ? cplx(x(column(v)), 0) : cplx(x(column(v)), x(column(v) + 1));
}

}  // namespace

CorrelatorSet steady_correlators(const SystemParams& p) {
  p.validate();
  const double g = p.g, Om = p.omega, ga = p.gamma_a, gs = p.gamma_sigma, Da = p.delta_a, De = p.delta;
  if (Om > 0 && Om < 5 * std::max({g, ga, gs}))
    warn("steady_correlators: omega = " + format_double(Om) + " is not large against g, gamma_a, gamma_sigma");
  const cplx den = I * (De + Da) + (ga + gs) / 2;
  const cplx den_c = ga / 2 + gs + I * Da;

  RealSystem sys;
  // gamma_a n_a + 2 g Im B = 0
  sys.real_row({{NA, ga}, {B, -2.0 * I * g}}, 0);
  // gamma_sigma n_sigma + 2 Omega Im s = 0
  sys.real_row({{NS, gs}, {S, -2.0 * I * Om}}, 0);
  // (i Delta + gamma_sigma/2) s - i Omega (2 n_sigma - 1) = 0
  sys.complex_rows({{S, I * De + gs / 2.0}, {NS, -2.0 * I * Om}}, -I * Om);
  // (Delta_a - i gamma_a/2) A + g s = 0
  sys.complex_rows({{A, Da - I * ga / 2.0}, {S, g}}, 0);
  // den B - i(-2 Omega C + Omega A - g n_sigma) = 0
  sys.complex_rows({{B, den}, {C, 2.0 * I * Om}, {A, -I * Om}, {NS, I * g}}, 0);
  // den_c C - i Omega (D - B) = 0
  sys.complex_rows({{C, den_c}, {D, -I * Om}, {B, I * Om}}, 0);
  // den D - i Omega (2 C - A) = 0
  sys.complex_rows({{D, den}, {C, -2.0 * I * Om}, {A, I * Om}}, 0);

  Eigen::FullPivLU<Eigen::Matrix<double, 12, 12>> lu(sys.M);
  if (!lu.isInvertible()) fail(ErrorKind::numerical, "steady_correlators: singular linear system");
  Eigen::Matrix<double, 12, 1> x = lu.solve(sys.b);

  CorrelatorSet out;
  out.n_a = x(column(NA));
  out.n_sigma = x(column(NS));
  out.sigma = value(x, S);
  out.a = value(x, A);
  out.sigma_dag_a = value(x, B);
  out.a_n_sigma = value(x, C);
  out.a_sigma = value(x, D);
  const double scale = std::max(1.0, sys.M.cwiseAbs().maxCoeff());
  out.residual = (sys.M * x - sys.b).cwiseAbs().maxCoeff();
  if (!(out.residual < 1e-12 * scale))
    fail(ErrorKind::numerical, "steady_correlators: residual " + format_double(out.residual));
  return out;
}

double na1(const SystemParams& p, Na1Form form) {
  p.validate();
  const double g = p.g, Om = p.omega, ga = p.gamma_a, gs = p.gamma_sigma, Da = p.delta_a;
  if (p.delta != 0) fail(ErrorKind::invalid_parameter, "na1: closed forms assume a resonant emitter (delta = 0)");
  if (form == Na1Form::resonant_expansion) {
    if (std::abs(Da - Om) > 1e-9 * std::max(1.0, Om))
      fail(ErrorKind::invalid_parameter, "na1: resonant expansion requires delta_a = omega");
    const double gt = gs / 4;
    const double ga2 = ga * ga, O2 = Om * Om;
    const double first = 2 * g * g * (ga2 + 28 * O2) / ((ga2 + 4 * O2) * (ga2 + 36 * O2));
    const double second = 32 * g * g * O2 * (ga2 * ga2 + 432 * O2 * O2) * gt /
                          (ga * std::pow(ga2 + 4 * O2, 2) * std::pow(ga2 + 36 * O2, 2));
    return first + second;
  }
  if (Om == 0 || g == 0) return 0;
  const cplx q = ga + 2.0 * I * Da;
  const cplx lam = ga + gs + 2.0 * I * Da;
  const cplx lam2 = ga + 2 * gs + 2.0 * I * Da;
  const double O2 = Om * Om;
  const cplx num = O2 * (-8.0 * I * O2 * q - I * lam * lam * lam2);
  const cplx den = q * lam * (8 * O2 + gs * gs) * (lam * lam2 + 16 * O2);
  return -(16 * g * g / ga) * (num / den).imag();
}

QrtResult qrt_lines(const SystemParams& p) {
  const auto c = steady_correlators(p);
  const double g = p.g, Om = p.omega, ga = p.gamma_a, gs = p.gamma_sigma, Da = p.delta_a, De = p.delta;
  Eigen::Matrix4cd M;
  M << -ga / 2 - I * Da, -I * g, 0, 0,
       -I * g, -gs / 2 - I * De, 0, 2.0 * I * Om,
       0, 0, -gs / 2 + I * De, -2.0 * I * Om,
       0, I * Om, -I * Om, -gs;
  Eigen::Vector4cd w0;
  const cplx Ac = std::conj(c.a);
  w0 << c.n_a - std::norm(c.a), std::conj(c.sigma_dag_a) - Ac * c.sigma,
      std::conj(c.a_sigma) - Ac * std::conj(c.sigma), std::conj(c.a_n_sigma) - Ac * c.n_sigma;

  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(M);
  if (es.info() != Eigen::Success) fail(ErrorKind::decomposition, "qrt_lines: eigensolver failed");
  Eigen::PartialPivLU<Eigen::Matrix4cd> lu(es.eigenvectors());
  if (!(lu.rcond() > 1e-13)) fail(ErrorKind::decomposition, "qrt_lines: regression matrix is near-defective");
  Eigen::Vector4cd coef = lu.solve(w0);

  QrtResult out;
  out.fluctuation = w0(0).real();
  double best = INFINITY;
  for (int b = 0; b < 4; ++b) {
    cplx lam = es.eigenvalues()(b);
    cplx weight = es.eigenvectors()(0, b) * coef(b);
    auto& l = out.lines[b];
    l.lambda = lam;
    l.omega = -lam.imag();
    l.gamma = -2 * lam.real();
    l.L = weight.real();
    l.K = weight.imag();
    double dist = std::abs(l.omega - Da);
    if (dist < best) {
      best = dist;
      out.cavity = b;
    }
  }
  return out;
}

double na1_filtered(const SystemParams& p, FilteredForm form) {
  if (form == FilteredForm::qrt) {
    auto q = qrt_lines(p);
    return q.lines[q.cavity].L;
  }
  p.validate();
  const double g = p.g, Om = p.omega, ga = p.gamma_a, gs = p.gamma_sigma, Da = p.delta_a;
  const double O2 = Om * Om;
  const cplx q = ga + 2.0 * I * Da;
  const cplx num = 32 * g * g * (ga * ga * O2 + 4.0 * I * ga * Da * O2 - 4 * Da * Da * O2 - 8 * O2 * O2) * gs;
  const cplx den = ga * q * q * std::pow(q - 4.0 * I * Om, 2) * std::pow(q + 4.0 * I * Om, 2);
  return (num / den).real();
}

}  // namespace bundler
