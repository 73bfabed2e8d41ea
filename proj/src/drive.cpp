#include "bundler/drive.hpp"

#include <cmath>

#include "bundler/io.hpp"

namespace bundler {

namespace {

constexpr double pi = 3.14159265358979323846;

double modulus(const SystemParams& p) {
  return std::sqrt(p.delta_a * p.delta_a + p.gamma_a * p.gamma_a / 4);
}

}  // namespace

DriveTransform displace(const SystemParams& p, double omega_cav) {
  if (!(modulus(p) > 0)) fail(ErrorKind::invalid_parameter, "displace: delta_a = gamma_a = 0 leaves alpha undefined");
  DriveTransform t;
  t.omega_cav = omega_cav;
  // d<a>/dt = -i(delta_a - i gamma_a/2)<a> - i omega_cav vanishes at alpha
  t.alpha = -omega_cav / cplx(p.delta_a, -p.gamma_a / 2);
  t.omega_eff = std::abs(t.alpha);
  t.phase = std::arg(t.alpha);
  t.gamma_filter = p.gamma_a;
  return t;
}

double cavity_drive_for(const SystemParams& p, double omega_eff) { return omega_eff * modulus(p); }

Model displaced_model(const SystemParams& p, int N, const DriveTransform& t) {
  if (p.omega != 0) fail(ErrorKind::invalid_parameter, "displaced_model: the emitter drive comes from alpha only");
  SystemParams q = p;
  q.cavity_drive = 0;
  Model m = build_model(q, N, Frame::bare);
  const auto& s = m.ops.sigma;
  m.H = m.H + p.g * (std::conj(t.alpha) * s + t.alpha * s.adjoint());
  m.L = liouvillian(m.H, m.channels);
  return m;
}

double coherent_spectrum(cplx a_mean, double gamma_filter, double omega) {
  if (!(gamma_filter > 0)) fail(ErrorKind::invalid_parameter, "coherent_spectrum: filter width must be > 0");
  const double G2 = gamma_filter * gamma_filter;
  return G2 / 2 * std::norm(a_mean) / (G2 / 4 + omega * omega);
}

double rejection_ratio_from(cplx a_mean, double gamma_filter, double omega_a, double S_I) {
  double sc = coherent_spectrum(a_mean, gamma_filter, omega_a);
  if (sc == 0) return 0;
  if (!(S_I > 1e-300)) fail(ErrorKind::ratio_undefined, "rejection_ratio: incoherent spectrum vanishes at the cavity");
  return sc / S_I;
}

Rejection rejection_ratio(const SystemParams& p, const RejectionOptions& opt) {
  p.validate();
  Rejection r;
  r.omega_eff = p.omega;
  const double Gamma = opt.gamma_filter > 0 ? opt.gamma_filter : p.gamma_a;
  // omega_eff is the emitter drive g |alpha|, so |alpha| = omega_eff / g
  const double abs_alpha = p.g > 0 ? p.omega / p.g : 0;
  r.omega_cav = cavity_drive_for(p, abs_alpha);
  auto t = displace(p, r.omega_cav);
  r.alpha = t.alpha;

  SystemParams q = p;
  q.omega = 0;
  r.N = choose_truncation(p);
  auto m = displaced_model(q, r.N, t);
  SolvedModel s{m, steady_state(m.L), 0};
  s.n_a = expectation(s.rho, m.ops.a.adjoint() * m.ops.a).real();
  r.a_mean = r.alpha + expectation(s.rho, m.ops.a);
  auto dec = decompose(s);
  if (opt.line_only) {
    for (const auto& l : dec.lines) {
      if (l.coherent || l.gamma <= 0 || std::abs(l.omega - p.delta_a) >= p.gamma_a / 2) continue;
      double x = p.delta_a - l.omega, hw = l.gamma / 2;
      r.S_I += (hw * l.L - x * l.K) / (x * x + hw * hw) / pi;
    }
  } else {
    r.S_I = spectrum_at(dec, p.delta_a);
  }
  r.S_C = coherent_spectrum(r.a_mean, Gamma, p.delta_a);
  r.ratio = rejection_ratio_from(r.a_mean, Gamma, p.delta_a, r.S_I);
  return r;
}

std::vector<Rejection> rejection_curve(SystemParams p, const std::vector<double>& omega_eff,
                                       const RejectionOptions& opt) {
  std::vector<Rejection> rows;
  for (double w : omega_eff) {
    p.omega = w;
    p.delta_a = w;
    rows.push_back(rejection_ratio(p, opt));
  }
  return rows;
}

std::string rejection_csv(const std::vector<Rejection>& rows) {
  CsvTable t({"omega_eff", "omega_cav", "abs_alpha", "S_C", "S_I", "ratio", "N"});
  for (const auto& r : rows) t.add({r.omega_eff, r.omega_cav, std::abs(r.alpha), r.S_C, r.S_I, r.ratio, double(r.N)});
  return t.str();
}

}  // namespace bundler
