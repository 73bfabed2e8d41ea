#include "bundler/spectra.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "bundler/io.hpp"

namespace bundler {

const char* to_string(PeakLabel label) {
  switch (label) {
    case PeakLabel::cavity_peak: return "cavity_peak";
    case PeakLabel::mollow_central: return "mollow_central";
    case PeakLabel::mollow_sideband_plus: return "mollow_sideband_plus";
    case PeakLabel::mollow_sideband_minus: return "mollow_sideband_minus";
    case PeakLabel::coherent: return "coherent";
    case PeakLabel::other: return "other";
  }
  return "other";
}

namespace {

constexpr double pi = 3.14159265358979323846;
constexpr double cluster_tol = 1e-9;

std::string clustered_report(const Eigen::VectorXcd& ev) {
  std::ostringstream msg;
  int shown = 0;
  for (Index i = 0; i < ev.size() && shown < 6; ++i)
    for (Index j = i + 1; j < ev.size() && shown < 6; ++j)
      if (std::abs(ev(i) - ev(j)) < 1e-6 * std::max(1.0, std::abs(ev(i)))) {
        msg << " (" << format_double(ev(i).real()) << "," << format_double(ev(i).imag()) << ")~("
            << format_double(ev(j).real()) << "," << format_double(ev(j).imag()) << ")";
        ++shown;
      }
  return shown ? msg.str() : " none within 1e-6";
}

}  // namespace

SpectrumDecomposition decompose(const Superoperator& L, const QOperator& a, const DensityMatrix& rho) {
  if (a.dims() != L.dims || rho.dims != L.dims)
    fail(ErrorKind::shape_mismatch, "decompose: operator dims differ from superoperator");

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(L.data, true);
  if (es.info() != Eigen::Success) fail(ErrorKind::decomposition, "decompose: eigensolver failed");
  const Eigen::VectorXcd& ev = es.eigenvalues();
  const Eigen::MatrixXcd& R = es.eigenvectors();

  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(R);
  if (!(lu.rcond() > 1e-13))
    fail(ErrorKind::decomposition, "decompose: eigenvector basis is near-defective; clustered eigenvalues:" +
                                       clustered_report(ev));

  // <a^dag(0) a(tau)> = Tr[a e^{L tau}(rho a^dag)] = sum_b o_b c_b e^{lambda_b tau}
  Eigen::MatrixXcd seed = rho.data * a.matrix().adjoint();
  Eigen::VectorXcd c = lu.solve(vec(seed));
  Eigen::MatrixXcd aT = a.matrix().transpose();
  Eigen::RowVectorXcd o = vec(aT).transpose() * R;
  Eigen::VectorXcd w = o.transpose().cwiseProduct(c);

  SpectrumDecomposition dec;
  dec.n_a = expectation(rho, a.adjoint() * a).real();

  Index stationary = 0;
  ev.cwiseAbs().minCoeff(&stationary);

  // cluster near-identical eigenvalues and sum their weights
  std::vector<Index> order(ev.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Index i, Index j) {
    if (ev(i).imag() != ev(j).imag()) return ev(i).imag() < ev(j).imag();
    return ev(i).real() < ev(j).real();
  });
  std::vector<bool> used(ev.size(), false);
  const double drop = dec.n_a > 0 ? 1e-12 * dec.n_a : 1e-14;
  for (Index ii = 0; ii < static_cast<Index>(order.size()); ++ii) {
    Index i = order[ii];
    if (used[i]) continue;
    used[i] = true;
    cplx weight = w(i);
    cplx lam = ev(i);
    bool coherent = i == stationary;
    int members = 1;
    for (Index jj = ii + 1; jj < static_cast<Index>(order.size()); ++jj) {
      Index j = order[jj];
      if (ev(j).imag() - ev(i).imag() > cluster_tol * std::max(1.0, std::abs(ev(i)))) break;
      if (used[j] || std::abs(ev(j) - ev(i)) > cluster_tol * std::max(1.0, std::abs(ev(i)))) continue;
      used[j] = true;
      weight += w(j);
      lam += ev(j);
      coherent = coherent || j == stationary;
      ++members;
    }
    lam /= double(members);
    SpectralLine line;
    line.lambda = lam;
    line.L = weight.real();
    line.K = weight.imag();
    line.coherent = coherent;
    if (coherent) {
      line.omega = 0;
      line.gamma = 0;
      line.K = 0;
      dec.coherent_weight = line.L;
    } else {
      line.omega = -lam.imag();
      line.gamma = std::max(0.0, -2 * lam.real());
    }
    if (std::abs(line.L) + std::abs(line.K) < drop) continue;
    dec.lines.push_back(line);
  }
  return dec;
}

SpectrumDecomposition decompose(const SolvedModel& s) {
  return decompose(s.model.L, s.model.ops.a, s.rho);
}

double spectrum_at(const SpectrumDecomposition& dec, double omega) {
  double s = 0;
  for (const auto& l : dec.lines) {
    if (l.coherent || l.gamma <= 0) continue;
    double x = omega - l.omega;
    double hw = l.gamma / 2;
    s += (hw * l.L - x * l.K) / (x * x + hw * hw);
  }
  return s / pi;
}

double spectrum_direct(const Superoperator& L, const QOperator& a, const DensityMatrix& rho, double omega) {
  if (a.dims() != L.dims || rho.dims != L.dims)
    fail(ErrorKind::shape_mismatch, "spectrum_direct: operator dims differ from superoperator");
  const Index d = L.hilbert_dim();
  // fluctuation seed: the stationary component <a^dag> rho is the coherent line
  const cplx ad = std::conj(expectation(rho, a));
  Eigen::MatrixXcd seed = rho.data * a.matrix().adjoint() - ad * rho.data;
  // vec(rho) vec(I)^T lifts only the stationary mode, so omega = 0 stays regular
  Eigen::MatrixXcd A = -L.data + vec(rho.data) * vec(Eigen::MatrixXcd::Identity(d, d)).transpose();
  A.diagonal().array() -= cplx(0, omega);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
  Eigen::VectorXcd x = lu.solve(vec(seed));
  if (!x.allFinite()) fail(ErrorKind::numerical, "spectrum_direct: singular resolvent");
  cplx v = (a.matrix().transpose().array() * unvec(x, d).array()).sum();
  return v.real() / pi;
}

double spectrum_direct(const SolvedModel& s, double omega) {
  return spectrum_direct(s.model.L, s.model.ops.a, s.rho, omega);
}

FilteredPopulation filtered_population(const SpectrumDecomposition& dec, double omega_target,
                                       double window) {
  if (!(window > 0)) fail(ErrorKind::invalid_parameter, "filtered_population: window must be > 0");
  FilteredPopulation f;
  for (const auto& l : dec.lines)
    if (std::abs(l.omega - omega_target) < window) {
      f.value += l.L;
      ++f.selected;
    }
  f.empty = f.selected == 0;
  return f;
}

PeakClassification classify_peaks(const SpectrumDecomposition& dec, const SystemParams& p) {
  struct Expected {
    double omega;
    PeakLabel label;
  };
  const double R = p.rabi();
  std::vector<Expected> expected{{0.0, PeakLabel::mollow_central},
                                 {2 * R, PeakLabel::mollow_sideband_plus},
                                 {-2 * R, PeakLabel::mollow_sideband_minus},
                                 {p.delta_a, PeakLabel::cavity_peak}};
  PeakClassification out;
  // positions closer than the cavity tolerance are merged into the cavity peak
  const double merge_tol = p.gamma_a / 2;
  // unresolved triplet at weak drive: sidebands fold into the central line
  if (2 * R < merge_tol)
    for (std::size_t k : {1, 2}) {
      out.merges.push_back(std::string(to_string(expected[k].label)) + "+mollow_central");
      expected[k].label = PeakLabel::mollow_central;
    }
  for (std::size_t k = 0; k + 1 < expected.size(); ++k)
    if (std::abs(expected[k].omega - p.delta_a) < merge_tol) {
      out.merges.push_back(std::string(to_string(expected[k].label)) + "+cavity_peak");
      expected[k].label = PeakLabel::cavity_peak;
    }

  for (const auto& l : dec.lines) {
    if (l.coherent) {
      out.labels.push_back(PeakLabel::coherent);
      continue;
    }
    const double tol = std::max(p.gamma_a, l.gamma) / 2;
    double best = INFINITY;
    std::vector<PeakLabel> hits;
    for (const auto& e : expected) {
      double dist = std::abs(l.omega - e.omega);
      if (dist >= tol) continue;
      if (dist < best - 1e-12) {
        best = dist;
        hits = {e.label};
      } else if (std::abs(dist - best) <= 1e-12) {
        hits.push_back(e.label);
      }
    }
    bool tie = hits.size() > 1 && std::any_of(hits.begin(), hits.end(),
                                               [&](PeakLabel h) { return h != hits.front(); });
    out.labels.push_back(hits.empty() || tie ? PeakLabel::other : hits.front());
  }
  return out;
}

std::vector<double> find_peaks(const SpectrumDecomposition& dec, double lo, double hi, double step,
                               double fraction) {
  std::vector<double> xs, ys;
  for (double x = lo; x <= hi + 1e-12; x += step) {
    xs.push_back(x);
    ys.push_back(spectrum_at(dec, x));
  }
  std::vector<double> peaks;
  if (ys.size() < 3) return peaks;
  double top = *std::max_element(ys.begin(), ys.end());
  for (std::size_t i = 1; i + 1 < ys.size(); ++i)
    if (ys[i] > ys[i - 1] && ys[i] >= ys[i + 1] && ys[i] > fraction * top) peaks.push_back(xs[i]);
  return peaks;
}

std::string spectrum_csv(const SpectrumDecomposition& dec, const std::vector<double>& omegas) {
  CsvTable t({"omega_over_g", "S"});
  for (double w : omegas) t.add({w, spectrum_at(dec, w)});
  return t.str();
}

std::string lines_csv(const SpectrumDecomposition& dec) {
  CsvTable t({"omega_beta", "gamma_beta", "L_beta", "K_beta", "label"});
  for (std::size_t i = 0; i < dec.lines.size(); ++i) {
    const auto& l = dec.lines[i];
    std::string label = i < dec.labels.size() ? to_string(dec.labels[i])
                                              : (l.coherent ? "coherent" : "unclassified");
    t.add({l.omega, l.gamma, l.L, l.K, label});
  }
  return t.str();
}

}  // namespace bundler
