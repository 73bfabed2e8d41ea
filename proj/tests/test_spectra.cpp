#include <doctest.h>

#include <algorithm>

#include "bundler/effective.hpp"
#include "bundler/spectra.hpp"

using namespace bundler;

namespace {

SystemParams four_peak() {
  SystemParams p;
  p.omega = 5;
  p.delta_a = 5;
  p.gamma_a = 1.3;
  p.gamma_sigma = 0.01;
  return p;
}

double line_sum(const SpectrumDecomposition& d) {
  double s = 0;
  for (const auto& l : d.lines) s += l.L;
  return s;
}

}  // namespace

TEST_SUITE("spectra") {
  TEST_CASE("four peak groups and the sum rule at omega = delta_a = 5") {
    auto p = four_peak();
    auto s = solve_converged(p);
    auto dec = decompose(s);
    CHECK(line_sum(dec) == doctest::Approx(s.n_a).epsilon(1e-8));
    CHECK(dec.n_a == doctest::Approx(s.n_a).epsilon(1e-12));
    for (const auto& l : dec.lines) CHECK(l.gamma >= -1e-12);

    auto peaks = find_peaks(dec, -25, 25, 0.02);
    REQUIRE(peaks.size() == 4);
    const double expect[] = {-10, 0, 5, 10};
    for (int k = 0; k < 4; ++k) CHECK(std::abs(peaks[k] - expect[k]) < 0.5 * p.gamma_a);

    auto cls = classify_peaks(dec, p);
    dec.labels = cls.labels;
    double cavity_width = 0, mollow_width = 0;
    for (std::size_t i = 0; i < dec.lines.size(); ++i) {
      const auto& l = dec.lines[i];
      if (l.L < 1e-3 * s.n_a) continue;
      if (cls.labels[i] == PeakLabel::cavity_peak) cavity_width = std::max(cavity_width, l.gamma);
      if (cls.labels[i] == PeakLabel::mollow_sideband_plus || cls.labels[i] == PeakLabel::mollow_central)
        mollow_width = std::max(mollow_width, l.gamma);
    }
    CHECK(cavity_width > mollow_width);
  }

  TEST_CASE("spectrum shape") {
    auto p = four_peak();
    auto s = solve_converged(p);
    auto dec = decompose(s);
    // emitter tail ~ omega^-4 behind the cavity Lorentzian ~ omega^-2
    double far1 = spectrum_at(dec, 80), far2 = spectrum_at(dec, 160);
    CHECK(far1 > 0);
    CHECK(far1 / far2 == doctest::Approx(64).epsilon(0.15));

    double integral = 0, smax = 0, smin = 0;
    const double h = 0.005;
    for (double w = -200; w <= 200; w += h) {
      double v = spectrum_at(dec, w);
      integral += v * h;
      smax = std::max(smax, v);
      smin = std::min(smin, v);
    }
    CHECK(integral == doctest::Approx(s.n_a).epsilon(0.01));
    CHECK(smin >= -1e-8 * smax);

    for (double w : {-10.0, -3.0, 0.5, 5.0, 12.0})
      CHECK(spectrum_direct(s, w) == doctest::Approx(spectrum_at(dec, w)).epsilon(1e-8));
  }

  TEST_CASE("eigenvalues close under conjugation") {
    auto s = solve(four_peak(), 4);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(s.model.L.data, false);
    const Eigen::VectorXcd ev = es.eigenvalues();
    for (Index i = 0; i < ev.size(); ++i) {
      if (std::abs(ev[i].imag()) < 1e-9) continue;
      double nearest = INFINITY;
      for (Index j = 0; j < ev.size(); ++j) nearest = std::min(nearest, std::abs(ev[j] - std::conj(ev[i])));
      CHECK(nearest < 1e-6 * (1 + std::abs(ev[i])));
    }
  }

  TEST_CASE("empty cavity carries no incoherent weight") {
    SystemParams p;
    p.g = 0;
    p.omega = 1;
    p.gamma_sigma = 0.5;
    auto dec = decompose(solve(p, 3));
    for (const auto& l : dec.lines) CHECK(std::abs(l.L) < 1e-12);
  }

  TEST_CASE("filtered population") {
    auto p = four_peak();
    auto dec = decompose(solve_converged(p));
    CHECK(filtered_population(dec, 0, 1e6).value == doctest::Approx(dec.n_a).epsilon(1e-10));
    double prev = -1;
    for (double w : {0.05, 0.2, 0.65, 1.5, 4.0, 8.0, 30.0}) {
      double v = filtered_population(dec, p.delta_a, w).value;
      CHECK(v >= prev - 1e-15);
      prev = v;
    }

    SpectrumDecomposition toy;
    toy.lines = {{-3, 0.1, 0.25, 0.01, {}, false}, {4, 0.2, 0.75, -0.02, {}, false}};
    toy.n_a = 1;
    auto one = filtered_population(toy, 4, 0.5);
    CHECK(one.value == 0.75);
    CHECK(one.selected == 1);
    CHECK(filtered_population(toy, 10, 0.5).empty);
  }

  TEST_CASE("filtered cavity emission tracks the bundle population at omega = 20") {
    SystemParams p;
    p.omega = p.delta_a = 20;
    p.gamma_sigma = 0.025;
    for (double ga : {0.3, 1.0, 3.0}) {
      p.gamma_a = ga;
      double nf = filtered_population(decompose(solve_converged(p)), p.delta_a, ga / 2).value;
      double bundle = bundle_population_numeric(p, 2).n_a;
      CHECK(nf == doctest::Approx(bundle).epsilon(0.25));
    }
  }

  TEST_CASE("peak classification") {
    auto p = four_peak();
    auto dec = decompose(solve_converged(p));
    auto cls = classify_peaks(dec, p);
    bool cavity = false;
    for (std::size_t i = 0; i < dec.lines.size(); ++i)
      if (std::abs(dec.lines[i].omega - 5) < 0.5 && dec.lines[i].L > 1e-3 * dec.n_a)
        cavity |= cls.labels[i] == PeakLabel::cavity_peak;
    CHECK(cavity);

    SystemParams merge;
    merge.omega = 20;
    merge.delta_a = 40;
    merge.gamma_a = 1;
    merge.gamma_sigma = 0.01;
    auto m = classify_peaks(decompose(solve(merge, 5)), merge);
    CHECK_FALSE(m.merges.empty());

    SystemParams weak;
    weak.omega = 0.02;
    weak.delta_a = 5;
    weak.gamma_sigma = 0.1;
    auto wd = decompose(solve(weak, 3));
    auto wc = classify_peaks(wd, weak);
    std::size_t big = 0;
    for (std::size_t i = 0; i < wd.lines.size(); ++i)
      if (!wd.lines[i].coherent && (wd.lines[big].coherent || wd.lines[i].L > wd.lines[big].L)) big = i;
    CHECK(wc.labels[big] == PeakLabel::mollow_central);
  }

  TEST_CASE("S at the cavity frequency peaks on the two-photon resonance") {
    SystemParams p;
    p.gamma_a = p.gamma_sigma = 0.1;
    p.delta_a = 5;
    auto at = [&](double w) {
      p.omega = w;
      return spectrum_direct(solve_converged(p), p.delta_a);
    };
    double centre = at(5.0);
    CHECK(centre > at(4.6));
    CHECK(centre > at(5.4));
  }

  TEST_CASE("csv layout") {
    auto dec = decompose(solve(four_peak(), 3));
    auto csv = spectrum_csv(dec, {-1, 0, 1});
    CHECK(csv.rfind("omega_over_g,S\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  }
}
