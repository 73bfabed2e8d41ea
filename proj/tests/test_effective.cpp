#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "bundler/effective.hpp"
#include "bundler/metrics.hpp"

using namespace bundler;

namespace {

SystemParams resonant(double omega, int n, double gamma_a = 0.1, double gamma_sigma = 0.01) {
  SystemParams p;
  p.omega = omega;
  p.n = n;
  p.gamma_a = gamma_a;
  p.gamma_sigma = gamma_sigma;
  p.delta_a = p.resonance();
  return p;
}

// Half the minimal splitting between the two dressed levels near |+,0> and
// |-,n> in the exactly diagonalized Hamiltonian, scanned over delta_a.
double exact_avoided_crossing(SystemParams p, int n) {
  const int N = n + 4;
  const double E0 = p.rabi();
  auto gap = [&](double da) {
    p.delta_a = da;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hamiltonian(p, N, Frame::dressed).matrix(), Eigen::EigenvaluesOnly);
    std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(ev.begin(), ev.end(), [&](double a, double b) { return std::abs(a - E0) < std::abs(b - E0); });
    return std::abs(ev[0] - ev[1]);
  };
  double lo = 2 * E0 / n - 0.5, hi = 2 * E0 / n + 0.5;
  const double phi = (std::sqrt(5.0) - 1) / 2;
  for (int it = 0; it < 200; ++it) {
    double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
    if (gap(a) < gap(b)) hi = b;
    else lo = a;
  }
  return gap((lo + hi) / 2) / 2;
}

}  // namespace

TEST_SUITE("effective") {
  TEST_CASE("closed-form couplings") {
    SystemParams p;
    p.omega = 20;
    CHECK(gn_closed(p, 1).gn == doctest::Approx(0.5));
    CHECK(gn_closed(p, 2).gn == doctest::Approx(0.025));
    CHECK(gn_closed(p, 3).gn == doctest::Approx(1.58203e-3).epsilon(1e-4));
    auto c = gn_closed(resonant(20, 2), 2);
    CHECK(c.kappa == doctest::Approx(4 * 0.025 * 0.025 / 0.1));
    CHECK(factorial(4) == 24);
    p.omega = 0;
    p.delta = 1;
    CHECK(gn_closed(p, 2).gn == 0.0);
  }

  TEST_CASE("numeric couplings agree with the closed form") {
    auto p2 = resonant(20, 2);
    CHECK(gn_numeric(p2, 2).coupling.gn == doctest::Approx(gn_closed(p2, 2).gn).epsilon(0.05));
    auto p4 = resonant(40, 4);
    CHECK(gn_numeric(p4, 4).coupling.gn == doctest::Approx(gn_closed(p4, 4).gn).epsilon(0.10));
    CHECK_THROWS_AS(gn_numeric(p2, 7), Error);
  }

  TEST_CASE("numeric coupling matches the exact avoided crossing") {
    for (int n : {2, 3}) {
      auto p = resonant(20, n);
      double exact = exact_avoided_crossing(p, n) / std::sqrt(factorial(n));
      CHECK(gn_numeric(p, n).coupling.gn == doctest::Approx(exact).epsilon(0.03));
    }
  }

  TEST_CASE("manifold Hamiltonian layout") {
    auto p = resonant(20, 3);
    auto m = manifold_hamiltonian(p, 3, p.delta_a);
    CHECK(m.p_labels.size() == 2);
    CHECK(m.q_labels.size() == 4);
    CHECK(m.V.rows() == 2);
    CHECK(m.V.cols() == 4);
    CHECK(m.h(0, 0) == doctest::Approx(m.h(1, 1)));
    CHECK((m.full() - m.full().transpose()).norm() < 1e-14);
  }

  TEST_CASE("numeric coupling vanishes at least quadratically in g") {
    auto p = resonant(20, 2);
    double a = gn_numeric(p, 2).coupling.gn;
    p.g = 0.5;
    double b = gn_numeric(p, 2).coupling.gn;
    CHECK(a / b >= 4 - 1e-9);
  }

  TEST_CASE("numeric/closed deviation shrinks with drive") {
    for (int n : {2, 3, 4}) {
      double prev = INFINITY;
      for (double w : {10.0, 20.0, 40.0, 80.0}) {
        auto p = resonant(w, n);
        double dev = std::abs(gn_numeric(p, n).coupling.gn / gn_closed(p, n).gn - 1);
        if (n == 2) CHECK(dev < 1e-12);
        else CHECK(dev < prev);
        prev = dev;
      }
    }
  }

  TEST_CASE("bundle master equation") {
    SystemParams zero = resonant(20, 2);
    zero.g = 0;
    auto m = bundle_model(zero, 2, 6);
    auto rho = steady_state(m.L);
    CHECK(expectation(rho, m.ops.a.adjoint() * m.ops.a).real() == doctest::Approx(0).scale(1));
    CHECK(expectation(rho, m.ops.sigma.adjoint() * m.ops.sigma).real() == doctest::Approx(0.5));

    const Index d = m.L.hilbert_dim();
    Eigen::RowVectorXcd t = vec(Eigen::MatrixXcd::Identity(d, d)).adjoint();
    CHECK((t * bundle_liouvillian(resonant(20, 2), 2, 6).data).norm() < 1e-10);
    CHECK_THROWS_AS(bundle_model(resonant(20, 3), 3, 7), Error);
  }

  TEST_CASE("bundle population closed forms") {
    auto p = resonant(20, 2);
    CHECK(bundle_population(p, 2) == doctest::Approx(0.0412).epsilon(2e-3));
    CHECK(bundle_population(p, 2, BundleMethod::ode) == doctest::Approx(bundle_population(p, 2)).epsilon(1e-6));
    double simp = bundle_population(p, 2, BundleMethod::simplified);
    CHECK(std::abs(simp / bundle_population(p, 2) - 1) < p.gamma_sigma / (2 * p.gamma_a));
    CHECK(bundle_population_numeric(p, 2).n_a == doctest::Approx(bundle_population(p, 2)).epsilon(0.05));

    auto weak = resonant(0.01, 2);
    CHECK(bundle_population(weak, 2) == doctest::Approx(0.05).epsilon(1e-3));

    for (double ga : {1.0, 3.0}) {
      auto q = resonant(20, 3, ga, 0.005);
      CHECK(bundle_population(q, 3, BundleMethod::ode) == doctest::Approx(bundle_population(q, 3)).epsilon(1e-6));
    }
  }

  TEST_CASE("closure reproduces the closed form on resonance") {
    for (int n : {2, 3}) {
      auto p = resonant(20, n, 0.3, 0.01);
      double gn = gn_closed(p, n).gn;
      CHECK(bundle_population_closure(p, n, gn, p.delta_a) ==
            doctest::Approx(bundle_population(p, n)).epsilon(1e-10));
    }
  }

  TEST_CASE("strong-drive asymptote") {
    for (int n : {2, 3}) {
      auto p = resonant(4000, n, 0.1, 0.01);
      double scaled = bundle_population(p, n) * std::pow(p.omega, 2 * (n - 1)) / std::pow(p.g, 2 * n);
      CHECK(scaled == doctest::Approx(asymptotic_coefficient(p, n)).epsilon(0.01));
    }
  }

  TEST_CASE("antibunching regime flag") {
    CHECK(antibunching_regime(resonant(20, 2, 1.0, 0.01), 2));
    CHECK_FALSE(antibunching_regime(resonant(20, 2, 0.005, 0.01), 2));
  }
}
