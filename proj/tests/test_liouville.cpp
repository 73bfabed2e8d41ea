#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <random>

#include "bundler/phonon.hpp"
#include "bundler/steady.hpp"

using namespace bundler;

namespace {

SystemParams four_peak(double omega = 5) {
  SystemParams p;
  p.omega = omega;
  p.delta_a = 5;
  p.gamma_a = 1.3;
  p.gamma_sigma = 0.01;
  return p;
}

Eigen::MatrixXcd random_hermitian(Index d, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> n;
  Eigen::MatrixXcd x(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) x(i, j) = cplx(n(rng), n(rng));
  return x + x.adjoint();
}

double trace_defect(const Superoperator& L) {
  const Index d = L.hilbert_dim();
  Eigen::RowVectorXcd t = vec(Eigen::MatrixXcd::Identity(d, d)).adjoint();
  return (t * L.data).norm() / L.data.norm();
}

}  // namespace

TEST_SUITE("liouville") {
  TEST_CASE("parameter validation and derived quantities") {
    SystemParams p;
    p.gamma_a = 0.1;
    p.gamma_sigma = 0.01;
    p.omega = 20;
    CHECK(p.cooperativity() == doctest::Approx(4000));
    CHECK(p.resonance(2) == doctest::Approx(20));
    CHECK(p.resonance(3) == doctest::Approx(40.0 / 3));
    CHECK_NOTHROW(p.validate());
    for (auto bad : {&SystemParams::gamma_a, &SystemParams::g}) {
      SystemParams q = p;
      q.*bad = -1;
      CHECK_THROWS_AS(q.validate(), Error);
    }
    SystemParams q = p;
    q.gamma_a = 0;
    CHECK_THROWS_AS(q.validate(), Error);
    q = p;
    q.n = 1;
    CHECK_THROWS_AS(q.validate(), Error);
    q = p;
    q.omega = NAN;
    CHECK_THROWS_AS(q.validate(), Error);
  }

  TEST_CASE("vectorization is column stacking") {
    Eigen::MatrixXcd A = random_hermitian(3, 1) + cplx(0, 1) * random_hermitian(3, 2);
    Eigen::MatrixXcd X = random_hermitian(3, 3), B = random_hermitian(3, 4);
    auto v = vec(X);
    for (Index j = 0; j < 3; ++j)
      for (Index i = 0; i < 3; ++i) CHECK(v(i + 3 * j) == X(i, j));
    CHECK((unvec(v, 3) - X).norm() == 0.0);
    Eigen::MatrixXcd lhs = vec(A * X * B);
    Eigen::MatrixXcd K(9, 9);
    for (Index i = 0; i < 3; ++i)
      for (Index j = 0; j < 3; ++j) K.block(3 * i, 3 * j, 3, 3) = B.transpose()(i, j) * A;
    CHECK((lhs - K * vec(X)).norm() < 1e-12 * lhs.norm());
  }

  TEST_CASE("bare Hamiltonian without drive or coupling is diagonal") {
    SystemParams p;
    p.g = 0;
    p.delta_a = 3;
    p.delta = 0.5;
    auto H = hamiltonian(p, 4, Frame::bare).matrix();
    CHECK((H - Eigen::MatrixXcd(H.diagonal().asDiagonal())).norm() == 0.0);
    for (Index e = 0; e < 2; ++e)
      for (Index k = 0; k < 5; ++k) CHECK(H(e * 5 + k, e * 5 + k).real() == doctest::Approx(3.0 * k + 0.5 * e));
  }

  TEST_CASE("bare and dressed frames share a spectrum") {
    SystemParams p;
    p.omega = 20;
    p.delta_a = 20;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> bare(hamiltonian(p, 6, Frame::bare).matrix());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> dressed(hamiltonian(p, 6, Frame::dressed).matrix());
    CHECK((bare.eigenvalues() - dressed.eigenvalues()).norm() < 1e-10);
    p.delta = 1;
    CHECK_THROWS_AS(hamiltonian(p, 6, Frame::dressed), Error);
  }

  TEST_CASE("low manifolds follow the dressed ladder at omega = delta_a = 5") {
    auto p = four_peak();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hamiltonian(p, 6, Frame::bare).matrix());
    auto ev = es.eigenvalues();
    // g = 0 reference: -Omega, +Omega, then each photon adds delta_a
    CHECK(ev(0) == doctest::Approx(-5).epsilon(0.05));
    CHECK(ev(1) == doctest::Approx(0).scale(1).epsilon(0.35));
    CHECK(ev(1) - ev(0) == doctest::Approx(5).epsilon(0.1));
  }

  TEST_CASE("damped empty cavity") {
    auto ops = model_ops(3);
    QOperator H(Eigen::MatrixXcd::Zero(8, 8), ops.dims);
    auto L = liouvillian(H, {{ops.a, 1.0}});
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(L.data);
    bool found = false;
    for (Index k = 0; k < es.eigenvalues().size(); ++k)
      found |= std::abs(es.eigenvalues()(k) - cplx(-0.5, 0)) < 1e-10;
    CHECK(found);
    SystemParams p;
    p.gamma_sigma = 0;
    p.g = 0;
    auto rho = steady_state(liouvillian(hamiltonian(p, 3, Frame::bare), {{ops.a, 1.0}, {ops.sigma, 1.0}}));
    CHECK(std::abs(rho.data(0, 0) - 1.0) < 1e-12);
    CHECK(trace_defect(L) < 1e-10);
  }

  TEST_CASE("trace and Hermiticity preservation") {
    PhononEnvironment env;
    env.temperature = 30;
    for (auto frame : {Frame::bare, Frame::dressed}) {
      auto p = four_peak(3);
      p.delta_a = 6;
      auto m = build_model(p, 4, frame);
      CHECK(trace_defect(m.L) < 1e-10);
      for (unsigned seed = 0; seed < 3; ++seed) {
        auto r = random_hermitian(m.L.hilbert_dim(), seed);
        auto out = unvec(m.L.data * vec(r), m.L.hilbert_dim());
        CHECK((out - out.adjoint()).norm() < 1e-10 * (1 + out.norm()));
      }
    }
    auto m = build_model(four_peak(), 4, Frame::bare, &env);
    CHECK(trace_defect(m.L) < 1e-10);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m.L.data, false);
    CHECK(es.eigenvalues().real().maxCoeff() < 1e-9 * m.L.data.norm());
  }

  TEST_CASE("a zero-rate channel changes nothing") {
    auto p = four_peak();
    auto m = build_model(p, 3);
    auto extra = m.channels;
    extra.push_back({m.ops.a.adjoint() * m.ops.a, 0.0});
    CHECK((liouvillian(m.H, extra).data - m.L.data).norm() == 0.0);
  }

  TEST_CASE("phonon channels") {
    PhononEnvironment env;
    env.alpha_p = 0;
    env.temperature = 0;
    auto ch = phonon_channels(env, four_peak(), 3);
    REQUIRE(ch.size() == 3);
    for (const auto& c : ch) CHECK(c.rate == 0.0);

    PhononEnvironment hot;
    hot.temperature = 30;
    auto h = phonon_channels(hot, four_peak(), 3);
    CHECK(h[0].rate > 0);
    CHECK(h[1].rate > 0);
    CHECK(h[0].rate != doctest::Approx(h[1].rate));
  }

  TEST_CASE("dressed frame reproduces the bare population at strong drive") {
    SystemParams p;
    p.omega = 20;
    p.delta_a = 20;
    p.gamma_a = 0.1;
    p.gamma_sigma = 0.01;
    double bare = solve(p, 8, Frame::bare).n_a;
    double dressed = solve(p, 8, Frame::dressed).n_a;
    CHECK(dressed == doctest::Approx(bare).epsilon(0.10));
  }

  TEST_CASE("one-photon truncation at weak drive matches resonance fluorescence feeding") {
    auto p = four_peak(0.05);
    auto one = solve(p, 1);
    auto full = solve(p, 6);
    CHECK(one.n_a == doctest::Approx(full.n_a).epsilon(0.02));
  }
}
