#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "bundler/hilbert.hpp"

using namespace bundler;

TEST_SUITE("hilbert") {
  TEST_CASE("annihilation ladder") {
    auto a2 = annihilation(2).matrix();
    CHECK(a2(0, 1) == cplx(1));
    CHECK(a2(0, 0) == cplx(0));
    CHECK(a2(1, 0) == cplx(0));
    CHECK(a2(1, 1) == cplx(0));

    auto a3 = annihilation(3).matrix();
    CHECK(a3(1, 2).real() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

    auto n = number(10).matrix();
    for (int k = 0; k < 10; ++k) CHECK(n(k, k).real() == doctest::Approx(k));
    CHECK((n - Eigen::MatrixXcd(n.diagonal().asDiagonal())).norm() == 0.0);
  }

  TEST_CASE("annihilation rejects degenerate dimensions") {
    CHECK_THROWS_AS(annihilation(1), Error);
    CHECK_THROWS_AS(annihilation(0), Error);
  }

  TEST_CASE("two-level lowering operator") {
    auto s = lower_tls();
    CHECK((s * s).matrix().norm() == 0.0);
    CHECK((s.adjoint() * s + s * s.adjoint()).matrix().isApprox(Eigen::Matrix2cd::Identity()));
    auto p = (s.adjoint() * s).matrix();
    CHECK(p(0, 0) == cplx(0));
    CHECK(p(1, 1) == cplx(1));
  }

  TEST_CASE("embedding follows the slot-0 block convention") {
    auto s = lower_tls();
    auto e = embed(s, 0, {2, 3}).matrix();
    Eigen::MatrixXcd expect = Eigen::MatrixXcd::Zero(6, 6);
    expect.block(0, 3, 3, 3) = Eigen::MatrixXcd::Identity(3, 3);
    CHECK((e - expect).norm() == 0.0);

    for (Index N : {2, 3, 6}) {
      auto a = embed(annihilation(N), 1, {2, N});
      auto sg = embed(s, 0, {2, N});
      CHECK(commutator(a, sg).matrix().norm() == 0.0);
      CHECK(commutator(a, sg.adjoint()).matrix().norm() == 0.0);
    }
  }

  TEST_CASE("commutator defect sits on the top Fock level") {
    for (Index N : {2, 4, 9}) {
      auto a = annihilation(N);
      auto c = commutator(a, a.adjoint()).matrix();
      for (Index k = 0; k < N - 1; ++k) CHECK(c(k, k).real() == doctest::Approx(1.0));
      CHECK(c(N - 1, N - 1).real() == doctest::Approx(1.0 - double(N)));
      CHECK((c - Eigen::MatrixXcd(c.diagonal().asDiagonal())).norm() == 0.0);
    }
    auto a = embed(annihilation(4), 1, {2, 4});
    auto d = (a * a.adjoint() - a.adjoint() * a).matrix();
    for (Index k = 0; k < 8; ++k) CHECK(d(k, k).real() == doctest::Approx(k % 4 == 3 ? -3.0 : 1.0));
  }

  TEST_CASE("embedding preserves spectra with multiplicity") {
    Eigen::Matrix3cd h;
    h << 1, cplx(0, 2), 0, cplx(0, -2), 3, 1, 0, 1, -1;
    auto e = embed(QOperator(h, {3}), 1, {2, 3});
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> full(e.matrix()), base(h);
    for (int k = 0; k < 6; ++k) CHECK(full.eigenvalues()(k) == doctest::Approx(base.eigenvalues()(k / 2)));
  }

  TEST_CASE("shape checks") {
    CHECK_THROWS_AS(QOperator(Eigen::MatrixXcd::Zero(3, 3), {2, 2}), Error);
    CHECK_THROWS_AS(embed(lower_tls(), 1, {2, 3}), Error);
    CHECK_THROWS_AS(embed(lower_tls(), 2, {2, 3}), Error);
    auto x = embed(lower_tls(), 0, {2, 3});
    auto y = embed(annihilation(4), 1, {2, 4});
    CHECK_THROWS_AS(x * y, Error);
    auto k = kron(lower_tls(), annihilation(3));
    CHECK(k.dims() == std::vector<Index>{2, 3});
  }

  TEST_CASE("dressed basis") {
    auto b = dressed_basis(0, 20);
    CHECK(b.c == doctest::Approx(1 / std::sqrt(2.0)));
    CHECK(b.s == doctest::Approx(1 / std::sqrt(2.0)));
    CHECK(b.rabi == doctest::Approx(20));

    auto weak = dressed_basis(1.0, 1e-9);
    CHECK(weak.xi == doctest::Approx(0).epsilon(1e-8));
    CHECK(weak.c == doctest::Approx(0).epsilon(1e-8));
    CHECK(weak.s == doctest::Approx(1));

    auto d2 = dressed_basis(2.0, 1.0);
    CHECK(d2.rabi == doctest::Approx(std::sqrt(2.0)));

    for (auto [delta, omega] : {std::pair{0.0, 20.0}, {2.0, 1.0}, {-3.0, 0.7}, {5.0, 40.0}}) {
      auto db = dressed_basis(delta, omega);
      CHECK(db.c * db.c + db.s * db.s == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(db.rabi == doctest::Approx(std::sqrt(omega * omega + delta * delta / 4)));
      Eigen::Matrix2cd h;
      h << 0, omega, omega, delta;
      auto r = db.to_dressed(h);
      CHECK(std::abs(r(0, 1)) < 1e-10 * omega);
      CHECK(std::abs(r(1, 0)) < 1e-10 * omega);
      CHECK(r(1, 1).real() - r(0, 0).real() == doctest::Approx(2 * db.rabi));
    }
  }
}
