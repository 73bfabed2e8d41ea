#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "bundler/error.hpp"

namespace bundler {

using cplx = std::complex<double>;
using Index = Eigen::Index;

// A dense operator on a tensor-product space. `dims` lists the subsystem
// dimensions, slot 0 first; slot 0 is the fastest-varying index of the
// Kronecker product convention kron(A, B) used throughout, so the composite
// index of (i0, i1) is i0 * d1 + i1.
template <typename Scalar>
class Operator {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Operator() = default;
  Operator(Matrix m, std::vector<Index> dims) : m_(std::move(m)), dims_(std::move(dims)) {
    if (dims_.empty()) dims_ = {m_.rows()};
    Index total = 1;
    for (Index d : dims_) {
      if (d < 1) fail(ErrorKind::invalid_dimension, "subsystem dimension must be >= 1");
      total *= d;
    }
    if (m_.rows() != total || m_.cols() != total)
      fail(ErrorKind::shape_mismatch, "matrix shape does not match product of dims");
  }
  explicit Operator(Matrix m) : Operator(std::move(m), {}) {}

  const Matrix& matrix() const { return m_; }
  Matrix& matrix() { return m_; }
  const std::vector<Index>& dims() const { return dims_; }
  Index dim() const { return m_.rows(); }

  Operator adjoint() const { return Operator(m_.adjoint(), dims_); }

  Operator& operator+=(const Operator& o) {
    check_same(o);
    m_ += o.m_;
    return *this;
  }
  Operator& operator-=(const Operator& o) {
    check_same(o);
    m_ -= o.m_;
    return *this;
  }
  Operator& operator*=(Scalar s) {
    m_ *= s;
    return *this;
  }

  friend Operator operator+(Operator a, const Operator& b) { return a += b; }
  friend Operator operator-(Operator a, const Operator& b) { return a -= b; }
  friend Operator operator-(Operator a) {
    a.m_ = -a.m_;
    return a;
  }
  friend Operator operator*(const Operator& a, const Operator& b) {
    a.check_same(b);
    return Operator(a.m_ * b.m_, a.dims_);
  }
  friend Operator operator*(Scalar s, Operator a) { return a *= s; }
  friend Operator operator*(Operator a, Scalar s) { return a *= s; }

  void check_same(const Operator& o) const {
    if (dims_ != o.dims_)
      fail(ErrorKind::shape_mismatch, "operators live on different tensor structures");
  }

 private:
  Matrix m_;
  std::vector<Index> dims_;
};

using QOperator = Operator<cplx>;

template <typename Scalar = cplx>
Operator<Scalar> annihilation(Index dim) {
  if (dim < 2) fail(ErrorKind::invalid_dimension, "annihilation: dimension must be >= 2");
  typename Operator<Scalar>::Matrix m = Operator<Scalar>::Matrix::Zero(dim, dim);
  for (Index k = 1; k < dim; ++k) m(k - 1, k) = Scalar(std::sqrt(static_cast<double>(k)));
  return Operator<Scalar>(std::move(m), {dim});
}

template <typename Scalar = cplx>
Operator<Scalar> number(Index dim) {
  auto a = annihilation<Scalar>(dim);
  return a.adjoint() * a;
}

// Two-level lowering operator in the (g, e) basis: |g><e|.
template <typename Scalar = cplx>
Operator<Scalar> lower_tls() {
  typename Operator<Scalar>::Matrix m = Operator<Scalar>::Matrix::Zero(2, 2);
  m(0, 1) = Scalar(1);
  return Operator<Scalar>(std::move(m), {2});
}

template <typename Scalar = cplx>
Operator<Scalar> identity(const std::vector<Index>& dims) {
  Index total = 1;
  for (Index d : dims) total *= d;
  return Operator<Scalar>(Operator<Scalar>::Matrix::Identity(total, total), dims);
}

template <typename Scalar>
Operator<Scalar> kron(const Operator<Scalar>& a, const Operator<Scalar>& b) {
  const auto& A = a.matrix();
  const auto& B = b.matrix();
  typename Operator<Scalar>::Matrix m(A.rows() * B.rows(), A.cols() * B.cols());
  for (Index i = 0; i < A.rows(); ++i)
    for (Index j = 0; j < A.cols(); ++j)
      m.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  std::vector<Index> dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  return Operator<Scalar>(std::move(m), std::move(dims));
}

// Places a single-subsystem operator into `slot` of the composite space.
template <typename Scalar>
Operator<Scalar> embed(const Operator<Scalar>& op, std::size_t slot, const std::vector<Index>& dims) {
  if (slot >= dims.size()) fail(ErrorKind::invalid_dimension, "embed: slot out of range");
  if (op.dim() != dims[slot])
    fail(ErrorKind::shape_mismatch, "embed: operator dimension does not match slot");
  Operator<Scalar> out = slot == 0 ? Operator<Scalar>(op.matrix(), {dims[0]}) : identity<Scalar>({dims[0]});
  for (std::size_t k = 1; k < dims.size(); ++k) {
    Operator<Scalar> f = k == slot ? Operator<Scalar>(op.matrix(), {dims[k]}) : identity<Scalar>({dims[k]});
    out = kron(out, f);
  }
  return out;
}

template <typename Scalar>
Operator<Scalar> commutator(const Operator<Scalar>& a, const Operator<Scalar>& b) {
  return a * b - b * a;
}

template <typename Scalar>
Scalar trace(const Operator<Scalar>& a) {
  return a.matrix().trace();
}

// Rotation to the laser-dressed two-level basis at emitter detuning `delta`
// and drive `omega`. Columns of `to_bare` are |->, |+> expressed in (g, e),
// so the dressed slot is ordered (-, +) and its lowering operator |-><+|
// has the same matrix as lower_tls().
struct DressedBasis {
  double c = 0;
  double s = 0;
  double xi = 0;
  double rabi = 0;  // R
  Eigen::Matrix2cd to_bare;

  Eigen::Matrix2cd to_dressed(const Eigen::Matrix2cd& bare) const {
    return to_bare.adjoint() * bare * to_bare;
  }
};

DressedBasis dressed_basis(double delta, double omega);

}  // namespace bundler
