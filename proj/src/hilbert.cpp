#include "bundler/hilbert.hpp"

#include <cmath>

namespace bundler {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_dimension: return "invalid_dimension";
    case ErrorKind::shape_mismatch: return "shape_mismatch";
    case ErrorKind::degenerate_basis: return "degenerate_basis";
    case ErrorKind::unsupported_frame: return "unsupported_frame";
    case ErrorKind::invalid_parameter: return "invalid_parameter";
    case ErrorKind::invalid_truncation: return "invalid_truncation";
    case ErrorKind::truncation_overflow: return "truncation_overflow";
    case ErrorKind::non_unique_steady_state: return "non_unique_steady_state";
    case ErrorKind::numerical: return "numerical";
    case ErrorKind::decomposition: return "decomposition";
    case ErrorKind::manifold_degeneracy: return "manifold_degeneracy";
    case ErrorKind::invalid_order: return "invalid_order";
    case ErrorKind::integration: return "integration";
    case ErrorKind::ratio_undefined: return "ratio_undefined";
    case ErrorKind::config: return "config";
  }
  return "unknown";
}

DressedBasis dressed_basis(double delta, double omega) {
  if (!std::isfinite(delta) || !std::isfinite(omega))
    fail(ErrorKind::invalid_parameter, "dressed_basis: non-finite input");
  if (delta == 0.0 && omega == 0.0)
    fail(ErrorKind::degenerate_basis, "dressed_basis: Delta = Omega = 0 leaves the basis undefined");

  DressedBasis b;
  b.rabi = std::sqrt(omega * omega + delta * delta / 4.0);
  // (c, s) is proportional to both (Omega, Delta/2 + R) and (R - Delta/2, Omega);
  // take the better-conditioned one.
  double u1 = omega, v1 = delta / 2.0 + b.rabi;
  double u2 = b.rabi - delta / 2.0, v2 = omega;
  double n1 = std::hypot(u1, v1), n2 = std::hypot(u2, v2);
  if (n1 >= n2) {
    b.c = u1 / n1;
    b.s = v1 / n1;
  } else {
    b.c = u2 / n2;
    b.s = v2 / n2;
  }
  b.xi = b.s == 0.0 ? std::copysign(INFINITY, b.c) : b.c / b.s;
  // |+> = c|g> + s|e>, |-> = s|g> - c|e>
  b.to_bare << cplx(b.s), cplx(b.c), cplx(-b.c), cplx(b.s);
  return b;
}

}  // namespace bundler
