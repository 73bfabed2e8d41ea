#include "bundler/liouville.hpp"

#include <cmath>
#include <string>

#include "bundler/phonon.hpp"

namespace bundler {

namespace {

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B) {
  Eigen::MatrixXcd out(A.rows() * B.rows(), A.cols() * B.cols());
  for (Index i = 0; i < A.rows(); ++i)
    for (Index j = 0; j < A.cols(); ++j)
      out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return out;
}

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) fail(ErrorKind::invalid_parameter, std::string(name) + " must be finite");
}

}  // namespace

void SystemParams::validate() const {
  for (auto [v, name] : {std::pair{g, "g"}, {omega, "omega"}, {delta_a, "delta_a"},
                         {delta, "delta"}, {gamma_a, "gamma_a"}, {gamma_sigma, "gamma_sigma"},
                         {gamma_phi, "gamma_phi"}, {cavity_drive, "cavity_drive"}})
    require_finite(v, name);
  if (g < 0) fail(ErrorKind::invalid_parameter, "g must be >= 0");
  if (gamma_a <= 0) fail(ErrorKind::invalid_parameter, "gamma_a must be > 0");
  if (gamma_sigma < 0) fail(ErrorKind::invalid_parameter, "gamma_sigma must be >= 0");
  if (gamma_phi < 0) fail(ErrorKind::invalid_parameter, "gamma_phi must be >= 0");
  if (n < 2) fail(ErrorKind::invalid_order, "bundle order n must be >= 2");
}

double SystemParams::rabi() const { return std::sqrt(omega * omega + delta * delta / 4.0); }

double SystemParams::cooperativity() const {
  return gamma_sigma > 0 ? 4.0 * g * g / (gamma_a * gamma_sigma) : INFINITY;
}

Index Superoperator::hilbert_dim() const {
  Index d = 1;
  for (Index k : dims) d *= k;
  return d;
}

Eigen::VectorXcd vec(const Eigen::MatrixXcd& x) {
  return Eigen::Map<const Eigen::VectorXcd>(x.data(), x.size());
}

Eigen::MatrixXcd unvec(const Eigen::VectorXcd& v, Index d) {
  if (v.size() != d * d) fail(ErrorKind::shape_mismatch, "unvec: length is not d^2");
  return Eigen::Map<const Eigen::MatrixXcd>(v.data(), d, d);
}

std::vector<Index> model_dims(int N) {
  if (N < 1) fail(ErrorKind::invalid_truncation, "cavity truncation N must be >= 1");
  return {2, static_cast<Index>(N) + 1};
}

ModelOps model_ops(int N) {
  auto dims = model_dims(N);
  return {embed(annihilation(dims[1]), 1, dims), embed(lower_tls(), 0, dims), dims};
}

QOperator hamiltonian(const SystemParams& p, int N, Frame frame) {
  p.validate();
  auto [a, s, dims] = model_ops(N);
  auto ad = a.adjoint();
  auto sd = s.adjoint();

  if (frame == Frame::dressed) {
    if (p.delta != 0.0) fail(ErrorKind::unsupported_frame, "dressed frame requires delta = 0");
    // dressed emitter slot ordered (-, +): sigma~ = |-><+| has the lower_tls matrix
    auto st = s;
    Eigen::MatrixXcd z2 = Eigen::Vector2cd(-1.0, 1.0).asDiagonal();
    auto sz = embed(QOperator(z2, {2}), 0, dims);
    auto coupling = st - st.adjoint() + sz;
    return cplx(p.omega) * sz + cplx(p.delta_a) * (ad * a) +
           cplx(p.g / 2) * (ad * coupling + coupling.adjoint() * a);
  }

  QOperator H = cplx(p.delta_a) * (ad * a) + cplx(p.delta) * (sd * s) +
                cplx(p.g) * (ad * s + sd * a) + cplx(p.omega) * (s + sd);
  if (frame == Frame::cavity_driven)
    H += cplx(p.cavity_drive) * (a + ad);
  else if (p.cavity_drive != 0.0)
    fail(ErrorKind::invalid_parameter, "cavity_drive is only used by the cavity_driven frame");
  return H;
}

Superoperator liouvillian(const QOperator& H, const std::vector<Channel>& channels) {
  const Index d = H.dim();
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(d, d);
  const cplx im(0, 1);
  Eigen::MatrixXcd L = -im * (kron(I, H.matrix()) - kron(H.matrix().transpose(), I));
  for (const auto& c : channels) {
    H.check_same(c.op);
    if (!(c.rate >= 0)) fail(ErrorKind::invalid_parameter, "channel rate must be >= 0");
    if (c.rate == 0) continue;
    const auto& O = c.op.matrix();
    Eigen::MatrixXcd OdO = O.adjoint() * O;
    L += (c.rate / 2) * (2.0 * kron(O.conjugate(), O) - kron(I, OdO) - kron(OdO.transpose(), I));
  }
  return {std::move(L), H.dims()};
}

std::vector<Channel> bare_channels(const SystemParams& p, int N) {
  auto ops = model_ops(N);
  std::vector<Channel> out{{ops.a, p.gamma_a}, {ops.sigma, p.gamma_sigma}};
  if (p.gamma_phi > 0) out.push_back({ops.sigma.adjoint() * ops.sigma, p.gamma_phi});
  return out;
}

DressedRates dressed_rates(const SystemParams& p) {
  DressedRates r;
  r.gamma_tilde = p.gamma_sigma / 4;
  r.pump_tilde = p.gamma_sigma / 4;
  r.dephasing_tilde = p.gamma_sigma;
  r.total_tilde = r.gamma_tilde + r.pump_tilde;
  return r;
}

std::vector<Channel> dressed_channels(const SystemParams& p, int N) {
  auto ops = model_ops(N);
  auto r = dressed_rates(p);
  const auto& st = ops.sigma;
  return {{ops.a, p.gamma_a},
          {st, r.gamma_tilde},
          {st.adjoint(), r.pump_tilde},
          {st.adjoint() * st, r.dephasing_tilde}};
}

std::vector<Channel> phonon_channels(const PhononEnvironment& env, const SystemParams& p, int N) {
  auto ops = model_ops(N);
  auto rates = feeding_rates_cached(env, to_meV(p.delta_a * p.g, env));
  double up = to_units_of_g(rates.rate_up, env);
  double down = to_units_of_g(rates.rate_down, env);
  double deph = to_units_of_g(dephasing_rate(env), env);
  if (up < 0 || down < 0 || deph < 0)
    fail(ErrorKind::numerical, "phonon module produced a negative rate");
  auto sd = ops.sigma.adjoint();
  return {{sd * ops.a, up}, {ops.sigma * ops.a.adjoint(), down}, {sd * ops.sigma, deph}};
}

Model build_model(const SystemParams& p, int N, Frame frame, const PhononEnvironment* env) {
  Model m;
  m.params = p;
  m.N = N;
  m.frame = frame;
  m.H = hamiltonian(p, N, frame);
  m.ops = model_ops(N);
  m.channels = frame == Frame::dressed ? dressed_channels(p, N) : bare_channels(p, N);
  if (env) {
    auto ph = phonon_channels(*env, p, N);
    m.channels.insert(m.channels.end(), ph.begin(), ph.end());
  }
  m.L = liouvillian(m.H, m.channels);
  return m;
}

}  // namespace bundler
