#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "bundler/hilbert.hpp"

namespace bundler {

struct PhononEnvironment;

// All frequencies in units of g. Detunings are measured in the frame rotating
// with the laser: delta_a is the cavity detuning, delta the emitter detuning.
struct SystemParams {
  double g = 1.0;
  double omega = 0.0;       // emitter drive amplitude
  double delta_a = 0.0;
  double delta = 0.0;
  double gamma_a = 1.0;
  double gamma_sigma = 0.0;
  double gamma_phi = 0.0;
  double cavity_drive = 0.0;  // used only by the cavity_driven frame
  int n = 2;

  void validate() const;
  double rabi() const;  // R = sqrt(omega^2 + delta^2/4)
  double cooperativity() const;
  double resonance(int order) const { return 2.0 * rabi() / order; }
  double resonance() const { return resonance(n); }
};

enum class Frame { bare, dressed, cavity_driven };

struct Channel {
  QOperator op;
  double rate = 0;
};

// Column-stacked vectorization: vec(X)[i + j*d] = X(i, j). With this layout
// vec(A X B) = (B^T (x) A) vec(X), so left multiplication is I (x) A.
struct Superoperator {
  Eigen::MatrixXcd data;
  std::vector<Index> dims;
  Index hilbert_dim() const;
};

Eigen::VectorXcd vec(const Eigen::MatrixXcd& x);
Eigen::MatrixXcd unvec(const Eigen::VectorXcd& v, Index d);

std::vector<Index> model_dims(int N);

// Operators of the (emitter, cavity) space with cavity truncated at N photons.
struct ModelOps {
  QOperator a;
  QOperator sigma;
  std::vector<Index> dims;
};
ModelOps model_ops(int N);

QOperator hamiltonian(const SystemParams& p, int N, Frame frame);

Superoperator liouvillian(const QOperator& H, const std::vector<Channel>& channels);

// (a, gamma_a), (sigma, gamma_sigma) and (sigma^dag sigma, gamma_phi) in the bare basis.
std::vector<Channel> bare_channels(const SystemParams& p, int N);

// Emitter decay seen from the dressed basis after dropping fast-rotating
// terms: decay gamma_sigma/4, pump gamma_sigma/4, dephasing gamma_sigma, plus
// the cavity leak. Operators are built on the dressed emitter slot.
struct DressedRates {
  double gamma_tilde = 0;
  double pump_tilde = 0;
  double dephasing_tilde = 0;
  double total_tilde = 0;  // gamma_tilde + pump_tilde
};
DressedRates dressed_rates(const SystemParams& p);
std::vector<Channel> dressed_channels(const SystemParams& p, int N);

std::vector<Channel> phonon_channels(const PhononEnvironment& env, const SystemParams& p, int N);

// Convenience bundle of everything needed downstream for one model instance.
struct Model {
  SystemParams params;
  int N = 0;
  Frame frame = Frame::bare;
  QOperator H;
  std::vector<Channel> channels;
  ModelOps ops;
  Superoperator L;
};

Model build_model(const SystemParams& p, int N, Frame frame = Frame::bare,
                  const PhononEnvironment* env = nullptr);

}  // namespace bundler
