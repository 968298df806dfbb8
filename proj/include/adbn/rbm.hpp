#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "adbn/rng.hpp"

namespace adbn {

using Vec = std::vector<double>;

// Thrown when arguments violate an operation's contract (dimension
// mismatches, empty batches, bad ranges).
struct ContractError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Thrown when an exact-enumeration routine is asked for a model beyond the
// enumeration guard. Never silently truncated.
struct SizeLimitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Enumeration guard for the exact routines (~16M terms max).
inline constexpr std::size_t kEnumLimit = 24;

// One RBM layer: visible biases b, hidden biases c, weights W (row-major
// I x J, W(i,j) connects v_i to h_j).
struct RbmParams {
  std::size_t visible_count = 0;
  std::size_t hidden_count = 0;
  Vec b;  // length I
  Vec c;  // length J
  Vec W;  // I * J, row-major

  RbmParams() = default;
  RbmParams(std::size_t I, std::size_t J)
      : visible_count(I), hidden_count(J), b(I, 0.0), c(J, 0.0), W(I * J, 0.0) {}

  double& w(std::size_t i, std::size_t j) { return W[i * hidden_count + j]; }
  double w(std::size_t i, std::size_t j) const { return W[i * hidden_count + j]; }

  bool all_finite() const;
};

// Creates an RBM with W ~ uniform(-0.01, 0.01) and zero biases.
RbmParams init_rbm(std::size_t visible, std::size_t hidden, RngStream& rng);

struct GradientEstimate {
  Vec db;  // length I
  Vec dc;  // length J
  Vec dW;  // I * J, row-major

  GradientEstimate() = default;
  GradientEstimate(std::size_t I, std::size_t J) : db(I, 0.0), dc(J, 0.0), dW(I * J, 0.0) {}

  void add_scaled(const GradientEstimate& other, double scale);
  void scale(double s);
  double linf_norm() const;
  bool all_finite() const;
};

// v, h entries in {0,1}; real-valued inputs in [0,1] are accepted by the
// conditionals and treated as probabilities.
double energy(const RbmParams& params, const Vec& v, const Vec& h);

// Brute-force Z over all 2^I * 2^J state pairs. Requires I + J <= kEnumLimit.
double partition_function_exact(const RbmParams& params);

double joint_probability(const RbmParams& params, const Vec& v, const Vec& h);

// p(h_j = 1 | v) = sigmoid(c_j + sum_i W_ij v_i)
Vec hidden_conditional(const RbmParams& params, const Vec& v);

// p(v_i = 1 | h) = sigmoid(b_i + sum_j W_ij h_j)
Vec visible_conditional(const RbmParams& params, const Vec& h);

// CD-k gradient (ascent direction on log-likelihood), averaged over the
// batch. Negative-phase visible states are sampled binary; final hidden
// statistics use probabilities. Deterministic for a given rng seed
// regardless of thread count.
GradientEstimate cd_gradient(const RbmParams& params, const std::vector<Vec>& batch,
                             unsigned k, RngStream& rng);

// Exact log-likelihood gradient via enumeration of the negative phase.
// Oracle for cd_gradient; requires I + J <= kEnumLimit.
GradientEstimate exact_loglik_gradient(const RbmParams& params, const std::vector<Vec>& batch);

// log of the unnormalized marginal, log sum_h exp(-E(v,h)) (free energy
// with opposite sign). Shares the enumeration guard.
double log_unnormalized_marginal(const RbmParams& params, const Vec& v);

// theta <- theta + learning_rate * grad
RbmParams sgd_step(const RbmParams& params, const GradientEstimate& grad, double learning_rate);

// Mean squared error between v and its one-step mean-field reconstruction.
double reconstruction_error(const RbmParams& params, const std::vector<Vec>& batch);

double sigmoid(double x);

}  // namespace adbn
