#include "adbn/rbm.hpp"

#include <cmath>
#include <cstddef>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace adbn {

namespace {

void check_visible(const RbmParams& p, const Vec& v, const char* op) {
  if (v.size() != p.visible_count)
    throw ContractError(std::string(op) + ": visible vector length " + std::to_string(v.size()) +
                        " != " + std::to_string(p.visible_count));
}

void check_hidden(const RbmParams& p, const Vec& h, const char* op) {
  if (h.size() != p.hidden_count)
    throw ContractError(std::string(op) + ": hidden vector length " + std::to_string(h.size()) +
                        " != " + std::to_string(p.hidden_count));
}

void check_enum_guard(const RbmParams& p, const char* op) {
  if (p.visible_count + p.hidden_count > kEnumLimit)
    throw SizeLimitError(std::string(op) + ": I + J = " +
                         std::to_string(p.visible_count + p.hidden_count) + " exceeds limit " +
                         std::to_string(kEnumLimit));
}

// Fixed chunking independent of thread count so parallel reductions sum
// partials in a stable order.
constexpr std::size_t kChunk = 64;

}  // namespace

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

bool RbmParams::all_finite() const {
  for (double x : b)
    if (!std::isfinite(x)) return false;
  for (double x : c)
    if (!std::isfinite(x)) return false;
  for (double x : W)
    if (!std::isfinite(x)) return false;
  return true;
}

RbmParams init_rbm(std::size_t visible, std::size_t hidden, RngStream& rng) {
  RbmParams p(visible, hidden);
  for (double& w : p.W) w = rng.uniform(-0.01, 0.01);
  return p;
}

void GradientEstimate::add_scaled(const GradientEstimate& other, double scale) {
  for (std::size_t i = 0; i < db.size(); ++i) db[i] += scale * other.db[i];
  for (std::size_t j = 0; j < dc.size(); ++j) dc[j] += scale * other.dc[j];
  for (std::size_t k = 0; k < dW.size(); ++k) dW[k] += scale * other.dW[k];
}

void GradientEstimate::scale(double s) {
  for (double& x : db) x *= s;
  for (double& x : dc) x *= s;
  for (double& x : dW) x *= s;
}

double GradientEstimate::linf_norm() const {
  double m = 0.0;
  for (double x : db) m = std::max(m, std::fabs(x));
  for (double x : dc) m = std::max(m, std::fabs(x));
  for (double x : dW) m = std::max(m, std::fabs(x));
  return m;
}

bool GradientEstimate::all_finite() const {
  for (double x : db)
    if (!std::isfinite(x)) return false;
  for (double x : dc)
    if (!std::isfinite(x)) return false;
  for (double x : dW)
    if (!std::isfinite(x)) return false;
  return true;
}

double energy(const RbmParams& params, const Vec& v, const Vec& h) {
  check_visible(params, v, "energy");
  check_hidden(params, h, "energy");
  double e = 0.0;
  for (std::size_t i = 0; i < params.visible_count; ++i) e -= params.b[i] * v[i];
  for (std::size_t j = 0; j < params.hidden_count; ++j) e -= params.c[j] * h[j];
  for (std::size_t i = 0; i < params.visible_count; ++i) {
    if (v[i] == 0.0) continue;
    double row = 0.0;
    for (std::size_t j = 0; j < params.hidden_count; ++j) row += params.w(i, j) * h[j];
    e -= v[i] * row;
  }
  return e;
}

double partition_function_exact(const RbmParams& params) {
  check_enum_guard(params, "partition_function_exact");
  const std::size_t I = params.visible_count;
  const std::size_t J = params.hidden_count;
  const std::uint64_t nv = std::uint64_t{1} << I;
  const std::uint64_t nh = std::uint64_t{1} << J;

  const std::uint64_t nchunks = (nv + kChunk - 1) / kChunk;
  std::vector<double> partial(nchunks, 0.0);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (std::int64_t chunk = 0; chunk < static_cast<std::int64_t>(nchunks); ++chunk) {
    Vec v(I), h(J);
    double acc = 0.0;
    const std::uint64_t begin = static_cast<std::uint64_t>(chunk) * kChunk;
    const std::uint64_t end = std::min(begin + kChunk, nv);
    for (std::uint64_t vbits = begin; vbits < end; ++vbits) {
      for (std::size_t i = 0; i < I; ++i) v[i] = (vbits >> i) & 1u ? 1.0 : 0.0;
      for (std::uint64_t hbits = 0; hbits < nh; ++hbits) {
        for (std::size_t j = 0; j < J; ++j) h[j] = (hbits >> j) & 1u ? 1.0 : 0.0;
        acc += std::exp(-energy(params, v, h));
      }
    }
    partial[chunk] = acc;
  }

  double z = 0.0;
  for (double p : partial) z += p;
  return z;
}

double joint_probability(const RbmParams& params, const Vec& v, const Vec& h) {
  return std::exp(-energy(params, v, h)) / partition_function_exact(params);
}

Vec hidden_conditional(const RbmParams& params, const Vec& v) {
  check_visible(params, v, "hidden_conditional");
  Vec out(params.hidden_count);
  for (std::size_t j = 0; j < params.hidden_count; ++j) {
    double a = params.c[j];
    for (std::size_t i = 0; i < params.visible_count; ++i) a += params.w(i, j) * v[i];
    out[j] = sigmoid(a);
  }
  return out;
}

Vec visible_conditional(const RbmParams& params, const Vec& h) {
  check_hidden(params, h, "visible_conditional");
  Vec out(params.visible_count);
  for (std::size_t i = 0; i < params.visible_count; ++i) {
    double a = params.b[i];
    for (std::size_t j = 0; j < params.hidden_count; ++j) a += params.w(i, j) * h[j];
    out[i] = sigmoid(a);
  }
  return out;
}

GradientEstimate cd_gradient(const RbmParams& params, const std::vector<Vec>& batch, unsigned k,
                             RngStream& rng) {
  if (batch.empty()) throw ContractError("cd_gradient: empty batch");
  if (k < 1) throw ContractError("cd_gradient: k must be >= 1");
  for (const Vec& v : batch) check_visible(params, v, "cd_gradient");

  const std::size_t I = params.visible_count;
  const std::size_t J = params.hidden_count;
  const std::size_t n = batch.size();
  const std::size_t nchunks = (n + kChunk - 1) / kChunk;

  // One chain per batch item, each with its own stream split off a fresh
  // sub-seed; per-chunk accumulators combined in index order keep the result
  // independent of thread count.
  const RngStream parent(rng.next_u64());
  std::vector<GradientEstimate> partial(nchunks, GradientEstimate(I, J));

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (std::int64_t chunk = 0; chunk < static_cast<std::int64_t>(nchunks); ++chunk) {
    GradientEstimate& acc = partial[chunk];
    Vec v_neg(I), h_bin(J);
    const std::size_t begin = static_cast<std::size_t>(chunk) * kChunk;
    const std::size_t end = std::min(begin + kChunk, n);
    for (std::size_t s = begin; s < end; ++s) {
      RngStream chain = parent.split(s);
      const Vec& v0 = batch[s];
      Vec h0 = hidden_conditional(params, v0);

      // k alternating Gibbs steps from the data
      Vec hp = h0;
      for (unsigned step = 0; step < k; ++step) {
        for (std::size_t j = 0; j < J; ++j) h_bin[j] = chain.bernoulli(hp[j]) ? 1.0 : 0.0;
        Vec vp = visible_conditional(params, h_bin);
        for (std::size_t i = 0; i < I; ++i) v_neg[i] = chain.bernoulli(vp[i]) ? 1.0 : 0.0;
        hp = hidden_conditional(params, v_neg);
      }

      for (std::size_t i = 0; i < I; ++i) acc.db[i] += v0[i] - v_neg[i];
      for (std::size_t j = 0; j < J; ++j) acc.dc[j] += h0[j] - hp[j];
      for (std::size_t i = 0; i < I; ++i)
        for (std::size_t j = 0; j < J; ++j)
          acc.dW[i * J + j] += v0[i] * h0[j] - v_neg[i] * hp[j];
    }
  }

  GradientEstimate g(I, J);
  for (const GradientEstimate& p : partial) g.add_scaled(p, 1.0);
  g.scale(1.0 / static_cast<double>(n));
  return g;
}

double log_unnormalized_marginal(const RbmParams& params, const Vec& v) {
  check_enum_guard(params, "log_unnormalized_marginal");
  check_visible(params, v, "log_unnormalized_marginal");
  double acc = 0.0;
  for (std::size_t i = 0; i < params.visible_count; ++i) acc += params.b[i] * v[i];
  for (std::size_t j = 0; j < params.hidden_count; ++j) {
    double a = params.c[j];
    for (std::size_t i = 0; i < params.visible_count; ++i) a += params.w(i, j) * v[i];
    // log(1 + exp(a)) computed stably
    acc += a > 0 ? a + std::log1p(std::exp(-a)) : std::log1p(std::exp(a));
  }
  return acc;
}

GradientEstimate exact_loglik_gradient(const RbmParams& params, const std::vector<Vec>& batch) {
  if (batch.empty()) throw ContractError("exact_loglik_gradient: empty batch");
  check_enum_guard(params, "exact_loglik_gradient");
  for (const Vec& v : batch) check_visible(params, v, "exact_loglik_gradient");

  const std::size_t I = params.visible_count;
  const std::size_t J = params.hidden_count;
  GradientEstimate g(I, J);

  // Positive phase: data expectations with mean-field hiddens.
  for (const Vec& v : batch) {
    Vec hp = hidden_conditional(params, v);
    for (std::size_t i = 0; i < I; ++i) g.db[i] += v[i];
    for (std::size_t j = 0; j < J; ++j) g.dc[j] += hp[j];
    for (std::size_t i = 0; i < I; ++i)
      for (std::size_t j = 0; j < J; ++j) g.dW[i * J + j] += v[i] * hp[j];
  }
  g.scale(1.0 / static_cast<double>(batch.size()));

  // Negative phase: model expectations by enumerating visible states; the
  // hidden sum is analytic through the conditional.
  const std::uint64_t nv = std::uint64_t{1} << I;
  Vec v(I);
  double z = 0.0;
  Vec ev(I, 0.0), eh(J, 0.0), evh(I * J, 0.0);
  for (std::uint64_t vbits = 0; vbits < nv; ++vbits) {
    for (std::size_t i = 0; i < I; ++i) v[i] = (vbits >> i) & 1u ? 1.0 : 0.0;
    double w = std::exp(log_unnormalized_marginal(params, v));
    Vec hp = hidden_conditional(params, v);
    z += w;
    for (std::size_t i = 0; i < I; ++i) ev[i] += w * v[i];
    for (std::size_t j = 0; j < J; ++j) eh[j] += w * hp[j];
    for (std::size_t i = 0; i < I; ++i)
      if (v[i] != 0.0)
        for (std::size_t j = 0; j < J; ++j) evh[i * J + j] += w * hp[j];
  }
  for (std::size_t i = 0; i < I; ++i) g.db[i] -= ev[i] / z;
  for (std::size_t j = 0; j < J; ++j) g.dc[j] -= eh[j] / z;
  for (std::size_t k = 0; k < I * J; ++k) g.dW[k] -= evh[k] / z;
  return g;
}

RbmParams sgd_step(const RbmParams& params, const GradientEstimate& grad, double learning_rate) {
  if (grad.db.size() != params.visible_count || grad.dc.size() != params.hidden_count ||
      grad.dW.size() != params.W.size())
    throw ContractError("sgd_step: gradient dimensions do not match params");
  if (learning_rate <= 0.0) throw ContractError("sgd_step: learning_rate must be > 0");
  if (!grad.all_finite()) throw ContractError("sgd_step: non-finite gradient entries");

  RbmParams out = params;
  for (std::size_t i = 0; i < out.b.size(); ++i) out.b[i] += learning_rate * grad.db[i];
  for (std::size_t j = 0; j < out.c.size(); ++j) out.c[j] += learning_rate * grad.dc[j];
  for (std::size_t k = 0; k < out.W.size(); ++k) out.W[k] += learning_rate * grad.dW[k];
  return out;
}

double reconstruction_error(const RbmParams& params, const std::vector<Vec>& batch) {
  if (batch.empty()) throw ContractError("reconstruction_error: empty batch");
  const std::size_t n = batch.size();
  const std::size_t nchunks = (n + kChunk - 1) / kChunk;
  std::vector<double> partial(nchunks, 0.0);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (std::int64_t chunk = 0; chunk < static_cast<std::int64_t>(nchunks); ++chunk) {
    double acc = 0.0;
    const std::size_t begin = static_cast<std::size_t>(chunk) * kChunk;
    const std::size_t end = std::min(begin + kChunk, n);
    for (std::size_t s = begin; s < end; ++s) {
      const Vec& v = batch[s];
      Vec recon = visible_conditional(params, hidden_conditional(params, v));
      double se = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) {
        double d = v[i] - recon[i];
        se += d * d;
      }
      acc += se / static_cast<double>(v.size());
    }
    partial[chunk] = acc;
  }

  double total = 0.0;
  for (double p : partial) total += p;
  return total / static_cast<double>(n);
}

}  // namespace adbn
