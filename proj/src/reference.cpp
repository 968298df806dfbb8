#include "adbn/reference.hpp"

#include <cmath>
#include <cstdint>

namespace adbn::reference {

namespace {

Vec bits_to_vec(std::uint64_t bits, std::size_t n) {
  Vec out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = (bits >> i) & 1u ? 1.0 : 0.0;
  return out;
}

}  // namespace

double energy(const RbmParams& params, const Vec& v, const Vec& h) {
  double e = 0.0;
  for (std::size_t i = 0; i < params.visible_count; ++i) e -= params.b[i] * v[i];
  for (std::size_t j = 0; j < params.hidden_count; ++j) e -= params.c[j] * h[j];
  for (std::size_t i = 0; i < params.visible_count; ++i)
    for (std::size_t j = 0; j < params.hidden_count; ++j)
      e -= v[i] * params.W[i * params.hidden_count + j] * h[j];
  return e;
}

double partition_function_exact(const RbmParams& params) {
  if (params.visible_count + params.hidden_count > kEnumLimit)
    throw SizeLimitError("reference::partition_function_exact: model too large");
  const std::uint64_t nv = std::uint64_t{1} << params.visible_count;
  const std::uint64_t nh = std::uint64_t{1} << params.hidden_count;
  double z = 0.0;
  for (std::uint64_t vb = 0; vb < nv; ++vb) {
    Vec v = bits_to_vec(vb, params.visible_count);
    for (std::uint64_t hb = 0; hb < nh; ++hb) {
      Vec h = bits_to_vec(hb, params.hidden_count);
      z += std::exp(-reference::energy(params, v, h));
    }
  }
  return z;
}

double joint_probability(const RbmParams& params, const Vec& v, const Vec& h) {
  return std::exp(-reference::energy(params, v, h)) / reference::partition_function_exact(params);
}

Vec hidden_conditional(const RbmParams& params, const Vec& v) {
  Vec out(params.hidden_count);
  for (std::size_t j = 0; j < params.hidden_count; ++j) {
    double a = params.c[j];
    for (std::size_t i = 0; i < params.visible_count; ++i)
      a += params.W[i * params.hidden_count + j] * v[i];
    out[j] = 1.0 / (1.0 + std::exp(-a));
  }
  return out;
}

Vec visible_conditional(const RbmParams& params, const Vec& h) {
  Vec out(params.visible_count);
  for (std::size_t i = 0; i < params.visible_count; ++i) {
    double a = params.b[i];
    for (std::size_t j = 0; j < params.hidden_count; ++j)
      a += params.W[i * params.hidden_count + j] * h[j];
    out[i] = 1.0 / (1.0 + std::exp(-a));
  }
  return out;
}

double reconstruction_error(const RbmParams& params, const std::vector<Vec>& batch) {
  double total = 0.0;
  for (const Vec& v : batch) {
    Vec recon = reference::visible_conditional(params, reference::hidden_conditional(params, v));
    double se = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) se += (v[i] - recon[i]) * (v[i] - recon[i]);
    total += se / static_cast<double>(v.size());
  }
  return total / static_cast<double>(batch.size());
}

double mean_loglik(const RbmParams& params, const std::vector<Vec>& batch) {
  const double z = reference::partition_function_exact(params);
  const std::uint64_t nh = std::uint64_t{1} << params.hidden_count;
  double total = 0.0;
  for (const Vec& v : batch) {
    double pv = 0.0;
    for (std::uint64_t hb = 0; hb < nh; ++hb) {
      Vec h = bits_to_vec(hb, params.hidden_count);
      pv += std::exp(-reference::energy(params, v, h));
    }
    total += std::log(pv / z);
  }
  return total / static_cast<double>(batch.size());
}

}  // namespace adbn::reference
