#pragma once

// Serial reference implementations of the parallel kernels. Written as
// direct transcriptions of the defining sums, independent of the code in
// rbm.cpp; used by the tests as oracles and by the benchmark as the
// baseline. Same enumeration guard as the main routines.

#include "adbn/rbm.hpp"

namespace adbn::reference {

double energy(const RbmParams& params, const Vec& v, const Vec& h);

// Full 2^I * 2^J pair enumeration, serial.
double partition_function_exact(const RbmParams& params);

double joint_probability(const RbmParams& params, const Vec& v, const Vec& h);

Vec hidden_conditional(const RbmParams& params, const Vec& v);

Vec visible_conditional(const RbmParams& params, const Vec& h);

double reconstruction_error(const RbmParams& params, const std::vector<Vec>& batch);

// Mean log p(v) over the batch by enumeration; finite differences of this
// are the gradient oracle.
double mean_loglik(const RbmParams& params, const std::vector<Vec>& batch);

}  // namespace adbn::reference
