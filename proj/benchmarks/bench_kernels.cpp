// Compares the OpenMP kernels against the serial reference implementations.
// Usage: bench_kernels [repeats]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "adbn/rbm.hpp"
#include "adbn/reference.hpp"
#include "adbn/rng.hpp"

using namespace adbn;

namespace {

double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

template <typename F>
double time_ms(int repeats, F&& f) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const double t0 = now_ms();
    f();
    best = std::min(best, now_ms() - t0);
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  const int repeats = argc > 1 ? std::atoi(argv[1]) : 3;

#ifdef _OPENMP
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP not enabled; both columns run serial code\n");
#endif
  std::printf("%-28s %12s %12s %8s\n", "kernel", "serial ms", "parallel ms", "speedup");

  RngStream rng(1234);

  {
    RbmParams p = init_rbm(12, 10, rng);
    for (double& x : p.b) x = rng.uniform(-1, 1);
    for (double& x : p.c) x = rng.uniform(-1, 1);
    volatile double sink = 0.0;
    double serial = time_ms(repeats, [&] { sink = reference::partition_function_exact(p); });
    double par = time_ms(repeats, [&] { sink = partition_function_exact(p); });
    std::printf("%-28s %12.2f %12.2f %7.2fx\n", "partition_function 12x10", serial, par,
                serial / par);
  }

  {
    RbmParams p = init_rbm(256, 64, rng);
    std::vector<Vec> batch;
    RngStream data(9);
    for (int n = 0; n < 512; ++n) {
      Vec v(256);
      for (double& x : v) x = data.bernoulli(0.5) ? 1.0 : 0.0;
      batch.push_back(std::move(v));
    }
    volatile double sink = 0.0;
    double serial = time_ms(repeats, [&] { sink = reference::reconstruction_error(p, batch); });
    double par = time_ms(repeats, [&] { sink = reconstruction_error(p, batch); });
    std::printf("%-28s %12.2f %12.2f %7.2fx\n", "reconstruction 256x64x512", serial, par,
                serial / par);

    RngStream g(77);
    GradientEstimate grad;
    double cd = time_ms(repeats, [&] { grad = cd_gradient(p, batch, 1, g); });
    std::printf("%-28s %12s %12.2f %8s\n", "cd_gradient 256x64x512", "-", cd, "-");
  }

  return 0;
}
