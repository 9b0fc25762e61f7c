// Serial reference vs OpenMP kernels on the workloads of the error sweep.
// Usage: bench_kernels [n] [m] [d] [repeats]

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <vector>

#include "arpf/experiments.hpp"
#include "arpf/parallel_kernels.hpp"
#include "arpf/sampling.hpp"

using namespace arpf;

namespace {

double best_of(int repeats, const std::function<void()>& fn) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

void report(const char* name, double serial, double parallel) {
  std::printf("%-20s serial %9.4f s   omp %9.4f s   speedup %5.2fx\n", name, serial, parallel, serial / parallel);
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t n = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 200;
  const std::size_t m = argc > 2 ? std::strtoul(argv[2], nullptr, 10) : 3200;
  const std::size_t d = argc > 3 ? std::strtoul(argv[3], nullptr, 10) : 5;
  const int repeats = argc > 4 ? std::atoi(argv[4]) : 3;
  std::printf("n=%zu m=%zu d=%zu threads=%d\n", n, m, d, omp_get_max_threads());

  const auto sampler = FrequencySampler::gaussian(0.25, d);
  const Matrix x = gaussian_signals(n, d, 10.0, 1);
  const RandomDraw draw = sampler.draw(m, 2);

  CosQFeatures fs, fp;
  report("cos_q_features", best_of(repeats, [&] { fs = serial::cos_q_features(draw, x); }),
         best_of(repeats, [&] { fp = par::cos_q_features(draw, x); }));

  Matrix gs, gp;
  report("cross_gram", best_of(repeats, [&] { gs = serial::cross_gram(fs.q, fs.cos); }),
         best_of(repeats, [&] { gp = par::cross_gram(fp.q, fp.cos); }));

  Matrix ks, kp;
  report("kernel_matrix", best_of(repeats, [&] { ks = serial::kernel_matrix(sampler, x, x); }),
         best_of(repeats, [&] { kp = par::kernel_matrix(sampler, x, x); }));

  WorstCaseErrors es, ep;
  report("worst_case_errors", best_of(repeats, [&] { es = serial::worst_case_errors(fs, ks); }),
         best_of(repeats, [&] { ep = par::worst_case_errors(fp, kp); }));

  double diff = 0.0;
  for (std::size_t i = 0; i < gs.data.size(); ++i) diff = std::max(diff, std::abs(gs.data[i] - gp.data[i]));
  std::printf("max |serial - omp| on the gram: %.3e\n", diff);
  return 0;
}
