// Times the serial reference trial runner against the OpenMP runner on the
// Monte Carlo kernels and checks that both produce identical counts.
//
//   ./ldt_bench [threads] [trials]

#include <chrono>
#include <cstdio>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ldt/runner.hpp"
#include "ldt/tester.hpp"

using namespace ldt;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

template <typename TrialFn>
void bench_kernel(const char* name, std::uint64_t trials, std::uint64_t seed, int threads,
                  TrialFn&& fn) {
  auto t0 = std::chrono::steady_clock::now();
  Estimate serial = run_trials_serial(trials, seed, fn);
  const double serial_s = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  Estimate parallel = run_trials_parallel(trials, seed, fn, threads);
  const double parallel_s = seconds_since(t0);

  const bool same = serial == parallel;
  std::printf("%-28s %10.3fs %10.3fs %7.2fx   p=%.6f  counts %s\n", name, serial_s, parallel_s,
              serial_s / parallel_s, serial.p_hat(), same ? "match" : "MISMATCH");
  if (!same) std::exit(1);
}

}  // namespace

int main(int argc, char** argv) {
  int threads = 0;
  std::uint64_t trials = 200000;
  if (argc > 1) threads = std::atoi(argv[1]);
  if (argc > 2) trials = std::strtoull(argv[2], nullptr, 10);
#ifdef _OPENMP
  if (threads <= 0) threads = omp_get_max_threads();
#else
  if (threads <= 0) threads = 1;
#endif
  std::printf("trials=%llu threads=%d\n", static_cast<unsigned long long>(trials), threads);
  std::printf("%-28s %11s %11s %8s\n", "kernel", "serial", "parallel", "speedup");

  Field f(11);
  RngStream grng(1, 0);
  MultiPoly g = random_poly(f, 5, 2, grng);
  HonestTable honest(CubesTable::Params{f, 5, 2, 3, 17}, g);
  CorruptedTable corrupted(CubesTable::Params{f, 5, 2, 3, 17}, g, 0.3);
  PlantedTable planted(CubesTable::Params{f, 5, 1, 2, 17},
                       PlantedSpec::sample(f, 5, 1, 0.25, 17));

  bench_kernel("cube-vs-cube honest", trials, 11, threads, [&](std::uint64_t, RngStream& rng) {
    FlatPair pair = sample_edge(f, 5, 3, 2, rng);
    return entries_agree_on(honest, pair.first, pair.second, pair.through);
  });
  bench_kernel("cube-vs-cube corrupted", trials, 12, threads, [&](std::uint64_t, RngStream& rng) {
    FlatPair pair = sample_edge(f, 5, 3, 2, rng);
    return entries_agree_on(corrupted, pair.first, pair.second, pair.through);
  });
  bench_kernel("plane-vs-plane planted", trials, 13, threads, [&](std::uint64_t, RngStream& rng) {
    FlatPair pair = sample_edge(f, 5, 2, 1, rng);
    return entries_agree_on(planted, pair.first, pair.second, pair.through);
  });
  bench_kernel("table agreement corrupted", trials, 14, threads,
               [&](std::uint64_t, RngStream& rng) {
                 AffineFlat c = sample_flat(f, 5, 3, rng);
                 return corrupted.query(c) == restrict_to(g, c);
               });
  return 0;
}
