#pragma once

#include <cstdint>
#include <exception>
#include <mutex>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ldt/estimate.hpp"
#include "ldt/gf.hpp"

namespace ldt {

// Executes independent Monte Carlo trials. Trial i always runs on the
// substream (seed, i), so the resulting counts are identical whether the
// loop runs serially or across any number of OpenMP threads; merging is an
// order-independent sum.
//
// The serial runner is the reference implementation; the parallel runner
// must match it exactly (tested, and compared in the bench tool).

template <typename TrialFn>
Estimate run_trials_serial(std::uint64_t trials, std::uint64_t seed, TrialFn&& fn) {
  Estimate est;
  est.trials = trials;
  for (std::uint64_t i = 0; i < trials; ++i) {
    RngStream rng(seed, i);
    if (fn(i, rng)) ++est.successes;
  }
  return est;
}

template <typename TrialFn>
Estimate run_trials_parallel(std::uint64_t trials, std::uint64_t seed, TrialFn&& fn,
                             int threads = 0) {
  Estimate est;
  est.trials = trials;
#ifndef _OPENMP
  (void)threads;
  return run_trials_serial(trials, seed, std::forward<TrialFn>(fn));
#else
  std::uint64_t successes = 0;
  std::exception_ptr error;
  std::uint64_t error_index = 0;
  std::mutex error_mu;
  const std::int64_t count = static_cast<std::int64_t>(trials);
  if (threads <= 0) threads = omp_get_max_threads();

#pragma omp parallel for num_threads(threads) schedule(static) reduction(+ : successes)
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      RngStream rng(seed, static_cast<std::uint64_t>(i));
      if (fn(static_cast<std::uint64_t>(i), rng)) ++successes;
    } catch (...) {
      // Keep the lowest-index failure so the surfaced error does not depend
      // on scheduling.
      std::lock_guard<std::mutex> lock(error_mu);
      if (!error || static_cast<std::uint64_t>(i) < error_index) {
        error = std::current_exception();
        error_index = static_cast<std::uint64_t>(i);
      }
    }
  }
  if (error) std::rethrow_exception(error);
  est.successes = successes;
  return est;
#endif
}

// threads == 1 forces the serial reference; 0 lets OpenMP pick.
template <typename TrialFn>
Estimate run_trials(std::uint64_t trials, std::uint64_t seed, TrialFn&& fn, int threads = 0) {
  if (threads == 1) return run_trials_serial(trials, seed, std::forward<TrialFn>(fn));
  return run_trials_parallel(trials, seed, std::forward<TrialFn>(fn), threads);
}

}  // namespace ldt
