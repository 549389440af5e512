#pragma once

// Wall-clock harness for one GA generation and for a single CA pass.

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "caedge/ca.hpp"
#include "caedge/ga.hpp"
#include "caedge/grid.hpp"
#include "caedge/rng.hpp"

namespace caedge {

/// Reported time for one generation on a 256x256 array, used only as the
/// denominator of BenchReport::reference_ratio.
inline constexpr double kReferenceSecondsPerGeneration = 56.1;

struct BenchReport {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t population = 0;
  unsigned passes = 1;
  unsigned threads = 1;
  std::size_t reps = 0;
  double median_seconds = 0.0;  // per generation
  double min_seconds = 0.0;
  double max_seconds = 0.0;
  std::size_t evaluations = 0;      // per generation
  double cells_per_second = 0.0;    // cell updates per second at the median
  double reference_ratio = 0.0;     // kReferenceSecondsPerGeneration / median

  std::string to_line() const {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "width=%zu height=%zu pop=%zu passes=%u threads=%u reps=%zu "
                  "median_s=%.6f min_s=%.6f max_s=%.6f evals=%zu cells_per_s=%.3e "
                  "speedup_vs_56.1s=%.1f",
                  width, height, population, passes, threads, reps, median_seconds, min_seconds,
                  max_seconds, evaluations, cells_per_second, reference_ratio);
    return buf;
  }
};

namespace detail {

inline double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

inline BinaryGrid random_grid(std::size_t width, std::size_t height, Rng& rng) {
  std::vector<std::uint8_t> cells(width * height);
  for (auto& c : cells) c = static_cast<std::uint8_t>(rng.next() & 1u);
  return BinaryGrid(width, height, std::move(cells));
}

}  // namespace detail

inline constexpr std::size_t kMinBenchReps = 5;
inline constexpr std::size_t kMinBenchSide = 16;

/// Times full generations (evaluate, select, crossover, evaluate, mutate,
/// evaluate, survivors) on a random start/goal pair through the same
/// Evolution::advance() used by evolve(). Each repetition starts from a fresh
/// unevaluated population.
inline BenchReport bench_generation(std::size_t width, std::size_t height, std::size_t pop_size,
                                    unsigned passes, std::uint64_t seed,
                                    std::size_t reps = kMinBenchReps, unsigned threads = 1) {
  if (width < kMinBenchSide || height < kMinBenchSide)
    throw std::invalid_argument("bench: dimensions must be at least 16");
  reps = std::max(reps, kMinBenchReps);

  Rng image_rng(seed ^ 0x9e3779b97f4a7c15ull);
  const BinaryGrid start = detail::random_grid(width, height, image_rng);
  const BinaryGrid goal = detail::random_grid(width, height, image_rng);

  EvolutionConfig config;
  config.population_size = pop_size;
  config.passes = passes;
  config.generations = 1;
  config.seed = seed;
  Evolution evolution(config, start, goal, ExecutionOptions{threads});
  const Population initial = evolution.initial_population();

  std::vector<double> times;
  std::size_t evaluations = 0;
  for (std::size_t r = 0; r < reps; ++r) {
    Population pop = initial;
    const std::size_t before = evolution.evaluations();
    const auto t0 = std::chrono::steady_clock::now();
    evolution.advance(pop);
    times.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    evaluations = evolution.evaluations() - before;
  }

  BenchReport report;
  report.width = width;
  report.height = height;
  report.population = pop_size;
  report.passes = passes;
  report.threads = threads;
  report.reps = reps;
  report.median_seconds = detail::median(times);
  report.min_seconds = *std::min_element(times.begin(), times.end());
  report.max_seconds = *std::max_element(times.begin(), times.end());
  report.evaluations = evaluations;
  const double updates = static_cast<double>(evaluations) * passes * static_cast<double>(width * height);
  report.cells_per_second = updates / report.median_seconds;
  report.reference_ratio = kReferenceSecondsPerGeneration / report.median_seconds;
  return report;
}

/// Median seconds for one step() over a random width x height grid. Each
/// repetition loops until at least `min_rep_seconds` has elapsed so small
/// grids are not dominated by timer resolution.
inline double bench_pass(std::size_t width, std::size_t height, std::uint64_t seed,
                         std::size_t reps = kMinBenchReps, double min_rep_seconds = 0.02) {
  Rng rng(seed);
  const BinaryGrid grid = detail::random_grid(width, height, rng);
  const RuleTable rule = random_rule(rng);
  BinaryGrid a = grid;
  BinaryGrid b(width, height);
  std::vector<double> per_pass;
  for (std::size_t r = 0; r < std::max(reps, kMinBenchReps); ++r) {
    std::size_t iterations = 0;
    const auto t0 = std::chrono::steady_clock::now();
    double elapsed = 0.0;
    do {
      step_into(a, rule, b);
      std::swap(a, b);
      ++iterations;
      elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    } while (elapsed < min_rep_seconds);
    per_pass.push_back(elapsed / static_cast<double>(iterations));
  }
  return detail::median(per_pass);
}

}  // namespace caedge
