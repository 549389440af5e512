#pragma once

// Genetic algorithm over rule tables.
//
// One generation:
//   evaluate members -> elite + random parent pool -> pairwise crossover ->
//   evaluate offspring -> mutate every offspring -> re-evaluate ->
//   survivor selection from offspring followed by members.
//
// All randomness comes from one Rng owned by the Evolution object and is
// consumed on the calling thread in that fixed order, members and offspring in
// index order. Fitness evaluation is pure, so it may run on worker threads
// without affecting results.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "caedge/ca.hpp"
#include "caedge/errors.hpp"
#include "caedge/fitness.hpp"
#include "caedge/grid.hpp"
#include "caedge/rng.hpp"

namespace caedge {

enum class CrossoverKind { one_point, two_point };
enum class MutationKind { type1, type2 };

inline constexpr std::size_t kMinPopulation = 4;

/// ceil(fraction * n), guarded against 0.2 * 10 landing a hair above 2.
inline std::size_t fraction_count(double fraction, std::size_t n) {
  const double x = fraction * static_cast<double>(n);
  return static_cast<std::size_t>(std::ceil(x - 1e-9));
}

struct EvolutionConfig {
  std::size_t population_size = 10;
  std::size_t generations = 5;
  unsigned passes = 1;
  CrossoverKind crossover = CrossoverKind::two_point;
  MutationKind mutation = MutationKind::type1;
  double elite_fraction = 0.2;
  double survivor_best_fraction = 0.2;
  double mutation_gate = 0.5;
  std::size_t stagnation_window = 2;
  // Type 1 law: zero ceil(f * zero_scale * 512) genes, or when stagnant set
  // ceil(f * push_scale * 512) genes to 1, f = normalized fitness.
  double type1_zero_scale = 0.25;
  double type1_push_scale = 1.0;
  std::uint64_t seed = 0;

  std::size_t elite_count() const { return fraction_count(elite_fraction, population_size); }

  void validate() const {
    const auto open_unit = [](double f) { return f > 0.0 && f < 1.0; };
    if (population_size < kMinPopulation)
      throw ConfigError("population size must be at least " + std::to_string(kMinPopulation));
    if (generations < 1) throw ConfigError("generations must be at least 1");
    if (passes < 1) throw ConfigError("passes must be at least 1");
    if (!open_unit(elite_fraction)) throw ConfigError("elite fraction must lie in (0,1)");
    if (!open_unit(survivor_best_fraction))
      throw ConfigError("survivor best fraction must lie in (0,1)");
    if (!(mutation_gate >= 0.0 && mutation_gate <= 1.0))
      throw ConfigError("mutation gate must lie in [0,1]");
    if (stagnation_window < 1) throw ConfigError("stagnation window must be at least 1");
    if (!(type1_zero_scale > 0.0 && type1_zero_scale <= 1.0))
      throw ConfigError("type1 zero scale must lie in (0,1]");
    if (!(type1_push_scale > 0.0 && type1_push_scale <= 1.0))
      throw ConfigError("type1 push scale must lie in (0,1]");
    const std::size_t elite = elite_count();
    if (elite < 1) throw ConfigError("elite fraction selects no parents");
    if (2 * elite > population_size)
      throw ConfigError("elite fraction too large: " + std::to_string(elite) +
                        " elite parents need as many non-elite members for the random slots");
  }
};

inline std::string to_string(CrossoverKind k) {
  return k == CrossoverKind::one_point ? "one_point" : "two_point";
}
inline std::string to_string(MutationKind k) { return k == MutationKind::type1 ? "type1" : "type2"; }

struct Individual {
  RuleTable genome;
  std::optional<FitnessValue> fitness;

  bool evaluated() const noexcept { return fitness.has_value(); }

  friend bool operator==(const Individual&, const Individual&) = default;
};

struct Population {
  std::vector<Individual> members;
  std::uint64_t generation = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const Population&, const Population&) = default;
};

struct GenerationStats {
  std::uint64_t generation = 0;
  std::uint64_t best_fitness = 0;
  double average_fitness = 0.0;
  double elapsed_seconds = 0.0;
};

inline std::vector<Individual> random_individuals(std::size_t count, Rng& rng) {
  std::vector<Individual> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back({random_rule(rng), std::nullopt});
  return out;
}

namespace detail {

inline std::uint64_t distance_of(const Individual& ind) {
  if (!ind.fitness) throw std::invalid_argument("individual has not been evaluated");
  return ind.fitness->distance;
}

/// Indices ordered by ascending distance, ties by lower index.
inline std::vector<std::size_t> rank(std::span<const Individual> members) {
  std::vector<std::size_t> order(members.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<std::uint64_t> d(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) d[i] = distance_of(members[i]);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
  return order;
}

/// Indices of `members` not in `taken`, ascending.
inline std::vector<std::size_t> remainder(std::size_t n, std::span<const std::size_t> taken) {
  std::vector<bool> used(n, false);
  for (auto i : taken) used[i] = true;
  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < n; ++i)
    if (!used[i]) rest.push_back(i);
  return rest;
}

inline std::size_t gene_count(double rate) {
  const double x = std::ceil(rate * static_cast<double>(kRuleCount) - 1e-9);
  return static_cast<std::size_t>(std::clamp(x, 0.0, static_cast<double>(kRuleCount)));
}

}  // namespace detail

/// Index of the best member (lowest distance, ties by lower index).
inline std::size_t best_index(std::span<const Individual> members) {
  if (members.empty()) throw std::invalid_argument("best_index: empty population");
  return detail::rank(members).front();
}

struct ParentSelection {
  std::vector<std::size_t> elite;   // best first
  std::vector<std::size_t> random;  // in draw order

  std::vector<std::size_t> indices() const {
    auto all = elite;
    all.insert(all.end(), random.begin(), random.end());
    return all;
  }
};

/// ceil(elite_fraction * N) best members plus the same number drawn uniformly
/// without replacement from the rest.
inline ParentSelection select_parents(std::span<const Individual> members, double elite_fraction,
                                      Rng& rng) {
  const std::size_t k = fraction_count(elite_fraction, members.size());
  if (k < 1 || 2 * k > members.size())
    throw ConfigError("parent pool of " + std::to_string(2 * k) + " cannot be drawn from " +
                      std::to_string(members.size()) + " members");
  const auto order = detail::rank(members);
  ParentSelection sel;
  sel.elite.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  const auto rest = detail::remainder(members.size(), sel.elite);
  for (auto j : rng.sample(rest.size(), k)) sel.random.push_back(rest[j]);
  return sel;
}

using Offspring = std::pair<RuleTable, RuleTable>;

/// Children exchange everything from `cut` onward. `cut` in [1, 511].
inline Offspring crossover_one_point_at(const RuleTable& p1, const RuleTable& p2,
                                        std::size_t cut) {
  if (cut < 1 || cut >= kRuleCount) throw std::out_of_range("crossover cut outside 1..511");
  RuleTable::Entries a{}, b{};
  for (std::size_t i = 0; i < kRuleCount; ++i) {
    a[i] = i < cut ? p1[i] : p2[i];
    b[i] = i < cut ? p2[i] : p1[i];
  }
  return {RuleTable(a), RuleTable(b)};
}

/// Children exchange the segment [first, last). 1 <= first < last <= 511.
inline Offspring crossover_two_point_at(const RuleTable& p1, const RuleTable& p2,
                                        std::size_t first, std::size_t last) {
  if (first < 1 || first >= last || last >= kRuleCount)
    throw std::out_of_range("crossover cuts must satisfy 1 <= first < last <= 511");
  RuleTable::Entries a{}, b{};
  for (std::size_t i = 0; i < kRuleCount; ++i) {
    const bool swapped = i >= first && i < last;
    a[i] = swapped ? p2[i] : p1[i];
    b[i] = swapped ? p1[i] : p2[i];
  }
  return {RuleTable(a), RuleTable(b)};
}

inline Offspring crossover_one_point(const RuleTable& p1, const RuleTable& p2, Rng& rng) {
  return crossover_one_point_at(p1, p2, 1 + rng.below(kRuleCount - 1));
}

inline Offspring crossover_two_point(const RuleTable& p1, const RuleTable& p2, Rng& rng) {
  auto [a, b] = rng.distinct_pair(kRuleCount - 1);
  if (a > b) std::swap(a, b);
  return crossover_two_point_at(p1, p2, a + 1, b + 1);
}

inline Offspring crossover(CrossoverKind kind, const RuleTable& p1, const RuleTable& p2,
                           Rng& rng) {
  return kind == CrossoverKind::one_point ? crossover_one_point(p1, p2, rng)
                                          : crossover_two_point(p1, p2, rng);
}

/// `count / 2` crossovers, each between two distinct pool members drawn
/// uniformly. Both children of every crossover are kept.
inline std::vector<RuleTable> make_offspring(std::span<const RuleTable> pool, std::size_t count,
                                             CrossoverKind kind, Rng& rng) {
  if (pool.size() < 2) throw std::invalid_argument("make_offspring: pool needs two parents");
  if (count % 2 != 0) throw std::invalid_argument("make_offspring: count must be even");
  std::vector<RuleTable> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count / 2; ++i) {
    const auto [a, b] = rng.distinct_pair(pool.size());
    auto [c1, c2] = crossover(kind, pool[a], pool[b], rng);
    out.push_back(c1);
    out.push_back(c2);
  }
  return out;
}

struct Type1Params {
  double gate = 0.5;
  double zero_scale = 0.25;
  double push_scale = 1.0;
};

/// Fitness-adaptive zeroing. Stagnant: set ceil(f * push_scale * 512) random
/// genes to 1. Otherwise, with probability `gate`, set ceil(f * zero_scale *
/// 512) random genes to 0. f is the individual's normalized fitness.
inline Individual mutate_type1(Individual ind, double normalized_fitness, bool stagnant,
                               const Type1Params& params, Rng& rng) {
  const double f = std::clamp(normalized_fitness, 0.0, 1.0);
  std::uint8_t value = 1;
  std::size_t genes = 0;
  if (stagnant) {
    genes = detail::gene_count(f * params.push_scale);
  } else {
    if (rng.uniform01() >= params.gate) return ind;
    value = 0;
    genes = detail::gene_count(f * params.zero_scale);
  }
  bool changed = false;
  for (auto code : rng.sample(kRuleCount, genes)) {
    if (ind.genome[code] != value) {
      ind.genome.set(code, value);
      changed = true;
    }
  }
  if (changed) ind.fitness.reset();
  return ind;
}

/// 2^0 .. 2^8: the single-cell window codes.
inline constexpr std::array<std::size_t, 9> kBasicRules = {1, 2, 4, 8, 16, 32, 64, 128, 256};

/// With probability `gate`: zero every basic-rule entry, then four times zero
/// the entry at the sum of two distinct basic rules.
inline Individual mutate_type2(Individual ind, double gate, Rng& rng) {
  if (rng.uniform01() >= gate) return ind;
  bool changed = false;
  const auto clear = [&](std::size_t code) {
    if (ind.genome[code] != 0) {
      ind.genome.set(code, 0);
      changed = true;
    }
  };
  for (auto code : kBasicRules) clear(code);
  for (int i = 0; i < 4; ++i) {
    const auto [a, b] = rng.distinct_pair(kBasicRules.size());
    clear(kBasicRules[a] + kBasicRules[b]);
  }
  if (changed) ind.fitness.reset();
  return ind;
}

/// ceil(best_fraction * target) best of `pool` (ties by lower index), then
/// uniform draws without replacement from the rest until `target` members.
inline std::vector<Individual> select_survivors(std::vector<Individual> pool, std::size_t target,
                                                double best_fraction, Rng& rng) {
  if (pool.size() < target)
    throw std::invalid_argument("select_survivors: pool of " + std::to_string(pool.size()) +
                                " is smaller than target " + std::to_string(target));
  const std::size_t k = std::min(fraction_count(best_fraction, target), target);
  const auto order = detail::rank(pool);
  std::vector<std::size_t> chosen(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  const auto rest = detail::remainder(pool.size(), chosen);
  for (auto j : rng.sample(rest.size(), target - k)) chosen.push_back(rest[j]);
  std::vector<Individual> out;
  out.reserve(target);
  for (auto i : chosen) out.push_back(std::move(pool[i]));
  return out;
}

/// Evaluates every member lacking a fitness, in parallel when threads > 1.
/// Returns the number of evaluations performed.
inline std::size_t evaluate_pending(std::span<Individual> members, const BinaryGrid& start,
                                    const BinaryGrid& goal, unsigned passes, unsigned threads) {
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < members.size(); ++i)
    if (!members[i].evaluated()) pending.push_back(i);
  if (pending.empty()) return 0;

  Evaluator local(start, goal, passes);  // validates shapes before any worker starts
  const std::size_t workers = std::min<std::size_t>(std::max(threads, 1u), pending.size());
  if (workers == 1) {
    for (auto i : pending) members[i].fitness = local(members[i].genome);
    return pending.size();
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  const auto work = [&](std::size_t lane, Evaluator& eval) {
    for (std::size_t j = lane; j < pending.size(); j += workers)
      members[pending[j]].fitness = eval(members[pending[j]].genome);
  };
  for (std::size_t lane = 1; lane < workers; ++lane)
    pool.emplace_back([&, lane] {
      Evaluator eval(start, goal, passes);
      work(lane, eval);
    });
  work(0, local);
  pool.clear();
  return pending.size();
}

struct ExecutionOptions {
  unsigned threads = 1;  // evaluation parallelism; never changes results
};

struct EvolutionResult {
  Individual best;
  std::vector<GenerationStats> stats;
  Population population;
};

/// Stateful driver for the generation loop: owns the RNG and the stagnation
/// counter. `run()` performs `config.generations` calls to `advance()`.
class Evolution {
 public:
  Evolution(EvolutionConfig config, BinaryGrid start, BinaryGrid goal,
            ExecutionOptions options = {})
      : config_(std::move(config)),
        start_(std::move(start)),
        goal_(std::move(goal)),
        options_(options),
        rng_(config_.seed) {
    config_.validate();
    if (!start_.same_shape(goal_))
      throw DimensionMismatch("start image is " + std::to_string(start_.width()) + "x" +
                              std::to_string(start_.height()) + " but goal image is " +
                              std::to_string(goal_.width()) + "x" +
                              std::to_string(goal_.height()));
  }

  const EvolutionConfig& config() const noexcept { return config_; }
  std::size_t evaluations() const noexcept { return evaluations_; }

  /// True when the next advance() will run mutation type 1 in push mode.
  bool stagnant() const noexcept { return stale_generations_ >= config_.stagnation_window; }

  /// Random population drawn from this run's generator. Same members as
  /// random_population(config.population_size, config.seed).
  Population initial_population() {
    return {random_individuals(config_.population_size, rng_), 0, config_.seed};
  }

  GenerationStats advance(Population& pop) {
    const auto t0 = std::chrono::steady_clock::now();
    auto& members = pop.members;
    if (members.size() != config_.population_size)
      throw ConfigError("population has " + std::to_string(members.size()) +
                        " members, config expects " + std::to_string(config_.population_size));

    evaluate(members);
    if (!best_so_far_) best_so_far_ = detail::distance_of(members[best_index(members)]);
    const bool push = stagnant();

    const auto parents = select_parents(members, config_.elite_fraction, rng_);
    std::vector<RuleTable> pool;
    for (auto i : parents.indices()) pool.push_back(members[i].genome);

    std::vector<Individual> brood;
    for (auto& g : make_offspring(pool, 2 * pool.size(), config_.crossover, rng_))
      brood.push_back({g, std::nullopt});
    evaluate(brood);

    const Type1Params type1{config_.mutation_gate, config_.type1_zero_scale,
                            config_.type1_push_scale};
    for (auto& child : brood) {
      if (config_.mutation == MutationKind::type1) {
        const double f = child.fitness->normalized();
        child = mutate_type1(std::move(child), f, push, type1, rng_);
      } else {
        child = mutate_type2(std::move(child), config_.mutation_gate, rng_);
      }
    }
    evaluate(brood);

    std::vector<Individual> combined = std::move(brood);
    combined.insert(combined.end(), std::make_move_iterator(members.begin()),
                    std::make_move_iterator(members.end()));
    members = select_survivors(std::move(combined), config_.population_size,
                               config_.survivor_best_fraction, rng_);

    GenerationStats stats;
    stats.generation = pop.generation;
    stats.best_fitness = detail::distance_of(members[best_index(members)]);
    double total = 0.0;
    for (const auto& m : members) total += static_cast<double>(detail::distance_of(m));
    stats.average_fitness = total / static_cast<double>(members.size());
    stats.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (stats.best_fitness < *best_so_far_) {
      best_so_far_ = stats.best_fitness;
      stale_generations_ = 0;
    } else {
      ++stale_generations_;
    }
    ++pop.generation;
    return stats;
  }

  EvolutionResult run() { return run(initial_population()); }

  /// Continue from an existing population. Cached fitness values are
  /// discarded and recomputed against this run's images.
  EvolutionResult run(Population pop) {
    for (auto& m : pop.members) m.fitness.reset();
    EvolutionResult result;
    for (std::size_t g = 0; g < config_.generations; ++g) result.stats.push_back(advance(pop));
    result.best = pop.members[best_index(pop.members)];
    result.population = std::move(pop);
    return result;
  }

 private:
  void evaluate(std::vector<Individual>& members) {
    evaluations_ += evaluate_pending(members, start_, goal_, config_.passes, options_.threads);
  }

  EvolutionConfig config_;
  BinaryGrid start_;
  BinaryGrid goal_;
  ExecutionOptions options_;
  Rng rng_;
  std::optional<std::uint64_t> best_so_far_;
  std::size_t stale_generations_ = 0;
  std::size_t evaluations_ = 0;
};

/// Fresh random population of `size` members from `seed`, as used at the
/// start of evolve() with the same seed.
inline Population random_population(std::size_t size, std::uint64_t seed) {
  Rng rng(seed);
  return {random_individuals(size, rng), 0, seed};
}

inline EvolutionResult evolve(const EvolutionConfig& config, const BinaryGrid& start,
                              const BinaryGrid& goal, ExecutionOptions options = {}) {
  return Evolution(config, start, goal, options).run();
}

inline EvolutionResult evolve(const EvolutionConfig& config, const BinaryGrid& start,
                              const BinaryGrid& goal, Population initial,
                              ExecutionOptions options = {}) {
  return Evolution(config, start, goal, options).run(std::move(initial));
}

}  // namespace caedge
