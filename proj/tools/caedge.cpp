// caedge: evolve CA rule tables that map a start image onto a goal edge image.
//
//   caedge evolve   --start s.pbm --goal g.pbm [--pop 10 --gens 5 ...]
//   caedge apply    --pop pop.capop --index best|N --image in.pbm --out out.pbm
//   caedge score    a.pbm b.pbm
//   caedge init-pop --size 10 --seed 7 --out p.capop
//   caedge bench    --width 256 --height 256 --pop 10 --passes 1 --seed 1 --reps 5
//
// Exit codes: 0 ok, 1 usage, 2 I/O or file format, 3 dimension mismatch.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "caedge/caedge.hpp"

namespace {

using namespace caedge;

constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitDimensions = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::map<std::string, CrossoverKind> kCrossoverNames{
    {"1pt", CrossoverKind::one_point}, {"2pt", CrossoverKind::two_point}};
const std::map<std::string, MutationKind> kMutationNames{{"type1", MutationKind::type1},
                                                         {"type2", MutationKind::type2}};
const std::map<std::string, PbmFormat> kFormatNames{{"P1", PbmFormat::plain},
                                                    {"P4", PbmFormat::raw}};

struct EvolveArgs {
  std::string start, goal, out, stats, result, init;
  std::string xover = "2pt", mutation = "type1", format = "P1";
  EvolutionConfig config;
  unsigned threads = 1;
  bool timing = false;
};

struct ApplyArgs {
  std::string pop, index, image, out, goal, format = "P1";
  std::optional<unsigned> passes;
};

struct ScoreArgs {
  std::string a, b;
};

struct InitArgs {
  std::size_t size = 10;
  std::uint64_t seed = 0;
  std::string out;
};

struct BenchArgs {
  std::size_t width = 256, height = 256, pop = 10, reps = kMinBenchReps;
  unsigned passes = 1;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

std::string stats_csv(const std::vector<GenerationStats>& stats, bool timing) {
  std::string csv = "generation,best_fitness,avg_fitness,elapsed_seconds\n";
  char buf[128];
  for (const auto& s : stats) {
    std::snprintf(buf, sizeof buf, "%llu,%llu,%.6f,%.6f\n",
                  static_cast<unsigned long long>(s.generation),
                  static_cast<unsigned long long>(s.best_fitness), s.average_fitness,
                  timing ? s.elapsed_seconds : 0.0);
    csv += buf;
  }
  return csv;
}

int cmd_evolve(EvolveArgs& args) {
  auto& config = args.config;
  config.crossover = kCrossoverNames.at(args.xover);
  config.mutation = kMutationNames.at(args.mutation);
  config.validate();

  const BinaryGrid start = load_image(args.start);
  const BinaryGrid goal = load_image(args.goal);
  Evolution evolution(config, start, goal, ExecutionOptions{args.threads});

  Population pop;
  if (!args.init.empty()) {
    pop = load_population(args.init).population;
    pop.seed = config.seed;
  } else {
    pop = evolution.initial_population();
  }
  for (auto& m : pop.members) m.fitness.reset();

  std::vector<GenerationStats> stats;
  for (std::size_t g = 0; g < config.generations; ++g) {
    stats.push_back(evolution.advance(pop));
    const auto& s = stats.back();
    std::printf("generation=%llu best_fitness=%llu avg_fitness=%.6f elapsed_s=%.6f\n",
                static_cast<unsigned long long>(s.generation),
                static_cast<unsigned long long>(s.best_fitness), s.average_fitness,
                s.elapsed_seconds);
  }
  const Individual& best = pop.members[best_index(pop.members)];
  std::printf("best_fitness=%llu\n", static_cast<unsigned long long>(best.fitness->distance));

  const GridShape shape{start.width(), start.height()};
  if (!args.out.empty()) save_population(pop, config, args.out, shape);
  if (!args.stats.empty()) detail::write_file_atomic(args.stats, stats_csv(stats, args.timing));
  if (!args.result.empty())
    save_image(run(start, best.genome, config.passes), args.result,
               kFormatNames.at(args.format));
  return 0;
}

int cmd_apply(const ApplyArgs& args) {
  const PopulationFile file = load_population(args.pop);
  const auto& members = file.population.members;
  if (members.empty()) throw UsageError("population file has no individuals");
  const BinaryGrid image = load_image(args.image);
  const unsigned passes = args.passes.value_or(file.config.passes);
  if (passes < 1) throw UsageError("--passes must be at least 1");

  std::size_t index = 0;
  if (args.index == "best") {
    if (!args.goal.empty()) {
      const BinaryGrid goal = load_image(args.goal);
      std::vector<Individual> scored = members;
      for (auto& m : scored) m.fitness.reset();
      evaluate_pending(scored, image, goal, passes, 1);
      index = best_index(scored);
    } else {
      std::optional<std::size_t> found;
      for (std::size_t i = 0; i < members.size(); ++i)
        if (members[i].fitness &&
            (!found || members[i].fitness->distance < members[*found].fitness->distance))
          found = i;
      if (!found) throw UsageError("--index best needs cached fitness in the file or --goal");
      index = *found;
    }
  } else {
    std::size_t consumed = 0;
    unsigned long long parsed = 0;
    try {
      parsed = std::stoull(args.index, &consumed);
    } catch (const std::exception&) {
      consumed = 0;
    }
    if (consumed == 0 || consumed != args.index.size() || args.index[0] == '-')
      throw UsageError("--index must be a non-negative integer or \"best\"");
    if (parsed >= members.size())
      throw UsageError("--index " + args.index + " out of range (population has " +
                       std::to_string(members.size()) + " individuals)");
    index = static_cast<std::size_t>(parsed);
  }
  save_image(run(image, members[index].genome, passes), args.out, kFormatNames.at(args.format));
  return 0;
}

int cmd_score(const ScoreArgs& args) {
  const BinaryGrid a = load_image(args.a);
  const BinaryGrid b = load_image(args.b);
  const std::size_t d = hamming(a, b);
  std::printf("distance=%zu normalized=%.6f\n", d,
              static_cast<double>(d) / static_cast<double>(a.size()));
  return 0;
}

int cmd_init_pop(const InitArgs& args) {
  EvolutionConfig config;
  config.population_size = args.size;
  config.seed = args.seed;
  config.validate();
  save_population(random_population(args.size, args.seed), config, args.out);
  return 0;
}

int cmd_bench(const BenchArgs& args) {
  if (args.width < kMinBenchSide || args.height < kMinBenchSide)
    throw UsageError("bench: --width and --height must be at least 16");
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  std::vector<unsigned> lanes{1};
  const unsigned max_threads = args.threads ? args.threads : hw;
  if (max_threads > 1) lanes.push_back(max_threads);
  for (auto threads : lanes)
    std::printf("%s\n", bench_generation(args.width, args.height, args.pop, args.passes, args.seed,
                                         args.reps, threads)
                            .to_line()
                            .c_str());
  return 0;
}

template <typename F>
int guarded(F&& f) {
  try {
    return f();
  } catch (const DimensionMismatch& e) {
    std::cerr << "error: dimension mismatch: " << e.what() << "\n";
    return kExitDimensions;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ImageError& e) {
    std::cerr << "error: bad image: " << e.what() << "\n";
    return kExitIo;
  } catch (const PopulationFormatError& e) {
    std::cerr << "error: bad population file: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evolve cellular-automaton rule tables for binary edge detection"};
  app.require_subcommand(1);

  EvolveArgs ev;
  auto* evolve = app.add_subcommand("evolve", "Run the genetic algorithm");
  evolve->add_option("--start", ev.start, "Start image (PBM/PGM)")->required();
  evolve->add_option("--goal", ev.goal, "Goal edge image (PBM/PGM)")->required();
  evolve->add_option("--pop", ev.config.population_size, "Population size")->capture_default_str();
  evolve->add_option("--gens", ev.config.generations, "Generations")->capture_default_str();
  evolve->add_option("--passes", ev.config.passes, "CA passes per evaluation")
      ->capture_default_str();
  evolve->add_option("--seed", ev.config.seed, "RNG seed")->capture_default_str();
  evolve->add_option("--xover", ev.xover, "Crossover: 1pt or 2pt")
      ->check(CLI::IsMember({"1pt", "2pt"}))
      ->capture_default_str();
  evolve->add_option("--mutation", ev.mutation, "Mutation: type1 or type2")
      ->check(CLI::IsMember({"type1", "type2"}))
      ->capture_default_str();
  evolve->add_option("--elite", ev.config.elite_fraction, "Elite fraction of the parent pool")
      ->capture_default_str();
  evolve->add_option("--survivor-best", ev.config.survivor_best_fraction,
                     "Fraction of survivors taken by rank")
      ->capture_default_str();
  evolve->add_option("--gate", ev.config.mutation_gate, "Mutation gate probability")
      ->capture_default_str();
  evolve->add_option("--stagnation", ev.config.stagnation_window,
                     "Generations without improvement before type1 pushes genes to 1")
      ->capture_default_str();
  evolve->add_option("--init", ev.init, "Start from this population file instead of random");
  evolve->add_option("--out", ev.out, "Write the final population here");
  evolve->add_option("--stats", ev.stats, "Write per-generation CSV stats here");
  evolve->add_option("--result", ev.result, "Write the best individual's output image here");
  evolve->add_option("--format", ev.format, "Result image format: P1 or P4")
      ->check(CLI::IsMember({"P1", "P4"}))
      ->capture_default_str();
  evolve->add_option("--threads", ev.threads, "Evaluation threads (results do not depend on it)")
      ->check(CLI::Range(1u, 1024u))
      ->capture_default_str();
  evolve->add_flag("--timing", ev.timing,
                   "Record wall-clock seconds in the CSV (otherwise 0, keeping it reproducible)");

  ApplyArgs ap;
  auto* apply = app.add_subcommand("apply", "Apply a saved rule table to an image");
  apply->add_option("--pop", ap.pop, "Population file")->required();
  apply->add_option("--index", ap.index, "Individual index or \"best\"")->required();
  apply->add_option("--image", ap.image, "Input image")->required();
  apply->add_option("--out", ap.out, "Output image")->required();
  apply->add_option("--passes", ap.passes, "CA passes (default: the file's config)");
  apply->add_option("--goal", ap.goal, "Goal image used to rank individuals for --index best");
  apply->add_option("--format", ap.format, "Output format: P1 or P4")
      ->check(CLI::IsMember({"P1", "P4"}))
      ->capture_default_str();

  ScoreArgs sc;
  auto* score = app.add_subcommand("score", "Hamming distance between two images");
  score->add_option("a", sc.a, "First image")->required();
  score->add_option("b", sc.b, "Second image")->required();

  InitArgs in;
  auto* init = app.add_subcommand("init-pop", "Write a fresh random population");
  init->add_option("--size", in.size, "Population size (>= 4)")->required();
  init->add_option("--seed", in.seed, "RNG seed")->required();
  init->add_option("--out", in.out, "Output population file")->required();

  BenchArgs bn;
  auto* bench = app.add_subcommand("bench", "Time one generation");
  bench->add_option("--width", bn.width)->capture_default_str();
  bench->add_option("--height", bn.height)->capture_default_str();
  bench->add_option("--pop", bn.pop)->capture_default_str();
  bench->add_option("--passes", bn.passes)->capture_default_str();
  bench->add_option("--seed", bn.seed)->capture_default_str();
  bench->add_option("--reps", bn.reps)->capture_default_str();
  bench->add_option("--threads", bn.threads, "Max-thread lane (0: hardware concurrency)")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (*evolve) return guarded([&] { return cmd_evolve(ev); });
  if (*apply) return guarded([&] { return cmd_apply(ap); });
  if (*score) return guarded([&] { return cmd_score(sc); });
  if (*init) return guarded([&] { return cmd_init_pop(in); });
  if (*bench) return guarded([&] { return cmd_bench(bn); });
  return kExitUsage;
}
