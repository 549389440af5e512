#pragma once

// capop/1 population documents.
//
// A JSON object with keys in ascending order (nlohmann::json's default map),
// pretty-printed with two-space indentation:
//
//   {
//     "config": { ...every EvolutionConfig field... },
//     "format": "capop/1",
//     "generation": 5,
//     "grid": {"height": 16, "width": 16} | null,
//     "individuals": [
//       {"fitness": 37 | null, "rules": {"000000000": 0, ..., "111111111": 1}},
//       ...
//     ],
//     "seed": 42
//   }
//
// Rule keys are the 9-bit window code written MSB first, the same bit order
// as encode_window(). A cached fitness is the Hamming distance against the
// grid of record and is only a hint: evolve() recomputes it.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "caedge/ca.hpp"
#include "caedge/errors.hpp"
#include "caedge/ga.hpp"
#include "caedge/grid.hpp"

namespace caedge {

inline constexpr std::string_view kPopulationFormat = "capop/1";
inline constexpr std::size_t kRuleKeyLength = 9;

struct GridShape {
  std::size_t width = 0;
  std::size_t height = 0;
  friend bool operator==(const GridShape&, const GridShape&) = default;
};

struct PopulationFile {
  Population population;
  EvolutionConfig config;
  std::optional<GridShape> grid;
};

/// "100010001" for 273.
inline std::string rule_key(std::size_t code) {
  std::string key(kRuleKeyLength, '0');
  for (std::size_t i = 0; i < kRuleKeyLength; ++i)
    if ((code >> (kRuleKeyLength - 1 - i)) & 1u) key[i] = '1';
  return key;
}

namespace detail {

using json = nlohmann::json;

inline json config_to_json(const EvolutionConfig& c) {
  return json{{"crossover", to_string(c.crossover)},
              {"elite_fraction", c.elite_fraction},
              {"generations", c.generations},
              {"mutation", to_string(c.mutation)},
              {"mutation_gate", c.mutation_gate},
              {"passes", c.passes},
              {"population_size", c.population_size},
              {"seed", c.seed},
              {"stagnation_window", c.stagnation_window},
              {"survivor_best_fraction", c.survivor_best_fraction},
              {"type1_push_scale", c.type1_push_scale},
              {"type1_zero_scale", c.type1_zero_scale}};
}

[[noreturn]] inline void format_error(const std::string& what) {
  throw PopulationFormatError(what);
}

inline const json& field(const json& obj, const char* name, const std::string& where) {
  if (!obj.is_object()) format_error(where + ": expected an object");
  const auto it = obj.find(name);
  if (it == obj.end()) format_error(where + ": missing field \"" + name + "\"");
  return *it;
}

inline std::uint64_t as_uint(const json& v, const std::string& where) {
  if (!v.is_number_unsigned()) format_error(where + ": expected a non-negative integer");
  return v.get<std::uint64_t>();
}

inline double as_double(const json& v, const std::string& where) {
  if (!v.is_number()) format_error(where + ": expected a number");
  return v.get<double>();
}

inline EvolutionConfig config_from_json(const json& j) {
  const std::string where = "config";
  EvolutionConfig c;
  const auto text = [&](const char* name) {
    const auto& v = field(j, name, where);
    if (!v.is_string()) format_error(where + "." + name + ": expected a string");
    return v.get<std::string>();
  };
  const auto crossover = text("crossover");
  if (crossover == "one_point") c.crossover = CrossoverKind::one_point;
  else if (crossover == "two_point") c.crossover = CrossoverKind::two_point;
  else format_error("config.crossover: unknown value \"" + crossover + "\"");
  const auto mutation = text("mutation");
  if (mutation == "type1") c.mutation = MutationKind::type1;
  else if (mutation == "type2") c.mutation = MutationKind::type2;
  else format_error("config.mutation: unknown value \"" + mutation + "\"");

  c.elite_fraction = as_double(field(j, "elite_fraction", where), "config.elite_fraction");
  c.generations = as_uint(field(j, "generations", where), "config.generations");
  c.mutation_gate = as_double(field(j, "mutation_gate", where), "config.mutation_gate");
  c.passes = static_cast<unsigned>(as_uint(field(j, "passes", where), "config.passes"));
  c.population_size = as_uint(field(j, "population_size", where), "config.population_size");
  c.seed = as_uint(field(j, "seed", where), "config.seed");
  c.stagnation_window =
      as_uint(field(j, "stagnation_window", where), "config.stagnation_window");
  c.survivor_best_fraction =
      as_double(field(j, "survivor_best_fraction", where), "config.survivor_best_fraction");
  c.type1_push_scale = as_double(field(j, "type1_push_scale", where), "config.type1_push_scale");
  c.type1_zero_scale = as_double(field(j, "type1_zero_scale", where), "config.type1_zero_scale");
  return c;
}

inline RuleTable rules_from_json(const json& rules, const std::string& where) {
  if (!rules.is_object()) format_error(where + ": expected an object of rule keys");
  RuleTable::Entries entries{};
  std::vector<bool> seen(kRuleCount, false);
  for (const auto& [key, value] : rules.items()) {
    if (key.size() == kRuleKeyLength - 1 && key.find_first_not_of("01") == std::string::npos)
      format_error(where + ": key \"" + key +
                   "\" has 8 characters; rule keys are 9-character window codes "
                   "(a 3x3 window has 9 cells)");
    if (key.size() != kRuleKeyLength || key.find_first_not_of("01") != std::string::npos)
      format_error(where + ": invalid rule key \"" + key + "\"");
    const auto code = std::stoul(key, nullptr, 2);
    if (!value.is_number_integer() || value.get<std::int64_t>() < 0 ||
        value.get<std::int64_t>() > 1)
      format_error(where + ": key \"" + key + "\" has non-binary value " + value.dump());
    entries[code] = static_cast<std::uint8_t>(value.get<std::int64_t>());
    seen[code] = true;
  }
  for (std::size_t code = 0; code < kRuleCount; ++code)
    if (!seen[code]) format_error(where + ": missing rule key \"" + rule_key(code) + "\"");
  return RuleTable(entries);
}

/// Parses JSON, rejecting duplicate keys in any object.
inline json parse_strict(std::string_view text) {
  std::vector<std::set<std::string>> scopes;
  std::optional<std::string> duplicate;
  auto callback = [&](int, json::parse_event_t event, json& parsed) {
    switch (event) {
      case json::parse_event_t::object_start: scopes.emplace_back(); break;
      case json::parse_event_t::object_end:
        if (!scopes.empty()) scopes.pop_back();
        break;
      case json::parse_event_t::key:
        if (!scopes.empty() && !scopes.back().insert(parsed.get<std::string>()).second &&
            !duplicate)
          duplicate = parsed.get<std::string>();
        break;
      default: break;
    }
    return true;
  };
  json doc;
  try {
    doc = json::parse(text.begin(), text.end(), callback);
  } catch (const json::parse_error& e) {
    format_error(std::string("not valid JSON: ") + e.what());
  }
  if (duplicate) format_error("duplicate key \"" + *duplicate + "\"");
  return doc;
}

}  // namespace detail

/// Canonical text: two saves of the same population are byte-identical.
inline std::string serialize_population(const Population& pop, const EvolutionConfig& config,
                                        std::optional<GridShape> grid = std::nullopt) {
  using detail::json;
  json individuals = json::array();
  for (const auto& ind : pop.members) {
    json rules = json::object();
    for (std::size_t code = 0; code < kRuleCount; ++code) rules[rule_key(code)] = ind.genome[code];
    json fitness = ind.fitness && grid ? json(ind.fitness->distance) : json(nullptr);
    individuals.push_back(json{{"fitness", fitness}, {"rules", std::move(rules)}});
  }
  json doc{{"config", detail::config_to_json(config)},
           {"format", kPopulationFormat},
           {"generation", pop.generation},
           {"grid", grid ? json{{"height", grid->height}, {"width", grid->width}} : json(nullptr)},
           {"individuals", std::move(individuals)},
           {"seed", pop.seed}};
  return doc.dump(2) + "\n";
}

inline PopulationFile parse_population(std::string_view text) {
  using detail::as_uint;
  using detail::field;
  const auto doc = detail::parse_strict(text);
  if (!doc.is_object()) detail::format_error("document root must be an object");

  const auto& format = field(doc, "format", "document");
  if (!format.is_string() || format.get<std::string>() != kPopulationFormat)
    detail::format_error("unsupported format version " + format.dump() + " (expected \"" +
                         std::string(kPopulationFormat) + "\")");

  PopulationFile file;
  file.config = detail::config_from_json(field(doc, "config", "document"));
  file.population.generation = as_uint(field(doc, "generation", "document"), "generation");
  file.population.seed = as_uint(field(doc, "seed", "document"), "seed");

  const auto& grid = field(doc, "grid", "document");
  if (!grid.is_null()) {
    GridShape shape{as_uint(field(grid, "width", "grid"), "grid.width"),
                    as_uint(field(grid, "height", "grid"), "grid.height")};
    if (shape.width == 0 || shape.height == 0)
      detail::format_error("grid: dimensions must be positive");
    file.grid = shape;
  }

  const auto& individuals = field(doc, "individuals", "document");
  if (!individuals.is_array()) detail::format_error("individuals: expected an array");
  for (std::size_t i = 0; i < individuals.size(); ++i) {
    const std::string where = "individuals[" + std::to_string(i) + "]";
    const auto& entry = individuals[i];
    Individual ind{detail::rules_from_json(field(entry, "rules", where), where + ".rules"),
                   std::nullopt};
    const auto& fitness = field(entry, "fitness", where);
    if (!fitness.is_null()) {
      if (!file.grid) detail::format_error(where + ": cached fitness without a grid of record");
      const auto cells = static_cast<std::uint64_t>(file.grid->width * file.grid->height);
      const auto distance = as_uint(fitness, where + ".fitness");
      if (distance > cells) detail::format_error(where + ": fitness exceeds cell count");
      ind.fitness = FitnessValue{distance, cells};
    }
    file.population.members.push_back(std::move(ind));
  }
  return file;
}

inline void save_population(const Population& pop, const EvolutionConfig& config,
                            const std::filesystem::path& path,
                            std::optional<GridShape> grid = std::nullopt) {
  detail::write_file_atomic(path, serialize_population(pop, config, grid));
}

inline PopulationFile load_population(const std::filesystem::path& path) {
  return parse_population(detail::read_file(path));
}

}  // namespace caedge
