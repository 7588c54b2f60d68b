#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

#include "eal/engine.hpp"
#include "eal/systems.hpp"

namespace eal::config {

using json = nlohmann::json;

// TOML subset: [table] and [[array-of-tables]] headers, dotted names,
// key = value with strings, numbers, booleans, arrays and inline tables.
json parse_toml(std::string_view text);

// Dispatches on extension: .json parses as JSON, anything else as TOML.
json load_config_file(const std::string& path);

std::uint64_t fnv1a64(std::string_view bytes);

// Numbers may be symbolic constants: "sqrt2", "sqrt3", "sqrt5", "golden",
// "e", "pi", optionally "-" prefixed, or {p=..., q=...} rationals.
DD resolve_real(const json& v);
systems::Angle resolve_angle(const json& v);

systems::SystemSpec build_system(const json& v);
systems::Observable build_observable(const json& v);
engine::IterateSequence build_iterate(const json& v);

enum class Coupling { Product, Diagonal };

struct ExperimentConfig {
  engine::ExperimentSpec spec;
  std::uint64_t seed = 0;
  int runs = 1;
  bool seeded_starts = false;  // any track with start = "seeded"
  Coupling coupling = Coupling::Product;
  std::vector<json> track_start_specs;
};

ExperimentConfig build_experiment(const json& root);

// splitmix64 stream for seeded start points
struct SplitMix64 {
  std::uint64_t state;
  explicit SplitMix64(std::uint64_t seed) : state(seed) {}
  std::uint64_t next();
  double next_unit();  // [0,1)
};

// Applies seeded/explicit starts for one run of the experiment.
void assign_starts(ExperimentConfig& cfg, SplitMix64& stream);

}  // namespace eal::config
