// Configuration ingestion and experiment orchestration: JSON configs resolve
// to spaces, covers, algebras, cocycles and bundles; each task runs the
// corresponding verification pipeline and emits a deterministic JSON summary
// plus CSV dumps.

#pragma once

#include "aschern/index.hpp"
#include "aschern/mishchenko.hpp"

#include <json.hpp>

#include <map>
#include <string>

namespace aschern {

using Json = nlohmann::ordered_json;

struct RunResult {
  int exit_code = 0;  // 0 iff every check passed
  Json summary;
  std::map<std::string, std::string> csv;  // filename -> contents
};

struct ExperimentConfig {
  Json raw;
  std::string task;
  std::uint64_t seed = 1;
  double tol_scale = 1.0;

  // Parses and validates the top level; config errors carry JSON-pointer
  // style paths.
  static ExperimentConfig parse(const Json& j);
  static ExperimentConfig parse_text(const std::string& text);
};

// Overrides: task/seed/tol_scale replace the config's values when set.
struct RunOverrides {
  std::string task;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol_scale;
};

RunResult run(const ExperimentConfig& cfg, const RunOverrides& overrides = {});

// Resolved sub-objects, exposed for tests and the Python bindings.
SampledSpace space_from_config(const Json& cfg);
OpenCover cover_from_config(const Json& cfg, const SampledSpace& space);
PartitionOfUnity partition_from_config(const Json& cfg, const SampledSpace& space,
                                       const OpenCover& cover);
SiteAlgebraPtr algebra_from_config(const Json& cfg, GroupAlgebra* group_out = nullptr);
UnitaryCocycle cocycle_from_config(const Json& cfg, const OpenCover& cover);
PrincipalBundle bundle_from_config(const Json& cfg);

// Arc cover of a circle sample: `count` arcs of half-width `halfwidth_deg`
// degrees centered at equal angles.
OpenCover arc_cover(const SampledSpace& circle, int count, double halfwidth_deg);

// Cover whose sets are the vertex triples of the space's 2-chain.
OpenCover face_cover(const SampledSpace& space);

}  // namespace aschern
