#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>

#include <nlohmann/json.hpp>

#include "fsolink/experiment.hpp"
#include "fsolink/link_config.hpp"
#include "fsolink/spectral.hpp"

namespace fsolink {

std::string_view version() noexcept;

// Everything a run needs. Keys in the file carry their unit as a suffix
// (_hz, _m, _s, _rad, _per_s); see README for the schema.
struct RunConfig {
  LinkConfig link;
  NoiseModels models;
  ExperimentSettings experiment;
};

RunConfig default_run_config(DelayMode mode = DelayMode::physical);

// Parses a config document (or a run manifest, whose "config" member is used).
// Absent keys take documented defaults; unknown keys and broken invariants throw
// Errc::configuration naming the key.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig parse_config(const std::filesystem::path& path);

// Cross-field checks: link invariants, segment length against run length, and
// the warm-up budget (at most 10% of the run).
void validate(const RunConfig& config);

nlohmann::json to_json(const RunConfig& config);

// FNV-1a of the canonical JSON dump.
std::uint64_t config_hash(const RunConfig& config);

}  // namespace fsolink
