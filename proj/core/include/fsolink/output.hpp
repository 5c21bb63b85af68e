#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fsolink/config.hpp"
#include "fsolink/experiment.hpp"
#include "fsolink/link.hpp"
#include "fsolink/spectral.hpp"

namespace fsolink {

inline constexpr int kManifestVersion = 1;

// Fixed-format number rendering shared by every CSV writer: 12 significant digits,
// "inf"/"-inf"/"nan" spelled out. Output is locale independent.
std::string format_number(double value);

void write_spectrum_csv(const std::filesystem::path& path, const SpectrumEstimate& spectrum,
                        double f_max_hz);
void write_sweep_csv(const std::filesystem::path& path, const ScenarioResult& result);
void write_trace_csv(const std::filesystem::path& path, const LinkResult& result);
void write_curves_csv(const std::filesystem::path& path, const PredictedCurves& curves);
void write_discrepancy_csv(const std::filesystem::path& path,
                           const std::vector<DiscrepancyRow>& rows);
void write_text(const std::filesystem::path& path, const std::string& text);

std::string sweep_summary_text(const ScenarioResult& result);

struct RunManifest {
  std::string command;
  RunConfig config;
  nlohmann::json options = nlohmann::json::object();  // subcommand flags not held in config
  std::vector<std::string> outputs;                    // relative to the output directory
  std::vector<std::string> warnings;
  std::string started_utc;
  std::string finished_utc;
};

std::string utc_timestamp();
nlohmann::json to_json(const RunManifest& manifest);
void write_manifest(const std::filesystem::path& out_dir, const RunManifest& manifest);

struct EmitStatus {
  std::vector<std::string> files;
  bool warning = false;
  std::string message;
};

// Writes per-channel spectra, the sweep table, a summary and manifest.json into
// out_dir (created if needed). An empty result writes only the manifest and
// reports a warning. Throws Errc::io when the directory cannot be written.
EmitStatus emit_outputs(const ScenarioResult& result, RunManifest manifest,
                        const std::filesystem::path& out_dir);

}  // namespace fsolink
