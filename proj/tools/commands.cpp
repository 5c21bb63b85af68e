#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/basic_file_sink.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "fsolink/config.hpp"
#include "fsolink/error.hpp"
#include "fsolink/experiment.hpp"
#include "fsolink/output.hpp"

namespace fsolink::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Session {
  RunConfig config;
  RunManifest manifest;
  fs::path out;
};

json read_document(const std::string& path, json& options) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, fmt::format("cannot open config '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  const auto text = ss.str();
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) return json::object();
  json doc;
  try {
    doc = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw Error(Errc::configuration, fmt::format("{}: {}", path, e.what()));
  }
  if (doc.is_object() && doc.contains("manifest_version")) {
    if (doc.contains("options")) options = doc.at("options");
    if (!doc.contains("config")) throw Error(Errc::configuration, "manifest has no 'config'");
    return doc.at("config");
  }
  return doc;
}

void install_logger(const fs::path& out, const std::string& level) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Error(Errc::io, fmt::format("cannot create '{}': {}", out.string(), ec.message()));
  auto console = std::make_shared<spdlog::sinks::stderr_color_sink_mt>();
  console->set_level(spdlog::level::from_str(level));
  auto file = std::make_shared<spdlog::sinks::basic_file_sink_mt>((out / "run.log").string(), true);
  file->set_level(spdlog::level::debug);
  auto logger = std::make_shared<spdlog::logger>("fsolink", spdlog::sinks_init_list{console, file});
  logger->set_level(spdlog::level::debug);
  logger->flush_on(spdlog::level::debug);
  spdlog::set_default_logger(logger);
}

Session open_session(const std::string& command, const Options& o) {
  json options = json::object();
  json doc = read_document(o.config, options);
  if (!doc.is_object()) throw Error(Errc::configuration, "<root>: config must be an object");

  auto& link = doc["link"];
  if (o.scaled_delay) link["delay_mode"] = "scaled";
  if (o.samples) link["samples"] = *o.samples;
  if (o.fs_hz) link["fs_hz"] = *o.fs_hz;
  if (o.channel_thz) link["nu_s_hz"] = *o.channel_thz * 1e12;
  if (o.seed) doc["experiment"]["seed"] = *o.seed;
  if (o.threads) doc["experiment"]["threads"] = *o.threads;
  if (o.channel_thz && command == "sweep")
    doc["experiment"]["channels_thz"] = std::vector<double>{*o.channel_thz};
  if (link.empty()) doc.erase("link");

  if (o.mode) options["mode"] = *o.mode;
  if (o.trace) options["trace"] = true;

  auto config = parse_config(doc);
  Session s{config, RunManifest{command, config, options}, fs::path(o.out)};
  install_logger(s.out, o.log_level);
  s.manifest.started_utc = utc_timestamp();
  spdlog::info("fsolink {} {}: config {:016x}, seed {}, {} mode, T = {:.6g} s", version(), command,
               config_hash(s.config), s.config.experiment.seed, to_string(s.config.link.delay_mode),
               s.config.link.one_way_delay_s());
  return s;
}

std::optional<StabilizationMode> selected_mode(const Session& s) {
  if (!s.manifest.options.contains("mode")) return std::nullopt;
  return mode_from_string(s.manifest.options.at("mode").get<std::string>());
}

void finish(Session& s, const std::vector<std::string>& files) {
  s.manifest.outputs.insert(s.manifest.outputs.end(), files.begin(), files.end());
  s.manifest.finished_utc = utc_timestamp();
  write_manifest(s.out, s.manifest);
  spdlog::info("wrote {} files and manifest.json to {}", files.size(), s.out.string());
}

ScenarioResult single_channel(const Session& s) {
  ScenarioResult r;
  r.expected_channels = 1;
  r.channels.push_back(run_three_modes(s.config.link, s.config.models, s.config.experiment.seed,
                                       s.config.experiment));
  return r;
}

void log_flags(const ScenarioResult& r) {
  for (const auto& ch : r.channels)
    for (const auto& m : ch.modes)
      if (m.flags.any())
        spdlog::warn("{:.1f} THz {}: saturated={} diverged={} fault={}", ch.nu_s_hz / 1e12,
                     to_string(m.mode), m.flags.saturated, m.flags.diverged, m.flags.fault);
}

}  // namespace

int run_predict(const Options& o) {
  auto s = open_session("predict", o);
  const double T = s.config.link.one_way_delay_s();
  const double f_hi = std::min(s.config.experiment.report_f_max_hz, s.config.link.fs_hz / 2.0);
  const auto grid = log_grid(0.1, f_hi, 401);
  const auto curves = predicted_measurement_psd(s.config.models, T, grid);
  write_curves_csv(s.out / "curves.csv", curves);

  const double f0 = s.config.experiment.spot_hz;
  const double f0s[] = {f0};
  const auto at = predicted_measurement_psd(s.config.models, T, f0s);
  fmt::print("predicted L({} Hz): total {:.2f}, primary {:.2f}, secondary {:.2f}, "
             "atmosphere (derived) {:.2f} dBc/Hz\n",
             f0, ssb_phase_noise(at.total[0]), ssb_phase_noise(at.primary[0]),
             ssb_phase_noise(at.secondary[0]), ssb_phase_noise(at.atm_derived[0]));
  finish(s, {"curves.csv"});
  return kOk;
}

int run_simulate(const Options& o) {
  auto s = open_session("simulate", o);
  const auto r = single_channel(s);
  log_flags(r);
  if (s.manifest.options.value("trace", false)) {
    const auto mode = selected_mode(s).value_or(StabilizationMode::doppler);
    const auto inputs = make_noise_inputs(s.config.link, s.config.models, s.config.experiment.seed);
    const auto name = fmt::format("trace_{}.csv", to_string(mode));
    write_trace_csv(s.out / name, run_link(s.config.link, inputs, mode));
    s.manifest.outputs.push_back(name);
  }
  const auto status = emit_outputs(r, s.manifest, s.out);
  spdlog::info("wrote {} files to {}", status.files.size() + s.manifest.outputs.size(),
               s.out.string());
  fmt::print("{}", sweep_summary_text(r));
  return r.flagged() ? kFlagged : kOk;
}

int run_sweep(const Options& o) {
  auto s = open_session("sweep", o);
  const auto r = channel_sweep(s.config.link, s.config.models, s.config.experiment);
  log_flags(r);
  const auto status = emit_outputs(r, s.manifest, s.out);
  if (status.warning) spdlog::warn("{}", status.message);
  spdlog::info("wrote {} files to {}", status.files.size(), s.out.string());
  fmt::print("{}", sweep_summary_text(r));
  return r.flagged() || status.warning ? kFlagged : kOk;
}

int run_identity_check(const Options& o) {
  auto s = open_session("identity-check", o);
  IdentityOptions io;
  io.seed = s.config.experiment.seed;
  const auto cases = identity_suite(io);

  std::string table = "case,terms,bins_checked,pass_fraction,max_abs_deviation_db,passed\n";
  std::size_t passed = 0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& c = cases[i];
    std::string terms;
    for (const auto& t : c.combination.terms())
      terms += fmt::format("{}{}@{}", terms.empty() ? "" : " ", format_number(t.coefficient),
                           format_number(t.delay_s));
    table += fmt::format("{},{},{},{},{},{}\n", i, terms, c.bins_checked,
                         format_number(c.pass_fraction), format_number(c.max_abs_deviation_db),
                         c.passed ? 1 : 0);
    passed += c.passed ? 1 : 0;
  }
  write_text(s.out / "identity.csv", table);

  const double T = s.config.link.one_way_delay_s();
  const auto grid = log_grid(1e-3 / T, 0.5 / T, 200);
  const auto rows = atm_variant_report(T, grid);
  write_discrepancy_csv(s.out / "atm_variants.csv", rows);

  const double ratio = atm_low_frequency_ratio_db();
  const auto report = fmt::format(
      "delayed-copy identity: {}/{} combinations within {:.1f} dB on >= {:.0f}% of bins\n"
      "atmospheric residual, derived over printed variant as f -> 0: {:.3f} dB\n"
      "  at f T = {:.3g}: {:.3f} dB\n",
      passed, cases.size(), io.tolerance_db, 100.0 * io.min_pass_fraction, ratio,
      rows.front().f_hz * T, rows.front().ratio_db);
  write_text(s.out / "report.txt", report);
  fmt::print("{}", report);
  finish(s, {"identity.csv", "atm_variants.csv", "report.txt"});
  return passed == cases.size() ? kOk : kFlagged;
}

int run_compare(const Options& o) {
  auto s = open_session("compare", o);
  const auto r = single_channel(s);
  log_flags(r);
  const auto only = selected_mode(s);
  std::vector<std::string> files;
  for (const auto& m : r.channels.front().modes) {
    if (only && *only != m.mode) continue;
    const auto cmp = compare_with_prediction(m.spectrum, s.config.link, s.config.models, m.mode,
                                             s.config.experiment.report_f_max_hz);
    std::string table = "freq_hz,simulated_rad2_per_hz,predicted_rad2_per_hz,deviation_db,near_null\n";
    for (const auto& row : cmp.rows)
      table += fmt::format("{},{},{},{},{}\n", format_number(row.f_hz), format_number(row.simulated),
                           format_number(row.predicted), format_number(row.deviation_db),
                           row.near_null ? 1 : 0);
    const auto name = fmt::format("compare_{}.csv", to_string(m.mode));
    write_text(s.out / name, table);
    files.push_back(name);
    fmt::print("{:<14} max |simulated - predicted| away from nulls: {:.2f} dB\n", to_string(m.mode),
               cmp.max_abs_deviation_db);
  }
  finish(s, files);
  return r.flagged() ? kFlagged : kOk;
}

}  // namespace fsolink::cli
