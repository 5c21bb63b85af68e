#include "fsolink/output.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

#include <fmt/chrono.h>
#include <fmt/format.h>

#include "fsolink/error.hpp"
#include "fsolink/psd_model.hpp"

namespace fsolink {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) throw Error(Errc::io, fmt::format("cannot create '{}': {}", path.parent_path().string(), ec.message()));
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io, fmt::format("cannot write '{}'", path.string()));
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw Error(Errc::io, fmt::format("write failed for '{}'", path.string()));
}

double dbc(double s) { return s > 0.0 ? ssb_phase_noise(s) : -INFINITY; }

std::string mode_file_tag(StabilizationMode m) { return std::string(to_string(m)); }

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  return fmt::format("{:.12g}", v);
}

void write_spectrum_csv(const fs::path& path, const SpectrumEstimate& s, double f_max_hz) {
  auto out = open_out(path);
  out << "freq_hz,s_phi_rad2_per_hz,l_dbc_per_hz\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.freqs[i] > f_max_hz) break;
    out << format_number(s.freqs[i]) << ',' << format_number(s.psd[i]) << ','
        << format_number(dbc(s.psd[i])) << '\n';
  }
  finish(out, path);
}

void write_sweep_csv(const fs::path& path, const ScenarioResult& r) {
  auto out = open_out(path);
  out << "channel_thz,mode,l10_dbc_per_hz,suppression_db\n";
  for (const auto& ch : r.channels)
    for (const auto& m : ch.modes)
      out << format_number(ch.nu_s_hz / 1e12) << ',' << to_string(m.mode) << ','
          << format_number(m.spot_dbc) << ',' << format_number(m.suppression_db) << '\n';
  finish(out, path);
}

void write_trace_csv(const fs::path& path, const LinkResult& r) {
  auto out = open_out(path);
  out << "t_s,error_rad,actuator_cmd,meas_phase_rad\n";
  const auto& tr = r.trace;
  const bool have = tr.error_rad.size() == r.meas.size();
  for (std::size_t i = 0; i < r.meas.size(); ++i) {
    const double t = r.meas.t0_s() + static_cast<double>(i) * r.meas.dt();
    out << format_number(t) << ',' << format_number(have ? tr.error_rad[i] : NAN) << ','
        << format_number(have ? tr.actuator_cmd_rad[i] : NAN) << ',' << format_number(r.meas[i])
        << '\n';
  }
  finish(out, path);
}

void write_curves_csv(const fs::path& path, const PredictedCurves& c) {
  auto out = open_out(path);
  out << "freq_hz,s_meas_primary,s_meas_secondary,s_meas_atm_printed,s_meas_atm_derived,"
         "s_meas_total,l_meas_primary,l_meas_secondary,l_meas_atm_printed,l_meas_atm_derived,"
         "l_meas_total\n";
  for (std::size_t i = 0; i < c.freqs.size(); ++i) {
    const double v[] = {c.primary[i], c.secondary[i], c.atm_printed[i], c.atm_derived[i],
                        c.total[i]};
    out << format_number(c.freqs[i]);
    for (double x : v) out << ',' << format_number(x);
    for (double x : v) out << ',' << format_number(dbc(x));
    out << '\n';
  }
  finish(out, path);
}

void write_discrepancy_csv(const fs::path& path, const std::vector<DiscrepancyRow>& rows) {
  auto out = open_out(path);
  out << "freq_hz,atm_printed,atm_derived,ratio_db\n";
  for (const auto& r : rows)
    out << format_number(r.f_hz) << ',' << format_number(r.printed) << ','
        << format_number(r.derived) << ',' << format_number(r.ratio_db) << '\n';
  finish(out, path);
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  finish(out, path);
}

std::string sweep_summary_text(const ScenarioResult& r) {
  std::string s;
  s += fmt::format("channels: {} of {}{}\n", r.channels.size(), r.expected_channels,
                   r.incomplete ? " (incomplete)" : "");
  if (r.channels.empty()) return s;
  s += "mode           L(10 Hz) mean  +max   -min   (dBc/Hz)\n";
  for (auto m : kAllModes) {
    const auto sum = r.summary(m);
    s += fmt::format("{:<14} {:>9.2f}  {:>+5.2f}  {:>+5.2f}\n", to_string(m), sum.mean, sum.plus,
                     -sum.minus);
  }
  for (auto m : {StabilizationMode::group_delay, StabilizationMode::doppler}) {
    std::vector<double> sup;
    for (const auto& ch : r.channels) sup.push_back(ch[m].suppression_db);
    const auto sum = summarize(sup);
    double lo = sup.front();
    for (double x : sup) lo = std::min(lo, x);
    s += fmt::format("suppression {:<12} mean {:.2f} dB, min {:.2f} dB\n", to_string(m), sum.mean,
                     lo);
  }
  std::size_t flagged = 0;
  for (const auto& ch : r.channels) flagged += ch.flagged() ? 1 : 0;
  s += fmt::format("flagged channels: {}\n", flagged);
  return s;
}

std::string utc_timestamp() {
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}",
                     fmt::gmtime(std::chrono::system_clock::to_time_t(std::chrono::system_clock::now())));
}

nlohmann::json to_json(const RunManifest& m) {
  const CalibrationAnchors a{};
  nlohmann::json anchors = {{"anchor_hz", a.anchor_hz},
                            {"unstabilized_dbc", a.unstabilized_dbc},
                            {"stabilized_dbc", a.stabilized_dbc},
                            {"quiet_secondary_dbc", a.quiet_secondary_dbc},
                            {"link_length_m", a.link_length_m},
                            {"atm_exponent", a.atm_exponent},
                            {"atm_rolloff_hz", a.atm_rolloff_hz},
                            {"atm_rolloff_exponent", a.atm_rolloff_exponent},
                            {"primary_flicker_corner_hz", a.primary_flicker_corner_hz}};
  return {{"manifest_version", kManifestVersion},
          {"tool", "fsolink"},
          {"version", std::string(version())},
          {"command", m.command},
          {"seed", m.config.experiment.seed},
          {"config_hash", fmt::format("{:016x}", config_hash(m.config))},
          {"config", to_json(m.config)},
          {"options", m.options},
          {"calibration_anchors", anchors},
          {"outputs", m.outputs},
          {"warnings", m.warnings},
          {"started_utc", m.started_utc},
          {"finished_utc", m.finished_utc}};
}

void write_manifest(const fs::path& out_dir, const RunManifest& m) {
  write_text(out_dir / "manifest.json", to_json(m).dump(2) + "\n");
}

EmitStatus emit_outputs(const ScenarioResult& r, RunManifest m, const fs::path& out_dir) {
  EmitStatus status;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(Errc::io, fmt::format("cannot create '{}': {}", out_dir.string(), ec.message()));

  if (r.channels.empty()) {
    status.warning = true;
    status.message = "empty result: no channels completed, manifest only";
  } else {
    const double fmax = m.config.experiment.report_f_max_hz;
    for (const auto& ch : r.channels)
      for (const auto& mode : ch.modes) {
        const auto rel = fmt::format("spectra/ch_{:.4f}THz_{}.csv", ch.nu_s_hz / 1e12,
                                     mode_file_tag(mode.mode));
        write_spectrum_csv(out_dir / rel, mode.spectrum, fmax);
        status.files.push_back(rel);
      }
    write_sweep_csv(out_dir / "sweep.csv", r);
    status.files.emplace_back("sweep.csv");
    write_text(out_dir / "summary.txt", sweep_summary_text(r));
    status.files.emplace_back("summary.txt");
    if (r.incomplete) {
      status.warning = true;
      status.message = "sweep incomplete: some channels failed";
    }
  }
  if (status.warning) m.warnings.push_back(status.message);
  m.outputs.insert(m.outputs.end(), status.files.begin(), status.files.end());
  if (m.finished_utc.empty()) m.finished_utc = utc_timestamp();
  write_manifest(out_dir, m);
  status.files.emplace_back("manifest.json");
  return status;
}

}  // namespace fsolink
