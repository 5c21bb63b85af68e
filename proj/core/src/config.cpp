#include "fsolink/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "fsolink/error.hpp"

namespace fsolink {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& key, const std::string& why) {
  throw Error(Errc::configuration, fmt::format("{}: {}", key, why));
}

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) fail(where, "must be an object");
  for (const auto& [key, _] : j.items()) {
    if (allowed.count(key)) continue;
    for (const char* unit : {"_hz", "_m", "_s", "_rad", "_per_s", "_thz"})
      if (allowed.count(key + unit))
        fail(where + "." + key, fmt::format("missing unit suffix (expected '{}{}')", key, unit));
    fail(where + "." + key, "unknown key");
  }
}

template <typename T>
void read(const json& j, const std::string& where, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(where + "." + key, e.what());
  }
}

void read_servo(const json& j, ServoConfig& s) {
  const std::string w = "link.servo";
  check_keys(j, w, {"kp", "ki_per_s", "bandwidth_hint_hz", "enabled", "half_sum_drive",
                    "integrator_clamp_rad", "divergence_threshold_rad"});
  read(j, w, "kp", s.kp);
  read(j, w, "ki_per_s", s.ki_per_s);
  read(j, w, "bandwidth_hint_hz", s.bandwidth_hint_hz);
  read(j, w, "enabled", s.enabled);
  read(j, w, "half_sum_drive", s.half_sum_drive);
  read(j, w, "integrator_clamp_rad", s.integrator_clamp_rad);
  read(j, w, "divergence_threshold_rad", s.divergence_threshold_rad);
}

void read_link(const json& j, LinkConfig& c) {
  const std::string w = "link";
  check_keys(j, w, {"nu_p_hz", "nu_s_hz", "nu_lo_hz", "nu_rm_hz", "meas_beat_hz", "link_length_m",
                    "delay_s", "actuator", "delay_mode", "fs_hz", "samples", "duration_s",
                    "servo"});
  read(j, w, "nu_p_hz", c.nu_p_hz);
  read(j, w, "nu_s_hz", c.nu_s_hz);
  read(j, w, "nu_lo_hz", c.nu_lo_hz);
  read(j, w, "nu_rm_hz", c.nu_rm_hz);
  read(j, w, "meas_beat_hz", c.meas_beat_hz);
  const bool has_len = j.contains("link_length_m");
  const bool has_delay = j.contains("delay_s");
  if (has_len && has_delay) fail("link.link_length_m/delay_s", "set one, not both");
  if (has_len) {
    double v = 0.0;
    read(j, w, "link_length_m", v);
    c.link_length_m = v;
    c.delay_s.reset();
  }
  if (has_delay) {
    double v = 0.0;
    read(j, w, "delay_s", v);
    c.delay_s = v;
    c.link_length_m.reset();
  }
  if (j.contains("actuator")) c.actuator = actuator_from_string(j.at("actuator").get<std::string>());
  read(j, w, "fs_hz", c.fs_hz);
  if (j.contains("samples") && j.contains("duration_s"))
    fail("link.samples/duration_s", "set one, not both");
  read(j, w, "samples", c.samples);
  if (j.contains("duration_s")) {
    double d = 0.0;
    read(j, w, "duration_s", d);
    if (!(d > 0.0)) fail("link.duration_s", "must be > 0");
    c.samples = static_cast<std::size_t>(std::llround(d * c.fs_hz));
  }
  if (j.contains("servo")) read_servo(j.at("servo"), c.servo);
}

void read_experiment(const json& j, ExperimentSettings& e) {
  const std::string w = "experiment";
  check_keys(j, w, {"seed", "channels_thz", "welch", "spot_hz", "spot_half_width_octaves",
                    "report_f_max_hz", "threads"});
  read(j, w, "seed", e.seed);
  read(j, w, "channels_thz", e.channels_thz);
  read(j, w, "spot_hz", e.spot_hz);
  read(j, w, "spot_half_width_octaves", e.spot_half_width_octaves);
  read(j, w, "report_f_max_hz", e.report_f_max_hz);
  read(j, w, "threads", e.threads);
  if (j.contains("welch")) {
    const auto& jw = j.at("welch");
    check_keys(jw, "experiment.welch", {"segment_len", "overlap", "window"});
    read(jw, "experiment.welch", "segment_len", e.welch.segment_len);
    read(jw, "experiment.welch", "overlap", e.welch.overlap);
    if (jw.contains("window")) e.welch.window = window_from_string(jw.at("window").get<std::string>());
  }
}

void read_models(const json& j, NoiseModels& m) {
  check_keys(j, "models", {"primary", "secondary", "atmosphere"});
  auto one = [&](const char* key, PsdModel& out) {
    if (!j.contains(key)) return;
    try {
      out = psd_model_from_json(j.at(key));
    } catch (const Error& e) {
      fail(std::string("models.") + key, e.what());
    }
    if (out.kind() == PsdKind::frequency) out = freq_noise_to_phase_noise(out);
  };
  one("primary", m.primary);
  one("secondary", m.secondary);
  one("atmosphere", m.atmosphere);
}

}  // namespace

std::string_view version() noexcept { return FSOLINK_VERSION; }

RunConfig default_run_config(DelayMode mode) {
  RunConfig c{mode == DelayMode::scaled ? LinkConfig::scaled_defaults()
                                        : LinkConfig::physical_defaults(),
              calibrate_default_models(), ExperimentSettings{}};
  if (mode == DelayMode::scaled) c.experiment.welch.segment_len = 65536;
  return c;
}

RunConfig parse_config(const nlohmann::json& doc_in) {
  const json* doc = &doc_in;
  if (doc->is_null()) return default_run_config();
  if (!doc->is_object()) fail("<root>", "config must be an object");
  if (doc->contains("manifest_version")) {
    if (!doc->contains("config")) fail("<manifest>", "missing 'config'");
    doc = &doc->at("config");
  }
  check_keys(*doc, "<root>", {"link", "models", "experiment"});

  DelayMode mode = DelayMode::physical;
  if (doc->contains("link") && doc->at("link").contains("delay_mode"))
    mode = delay_mode_from_string(doc->at("link").at("delay_mode").get<std::string>());

  RunConfig c = default_run_config(mode);
  if (doc->contains("link")) read_link(doc->at("link"), c.link);
  if (doc->contains("models")) read_models(doc->at("models"), c.models);
  if (doc->contains("experiment")) read_experiment(doc->at("experiment"), c.experiment);
  validate(c);
  return c;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, fmt::format("cannot open config '{}'", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  const auto text = ss.str();
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) return default_run_config();
  json doc;
  try {
    doc = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw Error(Errc::configuration, fmt::format("{}: {}", path.string(), e.what()));
  }
  return parse_config(doc);
}

void validate(const RunConfig& c) {
  c.link.validate();
  const auto state = make_link(c.link);
  if (static_cast<double>(state.warmup()) > 0.1 * static_cast<double>(c.link.samples))
    fail("link.samples", fmt::format("warm-up of {} samples exceeds 10% of the {}-sample run",
                                     state.warmup(), c.link.samples));
  const auto& e = c.experiment;
  if (e.welch.segment_len > c.link.samples)
    fail("experiment.welch.segment_len",
         fmt::format("{} exceeds the run length {}", e.welch.segment_len, c.link.samples));
  if (e.welch.segment_len < 4) fail("experiment.welch.segment_len", "must be >= 4");
  if (!(e.welch.overlap >= 0.0 && e.welch.overlap <= 0.9))
    fail("experiment.welch.overlap", "must lie in [0, 0.9]");
  if (e.channels_thz.empty()) fail("experiment.channels_thz", "needs at least one channel");
  for (double ch : e.channels_thz)
    if (!(ch > 0.0)) fail("experiment.channels_thz", "channels must be > 0 THz");
  if (!(e.spot_hz > 0.0) || e.spot_hz >= c.link.fs_hz / 2.0)
    fail("experiment.spot_hz", "must lie in (0, fs/2)");
  if (!(e.spot_half_width_octaves >= 0.0)) fail("experiment.spot_half_width_octaves", "must be >= 0");
  if (!(e.report_f_max_hz > 0.0)) fail("experiment.report_f_max_hz", "must be > 0");
  if (e.threads == 0) fail("experiment.threads", "must be >= 1");
}

nlohmann::json to_json(const RunConfig& c) {
  const auto& l = c.link;
  json servo = {{"kp", l.servo.kp},
                {"ki_per_s", l.servo.ki_per_s},
                {"bandwidth_hint_hz", l.servo.bandwidth_hint_hz},
                {"enabled", l.servo.enabled},
                {"half_sum_drive", l.servo.half_sum_drive},
                {"integrator_clamp_rad", l.servo.integrator_clamp_rad},
                {"divergence_threshold_rad", l.servo.divergence_threshold_rad}};
  json link = {{"nu_p_hz", l.nu_p_hz},
               {"nu_s_hz", l.nu_s_hz},
               {"nu_lo_hz", l.nu_lo_hz},
               {"nu_rm_hz", l.nu_rm_hz},
               {"meas_beat_hz", l.meas_beat_hz},
               {"actuator", std::string(to_string(l.actuator))},
               {"delay_mode", std::string(to_string(l.delay_mode))},
               {"fs_hz", l.fs_hz},
               {"samples", l.samples},
               {"servo", servo}};
  if (l.link_length_m) link["link_length_m"] = *l.link_length_m;
  if (l.delay_s) link["delay_s"] = *l.delay_s;

  json models;
  to_json(models["primary"], c.models.primary);
  to_json(models["secondary"], c.models.secondary);
  to_json(models["atmosphere"], c.models.atmosphere);

  const auto& e = c.experiment;
  json experiment = {{"seed", e.seed},
                     {"channels_thz", e.channels_thz},
                     {"welch",
                      {{"segment_len", e.welch.segment_len},
                       {"overlap", e.welch.overlap},
                       {"window", std::string(to_string(e.welch.window))}}},
                     {"spot_hz", e.spot_hz},
                     {"spot_half_width_octaves", e.spot_half_width_octaves},
                     {"report_f_max_hz", e.report_f_max_hz},
                     {"threads", e.threads}};
  return {{"link", link}, {"models", models}, {"experiment", experiment}};
}

std::uint64_t config_hash(const RunConfig& c) {
  const auto text = to_json(c).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace fsolink
