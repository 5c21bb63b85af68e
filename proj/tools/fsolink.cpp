#include <exception>
#include <functional>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "fsolink/config.hpp"
#include "fsolink/error.hpp"

namespace {

using fsolink::cli::Options;

void add_common(CLI::App& cmd, Options& o) {
  cmd.add_option("-c,--config", o.config, "config file or run manifest (JSON)");
  cmd.add_option("-o,--out", o.out, "output directory")->capture_default_str();
  cmd.add_option("--seed", o.seed, "base seed");
  cmd.add_option("--mode", o.mode, "unstabilized | group-delay | doppler");
  cmd.add_option("--channel-thz", o.channel_thz, "secondary carrier in THz");
  cmd.add_flag("--scaled-delay", o.scaled_delay, "use the scaled-delay defaults");
  cmd.add_option("--samples", o.samples, "output samples per run");
  cmd.add_option("--fs-hz", o.fs_hz, "sample rate in Hz");
  cmd.add_option("--threads", o.threads, "worker threads for channel sweeps");
  cmd.add_option("--log-level", o.log_level, "trace | debug | info | warn | error")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-way free-space optical link stabilization simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(fsolink::version()));

  Options opts;
  std::function<int(const Options&)> action;
  auto sub = [&](const char* name, const char* help, int (*fn)(const Options&)) {
    auto* cmd = app.add_subcommand(name, help);
    add_common(*cmd, opts);
    cmd->callback([&action, fn] { action = fn; });
    return cmd;
  };
  sub("predict", "analytic measurement spectra for the configured link", fsolink::cli::run_predict);
  auto* sim = sub("simulate", "one channel in all three modes", fsolink::cli::run_simulate);
  sim->add_flag("--trace", opts.trace, "also write the time trace of --mode (default doppler)");
  sub("sweep", "all channels in all three modes", fsolink::cli::run_sweep);
  sub("identity-check", "delayed-copy identity oracle and atmospheric variant report",
      fsolink::cli::run_identity_check);
  sub("compare", "simulated against predicted spectra", fsolink::cli::run_compare);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return fsolink::cli::kValidation;
  }

  try {
    return action(opts);
  } catch (const fsolink::Error& e) {
    spdlog::error("{}", e.what());
    return e.is_validation() ? fsolink::cli::kValidation : fsolink::cli::kRuntime;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return fsolink::cli::kRuntime;
  }
}
