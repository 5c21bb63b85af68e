#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace fsolink::cli {

enum ExitCode : int { kOk = 0, kValidation = 1, kRuntime = 2, kFlagged = 3 };

struct Options {
  std::string config;
  std::string out = "fsolink-out";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  std::optional<double> channel_thz;
  bool scaled_delay = false;
  std::optional<std::size_t> samples;
  std::optional<double> fs_hz;
  std::optional<unsigned> threads;
  bool trace = false;
  std::string log_level = "info";
};

int run_predict(const Options& options);
int run_simulate(const Options& options);
int run_sweep(const Options& options);
int run_identity_check(const Options& options);
int run_compare(const Options& options);

}  // namespace fsolink::cli
