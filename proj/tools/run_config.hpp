#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>

#include "wef/eval.hpp"
#include "wef/synth.hpp"

namespace wef::cli {

struct RunConfig {
  std::optional<std::filesystem::path> manifest;  // absent: synthetic panel
  SynthMarketParams synth;
  BenchmarkParams bench;
  std::filesystem::path out = "out";
  std::uint64_t seed = 42;

  // Pushes `seed` into every stochastic component: ANN init (seed),
  // cuckoo search (seed + 1), synthetic market (seed + 2).
  void apply_seed(std::uint64_t s);
  void validate() const;
};

// Defaults overlaid with a TOML document. Unknown tables or keys are errors.
RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace wef::cli
