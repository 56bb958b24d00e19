#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "run_config.hpp"
#include "wef/market_data.hpp"

namespace wef::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitGate = 3,
};

// Manifest panel when configured, otherwise the synthetic market.
MarketPanel load_panel(const RunConfig& config);

// Each command reports progress on `out` and returns an exit code. Library
// errors propagate as wef::Error.
int cmd_gen_data(const RunConfig& config, std::ostream& out);
int cmd_train(const RunConfig& config, const std::string& company, std::size_t horizon, std::ostream& out);
int cmd_predict(const RunConfig& config, const std::filesystem::path& bundle,
                const std::optional<std::string>& date, std::ostream& out);
int cmd_benchmark(const RunConfig& config, std::ostream& out);

std::filesystem::path bundle_path(const RunConfig& config, const std::string& company, std::size_t horizon);

}  // namespace wef::cli
