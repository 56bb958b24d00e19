#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "wef/ensemble.hpp"

namespace wef {

inline constexpr std::string_view kBundleFormat = "wef-ensemble-bundle";
inline constexpr int kBundleMajorVersion = 1;
inline constexpr int kBundleMinorVersion = 0;

// Self-describing JSON document. Doubles are written with round-trip precision.
std::string bundle_to_json(const EnsembleBundle& bundle);
// Throws ErrorKind::Format on a foreign document or an unknown major version.
EnsembleBundle bundle_from_json(std::string_view text);

void save_bundle(const EnsembleBundle& bundle, const std::filesystem::path& path);
EnsembleBundle load_bundle(const std::filesystem::path& path);

}  // namespace wef
