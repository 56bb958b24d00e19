#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace wef {

using Date = std::chrono::sys_days;

// Strict YYYY-MM-DD; rejects impossible calendar dates.
std::optional<Date> parse_iso_date(std::string_view text);
std::string format_iso_date(Date date);

}  // namespace wef
