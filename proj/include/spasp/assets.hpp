#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace spasp {

/// Text of a file shipped under assets/, e.g. "knowledge/stepgame.lp".
/// Throws std::out_of_range for unknown names.
std::string_view asset(std::string_view name);

std::vector<std::string> asset_names();

}  // namespace spasp
