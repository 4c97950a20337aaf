#pragma once

#include <string>
#include <utility>
#include <vector>

namespace mvsc {

// "WxH" with positive even dimensions; throws std::invalid_argument on
// anything else.
std::pair<int, int> parse_size(const std::string& s);

std::vector<std::string> split(const std::string& s, char sep);
std::vector<int> parse_int_list(const std::string& s);

}  // namespace mvsc
