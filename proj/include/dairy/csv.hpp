#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace dairy::csv {

// RFC 4180 records: quoted fields may contain separators, quotes ("") and newlines.
std::vector<std::vector<std::string>> parse(std::string_view data, char sep = ',');

std::string escape(std::string_view field, char sep = ',');

}  // namespace dairy::csv
