#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

// Small string helpers shared across agents.
namespace dairy::text {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
std::string to_upper(std::string_view s);
bool contains_icase(std::string_view haystack, std::string_view needle);
bool starts_with_icase(std::string_view s, std::string_view prefix);

// Replaces every `{key}` with its value; unknown placeholders are left intact.
std::string render(std::string_view tmpl, const std::map<std::string, std::string>& vars);

std::vector<std::string> split(std::string_view s, char sep);

// Every decimal number appearing in free text, in order ("1,234.5" reads as 1234.5).
std::vector<double> numbers_in(std::string_view s);

// Fixed-point rendering with `digits` decimals ("290.18").
std::string fixed(double v, int digits);

std::size_t edit_distance(std::string_view a, std::string_view b);

}  // namespace dairy::text
