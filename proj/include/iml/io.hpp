#pragma once

#include <json.hpp>
#include <utility>
#include <string>
#include <vector>

#include "iml/rod_model.hpp"

namespace iml {

using Json = nlohmann::ordered_json;

// Serializes with every number at 17 significant digits; non-finite values
// become null.
std::string dump_json(const Json& j, int indent = 2);
std::string format_number(double x);

// "AF(0,4)", "ALF(1,2)", "ALF(1,2)h", "ALE(2,1)" as printed by
// AsymptoticClass::tag.
AsymptoticClass parse_class(const std::string& s);

// "129x257"
std::pair<int, int> parse_grid(const std::string& s);

// Comma separated numbers.
std::vector<double> parse_list(const std::string& s);

}  // namespace iml
