#pragma once

#include <ostream>
#include <string>

#include "json.hpp"

namespace cbi::cli {

// %.17g, with nan/inf spelled out (JSON output turns them into null).
std::string num17(double v);

// Pretty JSON where every floating value carries 17 significant digits.
void write_json(std::ostream& out, const nlohmann::ordered_json& j, int indent = 2);

std::string csv_field(const std::string& s);

}  // namespace cbi::cli
