#pragma once

#include <string>

#include "json.hpp"

#include "awe/sizing.hpp"

namespace awe {

// Fixed key order; unbounded quantities serialise as the string "unbounded".
nlohmann::ordered_json report_to_json(const DesignReport& r);
std::string format_report_json(const DesignReport& r, int indent = 2);

// Aligned, human-readable table with one quantity per line.
std::string format_report_text(const DesignReport& r);

const char* to_string(Severity s);

}  // namespace awe
