#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace sasaki::io {

using Json = nlohmann::ordered_json;

/// Formats a double with 12 significant digits (the CSV contract).
std::string format_sig(double v);

/// Assembles a CSV table: header row plus data rows, '\n' line endings.
std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows);

/// One-line flattening of a JSON report into a single-row CSV (nested
/// objects become dotted column names).
std::string json_to_csv(const Json& report);

/// The notes text attached to bound/area reports, documenting the bound
/// coefficient convention.
extern const char* kBoundNote;

}  // namespace sasaki::io
