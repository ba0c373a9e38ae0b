#include "report.hpp"

#include <cstdio>

namespace sasaki::io {

const char* kBoundNote =
    "bound = K + 2*pi^2*cos(alpha0); the 2*pi^2 coefficient equals the total "
    "theta-variation integral and is the convention under which the explicit "
    "minimizer attains equality; the weaker 2*pi variant is not used";

std::string format_sig(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// Quotes a cell only when it contains a delimiter, quote, or newline.
static std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += csv_escape(header[i]);
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += csv_escape(row[i]);
    }
    out += '\n';
  }
  return out;
}

namespace {

void flatten(const Json& j, const std::string& prefix, std::vector<std::string>& cols,
             std::vector<std::string>& vals) {
  for (const auto& [key, value] : j.items()) {
    const std::string name = prefix.empty() ? key : prefix + "." + key;
    if (value.is_object()) {
      flatten(value, name, cols, vals);
    } else {
      cols.push_back(name);
      if (value.is_number_float())
        vals.push_back(format_sig(value.get<double>()));
      else if (value.is_boolean())
        vals.push_back(value.get<bool>() ? "true" : "false");
      else if (value.is_string())
        vals.push_back(value.get<std::string>());
      else
        vals.push_back(value.dump());
    }
  }
}

}  // namespace

std::string json_to_csv(const Json& report) {
  std::vector<std::string> cols, vals;
  flatten(report, "", cols, vals);
  return csv_table(cols, {vals});
}

}  // namespace sasaki::io
