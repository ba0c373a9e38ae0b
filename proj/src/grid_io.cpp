#include "grid_io.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "sasaki/errors.hpp"

namespace sasaki::io {

namespace {

std::string strip(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_double(const std::string& cell, const std::string& path, std::size_t line) {
  const std::string t = strip(cell);
  if (t.empty())
    throw GridParseError(path + ":" + std::to_string(line) + ": empty cell");
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size())
    throw GridParseError(path + ":" + std::to_string(line) + ": not a number: '" + t + "'");
  return v;
}

}  // namespace

GridSamples load_grid_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GridParseError("cannot open grid file: " + path);
  std::string header;
  if (!std::getline(in, header))
    throw GridParseError(path + ": empty file");
  if (strip(header) != "alpha,theta")
    throw GridParseError(path + ": expected header 'alpha,theta', got '" + strip(header) + "'");
  std::vector<double> lat, th;
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (strip(line).empty()) continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos)
      throw GridParseError(path + ":" + std::to_string(lineno) + ": expected 'alpha,theta' row");
    if (line.find(',', comma + 1) != std::string::npos)
      throw GridParseError(path + ":" + std::to_string(lineno) + ": too many columns");
    lat.push_back(parse_double(line.substr(0, comma), path, lineno));
    th.push_back(parse_double(line.substr(comma + 1), path, lineno));
  }
  if (lat.size() < 2)
    throw GridParseError(path + ": need at least 2 sample rows");
  for (std::size_t i = 0; i < lat.size(); ++i) {
    if (std::abs(lat[i]) >= kPi / 2.0)
      throw GridParseError(path + ": latitude outside the open polar range");
    if (i > 0 && !(lat[i] > lat[i - 1]))
      throw GridParseError(path + ": latitudes must be strictly increasing");
  }
  GridSamples g;
  g.latitudes = Eigen::Map<const Eigen::VectorXd>(lat.data(), static_cast<Eigen::Index>(lat.size()));
  g.thetas = Eigen::Map<const Eigen::VectorXd>(th.data(), static_cast<Eigen::Index>(th.size()));
  return g;
}

AnnulusSpec infer_annulus(const GridSamples& g) {
  const double a0 = std::max(std::abs(g.latitudes[0]), std::abs(g.latitudes[g.latitudes.size() - 1]));
  return make_annulus(a0);
}

void save_grid_csv(const std::string& path, const Eigen::VectorXd& latitudes,
                   const Eigen::VectorXd& thetas) {
  std::ofstream out(path);
  if (!out) throw GridParseError("cannot open grid file for writing: " + path);
  out << "alpha,theta\n";
  char buf[80];
  for (Eigen::Index i = 0; i < latitudes.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g\n", latitudes[i], thetas[i]);
    out << buf;
  }
  if (!out) throw GridParseError("failed writing grid file: " + path);
}

}  // namespace sasaki::io
