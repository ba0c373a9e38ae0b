#pragma once

#include <string>

#include <Eigen/Core>

#include "sasaki/sphere_domain.hpp"

namespace sasaki::io {

/// Parsed content of a grid-field CSV: `alpha,theta` header, radians,
/// strictly increasing latitudes.
struct GridSamples {
  Eigen::VectorXd latitudes;
  Eigen::VectorXd thetas;
};

/// Loads and validates a grid-field CSV. Throws GridParseError on malformed
/// content (bad header, non-numeric cells, too few rows, or latitudes not
/// strictly increasing / outside the open polar range).
GridSamples load_grid_csv(const std::string& path);

/// Band inferred from the sample range: half-width max(|first|, |last|).
AnnulusSpec infer_annulus(const GridSamples& g);

/// Writes samples in the grid-field CSV format with 12 significant digits.
void save_grid_csv(const std::string& path, const Eigen::VectorXd& latitudes,
                   const Eigen::VectorXd& thetas);

}  // namespace sasaki::io
