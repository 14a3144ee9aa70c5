#pragma once

// Dependency-free raster and table output: P5 grayscale for label grids,
// P6 color for scalar channels, versioned CSV, JSON for dimension fits.

#include <string>

#include "gdfractal/geometry.hpp"

namespace gdfractal {

void write_pgm(const std::string& path, int width, int height,
               const std::vector<std::uint8_t>& bytes);

// Reads a binary P5 file back; throws on malformed input.
void read_pgm(const std::string& path, int& width, int& height, std::vector<std::uint8_t>& bytes);

// channel values are mapped through a fixed HSV-style ramp over [lo, hi];
// non-finite entries and cells with label 0 render gray.
void write_ppm_channel(const std::string& path, const BasinGrid& grid, const Vec& channel,
                       double lo, double hi);

// CSV schema (version 1): one comment line "# gdfractal csv schema=1 <meta>",
// a header row, then x,y,label[,extra...].
void write_basin_csv(const std::string& path, const BasinGrid& grid,
                     const std::vector<std::pair<std::string, Vec>>& extra_columns = {},
                     const std::string& meta = "");

BasinGrid read_basin_csv(const std::string& path);

void write_points_csv(const std::string& path, const std::vector<Point2>& points,
                      const std::string& meta = "");

std::string dimension_fit_json(const DimensionFit& fit, const std::string& meta = "");

}  // namespace gdfractal
