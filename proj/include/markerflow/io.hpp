#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "markerflow/geometry.hpp"
#include "markerflow/record.hpp"

namespace markerflow {

/// Shortest round-trippable decimal ("%.17g"); "inf", "-inf", "nan" for
/// non-finite values.
std::string format_number(double v);

/// One row per record, columns t, beta, then the union of entry names in
/// sorted order. Rows are sorted by (beta, t). Missing entries are blank.
void write_records_csv(const std::filesystem::path& path, std::vector<DiagnosticRecord> records);

/// Columns pair, polyline, x, y; pair is "i-j" with 1-based marker indices.
void write_tieset_csv(const std::filesystem::path& path, const TieSet& tie);

struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;  // row-major, top row first
};

/// Linear map [lo, hi] -> [0, 255] (clamped, rounded to nearest). Image
/// column = x index; the top row is the largest y index.
GrayImage to_heatmap(const ScalarField& f, double lo, double hi);
/// Inverse map of to_heatmap back onto the grid.
ScalarField from_heatmap(const GrayImage& img, const Grid& grid, double lo, double hi);

/// Binary P5 PGM, maxval 255.
void write_pgm(const std::filesystem::path& path, const GrayImage& img);
GrayImage read_pgm(const std::filesystem::path& path);

}  // namespace markerflow
