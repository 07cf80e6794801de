#include "markerflow/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>

namespace markerflow {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

void write_records_csv(const std::filesystem::path& path, std::vector<DiagnosticRecord> records) {
  std::stable_sort(records.begin(), records.end(), [](const DiagnosticRecord& a, const DiagnosticRecord& b) {
    return a.beta != b.beta ? a.beta < b.beta : a.t < b.t;
  });
  std::set<std::string> columns;
  for (const auto& r : records) {
    for (const auto& [key, value] : r.entries) columns.insert(key);
  }
  auto out = open_out(path);
  out << "t,beta";
  for (const auto& c : columns) out << "," << c;
  out << "\n";
  for (const auto& r : records) {
    out << format_number(r.t) << "," << format_number(r.beta);
    for (const auto& c : columns) {
      out << ",";
      if (auto it = r.entries.find(c); it != r.entries.end()) out << format_number(it->second);
    }
    out << "\n";
  }
}

void write_tieset_csv(const std::filesystem::path& path, const TieSet& tie) {
  auto out = open_out(path);
  const std::string pair = std::to_string(tie.i + 1) + "-" + std::to_string(tie.j + 1);
  out << "pair,polyline,x,y\n";
  for (std::size_t l = 0; l < tie.polylines.size(); ++l) {
    for (const Point& p : tie.polylines[l].points) {
      out << pair << "," << l << "," << format_number(p.x) << "," << format_number(p.y) << "\n";
    }
  }
}

GrayImage to_heatmap(const ScalarField& f, double lo, double hi) {
  if (!(hi > lo)) throw InvalidInput("heatmap range must satisfy lo < hi");
  const std::size_t n = f.grid().n();
  GrayImage img{n, n, std::vector<std::uint8_t>(n * n)};
  for (std::size_t row = 0; row < n; ++row) {
    const std::size_t j = n - 1 - row;
    for (std::size_t i = 0; i < n; ++i) {
      const double s = std::clamp((f(i, j) - lo) / (hi - lo), 0.0, 1.0);
      img.pixels[row * n + i] = static_cast<std::uint8_t>(std::lround(255.0 * s));
    }
  }
  return img;
}

ScalarField from_heatmap(const GrayImage& img, const Grid& grid, double lo, double hi) {
  const std::size_t n = grid.n();
  if (img.width != n || img.height != n) throw InvalidInput("heatmap size does not match grid");
  ScalarField f(grid);
  for (std::size_t row = 0; row < n; ++row) {
    for (std::size_t i = 0; i < n; ++i) {
      f(i, n - 1 - row) = lo + (hi - lo) * static_cast<double>(img.pixels[row * n + i]) / 255.0;
    }
  }
  return f;
}

void write_pgm(const std::filesystem::path& path, const GrayImage& img) {
  auto out = open_out(path, std::ios::out | std::ios::binary);
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
}

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
  std::string magic;
  GrayImage img;
  int maxval = 0;
  in >> magic >> img.width >> img.height >> maxval;
  if (magic != "P5" || maxval != 255 || !in) throw std::runtime_error("'" + path.string() + "' is not an 8-bit P5 PGM");
  in.get();  // single whitespace before the raster
  img.pixels.resize(img.width * img.height);
  in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
  if (!in) throw std::runtime_error("'" + path.string() + "' is truncated");
  return img;
}

}  // namespace markerflow
