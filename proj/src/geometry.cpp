#include "markerflow/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>

namespace markerflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double wrap(double v, double length) {
  double r = std::fmod(v, length);
  if (r < 0.0) r += length;
  if (r >= length) r -= length;
  return r;
}

double periodic_delta(double a, double b, double length) {
  double d = a - b;
  d -= length * std::round(d / length);
  return d;
}

void check_pair(const MarkerSet& m, std::size_t i, std::size_t j) {
  if (i == j) throw InvalidInput("tie pair indices must differ");
  if (i >= m.k() || j >= m.k()) throw InvalidInput("tie pair index out of range");
}

// Bucketed point index on the torus for nearest-point queries.
class BucketIndex {
 public:
  BucketIndex(std::span<const Point> pts, double length) : pts_(pts), length_(length) {
    const auto target = static_cast<std::size_t>(std::sqrt(static_cast<double>(pts.size()) / 2.0));
    nb_ = std::clamp<std::size_t>(target, 1, 512);
    bucket_ = length / static_cast<double>(nb_);
    std::vector<std::size_t> counts(nb_ * nb_ + 1, 0);
    std::vector<std::size_t> owner(pts.size());
    for (std::size_t p = 0; p < pts.size(); ++p) {
      owner[p] = bucket_of(pts[p]);
      ++counts[owner[p] + 1];
    }
    for (std::size_t b = 1; b < counts.size(); ++b) counts[b] += counts[b - 1];
    start_ = counts;
    order_.resize(pts.size());
    for (std::size_t p = 0; p < pts.size(); ++p) order_[counts[owner[p]]++] = p;
  }

  /// Exact nearest distance, or any value <= stop_at once one is found.
  double nearest(Point q, double stop_at) const {
    const std::size_t bx = axis_bucket(q.x);
    const std::size_t by = axis_bucket(q.y);
    double best = kInf;
    const auto nb = static_cast<long>(nb_);
    for (long r = 0;; ++r) {
      if (2 * r + 1 >= nb) {
        for (std::size_t p = 0; p < pts_.size(); ++p) best = std::min(best, periodic_distance(q, pts_[p], length_));
        return best;
      }
      for (long dx = -r; dx <= r; ++dx) {
        for (long dy = -r; dy <= r; ++dy) {
          if (std::max(std::labs(dx), std::labs(dy)) != r) continue;
          const auto cx = static_cast<std::size_t>(((static_cast<long>(bx) + dx) % nb + nb) % nb);
          const auto cy = static_cast<std::size_t>(((static_cast<long>(by) + dy) % nb + nb) % nb);
          const std::size_t b = cx * nb_ + cy;
          for (std::size_t s = start_[b]; s < start_[b + 1]; ++s) {
            best = std::min(best, periodic_distance(q, pts_[order_[s]], length_));
          }
        }
        if (best <= stop_at) return best;
      }
      // Unscanned points sit at least r bucket widths away.
      if (best <= (static_cast<double>(r) - 1e-6) * bucket_) return best;
    }
  }

 private:
  std::size_t axis_bucket(double v) const {
    const auto b = static_cast<std::size_t>(wrap(v, length_) / bucket_);
    return std::min(b, nb_ - 1);
  }
  std::size_t bucket_of(Point p) const { return axis_bucket(p.x) * nb_ + axis_bucket(p.y); }

  std::span<const Point> pts_;
  double length_;
  std::size_t nb_ = 1;
  double bucket_ = 0.0;
  std::vector<std::size_t> start_;
  std::vector<std::size_t> order_;
};

double directed_hausdorff(std::span<const Point> a, std::span<const Point> b, double length) {
  const BucketIndex index(b, length);
  double cmax = 0.0;
  for (const Point& p : a) {
    const double d = index.nearest(p, cmax);
    if (d > cmax) cmax = d;
  }
  return cmax;
}

// Band-limited interpolant of n equispaced periodic samples.
class LineSeries {
 public:
  LineSeries(std::span<const double> samples, double length) : n_(samples.size()), length_(length) {
    const std::size_t half = n_ / 2;
    coeffs_.resize(half + 1);
    const double step = 2.0 * std::numbers::pi / static_cast<double>(n_);
    for (std::size_t k = 0; k <= half; ++k) {
      std::complex<double> acc(0.0, 0.0);
      for (std::size_t p = 0; p < n_; ++p) {
        const double ang = -step * static_cast<double>((k * p) % n_);
        acc += samples[p] * std::complex<double>(std::cos(ang), std::sin(ang));
      }
      coeffs_[k] = acc / static_cast<double>(n_);
    }
  }

  double operator()(double x) const {
    const std::size_t half = n_ / 2;
    const double theta = 2.0 * std::numbers::pi * x / length_;
    const std::complex<double> rot(std::cos(theta), std::sin(theta));
    std::complex<double> z = rot;
    double v = coeffs_[0].real();
    for (std::size_t k = 1; k < half; ++k, z *= rot) v += 2.0 * (coeffs_[k] * z).real();
    v += coeffs_[half].real() * std::cos(static_cast<double>(half) * theta);
    return v;
  }

 private:
  std::size_t n_;
  double length_;
  std::vector<std::complex<double>> coeffs_;
};

// Lazily built interpolants along the grid lines of one field.
class LineCache {
 public:
  explicit LineCache(const ScalarField& f) : f_(f), rows_(f.grid().n()), cols_(f.grid().n()) {}

  /// Along x at fixed column index j.
  const LineSeries& along_x(std::size_t j) {
    auto& slot = rows_[j];
    if (!slot) {
      std::vector<double> s(f_.grid().n());
      for (std::size_t i = 0; i < s.size(); ++i) s[i] = f_(i, j);
      slot.emplace(s, f_.grid().length());
    }
    return *slot;
  }

  /// Along y at fixed row index i.
  const LineSeries& along_y(std::size_t i) {
    auto& slot = cols_[i];
    if (!slot) {
      std::vector<double> s(f_.grid().n());
      for (std::size_t j = 0; j < s.size(); ++j) s[j] = f_(i, j);
      slot.emplace(s, f_.grid().length());
    }
    return *slot;
  }

 private:
  const ScalarField& f_;
  std::vector<std::optional<LineSeries>> rows_;
  std::vector<std::optional<LineSeries>> cols_;
};

template <typename Fn>
double bisect(Fn&& g, double lo, double hi, double g_lo) {
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double g_mid = g(mid);
    if (g_mid == 0.0) return mid;
    if ((g_mid < 0.0) == (g_lo < 0.0)) {
      lo = mid;
      g_lo = g_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::size_t Mask::count() const {
  return static_cast<std::size_t>(std::count(values.begin(), values.end(), std::uint8_t{1}));
}

double periodic_distance(Point a, Point b, double length) {
  return std::hypot(periodic_delta(a.x, b.x, length), periodic_delta(a.y, b.y, length));
}

Mask top_two_mask(const MarkerSet& m, std::size_t i, std::size_t j) {
  check_pair(m, i, j);
  Mask mask{m.grid, std::vector<std::uint8_t>(m.grid.size(), 1)};
  for (std::size_t p = 0; p < m.grid.size(); ++p) {
    const double fi = m.markers[i][p];
    const double fj = m.markers[j][p];
    for (std::size_t l = 0; l < m.k(); ++l) {
      if (l == i || l == j) continue;
      const double fl = m.markers[l][p];
      if (fi < fl || fj < fl) {
        mask.values[p] = 0;
        break;
      }
    }
  }
  return mask;
}

TieSet extract_tie_set(const MarkerSet& m, std::size_t i, std::size_t j, bool restricted) {
  check_pair(m, i, j);
  const Grid& g = m.grid;
  const std::size_t n = g.n();
  const double h = g.spacing();
  const double L = g.length();
  const ScalarField f = m.markers[i] - m.markers[j];
  if (f.max_abs() == 0.0) {
    throw DegenerateTieSet("markers " + std::to_string(i + 1) + " and " + std::to_string(j + 1) +
                           " coincide everywhere: tie set has positive measure");
  }
  std::optional<Mask> mask;
  if (restricted) mask = top_two_mask(m, i, j);

  auto inside = [&](std::size_t a, std::size_t b) { return f(a % n, b % n) >= 0.0; };
  auto h_edge = [&](std::size_t a, std::size_t b) { return static_cast<long>(2 * ((a % n) * n + (b % n))); };
  auto v_edge = [&](std::size_t a, std::size_t b) { return static_cast<long>(2 * ((a % n) * n + (b % n)) + 1); };
  auto edge_point = [&](long id) {
    const auto cell = static_cast<std::size_t>(id / 2);
    const std::size_t a = cell / n;
    const std::size_t b = cell % n;
    const bool vertical = (id % 2) == 1;
    const double f0 = f(a, b);
    const double f1 = vertical ? f(a, (b + 1) % n) : f((a + 1) % n, b);
    const double t = f0 / (f0 - f1);
    const double x = (static_cast<double>(a) + (vertical ? 0.0 : t)) * h;
    const double y = (static_cast<double>(b) + (vertical ? t : 0.0)) * h;
    return Point{wrap(x, L), wrap(y, L)};
  };

  std::vector<std::pair<long, long>> segments;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      const std::size_t ca[4] = {a, a + 1, a + 1, a};
      const std::size_t cb[4] = {b, b, b + 1, b + 1};
      if (mask) {
        bool any = false;
        for (int c = 0; c < 4; ++c) any = any || (*mask)[g.index(ca[c] % n, cb[c] % n)];
        if (!any) continue;
      }
      bool in[4];
      int code = 0;
      for (int c = 0; c < 4; ++c) {
        in[c] = inside(ca[c], cb[c]);
        code |= (in[c] ? 1 : 0) << c;
      }
      if (code == 0 || code == 15) continue;
      // Edge e_c joins corner c and corner c + 1.
      const long edges[4] = {h_edge(a, b), v_edge(a + 1, b), h_edge(a, b + 1), v_edge(a, b)};
      if (code == 5 || code == 10) {
        double fc = 0.0;
        for (int c = 0; c < 4; ++c) fc += f(ca[c] % n, cb[c] % n);
        const bool center_in = fc >= 0.0;
        // Cut off the corners whose sign disagrees with the center.
        for (int c = 0; c < 4; ++c) {
          if (in[c] != center_in) segments.emplace_back(edges[(c + 3) % 4], edges[c]);
        }
        continue;
      }
      long ends[2];
      int found = 0;
      for (int e = 0; e < 4; ++e) {
        if (in[e] != in[(e + 1) % 4]) ends[found++] = edges[e];
      }
      segments.emplace_back(ends[0], ends[1]);
    }
  }

  std::map<long, std::vector<std::size_t>> adjacency;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    adjacency[segments[s].first].push_back(s);
    adjacency[segments[s].second].push_back(s);
  }
  std::vector<bool> used(segments.size(), false);
  auto other_end = [&](std::size_t s, long node) {
    return segments[s].first == node ? segments[s].second : segments[s].first;
  };
  auto walk = [&](long start, std::size_t seg) {
    Polyline line;
    line.points.push_back(edge_point(start));
    long cur = start;
    while (true) {
      used[seg] = true;
      const long next = other_end(seg, cur);
      if (next == start) {
        line.closed = true;
        break;
      }
      line.points.push_back(edge_point(next));
      cur = next;
      std::optional<std::size_t> follow;
      for (std::size_t cand : adjacency[cur]) {
        if (!used[cand]) follow = cand;
      }
      if (!follow) break;
      seg = *follow;
    }
    return line;
  };

  TieSet out;
  out.i = std::min(i, j);
  out.j = std::max(i, j);
  for (const auto& [node, segs] : adjacency) {
    if (segs.size() == 1 && !used[segs[0]]) out.polylines.push_back(walk(node, segs[0]));
  }
  for (const auto& [node, segs] : adjacency) {
    for (std::size_t s : segs) {
      if (!used[s]) out.polylines.push_back(walk(node, s));
    }
  }
  return out;
}

TieSetNetwork extract_network(const MarkerSet& m, bool restricted) {
  TieSetNetwork net;
  net.restricted = restricted;
  for (std::size_t i = 0; i < m.k(); ++i) {
    for (std::size_t j = i + 1; j < m.k(); ++j) net.pairs.push_back(extract_tie_set(m, i, j, restricted));
  }
  return net;
}

std::vector<Point> resample(std::span<const Polyline> polylines, double spacing, double length) {
  if (!(spacing > 0.0)) throw InvalidInput("resample spacing must be positive");
  std::vector<Point> out;
  for (const Polyline& line : polylines) {
    const std::size_t count = line.points.size();
    if (count == 0) continue;
    const std::size_t legs = line.closed ? count : count - 1;
    for (std::size_t s = 0; s < legs; ++s) {
      const Point a = line.points[s];
      const Point b = line.points[(s + 1) % count];
      const double dx = periodic_delta(b.x, a.x, length);
      const double dy = periodic_delta(b.y, a.y, length);
      const auto pieces = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::hypot(dx, dy) / spacing)));
      for (std::size_t k = 0; k < pieces; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(pieces);
        out.push_back({wrap(a.x + t * dx, length), wrap(a.y + t * dy, length)});
      }
    }
    if (!line.closed) out.push_back(line.points.back());
  }
  return out;
}

std::vector<Point> TieSetNetwork::sample_points(double spacing, double length) const {
  std::vector<Point> out;
  for (const TieSet& t : pairs) {
    auto pts = resample(t.polylines, spacing, length);
    out.insert(out.end(), pts.begin(), pts.end());
  }
  return out;
}

DistanceField distance_to_set(const Grid& grid, std::span<const Point> pts) {
  if (pts.empty()) return {ScalarField(grid, kInf), true};
  const BucketIndex index(pts, grid.length());
  ScalarField dist(grid);
  for (std::size_t a = 0; a < grid.n(); ++a) {
    for (std::size_t b = 0; b < grid.n(); ++b) dist(a, b) = index.nearest({grid.coord(a), grid.coord(b)}, -1.0);
  }
  return {std::move(dist), false};
}

DistanceField distance_to_network(const Grid& grid, const TieSetNetwork& network) {
  const auto pts = network.sample_points(0.5 * grid.spacing(), grid.length());
  return distance_to_set(grid, pts);
}

double hausdorff(std::span<const Point> a, std::span<const Point> b, double length) {
  if (a.empty() || b.empty()) return kInf;
  return std::max(directed_hausdorff(a, b, length), directed_hausdorff(b, a, length));
}

double hausdorff_brute_force(std::span<const Point> a, std::span<const Point> b, double length) {
  if (a.empty() || b.empty()) return kInf;
  auto directed = [length](std::span<const Point> from, std::span<const Point> to) {
    double cmax = 0.0;
    for (const Point& p : from) {
      double best = kInf;
      for (const Point& q : to) best = std::min(best, periodic_distance(p, q, length));
      cmax = std::max(cmax, best);
    }
    return cmax;
  };
  return std::max(directed(a, b), directed(b, a));
}

double min_gradient_on_strip(const Spectral& ops, const MarkerSet& m, std::size_t i, std::size_t j, double delta) {
  check_pair(m, i, j);
  if (!(delta > 0.0)) throw InvalidInput("min_gradient_on_strip: delta must be positive");
  const Grid& g = m.grid;
  const std::size_t n = g.n();
  const double h = g.spacing();
  const ScalarField f = m.markers[i] - m.markers[j];
  const VectorField df = ops.gradient(f);
  const Mask mask = top_two_mask(m, i, j);

  double best = kInf;
  for (std::size_t p = 0; p < g.size(); ++p) {
    if (mask[p] && std::abs(f[p]) <= delta) best = std::min(best, std::hypot(df.x[p], df.y[p]));
  }

  LineCache f_lines(f);
  LineCache fx_lines(df.x);
  LineCache fy_lines(df.y);
  std::vector<LineCache> marker_lines;
  marker_lines.reserve(m.k());
  for (const auto& phi : m.markers) marker_lines.emplace_back(phi);

  // Top-two test at an off-grid point given per-marker evaluators.
  auto top_two_at = [&](auto&& marker_value) {
    const double fi = marker_value(i);
    const double fj = marker_value(j);
    for (std::size_t l = 0; l < m.k(); ++l) {
      if (l == i || l == j) continue;
      const double fl = marker_value(l);
      if (fi < fl || fj < fl) return false;
    }
    return true;
  };

  for (const double level : {delta, -delta}) {
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        const double g0 = f(a, b) - level;
        // Edge along x: (a, b) -> (a + 1, b).
        {
          const double g1 = f((a + 1) % n, b) - level;
          if ((g0 < 0.0) != (g1 < 0.0) && g0 != 0.0) {
            const auto& line = f_lines.along_x(b);
            const double lo = g.coord(a);
            const double x = bisect([&](double s) { return line(s) - level; }, lo, lo + h, g0);
            if (top_two_at([&](std::size_t k) { return marker_lines[k].along_x(b)(x); })) {
              best = std::min(best, std::hypot(fx_lines.along_x(b)(x), fy_lines.along_x(b)(x)));
            }
          }
        }
        // Edge along y: (a, b) -> (a, b + 1).
        {
          const double g1 = f(a, (b + 1) % n) - level;
          if ((g0 < 0.0) != (g1 < 0.0) && g0 != 0.0) {
            const auto& line = f_lines.along_y(a);
            const double lo = g.coord(b);
            const double y = bisect([&](double s) { return line(s) - level; }, lo, lo + h, g0);
            if (top_two_at([&](std::size_t k) { return marker_lines[k].along_y(a)(y); })) {
              best = std::min(best, std::hypot(fx_lines.along_y(a)(y), fy_lines.along_y(a)(y)));
            }
          }
        }
      }
    }
  }
  return best;
}

}  // namespace markerflow
