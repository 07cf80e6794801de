#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "markerflow/geometry.hpp"
#include "markerflow/presets.hpp"

using namespace markerflow;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2 * std::numbers::pi;

double cells_phi(int k, double x, double y) {
  const double a = kTwoPi * k / 3;
  return std::cos(x - a) + std::cos(y - a);
}

double polyline_length(const Polyline& line, double L) {
  double len = 0.0;
  const std::size_t legs = line.closed ? line.points.size() : line.points.size() - 1;
  for (std::size_t s = 0; s < legs; ++s) {
    len += periodic_distance(line.points[s], line.points[(s + 1) % line.points.size()], L);
  }
  return len;
}

std::vector<Point> random_points(std::mt19937_64& gen, std::size_t count) {
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  std::vector<Point> pts(count);
  for (auto& p : pts) p = {u(gen), u(gen)};
  return pts;
}

}  // namespace

TEST_CASE("periodic distance") {
  CHECK(periodic_distance({0, 0}, {kPi, 0}, kTwoPi) == doctest::Approx(kPi));
  const double h = kTwoPi / 128;
  CHECK(periodic_distance({0, 0}, {kTwoPi - h, 0}, kTwoPi) == doctest::Approx(h).epsilon(1e-12));
  CHECK(periodic_distance({0.1, 6.2}, {6.2, 0.1}, kTwoPi) == doctest::Approx(std::hypot(kTwoPi - 6.1, kTwoPi - 6.1)));
}

TEST_CASE("top-two mask") {
  const Grid g(32);
  const MarkerSet two = build_preset("shear2", g);
  CHECK(top_two_mask(two, 0, 1).count() == g.size());

  MarkerSet third_wins(g, {ScalarField(g, 0.0), ScalarField(g, 0.1), ScalarField(g, 1.0)}, PhaseConfig{{1, 0, -1}, 1});
  CHECK(top_two_mask(third_wins, 0, 1).count() == 0);

  const MarkerSet cells = build_preset("cells3", g);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i + 1; j < 3; ++j) {
      const Mask mask = top_two_mask(cells, i, j);
      const std::size_t other = 3 - i - j;
      for (std::size_t p = 0; p < g.size(); ++p) {
        const double o = cells.markers[other][p];
        const bool expect = cells.markers[i][p] >= o && cells.markers[j][p] >= o;
        CHECK(mask[p] == expect);
      }
    }
  }
}

TEST_CASE("shear tie set is the two horizontal lines") {
  const Grid g(128);
  const double h = g.spacing();
  const TieSet tie = extract_tie_set(build_preset("shear2", g), 0, 1);
  REQUIRE(tie.polylines.size() == 2);
  std::vector<double> heights;
  for (const auto& line : tie.polylines) {
    CHECK(line.closed);
    CHECK(polyline_length(line, g.length()) == doctest::Approx(kTwoPi).epsilon(2 * h / kTwoPi));
    double lo = 1e9, hi = -1e9;
    for (const Point& p : line.points) {
      const double d = std::min({p.y, std::abs(p.y - kPi), kTwoPi - p.y});
      CHECK(d <= h);
      lo = std::min(lo, p.y);
      hi = std::max(hi, p.y);
    }
    heights.push_back(std::abs(lo - kPi) < 1 ? kPi : 0.0);
  }
  std::sort(heights.begin(), heights.end());
  CHECK(heights == std::vector<double>{0.0, kPi});
}

TEST_CASE("strictly ordered markers have no tie set") {
  const Grid g(32);
  MarkerSet m(g, {ScalarField::from_function(g, [](double x, double) { return 2 + std::sin(x); }), ScalarField(g)},
              PhaseConfig{{1, -1}, 1});
  CHECK(extract_tie_set(m, 0, 1).polylines.empty());
}

TEST_CASE("identical markers are a degenerate tie set") {
  const Grid g(16);
  const ScalarField phi = ScalarField::from_function(g, [](double x, double) { return std::sin(x); });
  MarkerSet m(g, {phi, phi}, PhaseConfig{{1, -1}, 1});
  CHECK_THROWS_AS(extract_tie_set(m, 0, 1), DegenerateTieSet);
}

TEST_CASE("closed contour around a cell satisfies the interpolation residual bound") {
  const Grid g(64);
  auto f = [](double x, double y) { return std::cos(x) + std::cos(y); };
  MarkerSet m(g, {ScalarField::from_function(g, f), ScalarField(g)}, PhaseConfig{{1, -1}, 1});
  const TieSet tie = extract_tie_set(m, 0, 1);
  REQUIRE(!tie.polylines.empty());
  const double grad_sup = std::sqrt(2.0);
  for (const auto& line : tie.polylines) {
    CHECK(line.closed);
    for (const Point& p : line.points) CHECK(std::abs(f(p.x, p.y)) <= grad_sup * g.spacing());
  }
}

TEST_CASE("every cells3 tie vertex lies near the analytic zero set") {
  const Grid g(64);
  const MarkerSet m = build_preset("cells3", g);
  for (bool restricted : {true, false}) {
    const TieSetNetwork net = extract_network(m, restricted);
    CHECK(net.restricted == restricted);
    CHECK(net.pairs.size() == 3);
    for (const TieSet& t : net.pairs) {
      CHECK(t.i < t.j);
      // |grad(phi_i - phi_j)| <= 2 sqrt(3) for these markers.
      for (const auto& line : t.polylines) {
        for (const Point& p : line.points) {
          const double f = cells_phi(static_cast<int>(t.i), p.x, p.y) - cells_phi(static_cast<int>(t.j), p.x, p.y);
          CHECK(std::abs(f) <= 2 * std::sqrt(3.0) * g.spacing());
        }
      }
    }
  }
}

TEST_CASE("restricted tie sets stay inside the top-two region") {
  const Grid g(64);
  const MarkerSet m = build_preset("cells3", g);
  const TieSetNetwork restricted = extract_network(m, true);
  for (const TieSet& t : restricted.pairs) {
    const int other = 3 - static_cast<int>(t.i) - static_cast<int>(t.j);
    for (const auto& line : t.polylines) {
      for (const Point& p : line.points) {
        const double top = std::min(cells_phi(static_cast<int>(t.i), p.x, p.y), cells_phi(static_cast<int>(t.j), p.x, p.y));
        // Within one cell of the region where i and j beat the third marker.
        CHECK(top - cells_phi(other, p.x, p.y) >= -4 * g.spacing());
      }
    }
  }
}

TEST_CASE("tie sets converge under refinement") {
  for (const char* name : {"shear2", "bands3", "cells3"}) {
    const Grid coarse(64), fine(128);
    const TieSetNetwork a = extract_network(build_preset(name, coarse), true);
    const TieSetNetwork b = extract_network(build_preset(name, fine), true);
    const double h = coarse.spacing();
    for (std::size_t p = 0; p < a.pairs.size(); ++p) {
      const auto pa = resample(a.pairs[p].polylines, fine.spacing() / 2, kTwoPi);
      const auto pb = resample(b.pairs[p].polylines, fine.spacing() / 2, kTwoPi);
      if (pa.empty() && pb.empty()) continue;
      CAPTURE(name);
      CAPTURE(p);
      CHECK(hausdorff(pa, pb, kTwoPi) <= 2 * h);
    }
  }
}

TEST_CASE("resampling keeps consecutive points within the spacing") {
  const Grid g(32);
  const TieSet tie = extract_tie_set(build_preset("shear2", g), 0, 1);
  const double spacing = g.spacing() / 2;
  const auto pts = resample(tie.polylines, spacing, kTwoPi);
  CHECK(pts.size() >= 2 * static_cast<std::size_t>(kTwoPi / spacing));
  for (std::size_t s = 1; s < pts.size(); ++s) {
    const double d = periodic_distance(pts[s - 1], pts[s], kTwoPi);
    if (d < 1.0) CHECK(d <= spacing * (1 + 1e-12));  // jumps between the two lines are skipped
  }
}

TEST_CASE("distance to a set") {
  const Grid g(128);
  const std::vector<Point> origin = {{0, 0}};
  const DistanceField d = distance_to_set(g, origin);
  CHECK(!d.empty);
  CHECK(d.distance(64, 0) == doctest::Approx(kPi));
  CHECK(d.distance(127, 0) == doctest::Approx(g.spacing()));

  const DistanceField none = distance_to_set(g, std::vector<Point>{});
  CHECK(none.empty);
  CHECK(std::isinf(none.distance(3, 3)));

  const DistanceField lines = distance_to_network(g, extract_network(build_preset("shear2", g)));
  for (std::size_t i = 0; i < g.n(); i += 7) {
    for (std::size_t j = 0; j < g.n(); ++j) {
      const double y = g.coord(j);
      CHECK(std::abs(lines.distance(i, j) - std::min({y, std::abs(y - kPi), kTwoPi - y})) <= g.spacing());
    }
  }
}

TEST_CASE("distance field matches brute force and is 1-Lipschitz") {
  std::mt19937_64 gen(17);
  const Grid g(64);
  const auto pts = random_points(gen, 300);
  const DistanceField d = distance_to_set(g, pts);
  for (std::size_t i = 0; i < g.n(); ++i) {
    for (std::size_t j = 0; j < g.n(); ++j) {
      double best = 1e300;
      for (const Point& q : pts) best = std::min(best, periodic_distance({g.coord(i), g.coord(j)}, q, kTwoPi));
      CHECK(d.distance(i, j) == best);
    }
  }
  std::uniform_int_distribution<std::size_t> idx(0, g.n() - 1);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t a = idx(gen), b = idx(gen), c = idx(gen), e = idx(gen);
    const double sep = periodic_distance({g.coord(a), g.coord(b)}, {g.coord(c), g.coord(e)}, kTwoPi);
    CHECK(std::abs(d.distance(a, b) - d.distance(c, e)) <= sep + g.spacing());
  }
}

TEST_CASE("hausdorff examples") {
  const std::vector<Point> a = {{0, 0}}, b = {{1, 0}};
  CHECK(hausdorff(a, a, kTwoPi) == 0.0);
  CHECK(hausdorff(a, b, kTwoPi) == doctest::Approx(1.0));
  CHECK(std::isinf(hausdorff(a, std::vector<Point>{}, kTwoPi)));

  const double eps = 0.037;
  std::vector<Point> l0, l1;
  for (int k = 0; k < 400; ++k) {
    const double x = kTwoPi * k / 400;
    l0.push_back({x, 0.0});
    l1.push_back({x, eps});
  }
  CHECK(hausdorff(l0, l1, kTwoPi) == doctest::Approx(eps).epsilon(1e-12));
}

TEST_CASE("hausdorff axioms and agreement with brute force on random sets") {
  std::mt19937_64 gen(99);
  std::uniform_int_distribution<std::size_t> size(1, 40);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto a = random_points(gen, size(gen));
    const auto b = random_points(gen, size(gen));
    const auto c = random_points(gen, size(gen));
    const double ab = hausdorff(a, b, kTwoPi);
    const double ba = hausdorff(b, a, kTwoPi);
    const double bc = hausdorff(b, c, kTwoPi);
    const double ac = hausdorff(a, c, kTwoPi);
    CHECK(ab == ba);
    CHECK(ab >= 0.0);
    CHECK(hausdorff(a, a, kTwoPi) == 0.0);
    CHECK(ab > 0.0);  // distinct random sets
    CHECK(ac <= ab + bc + 1e-12);
    CHECK(ab == hausdorff_brute_force(a, b, kTwoPi));
  }
  // Large sets exercise the bucket grid.
  const auto big_a = random_points(gen, 3000);
  auto big_b = big_a;
  for (auto& p : big_b) p.x = std::fmod(p.x + 0.01, kTwoPi);
  CHECK(hausdorff(big_a, big_b, kTwoPi) == hausdorff_brute_force(big_a, big_b, kTwoPi));
}

TEST_CASE("minimum gradient on the nondegeneracy strip") {
  const Grid g(128);
  const Spectral ops(g);
  const MarkerSet shear = build_preset("shear2", g);
  CHECK(std::abs(min_gradient_on_strip(ops, shear, 0, 1, 0.5) - std::sqrt(3.0) / 2) <= 1e-6);

  MarkerSet apart(g, {ScalarField(g, 3.0), ScalarField::from_function(g, [](double x, double) { return std::sin(x); })},
                  PhaseConfig{{1, -1}, 1});
  CHECK(std::isinf(min_gradient_on_strip(ops, apart, 0, 1, 0.5)));
}

TEST_CASE("minimum gradient on cells3 agrees with a grid scan") {
  const Grid g(64);
  const Spectral ops(g);
  const MarkerSet m = build_preset("cells3", g);
  const double delta = 0.5;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i + 1; j < 3; ++j) {
      const int o = 3 - static_cast<int>(i) - static_cast<int>(j);
      double scan = 1e300;
      for (std::size_t a = 0; a < g.n(); ++a) {
        for (std::size_t b = 0; b < g.n(); ++b) {
          const double x = g.coord(a), y = g.coord(b);
          const double pi_ = cells_phi(static_cast<int>(i), x, y), pj = cells_phi(static_cast<int>(j), x, y);
          const double po = cells_phi(o, x, y);
          if (std::abs(pi_ - pj) > delta || pi_ < po || pj < po) continue;
          const double ai = kTwoPi * static_cast<double>(i) / 3, aj = kTwoPi * static_cast<double>(j) / 3;
          const double gx = -std::sin(x - ai) + std::sin(x - aj);
          const double gy = -std::sin(y - ai) + std::sin(y - aj);
          scan = std::min(scan, std::hypot(gx, gy));
        }
      }
      const double got = min_gradient_on_strip(ops, m, i, j, delta);
      CAPTURE(i);
      CAPTURE(j);
      // Boundary refinement can only lower the grid minimum, by at most the
      // Hessian bound (sqrt 3 per axis) times one cell diagonal.
      CHECK(got <= scan + 1e-12);
      CHECK(got >= scan - 2 * std::sqrt(3.0) * std::sqrt(2.0) * g.spacing());
    }
  }
}

TEST_CASE("gap infimum respects the strip lower bound for the presets") {
  const Grid g(128);
  const Spectral ops(g);
  const double delta = kPi / 4;
  const double strip = 0.5;
  for (const char* name : {"shear2", "bands3", "cells3"}) {
    const MarkerSet m = build_preset(name, g);
    const DistanceField dist = distance_to_network(g, extract_network(m, true));
    const double c = gap_infimum(m, dist.distance, delta);
    double m_min = 1e300;
    for (const auto& pc : measure_nondegeneracy(ops, m, strip)) m_min = std::min(m_min, pc.m);
    const auto gap_grad = ops.gradient(winner_gap(m));
    const double slack = 2 * g.spacing() * std::max(gap_grad.x.max_abs(), gap_grad.y.max_abs()) * std::sqrt(2.0);
    CAPTURE(name);
    CHECK(c >= std::min(strip, m_min * delta) - slack);
  }
}
