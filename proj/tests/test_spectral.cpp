#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "markerflow/spectral.hpp"

using namespace markerflow;

namespace {

constexpr double kPi = std::numbers::pi;

ScalarField random_field(const Grid& g, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ScalarField f(g);
  for (auto& v : f.values()) v = u(gen);
  return f;
}

double sup_error(const ScalarField& f, auto&& exact) {
  double e = 0.0;
  const Grid& g = f.grid();
  for (std::size_t i = 0; i < g.n(); ++i) {
    for (std::size_t j = 0; j < g.n(); ++j) e = std::max(e, std::abs(f(i, j) - exact(g.coord(i), g.coord(j))));
  }
  return e;
}

// Fourth-order centered differences with periodic wrap.
ScalarField fd4(const ScalarField& f, bool along_x) {
  const Grid& g = f.grid();
  const std::size_t n = g.n();
  const double h = g.spacing();
  ScalarField d(g);
  auto at = [&](long i, long j) {
    return f(static_cast<std::size_t>((i + static_cast<long>(n)) % static_cast<long>(n)),
             static_cast<std::size_t>((j + static_cast<long>(n)) % static_cast<long>(n)));
  };
  for (long i = 0; i < static_cast<long>(n); ++i) {
    for (long j = 0; j < static_cast<long>(n); ++j) {
      const long di = along_x ? 1 : 0;
      const long dj = along_x ? 0 : 1;
      d(i, j) = (-at(i + 2 * di, j + 2 * dj) + 8 * at(i + di, j + dj) - 8 * at(i - di, j - dj) +
                 at(i - 2 * di, j - 2 * dj)) /
                (12 * h);
    }
  }
  return d;
}

}  // namespace

TEST_CASE("grid rejects sizes that are too small or not powers of two") {
  CHECK_THROWS_AS(Grid(8), InvalidInput);
  CHECK_THROWS_AS(Grid(48), InvalidInput);
  CHECK_NOTHROW(Grid(16));
  const Grid g(64);
  CHECK(g.spacing() * 64 == g.length());
  CHECK(g.frequency(0) == 0);
  CHECK(g.frequency(32) == 32);
  CHECK(g.frequency(33) == -31);
  CHECK(g.frequency(63) == -1);
}

TEST_CASE("forward then inverse reproduces random fields") {
  for (std::size_t n : {16u, 64u, 128u}) {
    const Grid g(n);
    const Spectral ops(g);
    const ScalarField f = random_field(g, 7 + static_cast<unsigned>(n));
    CHECK(sup_distance(ops.inverse(ops.forward(f)), f) <= 1e-12);
  }
}

TEST_CASE("gradient of analytic fields") {
  const Grid g(64);
  const Spectral ops(g);

  const auto c = ops.gradient(ScalarField(g, 3.5));
  CHECK(c.x.max_abs() <= 1e-14);
  CHECK(c.y.max_abs() <= 1e-14);

  const auto d1 = ops.gradient(ScalarField::from_function(g, [](double x, double) { return std::cos(x); }));
  CHECK(sup_error(d1.x, [](double x, double) { return -std::sin(x); }) <= 1e-10);
  CHECK(d1.y.max_abs() <= 1e-10);

  const auto d2 = ops.gradient(ScalarField::from_function(g, [](double x, double y) { return std::cos(x + y); }));
  CHECK(sup_error(d2.x, [](double x, double y) { return -std::sin(x + y); }) <= 1e-10);
  CHECK(sup_error(d2.y, [](double x, double y) { return -std::sin(x + y); }) <= 1e-10);
}

TEST_CASE("gradient matches fourth-order finite differences at O(h^4)") {
  auto f_of = [](double x, double y) { return std::exp(std::sin(x)) * std::cos(2 * y) + 0.3 * std::sin(x - y); };
  double prev = 0.0;
  for (std::size_t n : {32u, 64u, 128u}) {
    const Grid g(n);
    const Spectral ops(g);
    const ScalarField f = ScalarField::from_function(g, f_of);
    const auto grad = ops.gradient(f);
    const double err = std::max(sup_distance(grad.x, fd4(f, true)), sup_distance(grad.y, fd4(f, false)));
    if (prev > 0.0) {
      // Fourth order: halving h cuts the discrepancy by ~16.
      CHECK(prev / err > 12.0);
    }
    prev = err;
  }
  CHECK(prev < 1e-4);
}

TEST_CASE("gradient rejects non-finite input") {
  const Grid g(16);
  const Spectral ops(g);
  ScalarField f(g);
  f(3, 4) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(ops.gradient(f), InvalidInput);
  CHECK_THROWS_AS(ops.solve_stream(f), InvalidInput);
}

TEST_CASE("poisson solve on eigenfunctions") {
  const Grid g(64);
  const Spectral ops(g);
  CHECK(ops.solve_stream(ScalarField(g, 2.0)).max_abs() <= 1e-14);
  const auto psi1 = ops.solve_stream(ScalarField::from_function(g, [](double x, double) { return std::cos(x); }));
  CHECK(sup_error(psi1, [](double x, double) { return std::cos(x); }) <= 1e-10);
  const auto psi2 = ops.solve_stream(ScalarField::from_function(g, [](double, double y) { return std::sin(2 * y); }));
  CHECK(sup_error(psi2, [](double, double y) { return std::sin(2 * y) / 4; }) <= 1e-10);
}

TEST_CASE("minus laplacian of the stream function recovers omega minus its mean") {
  const Grid g(64);
  const Spectral ops(g);
  // Band-limited random field so the discrete Laplacian is exact.
  const SpectralField spec = dealias(ops.forward(random_field(g, 3)));
  const ScalarField omega = ops.inverse(spec) + ScalarField(g, 0.7);
  const ScalarField psi = ops.solve_stream(omega);
  CHECK(std::abs(psi.mean()) <= 1e-14);
  ScalarField residual = ops.laplacian(psi) + omega - ScalarField(g, omega.mean());
  CHECK(residual.max_abs() <= 1e-10);
}

TEST_CASE("velocity of analytic stream functions") {
  const Grid g(64);
  const Spectral ops(g);
  const auto u0 = ops.velocity(ScalarField(g, 1.0));
  CHECK(u0.sup_magnitude() <= 1e-14);
  const auto u1 = ops.velocity(ScalarField::from_function(g, [](double x, double) { return std::cos(x); }));
  CHECK(u1.x.max_abs() <= 1e-10);
  CHECK(sup_error(u1.y, [](double x, double) { return -std::sin(x); }) <= 1e-10);
  const auto u2 = ops.velocity(ScalarField::from_function(g, [](double, double y) { return std::sin(y); }));
  CHECK(sup_error(u2.x, [](double, double y) { return -std::cos(y); }) <= 1e-10);
  CHECK(u2.y.max_abs() <= 1e-10);
}

TEST_CASE("velocity is divergence free for arbitrary stream functions") {
  for (unsigned seed : {1u, 2u, 3u}) {
    const Grid g(64);
    const Spectral ops(g);
    const auto u = ops.velocity(random_field(g, seed));
    CHECK(ops.divergence(u).max_abs() <= 1e-10);
  }
}

TEST_CASE("dealias keeps low modes and kills the Nyquist band") {
  const Grid g(64);
  const Spectral ops(g);
  const ScalarField low = ScalarField::from_function(g, [](double x, double y) { return std::cos(x) + std::sin(y); });
  CHECK(sup_distance(ops.inverse(dealias(ops.forward(low))), low) <= 1e-13);

  const ScalarField nyq = ScalarField::from_function(g, [](double x, double) { return std::cos(32 * x); });
  CHECK(ops.inverse(dealias(ops.forward(nyq))).max_abs() <= 1e-13);
}

TEST_CASE("dealias equals multiplication by the 2/3 mask") {
  const Grid g(64);
  const Spectral ops(g);
  const SpectralField spec = ops.forward(random_field(g, 11));
  const SpectralField kept = dealias(spec);
  const long n = 64;
  for (std::size_t r = 0; r < spec.rows(); ++r) {
    for (std::size_t c = 0; c < spec.cols(); ++c) {
      const long fx = r <= 32 ? static_cast<long>(r) : static_cast<long>(r) - n;
      const long fy = static_cast<long>(c);
      const bool keep = std::max(std::labs(fx), fy) <= n / 3;
      const std::complex<double> expect = keep ? spec(r, c) : 0.0;
      CHECK(kept(r, c) == expect);
    }
  }
}

TEST_CASE("grad_u_sup_norm on analytic velocities") {
  const Grid g(64);
  const Spectral ops(g);
  CHECK(grad_u_sup_norm(ops, VectorField(ScalarField(g), ScalarField(g))) == 0.0);
  const VectorField u(ScalarField(g), ScalarField::from_function(g, [](double x, double) { return -std::sin(x); }));
  CHECK(grad_u_sup_norm(ops, u) == doctest::Approx(1.0).epsilon(1e-10));
  const auto v = ops.velocity(ScalarField::from_function(g, [](double, double y) { return std::sin(y); }));
  CHECK(grad_u_sup_norm(ops, v) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("spectral operators on a non-default period") {
  const Grid g(32, 4.0);
  const Spectral ops(g);
  const double k = 2 * kPi / 4.0;
  const auto grad = ops.gradient(ScalarField::from_function(g, [k](double x, double) { return std::sin(k * x); }));
  CHECK(sup_error(grad.x, [k](double x, double) { return k * std::cos(k * x); }) <= 1e-10);
}
