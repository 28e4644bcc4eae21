#include <doctest.h>

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <numbers>

#include "cure/quadrature.hpp"

namespace quad = cure::quad;

TEST_CASE("Kronrod and Gauss weights integrate constants") {
  double wk = 0.0, wg = 0.0;
  for (const auto& n : quad::kGK15) {
    wk += n.w_kronrod;
    wg += n.w_gauss;
  }
  CHECK(wk == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(wg == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("Gauss-Legendre nodes match an independent table") {
  const auto rule = quad::gauss_legendre(16);
  REQUIRE(rule.nodes.size() == 16);
  using ref = boost::math::quadrature::gauss<double, 16>;
  // The reference lists nonnegative abscissae only.
  std::vector<std::pair<double, double>> expected;
  for (std::size_t i = 0; i < ref::abscissa().size(); ++i) {
    expected.emplace_back(ref::abscissa()[i], ref::weights()[i]);
    if (ref::abscissa()[i] != 0.0) expected.emplace_back(-ref::abscissa()[i], ref::weights()[i]);
  }
  std::sort(expected.begin(), expected.end());
  std::vector<std::pair<double, double>> got;
  for (std::size_t i = 0; i < 16; ++i) got.emplace_back(rule.nodes[i], rule.weights[i]);
  std::sort(got.begin(), got.end());
  for (std::size_t i = 0; i < 16; ++i) {
    CHECK(got[i].first == doctest::Approx(expected[i].first).epsilon(1e-14));
    CHECK(got[i].second == doctest::Approx(expected[i].second).epsilon(1e-13));
  }
}

TEST_CASE("Gauss-Legendre is exact for polynomials of degree 2n - 1") {
  for (std::size_t order : {2u, 5u, 9u, 20u}) {
    const auto rule = quad::gauss_legendre(order);
    for (std::size_t deg = 0; deg < 2 * order; ++deg) {
      double s = 0.0;
      for (std::size_t i = 0; i < order; ++i) s += rule.weights[i] * std::pow(rule.nodes[i], static_cast<double>(deg));
      const double exact = deg % 2 == 1 ? 0.0 : 2.0 / static_cast<double>(deg + 1);
      CHECK(s == doctest::Approx(exact).epsilon(1e-13));
    }
  }
}

TEST_CASE("adaptive integration") {
  const auto a = quad::integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi);
  CHECK(a.converged);
  CHECK(a.value == doctest::Approx(2.0).epsilon(1e-13));

  const auto b = quad::integrate([](double x) { return std::sqrt(x); }, 0.0, 1.0);
  CHECK(b.value == doctest::Approx(2.0 / 3.0).epsilon(1e-11));

  const double kink[] = {1.0 / 3.0};
  const auto c = quad::integrate([](double x) { return std::abs(x - 1.0 / 3.0); }, 0.0, 1.0, {}, kink);
  CHECK(c.value == doctest::Approx((1.0 / 9.0 + 4.0 / 9.0) / 2.0).epsilon(1e-14));
  CHECK(c.evaluations == 30);

  CHECK(quad::integrate([](double) { return 1.0; }, 2.0, 2.0).value == 0.0);
}

TEST_CASE("cumulative integral table") {
  const double bps[] = {1.0};
  const quad::CumulativeIntegral ci([](double y) { return y < 1.0 ? std::exp(-y) : 2.0 * std::exp(-y); }, 4.0, bps);
  auto exact = [](double x) {
    if (x <= 1.0) return 1.0 - std::exp(-x);
    return (1.0 - std::exp(-1.0)) + 2.0 * (std::exp(-1.0) - std::exp(-x));
  };
  for (double x = 0.0; x <= 4.0; x += 0.0371) CHECK(ci(x) == doctest::Approx(exact(x)).epsilon(1e-14));
  CHECK(ci(10.0) == doctest::Approx(exact(4.0)).epsilon(1e-14));
  CHECK(ci.total() == doctest::Approx(exact(4.0)).epsilon(1e-14));
  CHECK(ci.between(0.5, 2.5) == doctest::Approx(exact(2.5) - exact(0.5)).epsilon(1e-13));
  CHECK(ci(0.0) == 0.0);
}

namespace {

// Components k = 0..dim-1 of t^k * u over each rectangle.
struct Moments {
  std::size_t dim;
  double prepare(std::size_t, double t) const { return t; }
  void eval(double t, double u, quad::Sink& sink) const {
    double tk = 1.0;
    for (std::size_t k = 0; k < dim; ++k, tk *= t) sink.add(k, tk * u);
  }
};

// A peaked integrand that forces refinement.
struct Peak {
  double prepare(std::size_t, double t) const { return t; }
  void eval(double t, double u, quad::Sink& sink) const {
    sink.add(0, 1.0 / (1e-3 + (t - 0.7) * (t - 0.7) + (u - 0.2) * (u - 0.2)));
  }
};

}  // namespace

TEST_CASE("vector cubature of polynomial moments") {
  const quad::Rect rects[] = {{0.0, 0.5, 0.0, 1.0, 0}, {0.5, 1.0, 0.0, 1.0, 0}};
  quad::CubatureOptions opts;
  const auto r = quad::cubature(Moments{6}, rects, 6, opts);
  CHECK(r.converged);
  for (std::size_t k = 0; k < 6; ++k) CHECK(r.value[k] == doctest::Approx(0.5 / static_cast<double>(k + 1)).epsilon(1e-14));
}

TEST_CASE("cubature result is independent of the worker count") {
  const quad::Rect rects[] = {{0.0, 1.0, 0.0, 1.0, 0}};
  quad::CubatureOptions opts;
  opts.rel_tol = 1e-10;
  opts.workers = 1;
  const auto one = quad::cubature(Peak{}, rects, 1, opts);
  opts.workers = 3;
  const auto three = quad::cubature(Peak{}, rects, 1, opts);
  CHECK(one.converged);
  CHECK(one.rects > 10);
  CHECK(one.value[0] == three.value[0]);
  CHECK(one.rects == three.rects);

  // Reference by nested 1-D adaptive integration.
  const auto ref = quad::integrate(
      [](double t) {
        return quad::integrate([t](double u) { return 1.0 / (1e-3 + (t - 0.7) * (t - 0.7) + (u - 0.2) * (u - 0.2)); }, 0.0,
                               1.0)
            .value;
      },
      0.0, 1.0);
  CHECK(one.value[0] == doctest::Approx(ref.value).epsilon(1e-9));
}
