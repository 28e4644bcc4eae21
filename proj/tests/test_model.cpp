#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <functional>
#include <limits>

#include "cure/errors.hpp"
#include "cure/model.hpp"

using cure::Distribution;
using cure::ParametricModel;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double boost_integral(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-14);
}

std::vector<Distribution> families() {
  return {Distribution::exponential(1.0), Distribution::exponential(0.3), Distribution::uniform(0.0, 3.0),
          Distribution::uniform(1.5, 6.0), Distribution::truncated_exponential(1.0, 5.0),
          Distribution::truncated_exponential(2.5, 0.7)};
}

}  // namespace

TEST_CASE("closed forms of each family") {
  const auto e = Distribution::exponential(2.0);
  CHECK(e.cdf(1.0) == doctest::Approx(1.0 - std::exp(-2.0)));
  CHECK(e.density(0.5) == doctest::Approx(2.0 * std::exp(-1.0)));
  CHECK(e.right_endpoint() == kInf);

  const auto u = Distribution::uniform(1.0, 3.0);
  CHECK(u.cdf(0.5) == 0.0);
  CHECK(u.cdf(2.0) == doctest::Approx(0.5));
  CHECK(u.cdf(4.0) == 1.0);
  CHECK(u.density(2.0) == doctest::Approx(0.5));
  CHECK(u.density(3.5) == 0.0);
  CHECK(u.right_endpoint() == 3.0);

  const auto t = Distribution::truncated_exponential(1.0, 5.0);
  CHECK(t.cdf(2.0) == doctest::Approx((1.0 - std::exp(-2.0)) / (1.0 - std::exp(-5.0))));
  CHECK(t.density(1.0) == doctest::Approx(std::exp(-1.0) / (1.0 - std::exp(-5.0))));
  CHECK(t.cdf(5.0) == 1.0);
  CHECK(t.tail(6.0) == 0.0);
  CHECK(t.right_endpoint() == 5.0);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(Distribution::exponential(0.0), cure::ConfigError);
  CHECK_THROWS_AS(Distribution::exponential(-1.0), cure::ConfigError);
  CHECK_THROWS_AS(Distribution::uniform(2.0, 1.0), cure::ConfigError);
  CHECK_THROWS_AS(Distribution::uniform(-1.0, 1.0), cure::ConfigError);
  CHECK_THROWS_AS(Distribution::truncated_exponential(1.0, 0.0), cure::ConfigError);
  CHECK_THROWS_AS(ParametricModel(Distribution::exponential(1), Distribution::uniform(0, 1), 0.0), cure::ConfigError);
  CHECK_THROWS_AS(ParametricModel(Distribution::exponential(1), Distribution::uniform(0, 1), 1.5), cure::ConfigError);
}

TEST_CASE("densities integrate to one and agree with the cdf") {
  for (const auto& d : families()) {
    CAPTURE(d.to_string());
    const double hi = std::isfinite(d.right_endpoint()) ? d.right_endpoint() : 200.0;
    const double lo = std::holds_alternative<cure::Uniform>(d.family()) ? std::get<cure::Uniform>(d.family()).a : 0.0;
    CHECK(std::abs(boost_integral([&](double y) { return d.density(y); }, lo, hi) - 1.0) < 1e-10);
    for (const double x : {0.1, 0.5, 1.0, 2.0}) {
      const double at = std::min(x * hi, std::isfinite(d.right_endpoint()) ? hi : 20.0);
      CHECK(boost_integral([&](double y) { return d.density(y); }, 0.0, at) == doctest::Approx(d.cdf(at)).epsilon(1e-10));
    }
  }
}

TEST_CASE("cdf is continuous, nondecreasing and complements the tail") {
  for (const auto& d : families()) {
    CAPTURE(d.to_string());
    CHECK(d.cdf(0.0) == 0.0);
    double prev = 0.0;
    for (int i = 0; i <= 400; ++i) {
      const double t = 0.025 * i;
      const double c = d.cdf(t);
      CHECK(c >= prev);
      CHECK(c + d.tail(t) == doctest::Approx(1.0));
      prev = c;
    }
    if (std::isfinite(d.right_endpoint())) CHECK(d.cdf(d.right_endpoint()) == 1.0);
  }
}

TEST_CASE("quantile inverts the cdf on the support") {
  for (const auto& d : families()) {
    CAPTURE(d.to_string());
    const double lo = std::holds_alternative<cure::Uniform>(d.family()) ? std::get<cure::Uniform>(d.family()).a : 0.0;
    const double hi = std::isfinite(d.right_endpoint()) ? d.right_endpoint() : 20.0;
    for (int i = 1; i <= 100; ++i) {
      const double t = lo + (hi - lo) * i / 101.0;
      // Backward-stable bound: cdf rounding divided by the density.
      CHECK(std::abs(d.quantile(d.cdf(t)) - t) < 1e-12 + 1e-15 / d.density(t));
    }
    CHECK(d.quantile(1.0) == d.right_endpoint());
  }
}

TEST_CASE("scaling and endpoint moves") {
  const auto t = Distribution::truncated_exponential(1.0, 5.0);
  const auto s = t.scaled(2.0);
  CHECK(s.right_endpoint() == doctest::Approx(10.0));
  CHECK(s.cdf(4.0) == doctest::Approx(t.cdf(2.0)));
  CHECK(s.density(4.0) == doctest::Approx(t.density(2.0) / 2.0));

  const auto u = Distribution::uniform(0.0, 6.0).with_right_endpoint(9.0);
  CHECK(u.right_endpoint() == 9.0);
  CHECK(u.cdf(3.0) == doctest::Approx(1.0 / 3.0));
  CHECK(t.with_right_endpoint(7.0).cdf(1.0) == doctest::Approx((1 - std::exp(-1.0)) / (1 - std::exp(-7.0))));
  CHECK_THROWS_AS(Distribution::exponential(1.0).with_right_endpoint(3.0), cure::ConfigError);

  const ParametricModel m(Distribution::exponential(1), Distribution::uniform(0, 6), 0.8);
  const auto ms = m.scaled(10.0);
  CHECK(cure::h_cdf(ms, 30.0) == doctest::Approx(cure::h_cdf(m, 3.0)));
  CHECK(ms.p == 0.8);
}

TEST_CASE("model grammar") {
  CHECK(cure::parse_distribution("exp:rate=1").to_string() == "exp:rate=1");
  CHECK(cure::parse_distribution("EXP:RATE=2.5").to_string() == "exp:rate=2.5");
  CHECK(cure::parse_distribution(" unif:0,6 ").to_string() == "unif:0,6");
  CHECK(cure::parse_distribution("Unif:1.5,3").cdf(2.25) == doctest::Approx(0.5));
  const auto t = cure::parse_distribution("texp:tau=5,rate=1");
  CHECK(t.right_endpoint() == 5.0);
  CHECK(t.to_string() == "texp:rate=1,tau=5");
  for (const auto& d : families()) CHECK(cure::parse_distribution(d.to_string()).to_string() == d.to_string());

  for (const char* bad : {"", "exp", "exp:rate=", "exp:rate=abc", "exp:lambda=1", "unif:3", "unif:3,1", "unif:a,b",
                          "texp:rate=1", "weibull:1,2", "exp:rate=1,tau=2", "texp:rate=1,tau=5,rate=2"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(cure::parse_distribution(bad), cure::ConfigError);
  }
}

TEST_CASE("improper lifetime law and observed-time distribution") {
  const ParametricModel m(Distribution::exponential(1), Distribution::uniform(0, 6), 0.8);
  CHECK(cure::fstar_tail(m, 0.0) == 1.0);
  CHECK(cure::fstar_tail(m, 1e6) == doctest::Approx(0.2));
  CHECK(cure::fstar_tail(m, 1.0) == doctest::Approx(1.0 - 0.8 * (1.0 - std::exp(-1.0))));
  CHECK(cure::fstar_cdf(m, 1.0) == doctest::Approx(0.8 * (1.0 - std::exp(-1.0))));
  CHECK(cure::fstar_density(m, 1.0) == doctest::Approx(0.8 * std::exp(-1.0)));

  CHECK(cure::h_cdf(m, 0.0) == 0.0);
  CHECK(cure::h_cdf(m, 6.0) == 1.0);
  CHECK(cure::h_cdf(m, 7.0) == 1.0);
  CHECK(cure::h_cdf(m, 3.0) == doctest::Approx(1.0 - (1.0 - 0.8 * (1.0 - std::exp(-3.0))) * 0.5));
  double prev = 0.0;
  for (int i = 0; i <= 70; ++i) {
    const double h = cure::h_cdf(m, 0.1 * i);
    CHECK(h >= prev);
    CHECK(h + cure::h_tail(m, 0.1 * i) == doctest::Approx(1.0));
    prev = h;
  }
}

TEST_CASE("right endpoints") {
  const ParametricModel a(Distribution::exponential(1), Distribution::uniform(0, 6), 0.8);
  CHECK(cure::tau_fstar(a) == kInf);
  CHECK(cure::tau_h(a) == 6.0);

  const ParametricModel b(Distribution::truncated_exponential(1, 5), Distribution::uniform(0, 3), 1.0);
  CHECK(cure::tau_fstar(b) == 5.0);
  CHECK(cure::tau_h(b) == 3.0);

  const ParametricModel c(Distribution::exponential(1), Distribution::uniform(0, 6), 1.0);
  CHECK(cure::tau_h(c) == 6.0);

  const ParametricModel d(Distribution::truncated_exponential(1, 5), Distribution::exponential(1), 0.5);
  CHECK(cure::tau_h(d) == kInf);
  CHECK(cure::h_cdf(b, cure::tau_h(b)) == 1.0);
}
