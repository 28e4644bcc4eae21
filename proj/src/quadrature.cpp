#include "cure/quadrature.hpp"

#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace cure::quad {

namespace {

// Returns (P_n(x), P_n'(x)).
std::pair<double, double> legendre(std::size_t order, double x) {
  double p0 = 1.0, p1 = x;
  for (std::size_t k = 2; k <= order; ++k) {
    const double kk = static_cast<double>(k);
    const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
    p0 = p1;
    p1 = p2;
  }
  const double n = static_cast<double>(order);
  return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace

GaussLegendre gauss_legendre(std::size_t order) {
  if (order < 2) throw std::invalid_argument("Gauss-Legendre order must be at least 2");
  GaussLegendre rule;
  rule.nodes.assign(order, 0.0);
  rule.weights.assign(order, 0.0);
  const double n = static_cast<double>(order);
  for (std::size_t i = 0; i < (order + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre(order, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(order, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    rule.weights[i] = rule.weights[order - 1 - i] = w;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
  return rule;
}

CumulativeIntegral::CumulativeIntegral(std::function<double(double)> f, double upper,
                                       std::span<const double> breakpoints, std::size_t panels_per_segment,
                                       std::size_t order)
    : f_(std::move(f)), upper_(upper), rule_(gauss_legendre(order)) {
  if (!(upper > 0.0) || !std::isfinite(upper))
    throw std::invalid_argument("cumulative integral needs a finite positive upper limit");
  std::vector<double> cuts{0.0};
  for (double b : breakpoints)
    if (b > 0.0 && b < upper) cuts.push_back(b);
  cuts.push_back(upper);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double a = cuts[s], b = cuts[s + 1];
    for (std::size_t k = 0; k < panels_per_segment; ++k)
      edges_.push_back(a + (b - a) * static_cast<double>(k) / static_cast<double>(panels_per_segment));
  }
  edges_.push_back(upper);

  prefix_.resize(edges_.size());
  prefix_[0] = 0.0;
  for (std::size_t i = 1; i < edges_.size(); ++i) prefix_[i] = prefix_[i - 1] + partial(edges_[i - 1], edges_[i]);
}

double CumulativeIntegral::partial(double a, double b) const {
  if (!(b > a)) return 0.0;
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule_.nodes.size(); ++i) sum += rule_.weights[i] * f_(c + h * rule_.nodes[i]);
  return sum * h;
}

double CumulativeIntegral::operator()(double x) const {
  if (edges_.empty() || !(x > 0.0)) return 0.0;
  if (x >= upper_) return prefix_.back();
  auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - edges_.begin()) - 1;
  if (x == edges_[i]) return prefix_[i];
  // Integrate from the nearer panel edge.
  const double left = edges_[i], right = edges_[i + 1];
  if (x - left <= right - x) return prefix_[i] + partial(left, x);
  return prefix_[i + 1] - partial(x, right);
}

}  // namespace cure::quad
