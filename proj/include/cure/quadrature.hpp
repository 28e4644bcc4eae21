#pragma once

// Gauss-Legendre / Gauss-Kronrod building blocks, 1-D adaptive integration,
// cumulative integral tables and a vector-valued adaptive tensor cubature on
// rectangles.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <queue>
#include <span>
#include <vector>

#include "cure/parallel.hpp"

namespace cure::quad {

/// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
struct KronrodNode {
  double x;
  double w_kronrod;
  double w_gauss;  ///< zero for Kronrod-only nodes
};

inline constexpr std::array<KronrodNode, 15> kGK15 = [] {
  constexpr double xgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                             0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                             0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                             0.207784955007898467600689403773245, 0.0};
  constexpr double wgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                             0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                             0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                             0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  constexpr double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                            0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
  std::array<KronrodNode, 15> nodes{};
  std::size_t k = 0;
  for (std::size_t i = 0; i < 7; ++i) {
    const double g = (i % 2 == 1) ? wg[i / 2] : 0.0;
    nodes[k++] = {-xgk[i], wgk[i], g};
    nodes[k++] = {xgk[i], wgk[i], g};
  }
  nodes[k] = {0.0, wgk[7], wg[3]};
  return nodes;
}();

/// Gauss-Legendre rule of the given order on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussLegendre gauss_legendre(std::size_t order);

struct Result {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

struct Options {
  double rel_tol = 1e-12;
  double abs_tol = 0.0;
  std::size_t max_intervals = 20000;
};

namespace detail {

struct Interval {
  double a, b, value, error;
  bool operator<(const Interval& o) const { return error < o.error; }
};

template <class F>
Interval gk15(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double k = 0.0;
  double g = 0.0;
  for (const auto& node : kGK15) {
    const double v = f(c + h * node.x);
    k += node.w_kronrod * v;
    g += node.w_gauss * v;
  }
  return {a, b, k * h, std::abs((k - g) * h)};
}

}  // namespace detail

/// Globally adaptive G7/K15 integration of f over [a, b], first split at the
/// given interior points.
template <class F>
Result integrate(F&& f, double a, double b, const Options& opts = {}, std::span<const double> splits = {}) {
  Result res;
  if (!(b > a)) {
    res.converged = true;
    return res;
  }
  std::vector<double> cuts{a};
  for (double s : splits)
    if (s > a && s < b) cuts.push_back(s);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<detail::Interval> heap;
  double total = 0.0;
  double err = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    auto iv = detail::gk15(f, cuts[i], cuts[i + 1]);
    total += iv.value;
    err += iv.error;
    heap.push(iv);
  }
  res.evaluations = 15 * heap.size();
  while (err > std::max(opts.abs_tol, opts.rel_tol * std::abs(total)) && heap.size() < opts.max_intervals) {
    auto worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;
    heap.pop();
    auto left = detail::gk15(f, worst.a, mid);
    auto right = detail::gk15(f, mid, worst.b);
    res.evaluations += 30;
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Fresh sum over the final partition.
  total = 0.0;
  err = 0.0;
  std::vector<detail::Interval> leaves;
  leaves.reserve(heap.size());
  while (!heap.empty()) {
    leaves.push_back(heap.top());
    heap.pop();
  }
  std::sort(leaves.begin(), leaves.end(), [](const auto& l, const auto& r) { return l.a < r.a; });
  for (const auto& iv : leaves) {
    total += iv.value;
    err += iv.error;
  }
  res.value = total;
  res.error = err;
  res.converged = err <= std::max(opts.abs_tol, opts.rel_tol * std::abs(total));
  return res;
}

/// Table of x -> \int_0^x f over [0, upper], answering queries at full
/// precision: panel prefix sums plus a Gauss-Legendre rule on the partial
/// panel. f must be smooth between consecutive breakpoints.
class CumulativeIntegral {
 public:
  CumulativeIntegral() = default;
  CumulativeIntegral(std::function<double(double)> f, double upper, std::span<const double> breakpoints,
                     std::size_t panels_per_segment = 64, std::size_t order = 16);

  /// \int_0^x f, with x clamped to [0, upper].
  double operator()(double x) const;
  /// \int_a^b f for a <= b.
  double between(double a, double b) const { return (*this)(b) - (*this)(a); }
  double upper() const noexcept { return upper_; }
  double total() const noexcept { return prefix_.empty() ? 0.0 : prefix_.back(); }

 private:
  double partial(double a, double b) const;

  std::function<double(double)> f_;
  double upper_ = 0.0;
  std::vector<double> edges_;
  std::vector<double> prefix_;  // prefix_[i] = integral over [0, edges_[i]]
  GaussLegendre rule_;
};

// --------------------------------------------------------------------------
// Vector-valued adaptive cubature on rectangles [t0,t1] x [u0,u1].
// --------------------------------------------------------------------------

/// [t0,t1] x [u0,u1] inside integrand region `region`.
struct Rect {
  double t0, t1, u0, u1;
  std::size_t region = 0;
};

/// Accumulates weighted integrand components into the three tensor rules
/// evaluated per rectangle (K15xK15, G7xK15, K15xG7).
class Sink {
 public:
  Sink(double* kk, double* gk, double* kg) : kk_(kk), gk_(gk), kg_(kg) {}

  void set_weights(double w_kk, double w_gk, double w_kg) {
    w_kk_ = w_kk;
    w_gk_ = w_gk;
    w_kg_ = w_kg;
  }

  void add(std::size_t index, double value) {
    kk_[index] += w_kk_ * value;
    gk_[index] += w_gk_ * value;
    kg_[index] += w_kg_ * value;
    lo_ = std::min(lo_, index);
    hi_ = std::max(hi_, index + 1);
  }

  std::size_t lo() const noexcept { return lo_; }
  std::size_t hi() const noexcept { return hi_ > lo_ ? hi_ : lo_; }
  void reset_range() noexcept {
    lo_ = static_cast<std::size_t>(-1);
    hi_ = 0;
  }

 private:
  double* kk_;
  double* gk_;
  double* kg_;
  double w_kk_ = 0.0, w_gk_ = 0.0, w_kg_ = 0.0;
  std::size_t lo_ = static_cast<std::size_t>(-1);
  std::size_t hi_ = 0;
};

struct CubatureOptions {
  double rel_tol = 1e-8;
  double abs_tol = 0.0;
  std::size_t max_rects = 200000;
  std::size_t batch = 32;  ///< rectangles refined per round; fixed so results do not depend on workers
  unsigned workers = 1;
};

struct CubatureResult {
  std::vector<double> value;
  double error = 0.0;  ///< L1 error estimate over all components
  double norm = 0.0;   ///< L1 norm of value
  std::size_t rects = 0;
  bool converged = false;
};

/// Integrand concept for `cubature`:
///   State prepare(std::size_t region, double t) const; // t-only work
///   void eval(const State&, double u, Sink&) const;    // adds components
template <class Integrand>
CubatureResult cubature(const Integrand& f, std::span<const Rect> initial, std::size_t dim,
                        const CubatureOptions& opts) {
  struct Leaf {
    Rect r;
    double err = 0.0;
    double err_t = 0.0;
    double err_u = 0.0;
    double norm = 0.0;
    std::size_t lo = 0;
    std::vector<double> vals;
  };

  struct Scratch {
    std::vector<double> kk, gk, kg;
  };

  const unsigned workers = std::max(1u, opts.workers);
  std::vector<Scratch> scratch(workers);
  for (auto& s : scratch) {
    s.kk.assign(dim, 0.0);
    s.gk.assign(dim, 0.0);
    s.kg.assign(dim, 0.0);
  }

  auto evaluate = [&](const Rect& r, Scratch& s) {
    Sink sink(s.kk.data(), s.gk.data(), s.kg.data());
    const double tc = 0.5 * (r.t0 + r.t1), th = 0.5 * (r.t1 - r.t0);
    const double uc = 0.5 * (r.u0 + r.u1), uh = 0.5 * (r.u1 - r.u0);
    const double area = th * uh;
    for (const auto& nt : kGK15) {
      const auto state = f.prepare(r.region, tc + th * nt.x);
      for (const auto& nu : kGK15) {
        sink.set_weights(area * nt.w_kronrod * nu.w_kronrod, area * nt.w_gauss * nu.w_kronrod,
                         area * nt.w_kronrod * nu.w_gauss);
        f.eval(state, uc + uh * nu.x, sink);
      }
    }
    Leaf leaf;
    leaf.r = r;
    const std::size_t lo = std::min(sink.lo(), dim);
    const std::size_t hi = std::min(sink.hi(), dim);
    leaf.lo = lo;
    leaf.vals.assign(s.kk.begin() + static_cast<std::ptrdiff_t>(lo), s.kk.begin() + static_cast<std::ptrdiff_t>(hi));
    for (std::size_t i = lo; i < hi; ++i) {
      leaf.err_t += std::abs(s.kk[i] - s.gk[i]);
      leaf.err_u += std::abs(s.kk[i] - s.kg[i]);
      leaf.norm += std::abs(s.kk[i]);
      s.kk[i] = s.gk[i] = s.kg[i] = 0.0;
    }
    leaf.err = leaf.err_t + leaf.err_u;
    return leaf;
  };

  auto evaluate_all = [&](std::span<const Rect> rects) {
    std::vector<Leaf> out(rects.size());
    parallel_for(rects.size(), workers, [&](std::size_t i, unsigned worker) {
      out[i] = evaluate(rects[i], scratch[worker]);
    });
    return out;
  };

  std::vector<Leaf> leaves = evaluate_all(initial);
  auto by_error = [&](std::size_t a, std::size_t b) {
    if (leaves[a].err != leaves[b].err) return leaves[a].err < leaves[b].err;
    return a > b;
  };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(by_error)> heap(by_error);
  double err = 0.0, norm = 0.0;
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    heap.push(i);
    err += leaves[i].err;
    norm += leaves[i].norm;
  }

  std::size_t rounds = 0;
  auto target = [&] { return std::max(opts.abs_tol, opts.rel_tol * norm); };
  while (err > target() && leaves.size() < opts.max_rects && !heap.empty()) {
    std::vector<std::size_t> parents;
    std::vector<Rect> children;
    while (parents.size() < opts.batch && !heap.empty()) {
      const std::size_t idx = heap.top();
      heap.pop();
      const Rect& r = leaves[idx].r;
      parents.push_back(idx);
      if (leaves[idx].err_t >= leaves[idx].err_u) {
        const double mid = 0.5 * (r.t0 + r.t1);
        children.push_back({r.t0, mid, r.u0, r.u1, r.region});
        children.push_back({mid, r.t1, r.u0, r.u1, r.region});
      } else {
        const double mid = 0.5 * (r.u0 + r.u1);
        children.push_back({r.t0, r.t1, r.u0, mid, r.region});
        children.push_back({r.t0, r.t1, mid, r.u1, r.region});
      }
    }
    auto evaluated = evaluate_all(children);
    for (std::size_t i = 0; i < parents.size(); ++i) {
      const std::size_t slot = parents[i];
      err -= leaves[slot].err;
      norm -= leaves[slot].norm;
      leaves[slot] = std::move(evaluated[2 * i]);
      leaves.push_back(std::move(evaluated[2 * i + 1]));
      for (std::size_t s : {slot, leaves.size() - 1}) {
        err += leaves[s].err;
        norm += leaves[s].norm;
        heap.push(s);
      }
    }
    if (++rounds % 64 == 0) {
      err = norm = 0.0;
      for (const auto& l : leaves) {
        err += l.err;
        norm += l.norm;
      }
    }
  }

  CubatureResult res;
  res.value.assign(dim, 0.0);
  for (const auto& l : leaves) {
    for (std::size_t i = 0; i < l.vals.size(); ++i) res.value[l.lo + i] += l.vals[i];
    res.error += l.err;
  }
  for (double v : res.value) res.norm += std::abs(v);
  res.rects = leaves.size();
  res.converged = res.error <= std::max(opts.abs_tol, opts.rel_tol * res.norm);
  return res;
}

}  // namespace cure::quad
