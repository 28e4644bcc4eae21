#include "cure/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cure/errors.hpp"
#include "cure/parallel.hpp"

namespace cure {

namespace {

std::vector<double> model_breakpoints(const ParametricModel& model) {
  auto bps = model.survival.breakpoints();
  auto g = model.censoring.breakpoints();
  bps.insert(bps.end(), g.begin(), g.end());
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
  return bps;
}

// Upper limit for the cumulative tables. With an infinite tau_H the tables
// stop where the observed-time tail drops below 1e-18.
double table_upper(const ParametricModel& model) {
  const double tau = tau_h(model);
  if (std::isfinite(tau)) return tau;
  double upper = 1.0;
  while (h_tail(model, upper) > 1e-18 && upper < 1e300) upper *= 2.0;
  return upper;
}

double log_binomial_coefficient(std::size_t trials, std::size_t k) {
  return std::lgamma(static_cast<double>(trials) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(trials - k) + 1.0);
}

}  // namespace

double binomial_pmf(std::size_t trials, std::size_t k, double prob) {
  if (k > trials) return 0.0;
  if (prob <= 0.0) return k == 0 ? 1.0 : 0.0;
  if (prob >= 1.0) return k == trials ? 1.0 : 0.0;
  const double kd = static_cast<double>(k);
  const double rest = static_cast<double>(trials - k);
  return std::exp(log_binomial_coefficient(trials, k) + kd * std::log(prob) + rest * std::log1p(-prob));
}

ModelIntegrals::ModelIntegrals(ParametricModel model) : model_(std::move(model)), tau_(tau_h(model_)) {
  const double upper = table_upper(model_);
  const auto bps = model_breakpoints(model_);
  ugf_ = quad::CumulativeIntegral(
      [m = model_](double y) { return m.censoring.tail(y) * fstar_density(m, y); }, upper, bps);
  ufg_ = quad::CumulativeIntegral(
      [m = model_](double y) { return fstar_tail(m, y) * m.censoring.density(y); }, upper, bps);
}

void ModelIntegrals::check_region(double t, double x, bool allow_equal) const {
  const bool ordered = allow_equal ? t <= x : t < x;
  if (!(t > 0.0) || !ordered || !(x <= tau_))
    throw DomainError("need 0 < t " + std::string(allow_equal ? "<=" : "<") + " x <= tau_H");
}

double ModelIntegrals::pi_a(double t) const {
  if (!(t > 0.0) || !(t <= tau_)) throw DomainError("pi_a needs 0 < t <= tau_H");
  const double ht = h(t);
  if (!(ht > 0.0)) throw DomainError("pi_a undefined where H(t) = 0");
  return std::clamp(ugf_(t) / ht, 0.0, 1.0);
}

double ModelIntegrals::pi_b(double t, double x) const {
  check_region(t, x, false);
  if (2.0 * t - x < 0.0) throw DomainError("pi_b needs 2t - x >= 0 (case B region)");
  const double ht = h(t);
  if (!(ht > 0.0)) throw DomainError("pi_b undefined where H(t) = 0");
  return std::clamp(ugf_.between(2.0 * t - x, t) / ht, 0.0, 1.0);
}

double ModelIntegrals::p_c_gt(double t, double x) const {
  check_region(t, x, true);
  const double cens = std::max(0.0, ufg_.between(t, x));
  const double denom = cens + h(t);
  return denom > 0.0 ? std::clamp(cens / denom, 0.0, 1.0) : 0.0;
}

double ModelIntegrals::rho(double t, double x, Case c) const {
  check_region(t, x, false);
  const double gap = 2.0 * t - x;
  // Both cases are closed at the boundary x = 2t, where they agree.
  if (c == Case::A && gap > 0.0) throw DomainError("rho case A needs 2t - x <= 0");
  if (c == Case::B && gap < 0.0) throw DomainError("rho case B needs 2t - x >= 0");
  const double pi = c == Case::A ? pi_a(t) : pi_b(t, x);
  return std::clamp((1.0 - p_c_gt(t, x)) * pi, 0.0, 1.0);
}

double ModelIntegrals::joint_density(std::size_t n, double t, double x) const {
  if (n <= 2) throw DomainError("joint density needs n > 2");
  if (!(t > 0.0) || !(t < x) || !(x <= tau_)) return 0.0;
  const double s = ufg_.between(t, x) + h(t);
  if (!(s > 0.0)) return 0.0;
  const double nd = static_cast<double>(n);
  const double log_power = (nd - 2.0) * std::log(std::min(s, 1.0));
  return nd * (nd - 1.0) * std::exp(log_power) * model_.censoring.tail(t) * fstar_density(model_, t) *
         fstar_tail(model_, x) * model_.censoring.density(x);
}

double ModelIntegrals::censored_above_law(std::size_t n, std::size_t r, double t, double x) const {
  if (n <= 2) throw DomainError("count law needs n > 2");
  if (r > n - 1) throw DomainError("count law needs r <= n - 1");
  check_region(t, x, false);
  if (r == 0) return 0.0;
  return binomial_pmf(n - 2, r - 1, p_c_gt(t, x));
}

double ModelIntegrals::conditional_pmf(std::size_t n, std::size_t k, double t, double x) const {
  if (n <= 2) throw DomainError("conditional pmf needs n > 2");
  if (k > n - 2) throw DomainError("conditional pmf needs k <= n - 2");
  check_region(t, x, false);
  const Case c = 2.0 * t - x < 0.0 ? Case::A : Case::B;
  return binomial_pmf(n - 2, k, rho(t, x, c));
}

double pi_a(const ParametricModel& model, double t) { return ModelIntegrals(model).pi_a(t); }
double pi_b(const ParametricModel& model, double t, double x) { return ModelIntegrals(model).pi_b(t, x); }
double p_c_gt(const ParametricModel& model, double t, double x) { return ModelIntegrals(model).p_c_gt(t, x); }
double rho(const ParametricModel& model, double t, double x, Case c) {
  return ModelIntegrals(model).rho(t, x, c);
}
double joint_density(const ParametricModel& model, std::size_t n, double t, double x) {
  return ModelIntegrals(model).joint_density(n, t, x);
}
double censored_above_law(const ParametricModel& model, std::size_t n, std::size_t r, double t, double x) {
  return ModelIntegrals(model).censored_above_law(n, r, t, x);
}
double conditional_pmf(const ParametricModel& model, std::size_t n, std::size_t k, double t, double x) {
  return ModelIntegrals(model).conditional_pmf(n, k, t, x);
}

// --------------------------------------------------------------------------
// D_n by one-dimensional quadrature
// --------------------------------------------------------------------------

namespace {

// Levels of dyadic grading toward the corner where (.)^{n-2} concentrates.
std::size_t grading_levels(std::size_t n) {
  std::size_t levels = 3;
  for (std::size_t m = 50; m < n; m *= 2) ++levels;
  return levels;
}

std::vector<double> graded_toward(double a, double b, std::size_t levels) {
  std::vector<double> pts;
  double w = b - a;
  for (std::size_t j = 0; j < levels; ++j) {
    w *= 0.5;
    pts.push_back(b - w);
  }
  return pts;
}

}  // namespace

DnTerms d_n_terms(const ParametricModel& model, std::size_t n) {
  if (n <= 2) throw DomainError("D_n needs n > 2");
  const double tau = tau_h(model);
  if (!std::isfinite(tau)) throw UnsupportedModel("D_n needs a finite tau_H");

  auto splits = model_breakpoints(model);
  const auto graded = graded_toward(0.0, tau, grading_levels(n) + 4);
  splits.insert(splits.end(), graded.begin(), graded.end());

  quad::Options opts;
  opts.rel_tol = 1e-14;
  opts.max_intervals = 100000;

  const auto censored = quad::integrate(
      [&](double y) { return fstar_tail(model, y) * model.censoring.density(y); }, 0.0, tau, opts, splits);
  const double nd = static_cast<double>(n);
  const auto top = quad::integrate(
      [&](double t) {
        const double ht = h_cdf(model, t);
        if (!(ht > 0.0)) return 0.0;
        return std::exp((nd - 1.0) * std::log(ht)) * model.censoring.tail(t) * fstar_density(model, t);
      },
      0.0, tau, opts, splits);

  DnTerms terms;
  terms.all_censored = std::pow(std::clamp(censored.value, 0.0, 1.0), nd);
  terms.max_uncensored = nd * top.value;
  terms.d_n = 1.0 - terms.all_censored - terms.max_uncensored;
  return terms;
}

double d_n(const ParametricModel& model, std::size_t n) { return d_n_terms(model, n).d_n; }

// --------------------------------------------------------------------------
// Pmf sweep: A_n(k) + B_n(k) for all k in one adaptive cubature
// --------------------------------------------------------------------------

namespace {

struct Line {
  double a = 0.0, b = 0.0;  // x = a + b t
  double at(double t) const { return a + b * t; }
};

struct Trapezoid {
  double t0, t1;
  Line lo, hi;
  Case c;
};

void add_crossing(const Line& l1, const Line& l2, double t0, double t1, std::vector<double>& cuts) {
  if (l1.b == l2.b) return;
  const double t = (l2.a - l1.a) / (l1.b - l2.b);
  if (t > t0 && t < t1) cuts.push_back(t);
}

// Splits the three integration regions into trapezoids {t0<t<t1,
// lo(t)<x<hi(t)} on which the integrand is smooth: breakpoints of f and g
// give lines x = c (and t = c), and in case B the moving lower limit 2t - x of
// pi_B gives lines x = 2t - c.
std::vector<Trapezoid> build_regions(double tau, const std::vector<double>& bps, std::size_t levels) {
  const double half = 0.5 * tau;
  const std::vector<Trapezoid> base = {
      {0.0, half, {0.0, 2.0}, {tau, 0.0}, Case::A},
      {0.0, half, {0.0, 1.0}, {0.0, 2.0}, Case::B},
      {half, tau, {0.0, 1.0}, {tau, 0.0}, Case::B},
  };

  std::vector<Trapezoid> out;
  for (const auto& region : base) {
    std::vector<Line> lines;
    for (double c : bps) {
      if (!(c > 0.0 && c < tau)) continue;
      lines.push_back({c, 0.0});
      if (region.c == Case::B) lines.push_back({-c, 2.0});
    }
    std::vector<double> cuts{region.t0, region.t1};
    for (double c : bps)
      if (c > region.t0 && c < region.t1) cuts.push_back(c);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      add_crossing(lines[i], region.lo, region.t0, region.t1, cuts);
      add_crossing(lines[i], region.hi, region.t0, region.t1, cuts);
      for (std::size_t j = i + 1; j < lines.size(); ++j) add_crossing(lines[i], lines[j], region.t0, region.t1, cuts);
    }
    const auto graded = graded_toward(region.t0, region.t1, levels);
    cuts.insert(cuts.end(), graded.begin(), graded.end());
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
      const double a = cuts[s], b = cuts[s + 1];
      const double mid = 0.5 * (a + b);
      std::vector<Line> bounds{region.lo};
      std::vector<Line> inner;
      for (const auto& l : lines)
        if (l.at(mid) > region.lo.at(mid) && l.at(mid) < region.hi.at(mid)) inner.push_back(l);
      std::sort(inner.begin(), inner.end(), [&](const Line& l, const Line& r) { return l.at(mid) < r.at(mid); });
      bounds.insert(bounds.end(), inner.begin(), inner.end());
      bounds.push_back(region.hi);
      for (std::size_t k = 0; k + 1 < bounds.size(); ++k) {
        if (bounds[k + 1].at(mid) - bounds[k].at(mid) <= 0.0) continue;
        out.push_back({a, b, bounds[k], bounds[k + 1], region.c});
      }
    }
  }
  return out;
}

class PmfIntegrand {
 public:
  struct State {
    const Trapezoid* region;
    double t, lo, width, ht, ufg_t, ugf_t, base;
  };

  PmfIntegrand(const ModelIntegrals& mi, std::size_t n, std::vector<Trapezoid> regions)
      : mi_(mi), n_(n), regions_(std::move(regions)), log_factorial_(n + 1) {
    for (std::size_t i = 1; i <= n; ++i) log_factorial_[i] = log_factorial_[i - 1] + std::log(static_cast<double>(i));
  }

  std::size_t regions() const noexcept { return regions_.size(); }

  State prepare(std::size_t region, double t) const {
    const auto& m = mi_.model();
    const auto& r = regions_[region];
    const double lo = r.lo.at(t);
    const double nd = static_cast<double>(n_);
    return {&r,
            t,
            lo,
            std::max(0.0, r.hi.at(t) - lo),
            mi_.h(t),
            mi_.ufg(t),
            mi_.ugf(t),
            nd * (nd - 1.0) * m.censoring.tail(t) * fstar_density(m, t)};
  }

  void eval(const State& st, double u, quad::Sink& sink) const {
    if (!(st.base > 0.0) || !(st.width > 0.0) || !(st.ht > 0.0)) return;
    const auto& m = mi_.model();
    const double x = st.lo + u * st.width;
    const double cens = std::max(0.0, mi_.ufg(x) - st.ufg_t);
    const double s = std::min(1.0, cens + st.ht);
    const double dens = st.base * st.width * std::exp((static_cast<double>(n_) - 2.0) * std::log(s)) *
                        fstar_tail(m, x) * m.censoring.density(x);
    if (!(dens > 0.0)) return;

    const double pc = cens / s;
    const double uncens = st.region->c == Case::A ? st.ugf_t : st.ugf_t - mi_.ugf(2.0 * st.t - x);
    const double pi = std::clamp(uncens / st.ht, 0.0, 1.0);
    const double rho = std::clamp((1.0 - pc) * pi, 0.0, 1.0);
    add_binomial(n_ - 2, rho, dens, sink);
    sink.add(n_ - 1, dens);
  }

 private:
  // weight * Bin(trials, rho) pmf, walking out from the mode until terms fall
  // below 1e-18 of the peak.
  void add_binomial(std::size_t trials, double rho, double weight, quad::Sink& sink) const {
    if (rho <= 0.0) {
      sink.add(0, weight);
      return;
    }
    if (rho >= 1.0) {
      sink.add(trials, weight);
      return;
    }
    const double td = static_cast<double>(trials);
    const std::size_t mode = std::min(trials, static_cast<std::size_t>(std::floor((td + 1.0) * rho)));
    const double md = static_cast<double>(mode);
    const double peak = std::exp(log_factorial_[trials] - log_factorial_[mode] - log_factorial_[trials - mode] +
                                 md * std::log(rho) + (td - md) * std::log1p(-rho));
    const double cutoff = peak * 1e-18;
    const double odds = rho / (1.0 - rho);
    sink.add(mode, weight * peak);
    double p = peak;
    for (std::size_t k = mode; k < trials; ++k) {
      p *= static_cast<double>(trials - k) / static_cast<double>(k + 1) * odds;
      if (p < cutoff) break;
      sink.add(k + 1, weight * p);
    }
    p = peak;
    for (std::size_t k = mode; k > 0; --k) {
      p *= static_cast<double>(k) / static_cast<double>(trials - k + 1) / odds;
      if (p < cutoff) break;
      sink.add(k - 1, weight * p);
    }
  }

  const ModelIntegrals& mi_;
  std::size_t n_;
  std::vector<Trapezoid> regions_;
  std::vector<double> log_factorial_;
};

}  // namespace

double ExactPmf::upper_tail(std::size_t k) const noexcept {
  double tail = 0.0;
  for (std::size_t j = probs.size(); j-- > k;) tail += probs[j];
  return std::clamp(tail, 0.0, 1.0);
}

ExactPmf exact_pmf(const ParametricModel& model, std::size_t n, const ExactOptions& opts) {
  if (n <= 2) throw DomainError("exact pmf needs n > 2");
  if (!(opts.tol > 0.0 && opts.tol <= 1e-3)) throw DomainError("tolerance must lie in (0, 1e-3]");
  const double tau = tau_h(model);
  if (!std::isfinite(tau))
    throw UnsupportedModel("exact distribution needs a finite tau_H; here both F* and G have unbounded support");

  const ModelIntegrals mi(model);
  const DnTerms dn = d_n_terms(model, n);
  if (!(dn.d_n > 0.0)) throw NumericError("D_n is not positive for this model", 0.0, 0);

  const std::size_t levels = grading_levels(n);
  auto regions = build_regions(tau, model_breakpoints(model), levels);

  std::vector<double> ucuts{0.0};
  for (double u : graded_toward(0.0, 1.0, levels)) ucuts.push_back(u);
  ucuts.push_back(1.0);
  std::vector<quad::Rect> rects;
  for (std::size_t r = 0; r < regions.size(); ++r)
    for (std::size_t j = 0; j + 1 < ucuts.size(); ++j)
      rects.push_back({regions[r].t0, regions[r].t1, ucuts[j], ucuts[j + 1], r});

  const PmfIntegrand integrand(mi, n, std::move(regions));

  quad::CubatureOptions co;
  co.rel_tol = opts.tol;
  co.max_rects = opts.max_rects;
  co.workers = opts.workers == 0 ? worker_count() : opts.workers;
  const auto res = quad::cubature(integrand, rects, n, co);

  const double rel_error = res.norm > 0.0 ? res.error / res.norm : 1.0;
  if (!res.converged)
    throw NumericError("exact pmf quadrature did not reach tolerance " + std::to_string(opts.tol) +
                           " (achieved " + std::to_string(rel_error) + " over " + std::to_string(res.rects) +
                           " rectangles)",
                       rel_error, res.rects);

  ExactPmf out;
  out.n = n;
  out.d_n = dn.d_n;
  out.quad_tolerance = rel_error;
  out.rects = res.rects;
  out.probs.resize(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    out.probs[k] = std::clamp(res.value[k] / dn.d_n, 0.0, 1.0);
    out.pmf_mass += res.value[k];
  }
  out.joint_mass = res.value[n - 1];
  return out;
}

std::size_t exact_quantile(const ExactPmf& pmf, double level) {
  if (!(level > 0.0 && level <= 1.0)) throw DomainError("quantile level must lie in (0, 1]");
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < pmf.probs.size(); ++k)
    if (pmf.probs[k] > 0.0) last_positive = k;
  if (level >= 1.0) return last_positive;
  double cumulative = 0.0;
  for (std::size_t k = 0; k < pmf.probs.size(); ++k) {
    cumulative += pmf.probs[k];
    if (cumulative >= level) return k;
  }
  return last_positive;
}

}  // namespace cure
