#include "cure/sample.hpp"

#include <algorithm>
#include <cmath>

#include "cure/errors.hpp"

namespace cure {

namespace {

bool tie_order(const CensoredObservation& a, const CensoredObservation& b) {
  if (a.time != b.time) return a.time < b.time;
  return a.event && !b.event;
}

}  // namespace

SurvivalSample::SurvivalSample(std::vector<CensoredObservation> observations)
    : observations_(std::move(observations)) {
  if (observations_.empty()) throw InvalidInput("sample is empty");
  for (const auto& obs : observations_) {
    if (!std::isfinite(obs.time) || obs.time < 0.0)
      throw InvalidInput("observation times must be finite and nonnegative");
  }
  std::stable_sort(observations_.begin(), observations_.end(), tie_order);
}

std::size_t SurvivalSample::events() const noexcept {
  return static_cast<std::size_t>(std::count_if(observations_.begin(), observations_.end(),
                                                [](const auto& o) { return o.event; }));
}

SurvivalSample SurvivalSample::scaled(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor)) throw InvalidInput("scale factor must be positive");
  auto copy = observations_;
  for (auto& obs : copy) obs.time *= factor;
  return SurvivalSample(std::move(copy));
}

SurvivalSample SurvivalSample::flipped() const {
  auto copy = observations_;
  for (auto& obs : copy) obs.event = !obs.event;
  return SurvivalSample(std::move(copy));
}

QSummary summarize(const SurvivalSample& sample) {
  const auto obs = sample.observations();
  QSummary s;
  s.n = obs.size();
  s.m = obs.back().time;

  std::optional<double> mu;
  for (const auto& o : obs) {
    if (o.event) {
      ++s.n_u;
      mu = o.time;  // sorted, so the last event seen is the largest
    }
  }

  if (s.n_u == 0) {
    s.degenerate_all_censored = true;
    s.n_c_gt = s.n;
    return s;
  }

  s.mu = mu;
  s.delta = 2.0 * *mu - s.m;
  for (const auto& o : obs) {
    if (!o.event) (o.time < *mu ? s.n_c_lt : s.n_c_gt)++;
  }

  if (*mu == s.m) {
    s.degenerate_max_uncensored = true;
    return s;
  }

  // Events in [delta, M_u] less the one observation that is M_u itself; with
  // untied data this is the count on [delta, M_u), and N_u - 1 when delta <= 0.
  const auto in_window = std::count_if(obs.begin(), obs.end(), [&](const auto& o) {
    return o.event && o.time >= *s.delta && o.time <= *mu;
  });
  s.nq = static_cast<std::size_t>(in_window) - 1;
  s.q = static_cast<double>(s.nq) / static_cast<double>(s.n);
  return s;
}

double KaplanMeierCurve::survival_at(double t) const noexcept {
  auto it = std::upper_bound(steps.begin(), steps.end(), t,
                             [](double v, const KaplanMeierStep& s) { return v < s.time; });
  return it == steps.begin() ? 1.0 : std::prev(it)->survival;
}

KaplanMeierCurve kaplan_meier(const SurvivalSample& sample) {
  const auto obs = sample.observations();
  KaplanMeierCurve curve;

  double survival = 1.0;
  double greenwood_sum = 0.0;
  std::size_t at_risk = obs.size();
  std::size_t i = 0;
  while (i < obs.size()) {
    const double t = obs[i].time;
    std::size_t deaths = 0;
    std::size_t leaving = 0;
    for (; i < obs.size() && obs[i].time == t; ++i) {
      deaths += obs[i].event ? 1 : 0;
      ++leaving;
    }
    if (deaths > 0) {
      const double r = static_cast<double>(at_risk);
      const double d = static_cast<double>(deaths);
      survival *= 1.0 - d / r;
      double variance = 0.0;
      if (deaths < at_risk) {
        greenwood_sum += d / (r * (r - d));
        variance = survival * survival * greenwood_sum;
      }
      curve.steps.push_back({t, survival, variance});
    }
    at_risk -= leaving;
  }
  curve.cure_estimate = survival;
  return curve;
}

}  // namespace cure
