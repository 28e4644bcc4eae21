#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace cure {

struct CensoredObservation {
  double time = 0.0;
  bool event = false;  ///< true when the event was observed (uncensored)

  friend bool operator==(const CensoredObservation&, const CensoredObservation&) = default;
};

/// Right-censored sample, kept sorted ascending by time with events ahead of
/// censorings at equal times.
class SurvivalSample {
 public:
  /// Throws InvalidInput on an empty sample or a negative/non-finite time.
  explicit SurvivalSample(std::vector<CensoredObservation> observations);

  std::span<const CensoredObservation> observations() const noexcept { return observations_; }
  std::size_t size() const noexcept { return observations_.size(); }
  std::size_t events() const noexcept;

  /// Copy with every time multiplied by `factor` (> 0).
  SurvivalSample scaled(double factor) const;

  /// Copy with event flags inverted, for estimating the censoring distribution.
  SurvivalSample flipped() const;

  friend bool operator==(const SurvivalSample&, const SurvivalSample&) = default;

 private:
  std::vector<CensoredObservation> observations_;
};

/// Extremes, counts and the statistic nQ_n for one sample.
struct QSummary {
  std::size_t n = 0;
  double m = 0.0;             ///< largest observed time M(n)
  std::optional<double> mu;   ///< largest uncensored time M_u(n)
  std::size_t n_u = 0;        ///< uncensored count
  std::size_t n_c_lt = 0;     ///< censored strictly below M_u
  std::size_t n_c_gt = 0;     ///< censored at or above M_u
  std::optional<double> delta;  ///< 2 M_u - M
  std::size_t nq = 0;
  double q = 0.0;
  bool degenerate_all_censored = false;
  bool degenerate_max_uncensored = false;

  bool degenerate() const noexcept {
    return degenerate_all_censored || degenerate_max_uncensored;
  }
};

QSummary summarize(const SurvivalSample& sample);

struct KaplanMeierStep {
  double time = 0.0;
  double survival = 1.0;
  double variance = 0.0;  ///< Greenwood
};

struct KaplanMeierCurve {
  std::vector<KaplanMeierStep> steps;  ///< one entry per distinct event time
  double cure_estimate = 1.0;          ///< survival level at M(n)

  /// Right-continuous step function evaluated at `t`.
  double survival_at(double t) const noexcept;
};

KaplanMeierCurve kaplan_meier(const SurvivalSample& sample);

}  // namespace cure
