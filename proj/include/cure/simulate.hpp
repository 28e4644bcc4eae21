#pragma once

// Monte Carlo generation of censored samples, independent or with Frank/AMH
// copula dependence between the latent lifetime and the censoring time.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "cure/model.hpp"
#include "cure/sample.hpp"

namespace cure {

/// Philox4x32-10 block function.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key) noexcept;

/// Counter-based stream: key = seed, counter = (block, stream). Distinct
/// streams never share a block, so replicate r always sees the same numbers.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept;

  std::uint64_t next_u64() noexcept;
  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform() noexcept;

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  unsigned used_ = 4;
};

enum class CopulaFamily { independence, frank, amh };

/// theta = 0 is accepted for both families as the independence limit.
struct CopulaSpec {
  CopulaFamily family = CopulaFamily::independence;
  double theta = 0.0;

  /// Throws ConfigError unless theta is finite (Frank) or in [-1, 1] (AMH).
  void validate() const;
};

CopulaSpec parse_copula(std::string_view family, double theta);

/// J(w1, w2). Throws ConfigError for an invalid spec or arguments outside [0, 1].
double copula_cdf(const CopulaSpec& copula, double w1, double w2);
/// dJ/dw1, the conditional cdf of W2 at w2 given W1 = w1.
double copula_conditional(const CopulaSpec& copula, double w1, double w2);
/// Solves copula_conditional(w1, w2) = q for w2.
double copula_conditional_inverse(const CopulaSpec& copula, double w1, double q);

/// (W1, W2) ~ J by the conditional-distribution method; consumes exactly two
/// uniforms for every family.
std::pair<double, double> sample_pair(const CopulaSpec& copula, CounterRng& rng);

struct SimConfig {
  ParametricModel model;
  CopulaSpec copula;
  std::size_t n = 1;
  std::size_t reps = 1;
  std::uint64_t seed = 0;
  unsigned workers = 0;  ///< 0: worker_count()

  /// Throws ConfigError unless n >= 1 and reps >= 1.
  void validate() const;
};

/// Sample number `replicate` of the configuration, drawn from its own stream.
SurvivalSample sample_survival(const SimConfig& config, std::size_t replicate = 0);

struct McPmf {
  std::size_t n = 0;
  std::size_t reps = 0;
  std::size_t n_eff = 0;              ///< replicates entering the frequencies
  std::size_t all_censored = 0;       ///< replicates with no uncensored time
  std::size_t max_uncensored = 0;     ///< replicates with M_u = M
  std::vector<double> probs;          ///< k = 0..n-1
  std::vector<double> se;             ///< sqrt(p(1 - p) / n_eff) per k
  double mean = 0.0;                  ///< mean of nQ_n
  double mean_se = 0.0;

  /// Fraction of all replicates that were degenerate.
  double degenerate_fraction() const noexcept;
};

/// Empirical law of nQ_n. With `conditional` degenerate replicates are
/// discarded; otherwise they enter with nQ_n = 0. Throws ConfigError for
/// reps < 100, DegenerateSample when every replicate is discarded.
McPmf mc_pmf(const SimConfig& config, bool conditional = true);

struct PowerPoint {
  double tau_g = 0.0;
  double rate = 0.0;  ///< fraction of replicates with nQ_n > K
  double se = 0.0;
};

/// Rejection rate of the nQ_n > k_quantile(1 - alpha) test with the censoring
/// law moved to each right endpoint in `tau_grid`. Every grid point reuses the
/// same streams. Throws ConfigError for reps < 1000.
std::vector<PowerPoint> mc_power(const SimConfig& config, std::span<const double> tau_grid, double alpha);

/// Kolmogorov-Smirnov distance between the empirical cdf of `xs` and U(0, 1).
double ks_uniform(std::vector<double> xs);

}  // namespace cure
