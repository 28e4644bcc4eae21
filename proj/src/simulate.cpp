#include "cure/simulate.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <string>

#include "cure/asymptotics.hpp"
#include "cure/errors.hpp"
#include "cure/parallel.hpp"

namespace cure {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Below this |theta| the Frank formulas are evaluated through expm1/log1p;
// above it through forms whose terms are all positive.
constexpr double kFrankSmallTheta = 1.0;

double log_sum_exp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// Frank copula for theta > kFrankSmallTheta; symmetric in (u, v).
double frank_cdf_positive(double theta, double u, double v) {
  const double a = std::min(u, v);
  const double b = std::max(u, v);
  const double bracket = -std::expm1(-theta * b) + std::exp(-theta * (b - a)) * -std::expm1(-theta * (1.0 - b));
  return a - (std::log(bracket) - std::log(-std::expm1(-theta))) / theta;
}

double frank_conditional_positive(double theta, double u, double v) {
  if (u <= v) {
    const double num = -std::expm1(-theta * v);
    return num / (num + std::exp(-theta * (v - u)) * -std::expm1(-theta * (1.0 - v)));
  }
  const double shift = std::exp(-theta * (u - v));
  return shift * -std::expm1(-theta * v) / (-std::expm1(-theta * u) + shift * -std::expm1(-theta * (1.0 - u)));
}

double frank_cdf(double theta, double u, double v) {
  if (std::abs(theta) <= kFrankSmallTheta)
    return -std::log1p(std::expm1(-theta * u) * std::expm1(-theta * v) / std::expm1(-theta)) / theta;
  if (theta > 0.0) return frank_cdf_positive(theta, u, v);
  return u - frank_cdf_positive(-theta, u, 1.0 - v);
}

double frank_conditional(double theta, double u, double v) {
  if (std::abs(theta) <= kFrankSmallTheta) {
    const double ev = std::expm1(-theta * v);
    return std::exp(-theta * u) * ev / (std::expm1(-theta) + std::expm1(-theta * u) * ev);
  }
  if (theta > 0.0) return frank_conditional_positive(theta, u, v);
  return 1.0 - frank_conditional_positive(-theta, u, 1.0 - v);
}

double frank_inverse(double theta, double u, double q) {
  if (std::abs(theta) <= kFrankSmallTheta)
    return -std::log1p(q * std::expm1(-theta) / (q + (1.0 - q) * std::exp(-theta * u))) / theta;
  const double lq = std::log(q);
  const double lr = std::log1p(-q) - theta * u;
  return -(log_sum_exp(lq - theta, lr) - log_sum_exp(lq, lr)) / theta;
}

double amh_conditional(double theta, double u, double v) {
  const double d = 1.0 - theta * (1.0 - u) * (1.0 - v);
  return v * (1.0 - theta * (1.0 - v)) / (d * d);
}

// d/dv of amh_conditional, i.e. the copula density.
double amh_density(double theta, double u, double v) {
  const double d = 1.0 - theta * (1.0 - u) * (1.0 - v);
  const double num = v * (1.0 - theta + theta * v);
  const double dnum = 1.0 - theta + 2.0 * theta * v;
  return (dnum * d - 2.0 * num * theta * (1.0 - u)) / (d * d * d);
}

// Newton steps kept inside a shrinking bracket; bisection when a step leaves it.
double amh_inverse(double theta, double u, double q) {
  double lo = 0.0;
  double hi = 1.0;
  double v = q;
  for (int iter = 0; iter < 200 && hi - lo > 1e-12; ++iter) {
    const double r = amh_conditional(theta, u, v) - q;
    if (r == 0.0) return v;
    (r < 0.0 ? lo : hi) = v;
    const double slope = amh_density(theta, u, v);
    double next = slope > 0.0 ? v - r / slope : lo - 1.0;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - v) < 1e-15) return next;
    v = next;
  }
  return v;
}

void check_unit(double w, const char* name) {
  if (!(w >= 0.0 && w <= 1.0)) throw ConfigError(std::string(name) + " must lie in [0, 1]");
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) noexcept {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kPhiloxW0;
      key[1] += kPhiloxW1;
    }
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}, stream_(stream) {}

std::uint64_t CounterRng::next_u64() noexcept {
  if (used_ >= 4) {
    buffer_ = philox4x32({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                          static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
                         key_);
    ++block_;
    used_ = 0;
  }
  const std::uint64_t lo = buffer_[used_];
  const std::uint64_t hi = buffer_[used_ + 1];
  used_ += 2;
  return (hi << 32) | lo;
}

double CounterRng::uniform() noexcept {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
}

void CopulaSpec::validate() const {
  switch (family) {
    case CopulaFamily::independence:
      return;
    case CopulaFamily::frank:
      if (!std::isfinite(theta)) throw ConfigError("Frank theta must be finite");
      return;
    case CopulaFamily::amh:
      if (!(theta >= -1.0 && theta <= 1.0)) throw ConfigError("AMH theta must lie in [-1, 1]");
      return;
  }
}

CopulaSpec parse_copula(std::string_view family, double theta) {
  std::string name(family);
  std::transform(name.begin(), name.end(), name.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  CopulaSpec spec;
  if (name == "independence" || name == "indep") {
    spec.family = CopulaFamily::independence;
  } else if (name == "frank") {
    spec = {CopulaFamily::frank, theta};
  } else if (name == "amh") {
    spec = {CopulaFamily::amh, theta};
  } else {
    throw ConfigError("unknown copula family '" + std::string(family) + "' (expected independence, frank or amh)");
  }
  spec.validate();
  return spec;
}

double copula_cdf(const CopulaSpec& copula, double w1, double w2) {
  copula.validate();
  check_unit(w1, "w1");
  check_unit(w2, "w2");
  if (w1 == 0.0 || w2 == 0.0) return 0.0;
  double c = w1 * w2;
  if (copula.theta != 0.0) {
    if (copula.family == CopulaFamily::frank) c = frank_cdf(copula.theta, w1, w2);
    if (copula.family == CopulaFamily::amh) c = w1 * w2 / (1.0 - copula.theta * (1.0 - w1) * (1.0 - w2));
  }
  return std::clamp(c, std::max(0.0, w1 + w2 - 1.0), std::min(w1, w2));
}

double copula_conditional(const CopulaSpec& copula, double w1, double w2) {
  copula.validate();
  check_unit(w1, "w1");
  check_unit(w2, "w2");
  if (w2 == 0.0 || w2 == 1.0) return w2;
  double h = w2;
  if (copula.theta != 0.0) {
    if (copula.family == CopulaFamily::frank) h = frank_conditional(copula.theta, w1, w2);
    if (copula.family == CopulaFamily::amh) h = amh_conditional(copula.theta, w1, w2);
  }
  return std::clamp(h, 0.0, 1.0);
}

double copula_conditional_inverse(const CopulaSpec& copula, double w1, double q) {
  copula.validate();
  check_unit(w1, "w1");
  check_unit(q, "q");
  double v = q;
  if (copula.theta != 0.0) {
    if (copula.family == CopulaFamily::frank) v = frank_inverse(copula.theta, w1, q);
    if (copula.family == CopulaFamily::amh) v = amh_inverse(copula.theta, w1, q);
  }
  return std::clamp(v, 0.0, 1.0);
}

std::pair<double, double> sample_pair(const CopulaSpec& copula, CounterRng& rng) {
  const double w1 = rng.uniform();
  const double q = rng.uniform();
  if (copula.family == CopulaFamily::independence || copula.theta == 0.0) return {w1, q};
  if (copula.family == CopulaFamily::frank) return {w1, std::clamp(frank_inverse(copula.theta, w1, q), 0.0, 1.0)};
  return {w1, amh_inverse(copula.theta, w1, q)};
}

void SimConfig::validate() const {
  copula.validate();
  if (n < 1) throw ConfigError("sample size must be at least 1");
  if (reps < 1) throw ConfigError("replicate count must be at least 1");
}

SurvivalSample sample_survival(const SimConfig& config, std::size_t replicate) {
  config.validate();
  CounterRng rng(config.seed, replicate);
  const auto& model = config.model;
  std::vector<CensoredObservation> obs;
  obs.reserve(config.n);
  for (std::size_t i = 0; i < config.n; ++i) {
    const auto [w1, w2] = sample_pair(config.copula, rng);
    const double latent = w1 < model.p ? model.survival.quantile(w1 / model.p) : kInf;
    const double censor = model.censoring.quantile(w2);
    obs.push_back(latent <= censor ? CensoredObservation{latent, true} : CensoredObservation{censor, false});
  }
  return SurvivalSample(std::move(obs));
}

double McPmf::degenerate_fraction() const noexcept {
  return reps == 0 ? 0.0 : static_cast<double>(all_censored + max_uncensored) / static_cast<double>(reps);
}

McPmf mc_pmf(const SimConfig& config, bool conditional) {
  config.validate();
  if (config.reps < 100) throw ConfigError("mc_pmf needs at least 100 replicates");
  enum : unsigned char { ok, none_uncensored, top_uncensored };
  std::vector<std::size_t> nq(config.reps);
  std::vector<unsigned char> kind(config.reps);
  const unsigned workers = config.workers ? config.workers : worker_count();
  parallel_for(config.reps, workers, [&](std::size_t r, unsigned) {
    const auto s = summarize(sample_survival(config, r));
    nq[r] = s.nq;
    kind[r] = s.degenerate_all_censored ? none_uncensored : s.degenerate_max_uncensored ? top_uncensored : ok;
  });

  McPmf out;
  out.n = config.n;
  out.reps = config.reps;
  std::vector<std::size_t> counts(config.n, 0);
  std::size_t sum = 0;
  std::size_t sum_sq = 0;
  for (std::size_t r = 0; r < config.reps; ++r) {
    if (kind[r] == none_uncensored) ++out.all_censored;
    if (kind[r] == top_uncensored) ++out.max_uncensored;
    if (conditional && kind[r] != ok) continue;
    ++out.n_eff;
    ++counts[nq[r]];
    sum += nq[r];
    sum_sq += nq[r] * nq[r];
  }
  if (out.n_eff == 0) throw DegenerateSample("every simulated sample was degenerate; no conditional pmf");

  const double ne = static_cast<double>(out.n_eff);
  out.probs.resize(config.n);
  out.se.resize(config.n);
  for (std::size_t k = 0; k < config.n; ++k) {
    const double p = static_cast<double>(counts[k]) / ne;
    out.probs[k] = p;
    out.se[k] = std::sqrt(p * (1.0 - p) / ne);
  }
  out.mean = static_cast<double>(sum) / ne;
  const double var = out.n_eff > 1 ? (static_cast<double>(sum_sq) - ne * out.mean * out.mean) / (ne - 1.0) : 0.0;
  out.mean_se = std::sqrt(std::max(var, 0.0) / ne);
  return out;
}

std::vector<PowerPoint> mc_power(const SimConfig& config, std::span<const double> tau_grid, double alpha) {
  config.validate();
  if (config.reps < 1000) throw ConfigError("mc_power needs at least 1000 replicates");
  const double k = k_quantile(1.0 - alpha);
  const unsigned workers = config.workers ? config.workers : worker_count();
  std::vector<PowerPoint> out;
  out.reserve(tau_grid.size());
  for (const double tau : tau_grid) {
    SimConfig cfg = config;
    cfg.model = ParametricModel(config.model.survival, config.model.censoring.with_right_endpoint(tau), config.model.p);
    std::vector<unsigned char> reject(cfg.reps);
    parallel_for(cfg.reps, workers, [&](std::size_t r, unsigned) {
      reject[r] = static_cast<double>(summarize(sample_survival(cfg, r)).nq) > k;
    });
    const auto hits = static_cast<double>(std::count(reject.begin(), reject.end(), 1));
    const double rate = hits / static_cast<double>(cfg.reps);
    out.push_back({tau, rate, std::sqrt(rate * (1.0 - rate) / static_cast<double>(cfg.reps))});
  }
  return out;
}

double ks_uniform(std::vector<double> xs) {
  if (xs.empty()) throw InvalidInput("KS statistic of an empty sample");
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = std::clamp(xs[i], 0.0, 1.0);
    d = std::max({d, static_cast<double>(i + 1) / n - x, x - static_cast<double>(i) / n});
  }
  return d;
}

}  // namespace cure
