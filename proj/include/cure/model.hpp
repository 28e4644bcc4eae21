#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cure {

struct Exponential {
  double rate = 1.0;
};

struct Uniform {
  double a = 0.0;
  double b = 1.0;
};

/// Exponential(rate) conditioned on [0, tau].
struct TruncatedExponential {
  double rate = 1.0;
  double tau = 1.0;
};

/// A proper continuous lifetime distribution on [0, inf).
///
/// Every family exposes the same contract (cdf, tail, density, quantile,
/// right endpoint, density breakpoints), so nothing downstream switches on
/// the family.
class Distribution {
 public:
  using Family = std::variant<Exponential, Uniform, TruncatedExponential>;

  /// Throws ConfigError when parameters are out of range.
  explicit Distribution(Family family);

  static Distribution exponential(double rate) { return Distribution(Exponential{rate}); }
  static Distribution uniform(double a, double b) { return Distribution(Uniform{a, b}); }
  static Distribution truncated_exponential(double rate, double tau) {
    return Distribution(TruncatedExponential{rate, tau});
  }

  double cdf(double t) const noexcept;
  double tail(double t) const noexcept;
  double density(double t) const noexcept;
  /// Generalized inverse on [0, 1]; quantile(1) is the right endpoint.
  double quantile(double u) const noexcept;
  /// tau = inf{t : cdf(t) = 1}; +infinity for unbounded support.
  double right_endpoint() const noexcept;
  /// Interior points in (0, right_endpoint) plus finite endpoints where the
  /// density is not smooth.
  std::vector<double> breakpoints() const;

  /// Distribution of c * X.
  Distribution scaled(double c) const;
  /// Same family with its right endpoint moved to `tau` (uniform keeps its
  /// lower end, truncated exponential keeps its rate).
  Distribution with_right_endpoint(double tau) const;

  const Family& family() const noexcept { return family_; }
  /// Canonical form of the CLI grammar, e.g. "texp:rate=1,tau=5".
  std::string to_string() const;

 private:
  Family family_;
};

/// Parses `exp:rate=<l>`, `unif:<a>,<b>` or `texp:rate=<l>,tau=<t>`
/// (case-insensitive). Throws ConfigError.
Distribution parse_distribution(std::string_view text);

/// Independent censoring model with an improper lifetime law F* = p F.
struct ParametricModel {
  Distribution survival;   ///< F (susceptibles)
  Distribution censoring;  ///< G
  double p = 1.0;          ///< susceptible proportion in (0, 1]

  /// Throws ConfigError unless 0 < p <= 1.
  ParametricModel(Distribution survival, Distribution censoring, double p);

  /// Time-rescaled model: F(t / c), G(t / c), same p.
  ParametricModel scaled(double c) const;
};

double fstar_cdf(const ParametricModel& model, double t) noexcept;
/// 1 - p F(t).
double fstar_tail(const ParametricModel& model, double t) noexcept;
/// p f(t).
double fstar_density(const ParametricModel& model, double t) noexcept;
/// H(t) = 1 - (1 - p F(t)) (1 - G(t)).
double h_cdf(const ParametricModel& model, double t) noexcept;
double h_tail(const ParametricModel& model, double t) noexcept;
/// tau_{F*}: tau_F when p = 1, otherwise +infinity.
double tau_fstar(const ParametricModel& model) noexcept;
/// tau_H = tau_{F*} min tau_G.
double tau_h(const ParametricModel& model) noexcept;

}  // namespace cure
