#pragma once

// Exact finite-sample law of nQ_n under the independent censoring model,
// conditional on the non-degenerate event {0 < M_u(n) < M(n)}.

#include <cstddef>
#include <vector>

#include "cure/model.hpp"
#include "cure/quadrature.hpp"

namespace cure {

/// Case A: 2t - x <= 0 (Delta_n <= 0). Case B: 2t - x > 0.
enum class Case { A, B };

/// Binomial(trials, prob) pmf at k, evaluated in log space.
double binomial_pmf(std::size_t trials, std::size_t k, double prob);

/// The one-dimensional integrals every exact computation is built from,
/// tabulated once per model:
///   U_GF(y) = \int_0^y Gbar dF*,   U_FG(y) = \int_0^y Fbar* dG.
class ModelIntegrals {
 public:
  explicit ModelIntegrals(ParametricModel model);

  const ParametricModel& model() const noexcept { return model_; }
  /// tau_H (may be +infinity).
  double tau() const noexcept { return tau_; }

  double h(double t) const noexcept { return h_cdf(model_, t); }
  /// \int_a^b Gbar(y) dF*(y).
  double uncensored_mass(double a, double b) const { return ugf_.between(a, b); }
  /// \int_a^b Fbar*(y) dG(y).
  double censored_mass(double a, double b) const { return ufg_.between(a, b); }

  double pi_a(double t) const;
  double pi_b(double t, double x) const;
  double p_c_gt(double t, double x) const;
  double rho(double t, double x, Case c) const;
  double joint_density(std::size_t n, double t, double x) const;
  /// P(R = r | M_u = t, M = x), R the number of censored times in (t, x]
  /// including M itself: R - 1 ~ Binomial(n - 2, p_c_gt(t, x)).
  double censored_above_law(std::size_t n, std::size_t r, double t, double x) const;
  double conditional_pmf(std::size_t n, std::size_t k, double t, double x) const;

  /// U_GF(y) and U_FG(y) themselves.
  double ugf(double y) const { return ugf_(y); }
  double ufg(double y) const { return ufg_(y); }

 private:
  void check_region(double t, double x, bool allow_equal) const;

  ParametricModel model_;
  double tau_;
  quad::CumulativeIntegral ugf_;
  quad::CumulativeIntegral ufg_;
};

double pi_a(const ParametricModel& model, double t);
double pi_b(const ParametricModel& model, double t, double x);
double p_c_gt(const ParametricModel& model, double t, double x);
double rho(const ParametricModel& model, double t, double x, Case c);
double joint_density(const ParametricModel& model, std::size_t n, double t, double x);
double censored_above_law(const ParametricModel& model, std::size_t n, std::size_t r, double t, double x);
double conditional_pmf(const ParametricModel& model, std::size_t n, std::size_t k, double t, double x);

/// D_n = 1 - P(all censored) - P(largest observation uncensored).
struct DnTerms {
  double all_censored = 0.0;    ///< (\int Fbar* dG)^n
  double max_uncensored = 0.0;  ///< n \int H^{n-1} Gbar dF*
  double d_n = 0.0;
};

DnTerms d_n_terms(const ParametricModel& model, std::size_t n);
double d_n(const ParametricModel& model, std::size_t n);

struct ExactOptions {
  double tol = 1e-8;  ///< relative quadrature tolerance, in (0, 1e-3]
  unsigned workers = 0;  ///< 0: worker_count()
  std::size_t max_rects = 400000;
};

struct ExactPmf {
  std::size_t n = 0;
  std::vector<double> probs;  ///< P(nQ_n = k | 0 < M_u < M), k = 0..n-2
  double d_n = 0.0;
  double quad_tolerance = 0.0;  ///< achieved relative error estimate
  double joint_mass = 0.0;      ///< \iint P_n(dt, dx), an independent route to D_n
  double pmf_mass = 0.0;        ///< sum_k (A_n(k) + B_n(k))
  std::size_t rects = 0;

  /// P(nQ_n >= k).
  double upper_tail(std::size_t k) const noexcept;
};

/// Throws UnsupportedModel when tau_H is infinite, DomainError for n <= 2 or a
/// tolerance outside (0, 1e-3], NumericError when quadrature does not converge.
ExactPmf exact_pmf(const ParametricModel& model, std::size_t n, const ExactOptions& opts = {});

/// Smallest k with P(nQ_n <= k) >= level; for level == 1 the largest k with
/// positive mass.
std::size_t exact_quantile(const ExactPmf& pmf, double level);

}  // namespace cure
