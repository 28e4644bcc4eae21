#pragma once

// Large-sample laws of nQ_n: the parameter-free geometric(1/4) null law and
// the normal laws under sufficient follow-up, plus the power approximation
// built on them.

#include <cstddef>
#include <optional>
#include <string>

#include "cure/model.hpp"
#include "cure/sample.hpp"

namespace cure {

/// lim P(nQ_n = k) = (1/4)(3/4)^k.
double geometric_pmf(std::size_t k) noexcept;
/// P(nQ_n >= k) = (3/4)^k under the geometric law.
double geometric_pvalue(std::size_t k) noexcept;
/// Continuous quantile K_level = log(1 - level) / log(3/4) - 1.
double k_quantile(double level);

enum class FollowUp {
  insufficient,    ///< tau_G < tau_F
  sufficient_near, ///< tau_F < tau_G < 2 tau_F
  sufficient_far,  ///< 2 tau_F < tau_G
};

enum class NuKind { A, B };

struct AsymptoticRegime {
  FollowUp follow_up = FollowUp::insufficient;
  std::optional<double> nu;  ///< nu^B (near) or nu^A (far)
};

/// Classifies the model by tau_F and tau_G. Throws DomainError on the excluded
/// boundaries tau_G = tau_F, tau_G = 2 tau_F and for an infinite tau_G.
AsymptoticRegime regime(const ParametricModel& model);

/// nu^A = p \int_0^{tau_F} Gbar dF / (1 - p Gbar(tau_F)), or nu^B with the
/// lower limit 2 tau_F - tau_G. Throws DomainError when the model is not in
/// the matching regime.
double nu(const ParametricModel& model, NuKind which);

struct NormalReference {
  double mean = 0.0;  ///< n nu
  double sd = 0.0;    ///< sqrt(n nu (1 - nu))
};

/// Throws DomainError as `nu` does, NumericError when nu falls outside (0, 1).
NormalReference normal_reference(const ParametricModel& model, std::size_t n, NuKind which);

enum class TestMethod { asymptotic_geometric, exact };

struct TestResult {
  std::size_t nq = 0;
  double p_value = 1.0;
  double level = 0.05;
  bool reject_h0 = false;  ///< true: follow-up judged sufficient
  TestMethod method = TestMethod::asymptotic_geometric;
  std::string note;
};

/// Geometric-law test of H0: tau_G < tau_F at significance `level`. Throws
/// DegenerateSample for all-censored samples or samples whose largest
/// observation is uncensored.
TestResult asymptotic_test(const QSummary& summary, double level);

/// Standard normal upper tail P(N(0,1) > z).
double normal_upper_tail(double z) noexcept;

/// Normal-approximation power of the nQ_n > K test once censoring has right
/// endpoint tau_g: P(N(0,1) > min((K - n nu) / sqrt(n nu (1 - nu)), 1.58)),
/// with nu^B on (tau_F, 2 tau_F) and nu^A beyond. `alpha` is the test size
/// (K = k_quantile(1 - alpha)). The censoring family of `model` is moved to
/// right endpoint tau_g. Throws DomainError for tau_g <= tau_F.
double power(const ParametricModel& model, std::size_t n, double tau_g, double alpha);

/// The nu entering `power`: nu^B of the moved model for tau_g < 2 tau_F,
/// nu^A from 2 tau_F on. Same errors as `power`.
double power_nu(const ParametricModel& model, double tau_g);

/// The same approximation for a given nu; nu >= 1 gives 1.
double power_for_nu(double nu, std::size_t n, double alpha) noexcept;

}  // namespace cure
