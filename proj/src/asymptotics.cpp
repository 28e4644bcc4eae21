#include "cure/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cure/errors.hpp"
#include "cure/quadrature.hpp"

namespace cure {

namespace {

constexpr double kThreeQuarters = 0.75;
// Cap on the standardized threshold in the power approximation.
constexpr double kPowerClamp = 1.58;

double nu_between(const ParametricModel& model, double lower) {
  const double tau_f = model.survival.right_endpoint();
  quad::Options opts;
  opts.rel_tol = 1e-14;
  const auto bps = model.censoring.breakpoints();
  const auto integral = quad::integrate(
      [&](double y) { return model.censoring.tail(y) * model.survival.density(y); }, lower, tau_f, opts, bps);
  return model.p * integral.value / (1.0 - model.p * model.censoring.tail(tau_f));
}

}  // namespace

double geometric_pmf(std::size_t k) noexcept {
  return 0.25 * std::pow(kThreeQuarters, static_cast<double>(k));
}

double geometric_pvalue(std::size_t k) noexcept { return std::pow(kThreeQuarters, static_cast<double>(k)); }

double k_quantile(double level) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("quantile level must lie in (0, 1)");
  return std::log1p(-level) / std::log(kThreeQuarters) - 1.0;
}

AsymptoticRegime regime(const ParametricModel& model) {
  const double tau_f = model.survival.right_endpoint();
  const double tau_g = model.censoring.right_endpoint();
  if (!std::isfinite(tau_g)) throw DomainError("asymptotic regimes need a finite tau_G");
  AsymptoticRegime r;
  if (tau_g < tau_f) return r;
  if (!std::isfinite(tau_f)) throw DomainError("asymptotic regimes need a finite tau_F when tau_G >= tau_F");
  if (tau_g == tau_f || tau_g == 2.0 * tau_f)
    throw DomainError("tau_G = tau_F and tau_G = 2 tau_F are excluded boundary cases");
  if (tau_g < 2.0 * tau_f) {
    r.follow_up = FollowUp::sufficient_near;
    r.nu = nu_between(model, 2.0 * tau_f - tau_g);
  } else {
    r.follow_up = FollowUp::sufficient_far;
    r.nu = nu_between(model, 0.0);
  }
  return r;
}

double nu(const ParametricModel& model, NuKind which) {
  const auto r = regime(model);
  const auto wanted = which == NuKind::A ? FollowUp::sufficient_far : FollowUp::sufficient_near;
  if (r.follow_up != wanted)
    throw DomainError(which == NuKind::A ? "nu^A needs 2 tau_F < tau_G < infinity"
                                         : "nu^B needs tau_F < tau_G < 2 tau_F");
  return *r.nu;
}

NormalReference normal_reference(const ParametricModel& model, std::size_t n, NuKind which) {
  if (n <= 2) throw DomainError("normal reference needs n > 2");
  const double v = nu(model, which);
  if (!(v > 0.0 && v < 1.0))
    throw NumericError("nu = " + std::to_string(v) + " lies outside (0, 1); no normal reference", 0.0, 0);
  const double nd = static_cast<double>(n);
  return {nd * v, std::sqrt(nd * v * (1.0 - v))};
}

TestResult asymptotic_test(const QSummary& summary, double level) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("test level must lie in (0, 1)");
  if (summary.degenerate_all_censored)
    throw DegenerateSample("all observations are censored; Q_n is not informative (M_u(n) undefined)");
  if (summary.degenerate_max_uncensored)
    throw DegenerateSample(
        "the largest observation is uncensored (M_u(n) = M(n)); no level stretch, so no evidence of cures to test");
  TestResult r;
  r.nq = summary.nq;
  r.p_value = geometric_pvalue(summary.nq);
  r.level = level;
  r.reject_h0 = r.p_value < level;
  r.method = TestMethod::asymptotic_geometric;
  if (summary.n < 100) r.note = "n < 100: the geometric approximation may be poor; consider the exact test";
  return r;
}

double normal_upper_tail(double z) noexcept { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

double power_for_nu(double nu_value, std::size_t n, double alpha) noexcept {
  const double k = std::log1p(-(1.0 - alpha)) / std::log(kThreeQuarters) - 1.0;
  if (nu_value >= 1.0) return 1.0;
  double z = std::numeric_limits<double>::infinity();
  if (nu_value > 0.0) {
    const double nd = static_cast<double>(n);
    z = (k - nd * nu_value) / std::sqrt(nd * nu_value * (1.0 - nu_value));
  }
  return normal_upper_tail(std::min(z, kPowerClamp));
}

double power_nu(const ParametricModel& model, double tau_g) {
  const double tau_f = model.survival.right_endpoint();
  if (!std::isfinite(tau_f)) throw DomainError("power needs a finite tau_F");
  if (!(tau_g > tau_f)) throw DomainError("power is defined for tau_G > tau_F only");
  const ParametricModel shifted(model.survival, model.censoring.with_right_endpoint(tau_g), model.p);
  // At tau_G = 2 tau_F the two lower limits coincide, so nu^A = nu^B there.
  const double lower = tau_g < 2.0 * tau_f ? 2.0 * tau_f - tau_g : 0.0;
  return nu_between(shifted, lower);
}

double power(const ParametricModel& model, std::size_t n, double tau_g, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("test size must lie in (0, 1)");
  return power_for_nu(power_nu(model, tau_g), n, alpha);
}

}  // namespace cure
