#include "cure/model.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>

#include "cure/errors.hpp"

namespace cure {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// 1 - exp(-rate * tau)
double texp_mass(const TruncatedExponential& d) { return -std::expm1(-d.rate * d.tau); }

std::string format_number(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

Distribution::Distribution(Family family) : family_(family) {
  std::visit(Overloaded{
                 [](const Exponential& d) {
                   if (!(d.rate > 0.0) || !std::isfinite(d.rate))
                     throw ConfigError("exponential rate must be positive and finite");
                 },
                 [](const Uniform& d) {
                   if (!(d.a >= 0.0) || !(d.b > d.a) || !std::isfinite(d.b))
                     throw ConfigError("uniform needs 0 <= a < b < infinity");
                 },
                 [](const TruncatedExponential& d) {
                   if (!(d.rate > 0.0) || !std::isfinite(d.rate))
                     throw ConfigError("truncated exponential rate must be positive and finite");
                   if (!(d.tau > 0.0) || !std::isfinite(d.tau))
                     throw ConfigError("truncation point must be positive and finite");
                 },
             },
             family_);
}

double Distribution::cdf(double t) const noexcept {
  if (!(t > 0.0)) return 0.0;
  return std::visit(Overloaded{
                        [&](const Exponential& d) { return -std::expm1(-d.rate * t); },
                        [&](const Uniform& d) {
                          if (t <= d.a) return 0.0;
                          if (t >= d.b) return 1.0;
                          return (t - d.a) / (d.b - d.a);
                        },
                        [&](const TruncatedExponential& d) {
                          if (t >= d.tau) return 1.0;
                          return -std::expm1(-d.rate * t) / texp_mass(d);
                        },
                    },
                    family_);
}

double Distribution::tail(double t) const noexcept {
  if (!(t > 0.0)) return 1.0;
  return std::visit(Overloaded{
                        [&](const Exponential& d) { return std::exp(-d.rate * t); },
                        [&](const Uniform& d) {
                          if (t <= d.a) return 1.0;
                          if (t >= d.b) return 0.0;
                          return (d.b - t) / (d.b - d.a);
                        },
                        [&](const TruncatedExponential& d) {
                          if (t >= d.tau) return 0.0;
                          return std::exp(-d.rate * t) * -std::expm1(-d.rate * (d.tau - t)) /
                                 texp_mass(d);
                        },
                    },
                    family_);
}

double Distribution::density(double t) const noexcept {
  if (t < 0.0) return 0.0;
  return std::visit(Overloaded{
                        [&](const Exponential& d) { return d.rate * std::exp(-d.rate * t); },
                        [&](const Uniform& d) {
                          return (t < d.a || t > d.b) ? 0.0 : 1.0 / (d.b - d.a);
                        },
                        [&](const TruncatedExponential& d) {
                          if (t > d.tau) return 0.0;
                          return d.rate * std::exp(-d.rate * t) / texp_mass(d);
                        },
                    },
                    family_);
}

double Distribution::quantile(double u) const noexcept {
  if (!(u > 0.0)) {
    if (const auto* d = std::get_if<Uniform>(&family_)) return d->a;
    return 0.0;
  }
  if (u >= 1.0) return right_endpoint();
  return std::visit(Overloaded{
                        [&](const Exponential& d) { return -std::log1p(-u) / d.rate; },
                        [&](const Uniform& d) { return d.a + u * (d.b - d.a); },
                        [&](const TruncatedExponential& d) {
                          return -std::log1p(-u * texp_mass(d)) / d.rate;
                        },
                    },
                    family_);
}

double Distribution::right_endpoint() const noexcept {
  return std::visit(Overloaded{
                        [](const Exponential&) { return kInf; },
                        [](const Uniform& d) { return d.b; },
                        [](const TruncatedExponential& d) { return d.tau; },
                    },
                    family_);
}

std::vector<double> Distribution::breakpoints() const {
  return std::visit(Overloaded{
                        [](const Exponential&) { return std::vector<double>{}; },
                        [](const Uniform& d) {
                          return d.a > 0.0 ? std::vector<double>{d.a, d.b} : std::vector<double>{d.b};
                        },
                        [](const TruncatedExponential& d) { return std::vector<double>{d.tau}; },
                    },
                    family_);
}

Distribution Distribution::scaled(double c) const {
  if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("scale factor must be positive");
  return std::visit(Overloaded{
                        [&](const Exponential& d) { return exponential(d.rate / c); },
                        [&](const Uniform& d) { return uniform(d.a * c, d.b * c); },
                        [&](const TruncatedExponential& d) {
                          return truncated_exponential(d.rate / c, d.tau * c);
                        },
                    },
                    family_);
}

Distribution Distribution::with_right_endpoint(double tau) const {
  return std::visit(Overloaded{
                        [&](const Exponential&) -> Distribution {
                          throw ConfigError("exponential family has no finite right endpoint");
                        },
                        [&](const Uniform& d) { return uniform(d.a, tau); },
                        [&](const TruncatedExponential& d) { return truncated_exponential(d.rate, tau); },
                    },
                    family_);
}

std::string Distribution::to_string() const {
  return std::visit(Overloaded{
                        [](const Exponential& d) { return "exp:rate=" + format_number(d.rate); },
                        [](const Uniform& d) {
                          return "unif:" + format_number(d.a) + "," + format_number(d.b);
                        },
                        [](const TruncatedExponential& d) {
                          return "texp:rate=" + format_number(d.rate) + ",tau=" + format_number(d.tau);
                        },
                    },
                    family_);
}

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view text, std::string_view spec) {
  text = trim(text);
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty())
    throw ConfigError("bad number '" + std::string(text) + "' in model spec '" + std::string(spec) + "'");
  return value;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

// Parses "key=value" pairs in any order; every key in `keys` is required.
std::vector<double> keyed(std::string_view body, std::initializer_list<std::string_view> keys,
                          std::string_view spec) {
  std::vector<double> values(keys.size(), std::numeric_limits<double>::quiet_NaN());
  std::vector<bool> seen(keys.size(), false);
  for (auto part : split(body, ',')) {
    auto eq = part.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("expected key=value in model spec '" + std::string(spec) + "'");
    auto key = trim(part.substr(0, eq));
    std::size_t idx = 0;
    for (auto k : keys) {
      if (k == key) break;
      ++idx;
    }
    if (idx == keys.size() || seen[idx])
      throw ConfigError("unexpected key '" + std::string(key) + "' in model spec '" + std::string(spec) + "'");
    seen[idx] = true;
    values[idx] = parse_number(part.substr(eq + 1), spec);
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end())
    throw ConfigError("missing parameter in model spec '" + std::string(spec) + "'");
  return values;
}

}  // namespace

Distribution parse_distribution(std::string_view text) {
  const std::string spec = lower(trim(text));
  auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw ConfigError("model spec '" + std::string(text) + "' lacks ':'");
  const std::string_view family = trim(std::string_view(spec).substr(0, colon));
  const std::string_view body = std::string_view(spec).substr(colon + 1);

  if (family == "exp") {
    auto v = keyed(body, {"rate"}, text);
    return Distribution::exponential(v[0]);
  }
  if (family == "unif") {
    auto parts = split(body, ',');
    if (parts.size() != 2) throw ConfigError("unif expects 'unif:<a>,<b>'");
    return Distribution::uniform(parse_number(parts[0], text), parse_number(parts[1], text));
  }
  if (family == "texp") {
    auto v = keyed(body, {"rate", "tau"}, text);
    return Distribution::truncated_exponential(v[0], v[1]);
  }
  throw ConfigError("unknown distribution family '" + std::string(family) + "'");
}

ParametricModel::ParametricModel(Distribution surv, Distribution cens, double p_)
    : survival(std::move(surv)), censoring(std::move(cens)), p(p_) {
  if (!(p > 0.0 && p <= 1.0)) throw ConfigError("susceptible proportion p must lie in (0, 1]");
}

ParametricModel ParametricModel::scaled(double c) const {
  return ParametricModel(survival.scaled(c), censoring.scaled(c), p);
}

double fstar_cdf(const ParametricModel& model, double t) noexcept {
  return model.p * model.survival.cdf(t);
}

double fstar_tail(const ParametricModel& model, double t) noexcept {
  if (model.p == 1.0) return model.survival.tail(t);
  return 1.0 - model.p * model.survival.cdf(t);
}

double fstar_density(const ParametricModel& model, double t) noexcept {
  return model.p * model.survival.density(t);
}

double h_tail(const ParametricModel& model, double t) noexcept {
  return fstar_tail(model, t) * model.censoring.tail(t);
}

double h_cdf(const ParametricModel& model, double t) noexcept { return 1.0 - h_tail(model, t); }

double tau_fstar(const ParametricModel& model) noexcept {
  return model.p < 1.0 ? kInf : model.survival.right_endpoint();
}

double tau_h(const ParametricModel& model) noexcept {
  return std::min(tau_fstar(model), model.censoring.right_endpoint());
}

}  // namespace cure
