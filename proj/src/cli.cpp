#include "cure/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "cure/asymptotics.hpp"
#include "cure/errors.hpp"
#include "cure/exact.hpp"
#include "cure/io.hpp"
#include "cure/model.hpp"
#include "cure/sample.hpp"
#include "cure/simulate.hpp"

namespace cure {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

std::string quote_arg(const std::string& a) {
  if (!a.empty() && a.find_first_of(" \t\n'\"\\$`*?;&|<>()") == std::string::npos) return a;
  std::string q = "'";
  for (const char c : a) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

std::string command_echo(const std::vector<std::string>& args) {
  std::string s = "cure-followup";
  for (const auto& a : args) s += " " + quote_arg(a);
  return s;
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::string_view rest = text;
  while (true) {
    const auto comma = rest.find(',');
    const auto item = rest.substr(0, comma);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size())
      throw ConfigError(std::string("malformed ") + what + " list '" + text + "'");
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return out;
}

// "lo:hi:step" (inclusive) or a comma-separated list.
std::vector<double> parse_grid(const std::string& text) {
  if (text.find(':') == std::string::npos) return parse_list(text, "grid");
  std::string spec = text;
  for (char& c : spec) c = c == ':' ? ',' : c;
  const auto parts = parse_list(spec, "grid");
  if (parts.size() != 3) throw ConfigError("grid '" + text + "' must read lo:hi:step");
  const double lo = parts[0], hi = parts[1], step = parts[2];
  if (!(step > 0.0) || !(hi >= lo)) throw ConfigError("grid '" + text + "' needs step > 0 and hi >= lo");
  std::vector<double> out;
  for (std::size_t i = 0;; ++i) {
    const double v = lo + static_cast<double>(i) * step;
    if (v > hi + 1e-9 * step) break;
    out.push_back(v);
    if (out.size() > 100000) throw ConfigError("grid '" + text + "' has too many points");
  }
  return out;
}

ParametricModel make_model(const std::string& surv, const std::string& cens, double p) {
  return ParametricModel(parse_distribution(surv), parse_distribution(cens), p);
}

std::string header_lines(const std::string& command) {
  return std::string("# cure-followup ") + kToolVersion + "\n# command: " + command + "\n";
}

struct Options {
  std::string out_path;
  std::uint64_t seed = 1;
  double tol = 1e-8;

  std::string dataset;
  bool flip = false;

  double level = 0.05;
  std::string method = "asymptotic";
  std::string surv;
  std::string cens;
  double p = 1.0;

  std::size_t n = 0;
  std::string n_list;
  std::string taug_grid;
  std::size_t reps = 0;
  std::size_t sim_reps = 10000;

  std::string copula = "independence";
  std::string theta_list = "0";
  bool unconditional = false;
  bool summary_only = false;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--out", o.out_path, "Write the report to this file instead of stdout");
  cmd->add_option("--seed", o.seed, "Seed for every random stream");
  cmd->add_option("--tol", o.tol, "Relative quadrature tolerance in (0, 1e-3]");
}

void add_model(CLI::App* cmd, Options& o, bool required) {
  auto* s = cmd->add_option("--surv", o.surv, "Lifetime law F, e.g. exp:rate=1 or texp:rate=1,tau=5");
  auto* c = cmd->add_option("--cens,--cens-family", o.cens, "Censoring law G, e.g. unif:0,6");
  if (required) {
    s->required();
    c->required();
  }
  cmd->add_option("--p", o.p, "Susceptible proportion in (0, 1]");
}

std::string run_km(const Options& o, const std::string& command) {
  const std::string bytes = read_file(o.dataset);
  const auto sample = parse_dataset(bytes);
  const auto curve = kaplan_meier(o.flip ? sample.flipped() : sample);
  std::ostringstream s;
  s << header_lines(command);
  s << "# input: " << o.dataset << " fnv1a64=" << fnv1a64_hex(bytes) << " rows=" << sample.size()
    << " events=" << sample.events() << "\n";
  s << "# estimator: " << (o.flip ? "censoring distribution (censorings treated as events)" : "survival") << "\n";
  s << "time,survival,greenwood_se\n";
  for (const auto& st : curve.steps) s << num(st.time) << "," << num(st.survival) << "," << num(std::sqrt(st.variance)) << "\n";
  s << (o.flip ? "# terminal_level=" : "# cure_estimate=") << num(curve.cure_estimate) << "\n";
  return s.str();
}

std::string run_qtest(const Options& o, const std::string& command) {
  const std::string bytes = read_file(o.dataset);
  const auto sample = parse_dataset(bytes);
  const auto summary = summarize(sample);

  ordered_json report;
  report["tool"] = "cure-followup";
  report["version"] = kToolVersion;
  report["command"] = command;
  report["seed"] = o.seed;
  report["input"] = {{"path", o.dataset}, {"fnv1a64", fnv1a64_hex(bytes)}, {"rows", sample.size()}};

  ordered_json js;
  js["n"] = summary.n;
  js["events"] = summary.n_u;
  js["censored"] = summary.n - summary.n_u;
  js["M"] = summary.m;
  js["M_u"] = summary.mu ? ordered_json(*summary.mu) : ordered_json(nullptr);
  js["delta"] = summary.delta ? ordered_json(*summary.delta) : ordered_json(nullptr);
  js["level_stretch"] = summary.mu ? ordered_json(summary.m - *summary.mu) : ordered_json(nullptr);
  js["nq"] = summary.nq;
  js["q"] = summary.q;
  report["summary"] = js;

  auto result = asymptotic_test(summary, o.level);
  ordered_json jt;
  if (o.method == "exact") {
    if (o.surv.empty() || o.cens.empty()) throw ConfigError("--method exact needs --surv and --cens");
    const auto model = make_model(o.surv, o.cens, o.p);
    ExactOptions eo;
    eo.tol = o.tol;
    const auto pmf = exact_pmf(model, summary.n, eo);
    result.method = TestMethod::exact;
    result.p_value = pmf.upper_tail(summary.nq);
    result.reject_h0 = result.p_value < o.level;
    result.note.clear();
    jt["method"] = "exact";
    jt["model"] = {{"surv", model.survival.to_string()}, {"cens", model.censoring.to_string()}, {"p", model.p}};
    jt["d_n"] = pmf.d_n;
    jt["quad_tolerance"] = pmf.quad_tolerance;
  } else {
    jt["method"] = "asymptotic-geometric";
  }
  jt["nq"] = result.nq;
  jt["p_value"] = result.p_value;
  jt["level"] = result.level;
  jt["reject_h0"] = result.reject_h0;
  jt["decision"] = result.reject_h0 ? "sufficient" : "insufficient";
  jt["conclusion"] = result.reject_h0 ? "H0: tau_G < tau_F rejected; follow-up judged sufficient"
                                      : "H0: tau_G < tau_F not rejected; follow-up judged insufficient";
  if (!result.note.empty()) jt["note"] = result.note;
  report["test"] = jt;
  return report.dump(2) + "\n";
}

std::string run_exact(const Options& o, const std::string& command) {
  const auto model = make_model(o.surv, o.cens, o.p);
  ExactOptions eo;
  eo.tol = o.tol;
  const auto pmf = exact_pmf(model, o.n, eo);
  std::ostringstream s;
  s << header_lines(command);
  s << "# model: surv=" << model.survival.to_string() << " cens=" << model.censoring.to_string() << " p=" << num(model.p)
    << "\n";
  s << "# d_n=" << num(pmf.d_n) << " quad_tolerance=" << num(pmf.quad_tolerance) << "\n";
  s << "k,probability\n";
  for (std::size_t k = 0; k < pmf.probs.size(); ++k) s << k << "," << num(pmf.probs[k]) << "\n";
  return s.str();
}

std::string run_power(const Options& o, const std::string& command) {
  const auto model = make_model(o.surv, o.cens, o.p);
  const auto grid = parse_grid(o.taug_grid);
  if (!(o.level > 0.0 && o.level < 1.0)) throw ConfigError("--level must lie in (0, 1)");
  const double tau_f = model.survival.right_endpoint();
  if (!std::isfinite(tau_f)) throw UnsupportedModel("power needs a lifetime law with a finite right endpoint");
  const double k = k_quantile(1.0 - o.level);

  std::vector<PowerPoint> mc;
  if (o.reps > 0) mc = mc_power(SimConfig{model, {}, o.n, o.reps, o.seed, 0}, grid, o.level);

  std::ostringstream s;
  s << header_lines(command);
  s << "# K=" << num(k) << " surv=" << model.survival.to_string() << " p=" << num(model.p) << "\n";
  s << "tau_g,regime,nu,approx_power";
  if (!mc.empty()) s << ",mc_power,mc_se";
  s << "\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double tau = grid[i];
    if (tau <= tau_f) {
      s << num(tau) << ",null,,";
    } else {
      const double v = power_nu(model, tau);
      s << num(tau) << "," << (tau < 2.0 * tau_f ? "B" : "A") << "," << num(v) << ","
        << num(power_for_nu(v, o.n, o.level));
    }
    if (!mc.empty()) s << "," << num(mc[i].rate) << "," << num(mc[i].se);
    s << "\n";
  }
  return s.str();
}

std::string run_simulate(const Options& o, const std::string& command) {
  const auto model = make_model(o.surv, o.cens, o.p);
  const auto thetas = parse_list(o.theta_list, "theta");
  std::vector<std::size_t> sizes;
  for (const double v : parse_list(o.n_list, "sample size")) {
    if (!(v >= 1.0) || v != std::floor(v)) throw ConfigError("sample sizes must be positive integers");
    sizes.push_back(static_cast<std::size_t>(v));
  }
  std::ostringstream s;
  s << header_lines(command);
  s << "# model: surv=" << model.survival.to_string() << " cens=" << model.censoring.to_string() << " p=" << num(model.p)
    << " conditional=" << (o.unconditional ? "false" : "true") << "\n";
  if (o.summary_only)
    s << "copula,theta,n,reps,n_eff,all_censored,max_uncensored,mean,mean_se\n";
  else
    s << "copula,theta,n,k,probability,se\n";
  for (const double theta : thetas) {
    const auto copula = parse_copula(o.copula, theta);
    const char* family = copula.family == CopulaFamily::frank ? "frank"
                         : copula.family == CopulaFamily::amh ? "amh"
                                                              : "independence";
    for (const std::size_t n : sizes) {
      const auto r = mc_pmf(SimConfig{model, copula, n, o.sim_reps, o.seed, 0}, !o.unconditional);
      const std::string prefix = std::string(family) + "," + num(copula.theta) + "," + std::to_string(n) + ",";
      if (o.summary_only) {
        s << prefix << r.reps << "," << r.n_eff << "," << r.all_censored << "," << r.max_uncensored << "," << num(r.mean)
          << "," << num(r.mean_se) << "\n";
        continue;
      }
      const std::size_t rows = o.unconditional ? n : (n >= 2 ? n - 1 : 1);
      for (std::size_t k = 0; k < rows; ++k) s << prefix << k << "," << num(r.probs[k]) << "," << num(r.se[k]) << "\n";
    }
  }
  return s.str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Sufficient follow-up testing with the Q_n statistic", "cure-followup"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  auto* km = app.add_subcommand("km", "Kaplan-Meier table with Greenwood standard errors");
  km->add_option("dataset", o.dataset, "CSV with time,status rows")->required();
  km->add_flag("--flip", o.flip, "Estimate the censoring distribution instead");
  add_common(km, o);

  auto* qtest = app.add_subcommand("qtest", "Test H0: tau_G < tau_F with the statistic nQ_n");
  qtest->add_option("dataset", o.dataset, "CSV with time,status rows")->required();
  qtest->add_option("--level", o.level, "Significance level");
  qtest->add_option("--method", o.method, "asymptotic or exact")
      ->check(CLI::IsMember({"asymptotic", "exact"}, CLI::ignore_case));
  add_model(qtest, o, false);
  add_common(qtest, o);

  auto* exact = app.add_subcommand("exact", "Exact pmf of nQ_n given a non-degenerate sample");
  exact->add_option("--n", o.n, "Sample size (> 2)")->required();
  add_model(exact, o, true);
  add_common(exact, o);

  auto* power = app.add_subcommand("power", "Approximate and simulated power over a tau_G grid");
  power->add_option("--n", o.n, "Sample size")->required();
  power->add_option("--taug-grid", o.taug_grid, "lo:hi:step or a comma-separated list")->required();
  power->add_option("--level", o.level, "Test size alpha");
  power->add_option("--reps", o.reps, "Monte Carlo replicates per grid point (0: approximation only)");
  add_model(power, o, true);
  add_common(power, o);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo pmf of nQ_n, optionally under copula dependence");
  simulate->add_option("--n", o.n_list, "Sample size or comma-separated sizes")->required();
  simulate->add_option("--copula", o.copula, "independence, frank or amh");
  simulate->add_option("--theta", o.theta_list, "Copula parameter or comma-separated values");
  simulate->add_option("--reps", o.sim_reps, "Replicates per (theta, n)");
  simulate->add_flag("--unconditional", o.unconditional, "Keep degenerate samples (counted as nQ_n = 0)");
  simulate->add_flag("--summary", o.summary_only, "One row per (theta, n) instead of the pmf");
  add_model(simulate, o, true);
  add_common(simulate, o);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return exit_config;
  }
  for (auto& c : o.method) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));

  const std::string command = command_echo(args);
  std::string report;
  try {
    if (!(o.tol > 0.0 && o.tol <= 1e-3)) throw ConfigError("--tol must lie in (0, 1e-3]");
    if (km->parsed()) report = run_km(o, command);
    if (qtest->parsed()) report = run_qtest(o, command);
    if (exact->parsed()) report = run_exact(o, command);
    if (power->parsed()) report = run_power(o, command);
    if (simulate->parsed()) report = run_simulate(o, command);
  } catch (const DegenerateSample& e) {
    err << "degenerate sample: " << e.what() << "\n";
    return exit_degenerate;
  } catch (const UnsupportedModel& e) {
    err << "unsupported model: " << e.what() << "\n";
    return exit_unsupported;
  } catch (const NumericError& e) {
    err << "numerical failure: " << e.what() << " (achieved error " << e.achieved_error() << ")\n";
    return exit_numeric;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return exit_config;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_config;
  }

  if (o.out_path.empty()) {
    out << report;
    out.flush();
    return exit_ok;
  }
  std::ofstream file(o.out_path, std::ios::binary);
  file << report;
  if (!file) {
    err << "error: cannot write '" << o.out_path << "'\n";
    return exit_config;
  }
  return exit_ok;
}

}  // namespace cure
