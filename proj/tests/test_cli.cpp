#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "cure/cli.hpp"
#include "cure/io.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

// Runs from the golden directory so relative dataset paths in the reports
// do not depend on the build tree.
Run run(std::vector<std::string> args) {
  const auto previous = fs::current_path();
  fs::current_path(CURE_GOLDEN_DIR);
  std::ostringstream out, err;
  Run r;
  r.code = cure::run_cli(args, out, err);
  fs::current_path(previous);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string golden(const std::string& name) { return cure::read_file(fs::path(CURE_GOLDEN_DIR) / name); }

std::string body_without_comments(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line))
    if (!line.starts_with("#")) out += line + "\n";
  return out;
}

}  // namespace

TEST_CASE("reports match the golden files byte for byte") {
  const std::vector<std::pair<std::string, std::vector<std::string>>> cases = {
      {"km_small.golden", {"km", "km_small.csv"}},
      {"qtest_small.golden", {"qtest", "qtest_small.csv", "--level", "0.05"}},
      {"qtest_exact.golden",
       {"qtest", "qtest_small.csv", "--method", "exact", "--surv", "exp:rate=1", "--cens", "unif:0,12", "--p", "0.8"}},
      {"exact_n8.golden", {"exact", "--n", "8", "--surv", "exp:rate=1", "--cens", "unif:0,3", "--p", "0.8"}},
      {"simulate_summary.golden",
       {"simulate", "--n", "20,40", "--copula", "frank", "--theta", "-6,0", "--reps", "500", "--seed", "7", "--summary",
        "--surv", "exp:rate=1", "--cens", "unif:0,6", "--p", "0.8"}},
      {"power_grid.golden",
       {"power", "--n", "50", "--taug-grid", "4:12:2", "--reps", "1000", "--seed", "3", "--surv", "texp:rate=1,tau=5",
        "--cens", "unif:0,8", "--p", "0.8"}},
  };
  for (const auto& [file, args] : cases) {
    CAPTURE(file);
    const auto r = run(args);
    CHECK(r.code == 0);
    CHECK(r.err.empty());
    CHECK(r.out == golden(file));
  }
}

TEST_CASE("the same seed gives identical bytes and the worker cap does not matter") {
  const std::vector<std::string> args = {"simulate", "--n", "30",         "--copula", "amh",       "--theta", "-1,0.5",
                                         "--reps",   "400", "--seed",     "99",       "--surv",    "exp:rate=2",
                                         "--cens",   "unif:0,2"};
  const auto a = run(args);
  const auto b = run(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  ::setenv("CURE_FOLLOWUP_THREADS", "1", 1);
  const auto single = run(args);
  ::setenv("CURE_FOLLOWUP_THREADS", "7", 1);
  const auto seven = run(args);
  ::unsetenv("CURE_FOLLOWUP_THREADS");
  CHECK(single.out == a.out);
  CHECK(seven.out == a.out);

  auto other_seed = args;
  other_seed[10] = "100";
  CHECK(body_without_comments(run(other_seed).out) != body_without_comments(a.out));
}

TEST_CASE("frank with theta 0 prints the independence pmf") {
  const std::vector<std::string> common = {"--n", "25", "--reps", "300", "--surv", "exp:rate=1", "--cens", "unif:0,3"};
  auto frank = std::vector<std::string>{"simulate", "--copula", "frank", "--theta", "0"};
  auto indep = std::vector<std::string>{"simulate", "--copula", "independence"};
  frank.insert(frank.end(), common.begin(), common.end());
  indep.insert(indep.end(), common.begin(), common.end());
  auto strip_family = [](const std::string& text) {
    std::istringstream in(body_without_comments(text));
    std::string line, out;
    std::getline(in, line);  // column header
    while (std::getline(in, line)) out += line.substr(line.find(',')) + "\n";
    return out;
  };
  const auto a = run(frank), b = run(indep);
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  CHECK(strip_family(a.out) == strip_family(b.out));
  CHECK(std::count(a.out.begin(), a.out.end(), '\n') == 3 + 1 + 24);
}

TEST_CASE("--out writes the report to a file") {
  const auto path = fs::temp_directory_path() / "cure_cli_out.txt";
  const auto r = run({"km", "km_small.csv", "--out", path.string()});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  auto expected = golden("km_small.golden");
  const auto echo = expected.find("km km_small.csv");
  expected.replace(echo, 15, "km km_small.csv --out " + path.string());
  CHECK(cure::read_file(path) == expected);
  fs::remove(path);
}

TEST_CASE("flipped Kaplan-Meier reports the terminal level") {
  const auto r = run({"km", "km_small.csv", "--flip"});
  CHECK(r.code == 0);
  CHECK(r.out.find("# terminal_level=") != std::string::npos);
  CHECK(r.out.find("censoring distribution") != std::string::npos);
}

TEST_CASE("exit codes") {
  CHECK(run({}).code == 1);
  CHECK(run({"bogus"}).code == 1);
  CHECK(run({"km"}).code == 1);
  CHECK(run({"km", "missing.csv"}).code == 1);
  CHECK(run({"qtest", "qtest_small.csv", "--method", "bootstrap"}).code == 1);
  CHECK(run({"exact", "--n", "10", "--surv", "weibull:1", "--cens", "unif:0,3"}).code == 1);
  CHECK(run({"exact", "--n", "10", "--surv", "exp:rate=1", "--cens", "unif:0,3", "--tol", "0.1"}).code == 1);
  CHECK(run({"simulate", "--n", "10", "--copula", "amh", "--theta", "2", "--surv", "exp:rate=1", "--cens", "unif:0,3"})
            .code == 1);
  CHECK(run({"power", "--n", "10", "--taug-grid", "1:0:1", "--surv", "texp:rate=1,tau=2", "--cens", "unif:0,3"}).code ==
        1);

  const auto malformed = run({"km", "malformed.csv"});
  CHECK(malformed.code == 1);
  CHECK(malformed.err.find("line 3") != std::string::npos);

  const auto degenerate = run({"qtest", "all_censored.csv"});
  CHECK(degenerate.code == 2);
  CHECK(degenerate.out.empty());

  CHECK(run({"exact", "--n", "10", "--surv", "exp:rate=1", "--cens", "exp:rate=1"}).code == 3);
  CHECK(run({"power", "--n", "10", "--taug-grid", "6,8", "--surv", "exp:rate=1", "--cens", "unif:0,3"}).code == 3);

  CHECK(run({"--help"}).code == 0);
  CHECK(run({"--version"}).code == 0);
}
