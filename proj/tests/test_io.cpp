#include <doctest.h>

#include <filesystem>

#include "cure/errors.hpp"
#include "cure/io.hpp"
#include "cure/sample.hpp"

namespace {

std::size_t parse_error_line(std::string_view text) {
  try {
    cure::parse_dataset(text);
  } catch (const cure::ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST_CASE("dataset parsing accepts headers, comments and blank lines") {
  const auto s = cure::parse_dataset("# a comment\n\ntime,status\r\n1.5,1\n 2 , 0 \n\n3e0,1\n");
  REQUIRE(s.size() == 3);
  CHECK(s.events() == 2);
  CHECK(s.observations()[1].time == 2.0);
  CHECK_FALSE(s.observations()[1].event);

  const auto no_header = cure::parse_dataset("4,0\n1,1");
  CHECK(no_header.size() == 2);
}

TEST_CASE("malformed rows report their line") {
  CHECK(parse_error_line("time,status\n1,1\nx,0\n") == 3);
  CHECK(parse_error_line("1,1\n2,2\n") == 2);
  CHECK(parse_error_line("1,1\n-2,0\n") == 2);
  CHECK(parse_error_line("1,1\n2\n") == 2);
  CHECK(parse_error_line("1,1\n2,0,5\n") == 2);
  CHECK(parse_error_line("# c\n\n1,1\ninf,1\n") == 4);
  CHECK(parse_error_line("1,1\nnan,0\n") == 2);
  CHECK(parse_error_line("time,status\nstatus,time\n") == 2);
  CHECK(parse_error_line("1,yes\n") == 1);
  CHECK_THROWS_AS(cure::parse_dataset(""), cure::InvalidInput);
  CHECK_THROWS_AS(cure::parse_dataset("time,status\n# nothing\n"), cure::InvalidInput);
  CHECK_THROWS_AS(cure::read_dataset("/nonexistent/path.csv"), cure::InvalidInput);
}

TEST_CASE("format and parse round trip exactly") {
  const cure::SurvivalSample s({{0.1, true}, {1.0 / 3.0, false}, {12345.678, true}, {0.0, false}, {1e-300, true}});
  const auto text = cure::format_dataset(s);
  CHECK(text.rfind("time,status\n", 0) == 0);
  const auto back = cure::parse_dataset(text);
  REQUIRE(back.size() == s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(back.observations()[i].time == s.observations()[i].time);
    CHECK(back.observations()[i].event == s.observations()[i].event);
  }
  CHECK(cure::format_dataset(back) == text);

  const auto path = std::filesystem::temp_directory_path() / "cure_io_roundtrip.csv";
  cure::write_dataset(path, s);
  CHECK(cure::read_file(path) == text);
  std::filesystem::remove(path);
}

TEST_CASE("FNV-1a reference values") {
  CHECK(cure::fnv1a64_hex("") == "cbf29ce484222325");
  CHECK(cure::fnv1a64_hex("a") == "af63dc4c8601ec8c");
  CHECK(cure::fnv1a64_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("synthetic datasets reproduce the requested geometry") {
  for (const auto& g : {cure::type_9380_geometry(), cure::other_types_geometry()}) {
    const auto s = cure::synthesize_geometry(g, 11);
    const auto q = cure::summarize(s);
    CHECK(q.n == g.n);
    CHECK(q.n - q.n_u == g.censored);
    CHECK(q.m == g.m);
    CHECK(*q.mu == g.mu);
    CHECK(q.nq == g.nq);
    CHECK(cure::format_dataset(cure::synthesize_geometry(g, 11)) == cure::format_dataset(s));
    CHECK(cure::format_dataset(cure::synthesize_geometry(g, 12)) != cure::format_dataset(s));
  }
  CHECK(cure::type_9380_geometry().n == 4248);
  CHECK(cure::other_types_geometry().n == 54375);
}

TEST_CASE("infeasible geometries are rejected") {
  CHECK_THROWS_AS(cure::synthesize_geometry({10, 0, 5.0, 4.0, 1}, 1), cure::ConfigError);
  CHECK_THROWS_AS(cure::synthesize_geometry({10, 10, 5.0, 4.0, 1}, 1), cure::ConfigError);
  CHECK_THROWS_AS(cure::synthesize_geometry({10, 5, 4.0, 4.0, 1}, 1), cure::ConfigError);
  CHECK_THROWS_AS(cure::synthesize_geometry({10, 5, 5.0, 4.0, 5}, 1), cure::ConfigError);
  CHECK_THROWS_AS(cure::synthesize_geometry({10, 5, 10.0, 4.0, 1}, 1), cure::ConfigError);
  CHECK_THROWS_AS(cure::synthesize_geometry({10, 5, 5.001, 4.0, 1}, 1), cure::ConfigError);
}
