#include "cure/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "cure/errors.hpp"
#include "cure/simulate.hpp"

namespace cure {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_number(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::string shortest(double x) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

constexpr std::int64_t kCents = 100;

}  // namespace

SurvivalSample parse_dataset(std::string_view text) {
  std::vector<CensoredObservation> obs;
  std::size_t line_no = 0;
  bool seen_content = false;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    const auto raw = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;

    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const bool first = !seen_content;
    seen_content = true;

    const auto comma = line.find(',');
    if (comma == std::string_view::npos) throw ParseError(line_no, "expected two comma-separated fields");
    const auto time_field = trim(line.substr(0, comma));
    const auto status_field = trim(line.substr(comma + 1));
    if (status_field.find(',') != std::string_view::npos) throw ParseError(line_no, "expected two comma-separated fields");

    double time = 0.0;
    if (!parse_number(time_field, time)) {
      if (first) continue;  // header row
      throw ParseError(line_no, "time '" + std::string(time_field) + "' is not a number");
    }
    if (!std::isfinite(time) || time < 0.0)
      throw ParseError(line_no, "time must be finite and nonnegative, got '" + std::string(time_field) + "'");
    if (status_field != "0" && status_field != "1")
      throw ParseError(line_no, "status must be 0 or 1, got '" + std::string(status_field) + "'");
    obs.push_back({time, status_field == "1"});
  }
  if (obs.empty()) throw InvalidInput("dataset has no observations");
  return SurvivalSample(std::move(obs));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

SurvivalSample read_dataset(const std::filesystem::path& path) { return parse_dataset(read_file(path)); }

std::string format_dataset(const SurvivalSample& sample) {
  std::string out = "time,status\n";
  for (const auto& o : sample.observations()) {
    out += shortest(o.time);
    out += o.event ? ",1\n" : ",0\n";
  }
  return out;
}

void write_dataset(const std::filesystem::path& path, const SurvivalSample& sample) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write '" + path.string() + "'");
  out << format_dataset(sample);
  if (!out) throw InvalidInput("write to '" + path.string() + "' failed");
}

std::string fnv1a64_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = kHex[h & 0xf];
  return out;
}

Geometry type_9380_geometry() { return {4248, 2075, 503.0, 435.0, 3}; }

Geometry other_types_geometry() { return {54375, 20482, 431.0, 420.0, 13}; }

SurvivalSample synthesize_geometry(const Geometry& g, std::uint64_t seed) {
  const auto m_c = static_cast<std::int64_t>(std::llround(g.m * kCents));
  const auto mu_c = static_cast<std::int64_t>(std::llround(g.mu * kCents));
  const std::int64_t delta_c = 2 * mu_c - m_c;
  if (std::abs(g.m * kCents - static_cast<double>(m_c)) > 1e-6 || std::abs(g.mu * kCents - static_cast<double>(mu_c)) > 1e-6)
    throw ConfigError("geometry times must lie on a 0.01 grid");
  if (g.censored < 1 || g.censored >= g.n) throw ConfigError("geometry needs at least one censored and one event");
  if (!(mu_c > 0 && m_c > mu_c)) throw ConfigError("geometry needs 0 < M_u < M");
  const std::size_t events = g.n - g.censored;
  if (g.nq + 1 > events) throw ConfigError("geometry has fewer events than nq + 1");
  const std::size_t early = events - g.nq - 1;
  if (early > 0 && delta_c <= 0) throw ConfigError("geometry with 2 M_u <= M cannot hold events below 2 M_u - M");
  const std::int64_t lo = std::max<std::int64_t>(delta_c, 0);
  if (g.nq > 0 && mu_c <= lo) throw ConfigError("geometry leaves no room for events in [2 M_u - M, M_u)");

  CounterRng rng(seed, 0);
  auto draw = [&](std::int64_t from, std::int64_t to) {  // integer cents in [from, to)
    const auto span = static_cast<double>(to - from);
    return from + std::min(static_cast<std::int64_t>(rng.uniform() * span), to - from - 1);
  };
  std::vector<CensoredObservation> obs;
  obs.reserve(g.n);
  auto add = [&](std::int64_t cents, bool event) { obs.push_back({static_cast<double>(cents) / kCents, event}); };

  add(mu_c, true);
  for (std::size_t i = 0; i < g.nq; ++i) add(draw(lo, mu_c), true);
  for (std::size_t i = 0; i < early; ++i) add(draw(0, delta_c), true);
  add(m_c, false);
  for (std::size_t i = 1; i < g.censored; ++i) add(draw(0, m_c), false);
  return SurvivalSample(std::move(obs));
}

}  // namespace cure
