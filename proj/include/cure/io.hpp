#pragma once

// Dataset files: `time,status` CSV with an optional header row, status 1 for
// an observed event and 0 for a censoring.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "cure/sample.hpp"

namespace cure {

/// Parses dataset text. Throws ParseError (1-based line) on a malformed row
/// and InvalidInput when there are no data rows.
SurvivalSample parse_dataset(std::string_view text);

/// Reads and parses a dataset file. Throws InvalidInput when the file cannot
/// be read.
SurvivalSample read_dataset(const std::filesystem::path& path);

/// Header plus one row per observation; times use the shortest decimal form
/// that parses back to the same double.
std::string format_dataset(const SurvivalSample& sample);
void write_dataset(const std::filesystem::path& path, const SurvivalSample& sample);

std::string read_file(const std::filesystem::path& path);

/// 64-bit FNV-1a of the bytes, as 16 lowercase hex digits.
std::string fnv1a64_hex(std::string_view bytes);

/// Shape of a dataset at its right end.
struct Geometry {
  std::size_t n = 0;
  std::size_t censored = 0;
  double m = 0.0;    ///< largest time, a censoring
  double mu = 0.0;   ///< largest event time
  std::size_t nq = 0;  ///< events in [2 mu - m, mu)
};

/// 4248 records, 2075 censored, M = 503, M_u = 435, three events in [367, 435).
Geometry type_9380_geometry();
/// 54375 records, 20482 censored, M = 431, M_u = 420, thirteen events in [409, 420).
Geometry other_types_geometry();

/// Random sample with exactly the given geometry. Times lie on a 0.01 grid.
/// Throws ConfigError when the geometry is infeasible.
SurvivalSample synthesize_geometry(const Geometry& geometry, std::uint64_t seed);

}  // namespace cure
