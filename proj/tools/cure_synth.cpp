// Writes a synthetic dataset whose right end has a prescribed geometry.

#include <CLI11.hpp>

#include <iostream>

#include "cure/errors.hpp"
#include "cure/io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Synthetic time,status datasets with a fixed right-end geometry", "cure-synth"};
  std::string preset;
  cure::Geometry g;
  std::uint64_t seed = 1;
  std::string out_path;
  app.add_option("--preset", preset, "type9380 or other-types")
      ->check(CLI::IsMember({"type9380", "other-types"}));
  app.add_option("--n", g.n, "Records");
  app.add_option("--censored", g.censored, "Censored records");
  app.add_option("--m", g.m, "Largest time (censored)");
  app.add_option("--mu", g.mu, "Largest event time");
  app.add_option("--nq", g.nq, "Events in [2 mu - m, mu)");
  app.add_option("--seed", seed, "Seed");
  app.add_option("--out", out_path, "Output file (default stdout)");
  CLI11_PARSE(app, argc, argv);

  if (preset == "type9380") g = cure::type_9380_geometry();
  if (preset == "other-types") g = cure::other_types_geometry();
  try {
    const auto sample = cure::synthesize_geometry(g, seed);
    if (out_path.empty())
      std::cout << cure::format_dataset(sample);
    else
      cure::write_dataset(out_path, sample);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
