#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qhd/nonlinear.hpp"

namespace qhd::lab {

/// Sections of `key = value` lines. `#` and `;` start comments.
class IniDocument {
 public:
  static IniDocument parse(std::string_view text);

  bool has(const std::string& section, const std::string& key) const;
  std::optional<std::string> get(const std::string& section, const std::string& key) const;
  std::vector<std::string> sections() const;
  std::vector<std::string> keys(const std::string& section) const;

 private:
  std::map<std::string, std::map<std::string, std::string>> values_;
};

enum class Engine { schrodinger, madelung, groundstate, compare, kinetics, check };
const char* to_string(Engine engine);

struct ExperimentConfig {
  // [grid]
  std::size_t n_particles = 1;
  std::size_t dims_per_particle = 1;
  std::vector<std::size_t> points;
  std::vector<double> lengths;
  bool allow_high_rank = false;

  // [physics]
  double hbar = 1.0;
  double mass = 1.0;

  // [potential]
  std::string external = "none";  ///< none | harmonic | samples
  double omega = 1.0;
  std::vector<double> center;
  std::filesystem::path external_file;
  std::string pairwise = "none";  ///< none | radial
  std::filesystem::path pairwise_file;

  // [nonlinearity]
  NonlinearTerm nonlinear;

  // [initial_state]
  std::string initial = "gaussian";  ///< plane_wave | gaussian | periodic_gaussian | harmonic | uniform | file
  std::vector<double> wavenumbers;
  std::vector<double> widths;
  std::vector<double> centers;
  std::filesystem::path initial_file;

  // [run]
  Engine engine = Engine::schrodinger;
  std::optional<double> dt;
  std::size_t steps = 1;
  std::size_t record_every = 1;
  std::uint64_t seed = 0;
  double tolerance = 1e-10;
  bool dealias = false;
  bool spectral_filter = false;

  // [output]
  std::filesystem::path directory = "out";
  bool write_csv = true;
  bool write_snapshot = true;
  bool write_plot = true;

  // [kinetics]
  std::size_t monads = 0;
  std::size_t monad_dims = 1;
  double monad_mass = 1.0;
  std::vector<double> box;
  double temperature = 1.0;
  std::vector<double> axis_temperatures;
  std::vector<double> drift;
  double density_amplitude = 0.0;
  std::vector<std::size_t> cells;
  double collision_rate = 0.0;
  std::size_t sample_every = 1;
  std::size_t min_count = 20;
  std::string force = "none";  ///< none | uniform | harmonic
  std::vector<double> force_vector;
  double stiffness = 0.0;

  std::string source_text;
  std::filesystem::path base_dir;

  /// FNV-1a 64 of the config text, as 16 hex digits.
  std::string hash() const;
};

/// Parses and validates; throws ValidationError with the offending key.
ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = ".");
ExperimentConfig load_config(const std::filesystem::path& path);

std::uint64_t fnv1a64(std::string_view text);

}  // namespace qhd::lab
