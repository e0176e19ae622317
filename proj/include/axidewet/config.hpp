#pragma once

#include "axidewet/anisotropy.hpp"
#include "axidewet/energy_matrix.hpp"
#include "axidewet/evolution.hpp"
#include "axidewet/fem_assembly.hpp"
#include "axidewet/geometry.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace axidewet {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& what)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

enum class StabilizerSource { automatic, constant, table };

struct RunConfig {
  Method method = Method::P;
  int q = 0;

  std::string anisotropy_kind = "isotropic";  // isotropic | kfold | bgn | series
  int anisotropy_k = 4;
  double anisotropy_beta = 0.0;
  double anisotropy_eps = 0.1;
  std::vector<double> anisotropy_coeffs;

  StabilizerSource stabilizer = StabilizerSource::automatic;
  double stabilizer_value = 0.0;
  std::string stabilizer_table;  // CSV theta,s0
  double stabilizer_margin = EnergyMatrixSpec::kDefaultMargin;

  ShapeSpec shape{ShapeKind::semi_ellipse, {4.0, 2.0}};
  int J = 40;

  ContactParameters contact;

  double dt = 1.0 / 80.0;
  double T = 0.5;
  int snapshot_every = 0;

  double picard_tol = 1e-12;
  int picard_max = 50;
  int max_halvings = 5;

  EventPolicy events;

  int converge_levels = 5;
  int converge_workers = 1;

  std::string output_dir = "out";

  AnisotropyModel model() const;
  /// Reads the stabilizer table from disk when needed.
  EnergyMatrixSpec energy_spec(const AnisotropyModel& model) const;
  SchemeConfig scheme() const;
};

/// Parses `key = value` lines ('#' starts a comment). Unknown or repeated keys,
/// malformed values and constraint violations throw ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Keys accepted by parse_config, in documentation order.
const std::vector<std::string>& config_keys();

StabilizerTable read_stabilizer_csv(const std::string& path);
void write_stabilizer_csv(std::ostream& os, const StabilizerTable& table);

}  // namespace axidewet
