#pragma once

#include "wallforge/pinning.hpp"
#include "wallforge/potential.hpp"
#include "wallforge/serialize.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace wallforge {

struct ExperimentConfig {
  PotentialSpec potential = PotentialSpec::symmetric_cubic(3.0);

  struct GridSection {
    double L = 0.0;  // 0 → default_half_width(potential)
    int N = 4095;
  } grid;

  struct SolverSection {
    double tol = 1e-10;
    int max_newton = 50;
    int flow_steps = 400;
    double flow_dt_factor = 0.2;
  } solver;

  struct SpectralSection {
    int k = 8;
    double stability_tol = 1e-6;
    double min_gap = 0.1;
  } spectral;

  struct DynamicsSection {
    double T = 50.0;
    double dt = 1e-3;
    double eps = 1e-2;
    std::uint64_t seed = 1;
    double K = 5.0;
    double C_max = 10.0;
    double rho_radius = kDefaultRhoRadius;
    double output_interval = 0.0;
  } dynamics;

  struct PinningSection {
    LocalizedPotential potential = LocalizedPotential::sech2(1.0, 1.0);
    std::vector<double> eps{1e-3};
    double eps_max = 0.05;
  } pinning;

  struct OutputSection {
    std::string wall, report, trace;
  } output;

  json source;       // the parsed document
  std::string hash;  // FNV-1a of the canonical (sorted, compact) dump of `source`

  Grid make_grid() const;
  SolveOptions solve_options() const;
  SpectralOptions spectral_options() const;
};

/// Parses and validates a configuration document. Errors are
/// Error{invalid_config} with "<origin>:<line>: <field>: <reason>".
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<config>");
ExperimentConfig load_config(const std::string& path);

}  // namespace wallforge
