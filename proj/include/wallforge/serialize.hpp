#pragma once

#include "wallforge/dynamics.hpp"
#include "wallforge/pinning.hpp"
#include "wallforge/profile.hpp"
#include "wallforge/spectral.hpp"

#include <json.hpp>

#include <string>

namespace wallforge {

using json = nlohmann::json;

/// {"kind": …, "gamma" | "g11", "g22", "g12", "mu"}. Unknown keys and keys
/// that do not belong to the kind are rejected with Error{invalid_config};
/// parameter constraint violations keep their Error{domain} message.
json to_json(const PotentialSpec& spec);
PotentialSpec potential_from_json(const json& j);

/// {"kind": "sech2", "a", "b", "center"?} or
/// {"kind": "tabulated", "x", "v", "dv"?, "d2v"?}.
json to_json(const LocalizedPotential& V);
LocalizedPotential localized_potential_from_json(const json& j);

json to_json(const AxiomReport& r);
json to_json(const DecayFit& f);
json to_json(const WallReport& r);        // scalar diagnostics; the profile goes to CSV
json to_json(const SpectralReport& r);    // eigenvalues and diagnostics, no vectors
json to_json(const EvolutionTrace& t);    // summary; the time series goes to CSV
json to_json(const OrbitalResult& r);
json to_json(const MomentumReport& r);
json to_json(const PinningReport& r);

/// Envelope shared by every report: artifact name, version, config hash,
/// command and the command's result.
json report_envelope(const std::string& command, const std::string& config_hash, json result);

/// Pretty-printed JSON with a trailing newline. Throws Error{io}.
void write_json(const std::string& path, const json& j);

/// Trace CSV with columns t, alpha, theta1, theta2, rho, energy, G.
void write_trace_csv(const std::string& path, const EvolutionTrace& t);

/// CSV with x followed by the two components of each listed eigenvector.
void write_eigenvector_csv(const std::string& path, const Grid& g,
                           const std::vector<std::pair<std::string, Eigen::VectorXd>>& vectors);

/// 64-bit FNV-1a of a byte string, as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace wallforge
