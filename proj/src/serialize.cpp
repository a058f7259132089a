#include "wallforge/serialize.hpp"

#include "wallforge/error.hpp"
#include "wallforge/version.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

namespace wallforge {

namespace {

// NaN and ±∞ have no JSON spelling; they become null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json num_array(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) {
      throw Error(ErrorCode::invalid_config, where + "." + key + ": unknown key");
    }
  }
}

double require_number(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw Error(ErrorCode::invalid_config, where + "." + key + ": required field missing");
  const json& v = j.at(key);
  if (!v.is_number()) throw Error(ErrorCode::invalid_config, where + "." + key + ": must be a number");
  return v.get<double>();
}

std::vector<double> number_list(const json& j, const std::string& key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_array()) throw Error(ErrorCode::invalid_config, where + "." + key + ": must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw Error(ErrorCode::invalid_config, where + "." + key + ": must be an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

json to_json(const PotentialSpec& spec) {
  json j;
  j["kind"] = to_string(spec.kind());
  switch (spec.kind()) {
    case PotentialKind::symmetric_cubic:
    case PotentialKind::quartic:
      j["gamma"] = spec.gamma();
      break;
    case PotentialKind::general_cubic:
      j["g11"] = spec.g11();
      j["g22"] = spec.g22();
      j["g12"] = spec.g12();
      j["mu"] = spec.mu();
      break;
  }
  return j;
}

PotentialSpec potential_from_json(const json& j) {
  const std::string where = "potential";
  if (!j.is_object()) throw Error(ErrorCode::invalid_config, where + ": must be an object");
  if (!j.contains("kind") || !j.at("kind").is_string()) {
    throw Error(ErrorCode::invalid_config, where + ".kind: required string field missing");
  }
  const std::string kind = j.at("kind").get<std::string>();
  PotentialKind k;
  try {
    k = potential_kind_from_string(kind);
  } catch (const Error&) {
    throw Error(ErrorCode::invalid_config,
                where + ".kind: unknown kind '" + kind + "' (symmetric-cubic, general-cubic, quartic)");
  }
  switch (k) {
    case PotentialKind::symmetric_cubic:
      reject_unknown(j, {"kind", "gamma"}, where);
      return PotentialSpec::symmetric_cubic(require_number(j, "gamma", where));
    case PotentialKind::quartic:
      reject_unknown(j, {"kind", "gamma"}, where);
      return PotentialSpec::quartic(require_number(j, "gamma", where));
    case PotentialKind::general_cubic:
      reject_unknown(j, {"kind", "g11", "g22", "g12", "mu"}, where);
      return PotentialSpec::general_cubic(require_number(j, "g11", where), require_number(j, "g22", where),
                                          require_number(j, "g12", where),
                                          j.contains("mu") ? require_number(j, "mu", where) : 1.0);
  }
  throw Error(ErrorCode::invalid_config, where + ": unreachable kind");
}

json to_json(const LocalizedPotential& V) {
  if (!V.is_sech2()) return json{{"kind", "tabulated"}, {"describe", V.describe()}};
  return json{{"kind", "sech2"}, {"a", V.amplitude()}, {"b", V.width()}, {"center", V.center()}};
}

LocalizedPotential localized_potential_from_json(const json& j) {
  const std::string where = "potential";
  if (!j.is_object()) throw Error(ErrorCode::invalid_config, where + ": must be an object");
  if (!j.contains("kind") || !j.at("kind").is_string()) {
    throw Error(ErrorCode::invalid_config, where + ".kind: required string field missing");
  }
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "sech2") {
    reject_unknown(j, {"kind", "a", "b", "center"}, where);
    const double a = require_number(j, "a", where);
    const double b = require_number(j, "b", where);
    const double c = j.contains("center") ? require_number(j, "center", where) : 0.0;
    if (!(b > 0.0)) throw Error(ErrorCode::invalid_config, where + ".b: width must be positive");
    return LocalizedPotential::sech2(a, b, c);
  }
  if (kind == "tabulated") {
    reject_unknown(j, {"kind", "x", "v", "dv", "d2v"}, where);
    if (!j.contains("x") || !j.contains("v")) {
      throw Error(ErrorCode::invalid_config, where + ": tabulated potential needs x and v arrays");
    }
    std::vector<double> dv, d2v;
    if (j.contains("dv")) dv = number_list(j, "dv", where);
    if (j.contains("d2v")) d2v = number_list(j, "d2v", where);
    try {
      return LocalizedPotential::tabulated(number_list(j, "x", where), number_list(j, "v", where), dv, d2v);
    } catch (const Error& e) {
      throw Error(ErrorCode::invalid_config, where + ": " + e.what());
    }
  }
  throw Error(ErrorCode::invalid_config, where + ".kind: unknown kind '" + kind + "' (sech2, tabulated)");
}

json to_json(const AxiomReport& r) {
  json failures = json::array();
  for (const auto& f : r.failures) {
    failures.push_back({{"axiom", f.axiom},
                        {"witness", {num(f.witness[0]), num(f.witness[1])}},
                        {"value", num(f.value)},
                        {"detail", f.detail}});
  }
  return json{{"passed", r.passed()},
              {"min_W", num(r.min_W)},
              {"min_W_at", {num(r.min_W_at[0]), num(r.min_W_at[1])}},
              {"hess_min_eig", {num(r.hess_min_eig[0]), num(r.hess_min_eig[1])}},
              {"R0", num(r.R0)},
              {"c0", num(r.c0)},
              {"w5_min", num(r.w5_min)},
              {"w5_max", num(r.w5_max)},
              {"w5_closed_form_nonneg", r.w5_closed_form_nonneg},
              {"n_samples", r.n_samples},
              {"failures", failures}};
}

json to_json(const DecayFit& f) {
  return json{{"rate", num(f.rate)}, {"predicted", num(f.predicted)}, {"points", f.points},
              {"rel_error", num(f.rel_error())}};
}

json to_json(const WallReport& r) {
  return json{{"grid", {{"L", r.profile.grid.L}, {"N", r.profile.grid.N}, {"h", r.profile.grid.h}}},
              {"energy", num(r.energy)},
              {"residual_sup", num(r.residual_sup)},
              {"center", num(r.center)},
              {"mass_center_shift", num(r.mass_center_shift)},
              {"center_u1", num(r.center_u1)},
              {"center_u2", num(r.center_u2)},
              {"decay_left", to_json(r.decay_left)},
              {"decay_right", to_json(r.decay_right)},
              {"decay_left_u2", to_json(r.decay_left_u2)},
              {"decay_right_u2", to_json(r.decay_right_u2)},
              {"monotone", {r.monotone[0], r.monotone[1]}},
              {"symmetric_defect", num(r.symmetric_defect)},
              {"flow_steps", r.flow_steps},
              {"newton_iterations", r.newton_iterations},
              {"initial_guess", r.initial_guess}};
}

json to_json(const SpectralReport& r) {
  return json{{"lplus_eigs", num_array(r.lplus_eigs)},
              {"lminus_eigs", num_array(r.lminus_eigs)},
              {"lplus_residuals", num_array(r.lplus_residuals)},
              {"lminus_residuals", num_array(r.lminus_residuals)},
              {"zero_mode_overlap", num(r.zero_mode_overlap)},
              {"lplus_uprime_residual", num(r.lplus_uprime_residual)},
              {"essential_edge", num(r.essential_edge)},
              {"gap", num(r.gap)},
              {"ground_state_signed", r.ground_state_signed},
              {"neg_lambda_sq", num(r.neg_lambda_sq)},
              {"pencil_iterations", r.pencil_iterations},
              {"pencil_residual", num(r.pencil_residual)},
              {"denominator_min", num(r.denominator_min)},
              {"verdict", to_string(r.verdict)}};
}

json to_json(const EvolutionTrace& t) {
  auto sup = [](const std::vector<double>& v) {
    double m = 0.0;
    bool any = false;
    for (double x : v) {
      if (std::isfinite(x)) {
        m = std::max(m, std::abs(x));
        any = true;
      }
    }
    return any ? num(m) : json(nullptr);
  };
  return json{{"steps", t.steps},
              {"outputs", t.times.size()},
              {"t_final", t.times.empty() ? json(nullptr) : num(t.times.back())},
              {"energy_initial", t.energy.empty() ? json(nullptr) : num(t.energy.front())},
              {"energy_drift", num(t.energy_drift)},
              {"max_modulus_defect", num(t.max_modulus_defect)},
              {"sup_rho", sup(t.rho)},
              {"sup_abs_alpha", sup(t.alpha)},
              {"warnings", t.warnings}};
}

json to_json(const OrbitalResult& r) {
  return json{{"eps", num(r.eps)},
              {"initial_rho", num(r.initial_rho)},
              {"sup_rho", num(r.sup_rho)},
              {"fitted_C", num(r.fitted_C)},
              {"rho_ok", r.rho_ok},
              {"alpha_ok", r.alpha_ok},
              {"verdict", r.pass ? "PASS" : "FAIL"},
              {"trace", to_json(r.trace)}};
}

json to_json(const MomentumReport& r) {
  return json{{"max_abs_momentum", num(r.max_abs_momentum)},
              {"max_identity_defect", num(r.max_identity_defect)},
              {"samples", r.times.size()}};
}

json to_json(const PinningReport& r) {
  return json{{"x0", num(r.x0)},
              {"sigma", num(r.sigma)},
              {"eps", num(r.eps)},
              {"residual_sup", num(r.residual_sup)},
              {"newton_iterations", r.newton_iterations},
              {"continuation_steps", r.continuation_steps},
              {"persistence_sup", num(r.persistence_sup)},
              {"persistence_ratio", num(r.persistence_ratio)},
              {"symmetric_defect", num(r.symmetric_defect)},
              {"lplus_min_eig", num(r.lplus_min_eig)},
              {"predicted_shift", num(r.predicted_shift)},
              {"lplus_negative_count", r.lplus_negative_count},
              {"lminus_min_eig", num(r.lminus_min_eig)},
              {"neg_lambda_sq", num(r.neg_lambda_sq)},
              {"pencil_iterations", r.pencil_iterations},
              {"verdict", to_string(r.verdict)}};
}

json report_envelope(const std::string& command, const std::string& config_hash, json result) {
  return json{{"artifact", "wallforge"},
              {"version", kVersion},
              {"config_hash", config_hash},
              {"command", command},
              {"result", std::move(result)}};
}

void write_json(const std::string& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::io, "cannot open " + path + " for writing");
  os << j.dump(2) << '\n';
  if (!os) throw Error(ErrorCode::io, "write failed for " + path);
}

void write_trace_csv(const std::string& path, const EvolutionTrace& t) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::io, "cannot open " + path + " for writing");
  os << "t,alpha,theta1,theta2,rho,energy,G\n";
  for (std::size_t k = 0; k < t.times.size(); ++k) {
    os << fmt(t.times[k]) << ',' << fmt(t.alpha[k]) << ',' << fmt(t.theta1[k]) << ',' << fmt(t.theta2[k])
       << ',' << fmt(t.rho[k]) << ',' << fmt(t.energy[k]) << ',' << fmt(t.mass_center_G[k]) << '\n';
  }
  if (!os) throw Error(ErrorCode::io, "write failed for " + path);
}

void write_eigenvector_csv(const std::string& path, const Grid& g,
                           const std::vector<std::pair<std::string, Eigen::VectorXd>>& vectors) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::io, "cannot open " + path + " for writing");
  os << 'x';
  for (const auto& [name, _] : vectors) os << ',' << name << "_1," << name << "_2";
  os << '\n';
  for (int i = 0; i < g.N; ++i) {
    os << fmt(g.x(i));
    for (const auto& [_, v] : vectors) os << ',' << fmt(v[i]) << ',' << fmt(v[g.N + i]);
    os << '\n';
  }
  if (!os) throw Error(ErrorCode::io, "write failed for " + path);
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace wallforge
