#include "wallforge/config.hpp"

#include "wallforge/error.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace wallforge {

namespace {

// Line of the first occurrence of the dotted key path in the source text
// (each key searched after its parent), or 0 when it cannot be located.
int locate_line(const std::string& text, const std::string& path) {
  std::size_t pos = 0;
  std::size_t start = 0;
  bool found = false;
  while (start <= path.size()) {
    std::size_t dot = path.find('.', start);
    if (dot == std::string::npos) dot = path.size();
    const std::string key = path.substr(start, dot - start);
    start = dot + 1;
    if (key.empty()) continue;
    const std::size_t p = text.find("\"" + key + "\"", pos);
    if (p == std::string::npos) break;
    pos = p;
    found = true;
  }
  if (!found) return 0;
  int line = 1;
  for (std::size_t i = 0; i < pos; ++i) line += text[i] == '\n';
  return line;
}

class Reader {
 public:
  Reader(const std::string& text, std::string origin) : text_(text), origin_(std::move(origin)) {}

  [[noreturn]] void fail(const std::string& field, const std::string& reason) const {
    std::ostringstream msg;
    msg << origin_ << ':' << locate_line(text_, field) << ": " << field << ": " << reason;
    throw Error(ErrorCode::invalid_config, msg.str());
  }

  const json& section(const json& root, const std::string& key, const std::set<std::string>& allowed) const {
    static const json empty = json::object();
    if (!root.contains(key)) return empty;
    const json& s = root.at(key);
    if (!s.is_object()) fail(key, "must be an object");
    for (const auto& [k, _] : s.items()) {
      if (!allowed.count(k)) fail(key + "." + k, "unknown key");
    }
    return s;
  }

  double number(const json& s, const std::string& sec, const std::string& key, double def, double lo,
                double hi, bool lo_open = false) const {
    if (!s.contains(key)) return def;
    const std::string field = sec + "." + key;
    const json& v = s.at(key);
    if (!v.is_number()) fail(field, "must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x) || (lo_open ? !(x > lo) : !(x >= lo)) || !(x <= hi)) {
      std::ostringstream r;
      r << "value " << x << " outside the allowed range " << (lo_open ? "(" : "[") << lo << ", " << hi << "]";
      fail(field, r.str());
    }
    return x;
  }

  long long integer(const json& s, const std::string& sec, const std::string& key, long long def, long long lo,
                    long long hi) const {
    if (!s.contains(key)) return def;
    const std::string field = sec + "." + key;
    const json& v = s.at(key);
    if (!v.is_number_integer()) fail(field, "must be an integer");
    const long long x = v.get<long long>();
    if (x < lo || x > hi) {
      std::ostringstream r;
      r << "value " << x << " outside the allowed range [" << lo << ", " << hi << "]";
      fail(field, r.str());
    }
    return x;
  }

  std::string path(const json& s, const std::string& sec, const std::string& key) const {
    if (!s.contains(key)) return {};
    const std::string field = sec + "." + key;
    const json& v = s.at(key);
    if (!v.is_string()) fail(field, "must be a string path");
    const std::string p = v.get<std::string>();
    if (p.empty()) fail(field, "path must not be empty");
    const std::filesystem::path parent = std::filesystem::path(p).parent_path();
    if (!parent.empty() && !std::filesystem::is_directory(parent)) {
      fail(field, "directory '" + parent.string() + "' does not exist");
    }
    return p;
  }

  // Re-tags model-level errors (e.g. γ ≤ 1) with the field they came from.
  template <class F>
  auto wrap(const std::string& field, F&& f) const {
    try {
      return f();
    } catch (const Error& e) {
      std::string what = e.what();
      const std::string prefix = std::string(to_string(e.code())) + ": ";
      if (what.rfind(prefix, 0) == 0) what = what.substr(prefix.size());
      // Messages from the JSON readers already start with the field path.
      if (what.rfind(field, 0) == 0) {
        const std::size_t colon = what.find(": ");
        fail(what.substr(0, colon), colon == std::string::npos ? what : what.substr(colon + 2));
      }
      fail(field, what);
    }
  }

 private:
  const std::string& text_;
  std::string origin_;
};

}  // namespace

Grid ExperimentConfig::make_grid() const {
  const double L = grid.L > 0.0 ? grid.L : default_half_width(potential);
  return Grid::make(L, grid.N);
}

SolveOptions ExperimentConfig::solve_options() const {
  SolveOptions o;
  o.tol = solver.tol;
  o.max_newton = solver.max_newton;
  o.flow_steps = solver.flow_steps;
  o.flow_dt_factor = solver.flow_dt_factor;
  return o;
}

SpectralOptions ExperimentConfig::spectral_options() const {
  SpectralOptions o;
  o.k = spectral.k;
  o.stability_tol = spectral.stability_tol;
  o.min_gap = spectral.min_gap;
  return o;
}

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    // Convert the byte offset into line and column.
    int line = 1, col = 1;
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    for (std::size_t i = 0; i + 1 < upto; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream msg;
    msg << origin << ':' << line << ':' << col << ": JSON syntax error: " << e.what();
    throw Error(ErrorCode::invalid_config, msg.str());
  }

  const Reader rd(text, origin);
  if (!root.is_object()) rd.fail("<root>", "configuration must be a JSON object");
  static const std::set<std::string> top{"potential", "grid", "solver", "spectral", "dynamics", "pinning", "output"};
  for (const auto& [k, _] : root.items()) {
    if (!top.count(k)) rd.fail(k, "unknown key");
  }

  ExperimentConfig cfg;
  if (!root.contains("potential")) rd.fail("potential", "required section missing");
  cfg.potential = rd.wrap("potential", [&] { return potential_from_json(root.at("potential")); });

  const json& g = rd.section(root, "grid", {"L", "N"});
  cfg.grid.L = rd.number(g, "grid", "L", 0.0, 0.0, 1e4, true);
  if (!g.contains("L")) cfg.grid.L = 0.0;
  cfg.grid.N = static_cast<int>(rd.integer(g, "grid", "N", 4095, 15, 1 << 22));
  if (cfg.grid.N % 2 == 0) rd.fail("grid.N", "must be odd so that x = 0 is a node");
  rd.wrap("grid", [&] { return cfg.make_grid(); });

  const json& s = rd.section(root, "solver", {"tol", "max_newton", "flow_steps", "flow_dt_factor"});
  cfg.solver.tol = rd.number(s, "solver", "tol", 1e-10, 0.0, 1e-2, true);
  cfg.solver.max_newton = static_cast<int>(rd.integer(s, "solver", "max_newton", 50, 1, 1000));
  cfg.solver.flow_steps = static_cast<int>(rd.integer(s, "solver", "flow_steps", 400, 0, 10'000'000));
  cfg.solver.flow_dt_factor = rd.number(s, "solver", "flow_dt_factor", 0.2, 0.0, 0.25, true);

  const json& sp = rd.section(root, "spectral", {"k", "stability_tol", "min_gap"});
  cfg.spectral.k = static_cast<int>(rd.integer(sp, "spectral", "k", 8, 2, 64));
  cfg.spectral.stability_tol = rd.number(sp, "spectral", "stability_tol", 1e-6, 0.0, 1.0, true);
  cfg.spectral.min_gap = rd.number(sp, "spectral", "min_gap", 0.1, 0.0, 10.0);

  const json& d = rd.section(root, "dynamics",
                             {"T", "dt", "eps", "seed", "K", "C_max", "rho_radius", "output_interval"});
  cfg.dynamics.T = rd.number(d, "dynamics", "T", 50.0, 0.0, 1e6, true);
  cfg.dynamics.dt = rd.number(d, "dynamics", "dt", 1e-3, 0.0, 1.0, true);
  if (cfg.dynamics.dt > cfg.dynamics.T) rd.fail("dynamics.dt", "must not exceed dynamics.T");
  cfg.dynamics.eps = rd.number(d, "dynamics", "eps", 1e-2, 0.0, 1.0);
  cfg.dynamics.seed = static_cast<std::uint64_t>(
      rd.integer(d, "dynamics", "seed", 1, 0, std::numeric_limits<long long>::max()));
  cfg.dynamics.K = rd.number(d, "dynamics", "K", 5.0, 0.0, 1e6, true);
  cfg.dynamics.C_max = rd.number(d, "dynamics", "C_max", 10.0, 0.0, 1e12, true);
  cfg.dynamics.rho_radius = rd.number(d, "dynamics", "rho_radius", kDefaultRhoRadius, 0.0, 1e4, true);
  cfg.dynamics.output_interval = rd.number(d, "dynamics", "output_interval", 0.0, 0.0, 1e6);
  if (cfg.dynamics.rho_radius > cfg.make_grid().L) rd.fail("dynamics.rho_radius", "must not exceed the half-width L");

  const json& p = rd.section(root, "pinning", {"potential", "eps", "eps_max"});
  cfg.pinning.eps_max = rd.number(p, "pinning", "eps_max", 0.05, 0.0, 1.0, true);
  if (p.contains("potential")) {
    cfg.pinning.potential =
        rd.wrap("pinning.potential", [&] { return localized_potential_from_json(p.at("potential")); });
  }
  if (p.contains("eps")) {
    const json& e = p.at("eps");
    if (!e.is_array() || e.empty()) rd.fail("pinning.eps", "must be a non-empty array of numbers");
    cfg.pinning.eps.clear();
    for (const auto& v : e) {
      if (!v.is_number()) rd.fail("pinning.eps", "must be a non-empty array of numbers");
      const double x = v.get<double>();
      if (!std::isfinite(x) || std::abs(x) > cfg.pinning.eps_max) {
        std::ostringstream r;
        r << "value " << x << " exceeds pinning.eps_max = " << cfg.pinning.eps_max;
        rd.fail("pinning.eps", r.str());
      }
      cfg.pinning.eps.push_back(x);
    }
  }

  const json& o = rd.section(root, "output", {"wall", "report", "trace"});
  cfg.output.wall = rd.path(o, "output", "wall");
  cfg.output.report = rd.path(o, "output", "report");
  cfg.output.trace = rd.path(o, "output", "trace");

  cfg.source = root;
  cfg.hash = fnv1a_hex(root.dump());
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::invalid_config, path + ": cannot open configuration file");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str(), path);
}

}  // namespace wallforge
