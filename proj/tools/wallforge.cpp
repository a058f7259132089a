// wallforge: command-line front end for domain-wall experiments.
//
//   wallforge solve    --config cfg.json --out wall.csv --report wall.json
//   wallforge spectrum --wall wall.csv --config cfg.json --k 8 --report spec.json
//   wallforge evolve   --wall wall.csv --config cfg.json --eps 1e-2 --T 50 --dt 1e-3
//                      --trace trace.csv --report evolve.json
//   wallforge pin      --wall wall.csv --config cfg.json --potential '{"kind":"sech2","a":1,"b":1}'
//                      --eps 1e-3 --report pin.json
//   wallforge validate --config cfg.json --report validate.json
//
// Exit codes: 0 success, 1 numerical failure (or a failed validation item),
// 2 configuration / usage error.

#include "wallforge/config.hpp"
#include "wallforge/dynamics.hpp"
#include "wallforge/error.hpp"
#include "wallforge/kernels.hpp"
#include "wallforge/pinning.hpp"
#include "wallforge/pool.hpp"
#include "wallforge/profile.hpp"
#include "wallforge/serialize.hpp"
#include "wallforge/spectral.hpp"
#include "wallforge/version.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace wf = wallforge;
using wf::json;

namespace {

constexpr int kExitNumerical = 1;
constexpr int kExitConfig = 2;

struct Args {
  std::string config, out, report, wall, trace, potential;
  std::optional<double> eps, T, dt;
  std::optional<int> k;
  std::optional<long long> seed;
};

wf::ExperimentConfig load(const Args& a) {
  if (!a.config.empty()) return wf::load_config(a.config);
  return wf::parse_config(R"({"potential": {"kind": "symmetric-cubic", "gamma": 3.0}})", "<defaults>");
}

std::string first_nonempty(const std::string& a, const std::string& b) { return a.empty() ? b : a; }

void emit(const std::string& path, const json& envelope) {
  if (path.empty()) {
    std::cout << envelope.dump(2) << '\n';
  } else {
    wf::write_json(path, envelope);
  }
}

json grid_json(const wf::Grid& g) { return json{{"L", g.L}, {"N", g.N}, {"h", g.h}}; }

// The wall for the downstream commands: --wall, else the configured wall file
// when it exists, else a fresh solve with the configured grid.
wf::RealField2 obtain_wall(const Args& a, const wf::ExperimentConfig& cfg, bool& solved) {
  const std::string path = first_nonempty(a.wall, cfg.output.wall);
  solved = false;
  if (!path.empty() && (!a.wall.empty() || std::filesystem::exists(path))) return wf::read_real_csv(path);
  solved = true;
  return wf::solve_wall(cfg.potential, cfg.make_grid(), cfg.solve_options()).profile;
}

int cmd_solve(const Args& a) {
  const auto cfg = load(a);
  const wf::Grid g = cfg.make_grid();
  const wf::WallReport rep = wf::solve_wall(cfg.potential, g, cfg.solve_options());
  const std::string out = first_nonempty(a.out, cfg.output.wall);
  if (!out.empty()) wf::write_csv(out, rep.profile);
  json result{{"potential", wf::to_json(cfg.potential)}, {"grid", grid_json(g)}, {"wall", wf::to_json(rep)}};
  emit(first_nonempty(a.report, cfg.output.report), wf::report_envelope("solve", cfg.hash, result));
  return 0;
}

int cmd_spectrum(const Args& a) {
  auto cfg = load(a);
  if (a.k) {
    if (*a.k < 2 || *a.k > 64) throw wf::Error(wf::ErrorCode::usage, "--k must lie in [2, 64]");
    cfg.spectral.k = *a.k;
  }
  bool solved = false;
  const wf::RealField2 wall = obtain_wall(a, cfg, solved);
  const double residual = wf::sup_norm(wf::el_residual(cfg.potential, wall));
  const wf::SpectralReport rep = wf::stability_spectrum(cfg.potential, wall, cfg.spectral_options());
  if (!a.out.empty()) {
    std::vector<std::pair<std::string, Eigen::VectorXd>> vecs;
    for (std::size_t i = 0; i < rep.lplus_vectors.size(); ++i) {
      vecs.emplace_back("lplus" + std::to_string(i), rep.lplus_vectors[i]);
    }
    for (std::size_t i = 0; i < rep.lminus_vectors.size(); ++i) {
      vecs.emplace_back("lminus" + std::to_string(i), rep.lminus_vectors[i]);
    }
    wf::write_eigenvector_csv(a.out, wall.grid, vecs);
  }
  json result{{"potential", wf::to_json(cfg.potential)},
              {"grid", grid_json(wall.grid)},
              {"wall_source", solved ? "solved" : "file"},
              {"wall_residual_sup", residual},
              {"spectrum", wf::to_json(rep)}};
  emit(first_nonempty(a.report, cfg.output.report), wf::report_envelope("spectrum", cfg.hash, result));
  return 0;
}

int cmd_evolve(const Args& a) {
  auto cfg = load(a);
  if (a.eps) cfg.dynamics.eps = *a.eps;
  if (a.T) cfg.dynamics.T = *a.T;
  if (a.dt) cfg.dynamics.dt = *a.dt;
  if (a.seed) cfg.dynamics.seed = static_cast<std::uint64_t>(*a.seed);
  const auto& d = cfg.dynamics;
  if (!(d.T > 0.0) || !(d.dt > 0.0) || d.dt > d.T) {
    throw wf::Error(wf::ErrorCode::usage, "--T and --dt must satisfy 0 < dt <= T");
  }
  if (!(d.eps >= 0.0) || d.eps > 1.0) throw wf::Error(wf::ErrorCode::usage, "--eps must lie in [0, 1]");

  bool solved = false;
  const wf::RealField2 wall = obtain_wall(a, cfg, solved);
  wf::OrbitalOptions o;
  o.dt = d.dt;
  o.K = d.K;
  o.C_max = d.C_max;
  o.seed = d.seed;
  o.output_interval = d.output_interval;
  o.rho_radius = d.rho_radius;
  const wf::OrbitalResult res = wf::orbital_stability_experiment(cfg.potential, wall, d.eps, d.T, o);

  const std::string trace = first_nonempty(a.trace, cfg.output.trace);
  if (!trace.empty()) wf::write_trace_csv(trace, res.trace);
  if (!a.out.empty()) wf::write_csv(a.out, res.trace.final_state);
  json result{{"potential", wf::to_json(cfg.potential)},
              {"grid", grid_json(wall.grid)},
              {"wall_source", solved ? "solved" : "file"},
              {"T", d.T},
              {"dt", d.dt},
              {"seed", d.seed},
              {"orbital", wf::to_json(res)}};
  emit(first_nonempty(a.report, cfg.output.report), wf::report_envelope("evolve", cfg.hash, result));
  return 0;
}

int cmd_pin(const Args& a) {
  auto cfg = load(a);
  if (!a.potential.empty()) {
    json j;
    try {
      j = json::parse(a.potential);
    } catch (const json::parse_error& e) {
      throw wf::Error(wf::ErrorCode::invalid_config, std::string("--potential: ") + e.what());
    }
    cfg.pinning.potential = wf::localized_potential_from_json(j);
  }
  if (a.eps) {
    if (std::abs(*a.eps) > cfg.pinning.eps_max) {
      throw wf::Error(wf::ErrorCode::usage, "--eps exceeds pinning.eps_max");
    }
    cfg.pinning.eps = {*a.eps};
  }
  bool solved = false;
  const wf::RealField2 wall = obtain_wall(a, cfg, solved);
  const std::vector<std::string> warnings = cfg.pinning.potential.check(wall.grid);

  wf::PinningOptions po;
  po.eps_max = cfg.pinning.eps_max;
  po.tol = std::max(cfg.solver.tol, 1e-10);
  const auto& eps = cfg.pinning.eps;
  std::vector<wf::PinningReport> reports(eps.size());
  wf::parallel_for(eps.size(), [&](std::size_t i) {
    reports[i] = wf::run_pinning(cfg.potential, cfg.pinning.potential, eps[i], wall, po);
  });
  if (!a.out.empty() && !reports.empty()) wf::write_csv(a.out, reports.front().pinned_profile);

  json runs = json::array();
  for (const auto& r : reports) runs.push_back(wf::to_json(r));
  json result{{"potential", wf::to_json(cfg.potential)},
              {"external_potential", wf::to_json(cfg.pinning.potential)},
              {"spline_derivatives", cfg.pinning.potential.derivatives_from_spline()},
              {"warnings", warnings},
              {"grid", grid_json(wall.grid)},
              {"wall_source", solved ? "solved" : "file"},
              {"runs", runs}};
  emit(first_nonempty(a.report, cfg.output.report), wf::report_envelope("pin", cfg.hash, result));
  return 0;
}

// ---------------------------------------------------------------------------
// validate: a compact battery of exact-solution, axiom, spectral and pinning
// checks on the configured grid.

struct Item {
  std::string name;
  bool pass = false;
  json detail = json::object();
};

Item item(std::string name, bool pass, json detail) { return Item{std::move(name), pass, std::move(detail)}; }

int cmd_validate(const Args& a) {
  const auto cfg = load(a);
  std::vector<Item> items;

  // Exact γ = 3 wall on [−20, 20] with the configured resolution.
  const wf::PotentialSpec s3 = wf::PotentialSpec::symmetric_cubic(3.0);
  const wf::Grid g = wf::Grid::make(20.0, cfg.grid.N);
  const wf::WallReport wall = wf::solve_wall(s3, g, cfg.solve_options());
  double sup_err = 0.0;
  for (int i = 0; i < g.N; ++i) {
    const wf::Vec2 e = wf::exact_wall(s3, g.x(i));
    sup_err = std::max({sup_err, std::abs(wall.profile.u1[i] - e[0]), std::abs(wall.profile.u2[i] - e[1])});
  }
  const double e_exact = std::sqrt(2.0) / 3.0;
  items.push_back(item("exact_solution_profile", sup_err <= 1e-6, {{"sup_error", sup_err}, {"limit", 1e-6}}));
  items.push_back(item("exact_solution_energy", std::abs(wall.energy - e_exact) <= 1e-6,
                       {{"energy", wall.energy}, {"exact", e_exact}, {"limit", 1e-6}}));
  items.push_back(item("exact_solution_center", std::abs(wall.center_u1 - 0.5) <= 1e-6,
                       {{"u1_at_0", wall.center_u1}, {"limit", 1e-6}}));
  items.push_back(item("wall_residual", wall.residual_sup <= 1e-9, {{"residual_sup", wall.residual_sup}}));

  // Independent checks, fanned out over the worker pool.
  struct Axiom {
    std::string name;
    wf::PotentialSpec spec;
  };
  const std::vector<Axiom> axioms{
      {"axioms_symmetric_cubic_1.5", wf::PotentialSpec::symmetric_cubic(1.5)},
      {"axioms_symmetric_cubic_3", s3},
      {"axioms_symmetric_cubic_5", wf::PotentialSpec::symmetric_cubic(5.0)},
      {"axioms_general_cubic_1_2_2.5", wf::PotentialSpec::general_cubic(1.0, 2.0, 2.5, 1.0)},
      {"axioms_general_cubic_2_0.5_1.5", wf::PotentialSpec::general_cubic(2.0, 0.5, 1.5, 1.0)},
  };
  const std::vector<double> widths{0.5, 1.0, 2.0};

  std::vector<std::vector<Item>> slots(axioms.size() + 2 + widths.size() * 2 + 2);
  wf::parallel_for(slots.size(), [&](std::size_t t) {
    auto& out = slots[t];
    std::size_t idx = t;
    try {
      if (idx < axioms.size()) {
        const auto rep = wf::check_W_axioms(axioms[idx].spec, wf::SampleBox{}, 4000);
        out.push_back(item(axioms[idx].name, rep.passed(), wf::to_json(rep)));
        return;
      }
      idx -= axioms.size();
      if (idx == 0) {
        const auto sp = wf::stability_spectrum(s3, wall.profile, cfg.spectral_options());
        const double l0 = sp.lplus_eigs.empty() ? NAN : sp.lplus_eigs.front();
        double lminus_min = INFINITY;
        for (double v : sp.lminus_eigs) lminus_min = std::min(lminus_min, v);
        out.push_back(item("spectral_zero_mode", std::abs(l0) <= 1e-4 && sp.zero_mode_overlap >= 0.999,
                           {{"lambda0", l0}, {"overlap", sp.zero_mode_overlap}}));
        out.push_back(item("spectral_gap", sp.gap >= 0.1, {{"gap", sp.gap}, {"limit", 0.1}}));
        out.push_back(item("lminus_bounded_below", lminus_min >= -1e-4, {{"min_eig", lminus_min}}));
        out.push_back(item("spectral_stability", sp.neg_lambda_sq >= -1e-6,
                           {{"neg_lambda_sq", sp.neg_lambda_sq}, {"verdict", wf::to_string(sp.verdict)}}));
        return;
      }
      if (idx == 1) {
        double worst = 0.0;
        for (std::uint64_t trial = 1; trial <= 5; ++trial) {
          const auto chk = wf::quadratic_form_identity_check(s3, wall.profile, wf::TrialPair::random_bumps(trial),
                                                             wf::TrialPair::random_bumps(100 + trial));
          worst = std::max({worst, chk.lplus_defect, chk.lminus_defect});
        }
        out.push_back(item("quadratic_form_identities", worst <= 1e-3, {{"max_rel_defect", worst}, {"trials", 5}}));
        return;
      }
      idx -= 2;
      if (idx < widths.size() * 2) {
        const double b = widths[idx / 2];
        const double amp = idx % 2 == 0 ? 1.0 : -1.0;
        const auto V = wf::LocalizedPotential::sech2(amp, b);
        const auto x0 = wf::find_x0(V, wall.profile);
        const auto sig = wf::compute_sigma(V, x0.x0, wall.profile);
        char name[64];
        std::snprintf(name, sizeof name, "pinning_sign_a%+g_b%g", amp, b);
        out.push_back(item(name, std::abs(x0.x0) <= 1e-10 && std::signbit(sig.sigma) == std::signbit(amp),
                           {{"x0", x0.x0}, {"sigma", sig.sigma}}));
        return;
      }
      idx -= widths.size() * 2;
      const double amp = idx == 0 ? 1.0 : -1.0;
      const auto rep = wf::run_pinning(s3, wf::LocalizedPotential::sech2(amp, 1.0), 1e-3, wall.profile);
      const bool verdict_ok = amp > 0 ? rep.verdict == wf::Verdict::stable && rep.lplus_negative_count == 0
                                      : rep.verdict == wf::Verdict::unstable && rep.lplus_negative_count == 1;
      const double shift_err = std::abs(rep.lplus_min_eig - rep.predicted_shift) / std::abs(rep.predicted_shift);
      out.push_back(item(amp > 0 ? "pinned_verdict_a+1" : "pinned_verdict_a-1", verdict_ok && shift_err <= 0.1,
                         {{"verdict", wf::to_string(rep.verdict)},
                          {"negative_count", rep.lplus_negative_count},
                          {"lplus_min_eig", rep.lplus_min_eig},
                          {"predicted_shift", rep.predicted_shift},
                          {"rel_error", shift_err}}));
    } catch (const wf::Error& e) {
      out.push_back(item("task_" + std::to_string(t), false, {{"error", e.what()}}));
    }
  });
  for (auto& s : slots) {
    for (auto& it : s) items.push_back(std::move(it));
  }

  bool all = true;
  json list = json::array();
  for (const auto& it : items) {
    all = all && it.pass;
    list.push_back({{"name", it.name}, {"pass", it.pass}, {"detail", it.detail}});
    std::fprintf(stderr, "%-36s %s\n", it.name.c_str(), it.pass ? "PASS" : "FAIL");
  }
  json result{{"grid", grid_json(g)}, {"kernels", wf::kernels::active().name}, {"all_pass", all}, {"items", list}};
  emit(first_nonempty(a.report, cfg.output.report), wf::report_envelope("validate", cfg.hash, result));
  return all ? 0 : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wallforge: domain walls of coupled Gross-Pitaevskii systems"};
  app.set_version_flag("--version", std::string(wf::kVersion));
  app.require_subcommand(1);
  Args args;

  auto add_config = [&](CLI::App* c) {
    c->add_option("--config", args.config, "Experiment configuration (JSON)")->check(CLI::ExistingFile);
  };
  auto add_report = [&](CLI::App* c) { c->add_option("--report", args.report, "Report JSON path (stdout if omitted)"); };
  auto add_wall = [&](CLI::App* c) {
    c->add_option("--wall", args.wall, "Wall profile CSV from `solve`")->check(CLI::ExistingFile);
  };

  auto* solve = app.add_subcommand("solve", "Compute the domain wall");
  add_config(solve);
  solve->add_option("--out", args.out, "Wall profile CSV");
  add_report(solve);

  auto* spectrum = app.add_subcommand("spectrum", "Spectra of L+ and L- and the stability quotient");
  add_wall(spectrum);
  add_config(spectrum);
  spectrum->add_option("--k", args.k, "Number of eigenvalues per operator");
  spectrum->add_option("--out", args.out, "Eigenvector CSV");
  add_report(spectrum);

  auto* evolve = app.add_subcommand("evolve", "Time evolution of a perturbed wall");
  add_wall(evolve);
  add_config(evolve);
  evolve->add_option("--eps", args.eps, "Perturbation size in the rho_A distance");
  evolve->add_option("--T", args.T, "Final time");
  evolve->add_option("--dt", args.dt, "Time step");
  evolve->add_option("--seed", args.seed, "Perturbation seed");
  evolve->add_option("--trace", args.trace, "Trace CSV (t, alpha, theta1, theta2, rho, energy, G)");
  evolve->add_option("--out", args.out, "Final state CSV");
  add_report(evolve);

  auto* pin = app.add_subcommand("pin", "Pinning of the wall by a small external potential");
  add_wall(pin);
  add_config(pin);
  pin->add_option("--potential", args.potential, "External potential as JSON");
  pin->add_option("--eps", args.eps, "Potential strength");
  pin->add_option("--out", args.out, "Pinned profile CSV");
  add_report(pin);

  auto* validate = app.add_subcommand("validate", "Run the validation battery");
  add_config(validate);
  add_report(validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*solve) return cmd_solve(args);
    if (*spectrum) return cmd_spectrum(args);
    if (*evolve) return cmd_evolve(args);
    if (*pin) return cmd_pin(args);
    if (*validate) return cmd_validate(args);
  } catch (const wf::Error& e) {
    std::cerr << "wallforge: " << e.what() << '\n';
    const bool config = e.code() == wf::ErrorCode::invalid_config || e.code() == wf::ErrorCode::usage;
    return config ? kExitConfig : kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "wallforge: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitConfig;
}
