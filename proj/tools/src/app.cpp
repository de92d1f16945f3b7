#include "lqmfg/cli/app.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <ostream>
#include <random>
#include <sstream>

#include "lqmfg/cli/report.hpp"
#include "lqmfg/discounted_solver.hpp"
#include "lqmfg/limits.hpp"
#include "lqmfg/simulator.hpp"

namespace lqmfg::cli {
namespace {

constexpr double kResidualTol = 1e-9;

double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

SimConfig sim_config(const ParsedConfig& cfg, const RunConfig& run, int paths, double dt, double t,
                     std::ostream& out) {
  SimConfig sc;
  sc.n_paths = run.paths.value_or(cfg.run.paths.value_or(paths));
  sc.dt = run.dt.value_or(cfg.run.dt.value_or(dt));
  sc.T = run.T.value_or(cfg.run.T.value_or(t));
  if (run.seed || cfg.run.seed) {
    sc.seed = run.seed ? *run.seed : *cfg.run.seed;
  } else {
    std::random_device rd;
    sc.seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    out << "seed " << sc.seed << " (auto-generated)\n";
  }
  return sc;
}

void emit_json(const RunConfig& run, const Json& j) {
  if (!run.out_path.empty()) write_json_file(run.out_path, j);
}

template <class Rows>
void emit_csv(const RunConfig& run, const Rows& rows) {
  if (run.csv_path.empty()) return;
  std::ostringstream os;
  write_csv(os, rows);
  write_text_file(run.csv_path, os.str());
}

int cmd_validate(const RunConfig& run, std::ostream& out) {
  // Parsed without the built-in validation so every item can be listed.
  const ParsedConfig cfg = parse_config_file(run.spec_path, false);
  const ValidationReport rep = validate_assumptions(cfg.spec);
  for (const auto& item : rep.items) {
    out << (item.passed ? "  ok    " : "  FAIL  ") << item.id;
    if (!item.detail.empty()) out << "  (" << item.detail << ")";
    out << "\n";
  }
  out << "dimension " << cfg.spec.dim() << ", "
      << (cfg.spec.is_mean_field() ? std::string("mean-field") : std::to_string(cfg.spec.n_players) + " players")
      << ", ell = " << cfg.spec.ell << "\n";
  if (cfg.spec.ell > 0) {
    const FeasibilityReport f = check_feasibility(cfg.spec);
    out << "discounted feasibility: " << (f.feasible ? "feasible" : "infeasible") << " ("
        << to_string(f.reason) << ")\n";
  }
  out << (rep.ok() ? "valid" : "invalid") << "\n";
  return rep.ok() ? kExitOk : kExitValidation;
}

int cmd_solve(const ParsedConfig& cfg, const RunConfig& run, std::ostream& out) {
  const GameSpec spec = resolve_spec(cfg, run);
  const QGSolution sol = solve(spec);
  const ResidualPair res = hjb_kfp_residual(sol, spec, residual_points(spec.dim()));
  print_solution(out, sol, res);
  emit_json(run, solution_to_json(sol, res));
  return kExitOk;
}

/// Ergodic solutions along a k or r sequence against the closed-form limit.
ConvergenceReport singular_limit_table(const GameSpec& spec, bool noise, const std::vector<double>& seq,
                                       double tol, const LimitTriple& lim) {
  ConvergenceReport rep;
  rep.parameter = noise ? "k" : "r";
  rep.params = seq;
  rep.tol = tol;
  rep.coefficients = {{"Lambda/2", {}, false}, {"rho", {}, false}, {"mu", {}, false}, {"lambda", {}, false}};
  for (double p : seq) {
    GameSpec s = spec;
    (noise ? s.k : s.r) = p;
    const VFamilySolution v = v_family_solve(s);
    rep.coefficients[0].errors.push_back(max_abs(0.5 * v.Lambda.matrix() - lim.value.M.matrix()));
    rep.coefficients[1].errors.push_back(max_abs(v.rho - lim.value.b));
    rep.coefficients[2].errors.push_back(max_abs(v.mu - lim.muhat));
    rep.coefficients[3].errors.push_back(std::abs(v.per_player[0] - lim.lambda));
  }
  for (auto& c : rep.coefficients) c.decayed = decays(c.errors, tol);
  return rep;
}

std::vector<double> sequence_or(const std::vector<double>& given, std::vector<double> fallback) {
  return given.empty() ? fallback : given;
}

void require_mean_field(const GameSpec& spec, const std::string& kind) {
  if (!spec.is_mean_field()) fail(ErrorKind::ValidationError, "limit kind '" + kind + "' needs N = mf");
}

int cmd_limit(const ParsedConfig& cfg, const RunConfig& run, std::ostream& out) {
  GameSpec spec = cfg.spec;
  if (run.ell) spec.ell = *run.ell;
  const std::vector<int> n_seq = run.n_seq.empty() ? default_player_sequence() : run.n_seq;

  if (run.kind == "discount") {
    spec.ell = 0.0;
    const ConvergenceReport rep =
        vanishing_discount_limit(spec, sequence_or(run.seq, default_discount_sequence()), run.tol);
    print_convergence(out, rep);
    emit_json(run, to_json(rep));
    emit_csv(run, to_rows(rep));
    return kExitOk;
  }
  if (run.kind == "noise" || run.kind == "cheap") {
    const bool noise = run.kind == "noise";
    spec.ell = 0.0;
    const LimitTriple lim = noise ? deterministic_limit(spec) : cheap_control_limit(spec);
    const ConvergenceReport rep = singular_limit_table(
        spec, noise, sequence_or(run.seq, noise ? default_noise_sequence() : default_control_sequence()),
        run.tol, lim);
    out << (noise ? "k -> 0" : "r -> 0") << " limit: lambda = " << lim.lambda << ", Dirac at mu = ["
        << lim.muhat.transpose() << "]\n";
    print_convergence(out, rep);
    emit_json(run, Json{{"limit", to_json(lim)}, {"table", to_json(rep)}});
    emit_csv(run, to_rows(rep));
    return kExitOk;
  }
  if (run.kind == "meanfield") {
    require_mean_field(spec, run.kind);
    const ConvergenceReport rep = mean_field_convergence(spec, n_seq, cfg.scaling, run.tol);
    print_convergence(out, rep);
    emit_json(run, to_json(rep));
    emit_csv(run, to_rows(rep));
    return kExitOk;
  }
  if (run.kind == "commute") {
    require_mean_field(spec, run.kind);
    spec.ell = 0.0;
    LimitParameter param = LimitParameter::Discount;
    std::vector<double> seq = default_discount_sequence();
    if (run.param == "noise") {
      param = LimitParameter::Noise;
      seq = default_noise_sequence();
    } else if (run.param == "control") {
      param = LimitParameter::ControlCost;
      seq = default_control_sequence();
    }
    const CommuteReport rep =
        commuting_diagram_check(spec, param, sequence_or(run.seq, seq), n_seq, run.tol, cfg.scaling);
    print_commute(out, rep);
    emit_json(run, to_json(rep));
    emit_csv(run, rep.grid);
    return rep.passed ? kExitOk : kExitFailure;
  }
  fail(ErrorKind::ValidationError, "unknown limit kind '" + run.kind + "'");
}

int cmd_simulate(const ParsedConfig& cfg, const RunConfig& run, std::ostream& out) {
  const GameSpec spec = resolve_spec(cfg, run);
  const QGSolution sol = solve(spec);
  const SimConfig sc = sim_config(cfg, run, 10000, 1e-3, 50.0, out);
  const FeedbackLaw law = equilibrium_law(sol, spec.r);
  const CostMode mode = sol.discounted() ? CostMode::Discounted : CostMode::Ergodic;
  const SimReport rep = estimate_cost(spec, {law, law, 0}, sc, mode);
  const double exact = sol.per_player.front();
  out << (sol.discounted() ? "discounted cost: " : "ergodic cost: ") << sim_summary_line(rep) << "\n";
  out << "  exact " << exact << ", deviation " << (rep.estimate - exact) / rep.std_error
      << " std errors; horizon " << rep.horizon << ", dt " << rep.dt << ", " << rep.elapsed_seconds << " s\n";
  Json j = to_json(rep);
  j["exact"] = exact;
  emit_json(run, j);
  if (!run.csv_path.empty()) {
    std::ostringstream os;
    write_paths_csv(os, spec, law, sc, std::max(run.dump_paths, 1), run.stride);
    write_text_file(run.csv_path, os.str());
  }
  return kExitOk;
}

int cmd_verify(const ParsedConfig& cfg, const RunConfig& run, std::ostream& out) {
  const GameSpec spec = resolve_spec(cfg, run);
  const auto pts = residual_points(spec.dim());
  Json report;
  bool ok = true;
  auto check = [&](const std::string& name, bool passed, const std::string& detail) {
    out << (passed ? "  ok    " : "  FAIL  ") << name << ": " << detail << "\n";
    report["checks"].push_back({{"name", name}, {"passed", passed}, {"detail", detail}});
    ok = ok && passed;
  };
  auto fmt = [](double v) {
    std::ostringstream os;
    os << std::setprecision(3) << v;
    return os.str();
  };

  const QGSolution fresh = solve(spec);
  QGSolution sol = fresh;
  if (!run.solution_path.empty()) {
    const Json stored = read_json_file(run.solution_path);
    sol = solution_from_json(stored);
    if (sol.Sigma.dim() != spec.dim()) fail(ErrorKind::ValidationError, "solution dimension does not match spec");
    const ResidualPair recomputed = hjb_kfp_residual(sol, spec, pts);
    if (stored.contains("residuals")) {
      const bool same = stored["residuals"].value("hjb", -1.0) == recomputed.hjb &&
                        stored["residuals"].value("kfp", -1.0) == recomputed.kfp;
      check("stored residuals reproduce", same, same ? "identical" : "differ from recomputation");
    }
    const double gap = std::max({max_abs(sol.Lambda.matrix() - fresh.Lambda.matrix()),
                                 max_abs(sol.Sigma.matrix() - fresh.Sigma.matrix()), max_abs(sol.rho - fresh.rho),
                                 max_abs(sol.mu - fresh.mu)});
    check("agrees with fresh solve", gap <= kResidualTol, "max coefficient gap " + fmt(gap));
  }

  const ResidualPair res = hjb_kfp_residual(sol, spec, pts);
  check("HJB residual", res.hjb <= kResidualTol, fmt(res.hjb) + " at " + std::to_string(pts.size()) + " points");
  check("KFP residual", res.kfp <= kResidualTol, fmt(res.kfp) + " at " + std::to_string(pts.size()) + " points");

  const FeedbackLaw law = equilibrium_law(sol, spec.r);
  const DistributionDesc stat = stationary_law(spec.A, spec.k, law);
  const double mean_gap = max_abs(mean_of(stat) - sol.mu);
  const double cov_gap = max_abs(covariance_of(stat)->matrix() - sol.Sigma.inverse().matrix());
  check("Lyapunov oracle", std::max(mean_gap, cov_gap) <= kResidualTol,
        "stationary law of the feedback vs N(mu, Sigma^-1): mean " + fmt(mean_gap) + ", cov " + fmt(cov_gap));

  if (!sol.discounted()) {
    const VFamilySolution v = v_family_solve(spec);
    const double gap = std::max({max_abs(v.precision().matrix() - sol.Sigma.matrix()),
                                 max_abs(v.Lambda.matrix() - sol.Lambda.matrix()), max_abs(v.mu - sol.mu),
                                 std::abs(v.per_player[0] - sol.per_player[0])});
    check("closed-form cross-check", gap <= kResidualTol, "max gap " + fmt(gap));
  }

  if (!run.skip_monte_carlo) {
    const SimConfig sc = sim_config(cfg, run, 2000, 1e-2, 50.0, out);
    const NashReport nash = nash_deviation_test(spec, sol, default_deviation_battery(sol, spec.r), sc);
    print_nash(out, nash);
    report["nash"] = to_json(nash);
    report["seed"] = sc.seed;
    check("Nash battery", nash.passed(), std::to_string(nash.results.size()) + " unilateral deviations");
  }

  report["solution"] = solution_to_json(sol, res);
  report["passed"] = ok;
  out << (ok ? "verified" : "verification failed") << "\n";
  emit_json(run, report);
  return ok ? kExitOk : kExitFailure;
}

}  // namespace

GameSpec resolve_spec(const ParsedConfig& cfg, const RunConfig& run) {
  GameSpec spec = cfg.spec;
  if (run.ell) spec.ell = *run.ell;
  const std::string mode = run.mode.value_or(cfg.run.mode.value_or(""));
  const bool wants_mf = mode == "mf-ergodic" || mode == "mf-discounted";
  const bool wants_np = mode == "ergodic" || mode == "discounted";
  if (!mode.empty() && !wants_mf && !wants_np) fail(ErrorKind::ValidationError, "unknown mode '" + mode + "'");

  if (wants_mf && !spec.is_mean_field()) {
    fail(ErrorKind::ValidationError, "mode " + mode + " needs a mean-field config (N = mf)");
  }
  if (spec.is_mean_field() && (wants_np || run.n_players)) {
    if (!run.n_players) fail(ErrorKind::ValidationError, "an N-player mode on a mean-field config needs --N");
    spec = scaled_game(spec, *run.n_players, cfg.scaling);
  } else if (run.n_players) {
    const auto& cost = spec.n_player_cost();
    if (!cost.shared_opponent_costs()) {
      fail(ErrorKind::ValidationError, "--N cannot change the player count when C or D are given per player");
    }
    spec.n_players = *run.n_players;
  }

  if (mode == "ergodic" || mode == "mf-ergodic") spec.ell = 0.0;
  if ((mode == "discounted" || mode == "mf-discounted") && !(spec.ell > 0.0)) {
    fail(ErrorKind::ValidationError, "mode " + mode + " needs ell > 0 (config key ell or --ell)");
  }
  require_valid(spec);
  return spec;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Affine Nash equilibria of linear-quadratic N-player and mean-field games"};
  app.require_subcommand(1);
  RunConfig rc;

  auto add_spec = [&rc](CLI::App* sub) {
    sub->add_option("spec", rc.spec_path, "game config file")->required();
  };
  auto add_outputs = [&rc](CLI::App* sub, bool csv) {
    sub->add_option("--out", rc.out_path, "write a JSON report");
    if (csv) sub->add_option("--csv", rc.csv_path, "write a CSV table");
  };
  auto add_mode = [&rc](CLI::App* sub) {
    sub->add_option("--mode", rc.mode, "ergodic | discounted | mf-ergodic | mf-discounted")
        ->check(CLI::IsMember({"ergodic", "discounted", "mf-ergodic", "mf-discounted"}));
    sub->add_option("--ell", rc.ell, "discount rate")->check(CLI::NonNegativeNumber);
    sub->add_option("--N", rc.n_players, "number of players")->check(CLI::PositiveNumber);
  };
  auto add_sim = [&rc](CLI::App* sub) {
    sub->add_option("--paths", rc.paths, "Monte Carlo paths")->check(CLI::PositiveNumber);
    sub->add_option("--dt", rc.dt, "Euler-Maruyama step")->check(CLI::PositiveNumber);
    sub->add_option("--T", rc.T, "horizon")->check(CLI::PositiveNumber);
    sub->add_option("--seed", rc.seed, "random seed (generated and printed when omitted)");
  };

  auto* validate = app.add_subcommand("validate", "check a config against the standing assumptions");
  add_spec(validate);

  auto* solve_cmd = app.add_subcommand("solve", "compute the quadratic-Gaussian equilibrium");
  add_spec(solve_cmd);
  add_mode(solve_cmd);
  add_outputs(solve_cmd, false);

  auto* limit = app.add_subcommand("limit", "tabulate a singular or mean-field limit");
  add_spec(limit);
  limit->add_option("--kind", rc.kind, "discount | noise | cheap | meanfield | commute")
      ->check(CLI::IsMember({"discount", "noise", "cheap", "meanfield", "commute"}))
      ->required();
  limit->add_option("--param", rc.param, "parameter sent to zero by --kind commute")
      ->check(CLI::IsMember({"discount", "noise", "control"}));
  limit->add_option("--seq", rc.seq, "decreasing parameter values")->delimiter(',');
  limit->add_option("--nseq", rc.n_seq, "increasing player counts")->delimiter(',');
  limit->add_option("--tol", rc.tol, "convergence tolerance")->check(CLI::PositiveNumber);
  limit->add_option("--ell", rc.ell, "discount rate for --kind meanfield")->check(CLI::NonNegativeNumber);
  add_outputs(limit, true);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo cost of the equilibrium feedback");
  add_spec(simulate);
  add_mode(simulate);
  add_sim(simulate);
  simulate->add_option("--dump-paths", rc.dump_paths, "paths written to --csv")->check(CLI::NonNegativeNumber);
  simulate->add_option("--stride", rc.stride, "steps between CSV rows")->check(CLI::PositiveNumber);
  add_outputs(simulate, true);

  auto* verify = app.add_subcommand("verify", "residuals, oracles and a Nash deviation battery");
  add_spec(verify);
  add_mode(verify);
  add_sim(verify);
  verify->add_option("--solution", rc.solution_path, "verify a stored JSON solution instead of a fresh one");
  verify->add_flag("--skip-monte-carlo", rc.skip_monte_carlo, "omit the Nash battery");
  add_outputs(verify, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    if (validate->parsed()) return cmd_validate(rc, out);
    const ParsedConfig cfg = parse_config_file(rc.spec_path);
    if (solve_cmd->parsed()) return cmd_solve(cfg, rc, out);
    if (limit->parsed()) return cmd_limit(cfg, rc, out);
    if (simulate->parsed()) return cmd_simulate(cfg, rc, out);
    return cmd_verify(cfg, rc, out);
  } catch (const Error& e) {
    err << "error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace lqmfg::cli
