#include "lqmfg/limits.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "lqmfg/discounted_solver.hpp"
#include "lqmfg/error.hpp"

namespace lqmfg {

namespace {

void require_ergodic(const GameSpec& spec, const char* what) {
  if (spec.ell != 0.0) {
    fail(ErrorKind::InvalidArgument, std::string(what) + " requires an ergodic spec (ell == 0)");
  }
}

// V and mu given V^2; the mean solves (V^2 + (N-1)B) mu = 2QH + (N-1)B Delta.
struct VCore {
  SymMatrix V;
  Vector mu;
};

VCore v_core(const GameSpec& spec, const SymMatrix& v_squared) {
  SymMatrix lhs = v_squared;
  Vector rhs;
  if (spec.is_mean_field()) {
    const auto& c = spec.mf_cost();
    lhs = lhs + c.Bhat;
    rhs = 2.0 * (c.Qhat * c.H) + c.Bhat * c.Delta;
  } else {
    const auto& c = spec.n_player_cost();
    const double n1 = spec.n_players - 1.0;
    lhs = lhs + c.B * n1;
    rhs = 2.0 * (c.Q * c.H) + n1 * (c.B * c.Delta);
  }
  const double cond = condition_number(lhs.matrix());
  if (!(cond <= kMaxConditionB)) {
    std::ostringstream os;
    os << "mean-vector system has condition number " << cond;
    fail(ErrorKind::BNotInvertible, os.str());
  }
  return {sqrt_spd(v_squared), lhs.matrix().fullPivLu().solve(rhs)};
}

// F^i(cov, mu) + shift for every player (a single entry for mean-field specs).
std::vector<double> player_constants(const GameSpec& spec, const Covariance& cov, const Vector& mu,
                                     double shift) {
  if (spec.is_mean_field()) return {eval_Fi(spec.mf_cost(), cov, mu) + shift};
  const auto& c = spec.n_player_cost();
  const int n = spec.n_players;
  if (c.shared_opponent_costs()) {
    return std::vector<double>(static_cast<std::size_t>(n), eval_Fi(c, n, 0, cov, mu) + shift);
  }
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(eval_Fi(c, n, i, cov, mu) + shift);
  return out;
}

SymMatrix a_squared(const GameSpec& spec) {
  const SymMatrix a = spec.A_sym();
  return SymMatrix::symmetrize(a.matrix() * a.matrix());
}

LimitTriple dirac_limit(const GameSpec& spec, const SymMatrix& v_squared, bool zero_value) {
  require_ergodic(spec, "limit");
  require_valid(spec);
  const VCore core = v_core(spec, v_squared);
  const int d = spec.dim();
  const double sr = std::sqrt(spec.r);
  const double mean_term = 0.5 * core.mu.dot(v_squared * core.mu);
  std::vector<double> lambdas = player_constants(spec, std::nullopt, core.mu, -mean_term);

  QuadraticForm value{SymMatrix::zero(d), Vector::Zero(d), 0.0};
  if (!zero_value) {
    value.M = SymMatrix::symmetrize(0.5 * (sr * core.V.matrix() + spec.r * spec.A));
    value.b = -sr * (core.V * core.mu);
  }
  return LimitTriple{value, Dirac{core.mu}, lambdas.front(), lambdas, core.V, core.mu};
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

Matrix scalar_matrix(double v) { return Matrix::Constant(1, 1, v); }

double max_constant_gap(const std::vector<double>& a, const std::vector<double>& b, double scale) {
  double out = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double ref = b.size() == 1 ? b.front() : b[i];
    out = std::max(out, std::abs(scale * a[i] - ref));
  }
  return out;
}

}  // namespace

SymMatrix VFamilySolution::precision() const { return V * (1.0 / (k * std::sqrt(r))); }

QGSolution VFamilySolution::to_qg() const {
  return QGSolution{Lambda, precision(), rho, mu, per_player, SolutionMode::Ergodic, 0.0, 0.0};
}

VFamilySolution v_family_solve(const GameSpec& spec) {
  require_ergodic(spec, "v_family_solve");
  require_valid(spec);
  const double k = spec.k;
  const double r = spec.r;
  const double sr = std::sqrt(r);
  const SymMatrix v_squared = spec.own_cost() * 2.0 + a_squared(spec) * r;
  const VCore core = v_core(spec, v_squared);
  const Matrix lambda = sr * core.V.matrix() + r * spec.A;
  const double shift =
      -0.5 * core.mu.dot(v_squared * core.mu) + k * sr * (core.V.matrix() + sr * spec.A).trace();
  VFamilySolution out{core.V,
                      SymMatrix::symmetrize(lambda),
                      -sr * (core.V * core.mu),
                      core.mu,
                      {},
                      k,
                      r};
  out.per_player = player_constants(spec, out.precision().inverse(), core.mu, shift);
  return out;
}

LimitTriple deterministic_limit(const GameSpec& spec) {
  return dirac_limit(spec, spec.own_cost() * 2.0 + a_squared(spec) * spec.r, false);
}

LimitTriple cheap_control_limit(const GameSpec& spec) {
  return dirac_limit(spec, spec.own_cost() * 2.0, true);
}

bool decays(const std::vector<double>& errors, double tol) {
  // Growth is measured against the running peak so that a coefficient whose
  // error changes sign (passing near zero) is not flagged.
  constexpr double floor = 1e-12;
  if (errors.empty() || !(errors.back() <= tol)) return false;
  double peak = errors.front();
  for (std::size_t i = 1; i < errors.size(); ++i) {
    if (errors[i] > floor && errors[i] > 2.0 * peak) return false;
    peak = std::max(peak, errors[i]);
  }
  return true;
}

bool ConvergenceReport::all_decayed() const {
  return std::all_of(coefficients.begin(), coefficients.end(),
                     [](const CoefficientSeries& c) { return c.decayed; });
}

double ConvergenceReport::total_error(std::size_t i) const {
  double sum = 0.0;
  for (const auto& c : coefficients) sum += c.errors.at(i);
  return sum;
}

ConvergenceReport vanishing_discount_limit(const GameSpec& spec, const std::vector<double>& ell_seq,
                                           double tol) {
  if (ell_seq.empty()) fail(ErrorKind::InvalidArgument, "empty discount sequence");
  GameSpec probe = spec;
  probe.ell = 0.0;
  const QGSolution ergodic = solve_ergodic(probe);

  ConvergenceReport report;
  report.parameter = "ell";
  report.tol = tol;
  report.coefficients = {{"Sigma", {}, false}, {"mu", {}, false}, {"Lambda", {}, false},
                         {"rho", {}, false},   {"ell*c", {}, false}};
  const int n = spec.is_mean_field() ? 0 : spec.n_players;
  for (double ell : ell_seq) {
    probe.ell = ell;
    const QGSolution disc = solve_discounted(probe);
    report.params.push_back(ell);
    report.players.push_back(n);
    report.coefficients[0].errors.push_back(spec_norm(disc.Sigma - ergodic.Sigma));
    report.coefficients[1].errors.push_back((disc.mu - ergodic.mu).norm());
    report.coefficients[2].errors.push_back(spec_norm(disc.Lambda - ergodic.Lambda));
    report.coefficients[3].errors.push_back((disc.rho - ergodic.rho).norm());
    report.coefficients[4].errors.push_back(
        max_constant_gap(disc.per_player, ergodic.per_player, ell));
  }
  for (auto& c : report.coefficients) c.decayed = decays(c.errors, tol);
  return report;
}

ConvergenceReport mean_field_convergence(const GameSpec& mf_spec, const std::vector<int>& n_seq,
                                         QScaling scaling, double tol) {
  if (!mf_spec.is_mean_field()) fail(ErrorKind::InvalidArgument, "expected a mean-field spec");
  if (n_seq.empty()) fail(ErrorKind::InvalidArgument, "empty player sequence");
  const QGSolution limit = solve(mf_spec);

  ConvergenceReport report;
  report.parameter = "N";
  report.tol = tol;
  report.coefficients = {{"Sigma", {}, false},
                         {"mu", {}, false},
                         {"Lambda", {}, false},
                         {"rho", {}, false},
                         {limit.discounted() ? "c" : "lambda", {}, false}};
  for (int n : n_seq) {
    const QGSolution sol = solve(scaled_game(mf_spec, n, scaling));
    report.params.push_back(n);
    report.players.push_back(n);
    report.coefficients[0].errors.push_back(spec_norm(sol.Sigma - limit.Sigma));
    report.coefficients[1].errors.push_back((sol.mu - limit.mu).norm());
    report.coefficients[2].errors.push_back(spec_norm(sol.Lambda - limit.Lambda));
    report.coefficients[3].errors.push_back((sol.rho - limit.rho).norm());
    report.coefficients[4].errors.push_back(max_constant_gap(sol.per_player, limit.per_player, 1.0));
  }
  for (auto& c : report.coefficients) c.decayed = decays(c.errors, tol);
  return report;
}

const char* to_string(LimitParameter p) noexcept {
  switch (p) {
    case LimitParameter::Discount: return "discount";
    case LimitParameter::Noise: return "noise";
    case LimitParameter::ControlCost: return "control";
  }
  return "unknown";
}

double CommuteReport::max_discrepancy() const {
  return discrepancies.empty() ? 0.0 : *std::max_element(discrepancies.begin(), discrepancies.end());
}

namespace {

std::vector<Matrix> coefficients_of(const QGSolution& s) {
  return {s.Sigma.matrix(), s.mu, s.Lambda.matrix(), s.rho, scalar_matrix(s.constant(0))};
}

std::vector<Matrix> coefficients_of(const LimitTriple& t) {
  return {t.Vhat.matrix(), t.muhat, 2.0 * t.value.M.matrix(), t.value.b, scalar_matrix(t.lambda)};
}

std::vector<Matrix> coefficients_of(const VFamilySolution& s) {
  return {s.V.matrix(), s.mu, s.Lambda.matrix(), s.rho, scalar_matrix(s.per_player.front())};
}

// The parameter -> 0 limit of an ergodic spec, taken exactly.
std::vector<Matrix> parameter_limit(const GameSpec& spec, LimitParameter param) {
  GameSpec ergodic = spec;
  ergodic.ell = 0.0;
  switch (param) {
    case LimitParameter::Discount: return coefficients_of(solve_ergodic(ergodic));
    case LimitParameter::Noise: return coefficients_of(deterministic_limit(ergodic));
    case LimitParameter::ControlCost: return coefficients_of(cheap_control_limit(ergodic));
  }
  return {};
}

// Finite solve at parameter value p.
std::vector<Matrix> finite_solve(const GameSpec& spec, LimitParameter param, double p) {
  GameSpec s = spec;
  s.ell = 0.0;
  switch (param) {
    case LimitParameter::Discount: {
      s.ell = p;
      QGSolution sol = solve_discounted(s);
      for (double& c : sol.per_player) c *= p;
      return coefficients_of(sol);
    }
    case LimitParameter::Noise: s.k = p; break;
    case LimitParameter::ControlCost: s.r = p; break;
  }
  return coefficients_of(v_family_solve(s));
}

}  // namespace

CommuteReport commuting_diagram_check(const GameSpec& mf_spec, LimitParameter param,
                                      const std::vector<double>& param_seq,
                                      const std::vector<int>& n_seq, double tol,
                                      QScaling scaling) {
  if (!mf_spec.is_mean_field()) fail(ErrorKind::InvalidArgument, "expected a mean-field spec");
  if (param_seq.empty() || n_seq.empty()) {
    fail(ErrorKind::InvalidArgument, "parameter and player sequences must be nonempty");
  }

  CommuteReport report;
  report.parameter = param;
  report.tol = tol;
  if (param == LimitParameter::Discount) {
    report.names = {"Sigma", "mu", "Lambda", "rho", "lambda"};
  } else {
    report.names = {"V", "mu", "Lambda", "rho", "lambda"};
  }

  report.mean_field_first = parameter_limit(mf_spec, param);

  const int n_last = n_seq.back();
  const std::vector<Matrix> last = parameter_limit(scaled_game(mf_spec, n_last, scaling), param);
  if (n_seq.size() >= 2 && n_seq[n_seq.size() - 2] != n_last) {
    const int n_prev = n_seq[n_seq.size() - 2];
    const std::vector<Matrix> prev = parameter_limit(scaled_game(mf_spec, n_prev, scaling), param);
    for (std::size_t c = 0; c < last.size(); ++c) {
      report.parameter_first.push_back(
          (static_cast<double>(n_last) * last[c] - static_cast<double>(n_prev) * prev[c]) /
          static_cast<double>(n_last - n_prev));
    }
  } else {
    report.parameter_first = last;
  }

  for (std::size_t c = 0; c < report.names.size(); ++c) {
    report.discrepancies.push_back(max_abs(report.mean_field_first[c] - report.parameter_first[c]));
  }
  report.passed = report.max_discrepancy() <= tol;

  auto add_rows = [&](double p, int n, const std::vector<Matrix>& values) {
    for (std::size_t c = 0; c < report.names.size(); ++c) {
      report.grid.push_back({p, n, report.names[c], max_abs(values[c] - report.mean_field_first[c])});
    }
  };
  const std::size_t steps = std::min(param_seq.size(), n_seq.size());
  for (std::size_t i = 0; i < param_seq.size(); ++i) {
    add_rows(param_seq[i], 0, finite_solve(mf_spec, param, param_seq[i]));
    if (i < steps) {
      add_rows(param_seq[i], n_seq[i],
               finite_solve(scaled_game(mf_spec, n_seq[i], scaling), param, param_seq[i]));
    }
  }
  return report;
}

std::vector<double> default_discount_sequence() {
  std::vector<double> out;
  for (int n = 0; n <= 8; ++n) out.push_back(0.2 * std::ldexp(1.0, -n));
  return out;
}

std::vector<double> default_noise_sequence() {
  std::vector<double> out;
  for (int n = 0; n <= 8; ++n) out.push_back(std::ldexp(1.0, -n));
  return out;
}

std::vector<double> default_control_sequence() { return default_noise_sequence(); }

std::vector<int> default_player_sequence() {
  std::vector<int> out;
  for (int n = 0; n <= 8; ++n) out.push_back(10 << n);
  return out;
}

std::vector<TableRow> to_rows(const ConvergenceReport& report) {
  std::vector<TableRow> rows;
  for (std::size_t i = 0; i < report.params.size(); ++i) {
    for (const auto& c : report.coefficients) {
      const int n = i < report.players.size() ? report.players[i] : 0;
      rows.push_back({report.params[i], n, c.name, c.errors[i]});
    }
  }
  return rows;
}

void write_csv(std::ostream& os, const std::vector<TableRow>& rows) {
  os << "param,N,coefficient,error\n";
  os << std::setprecision(17);
  for (const auto& row : rows) {
    os << row.param << ',' << row.n << ',' << row.coefficient << ',' << row.error << '\n';
  }
}

}  // namespace lqmfg
