#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lqmfg/ergodic_solver.hpp"
#include "lqmfg/game_model.hpp"

namespace lqmfg {

/// Ergodic solution written through V = k sqrt(r) Sigma, which does not depend on k.
struct VFamilySolution {
  SymMatrix V;
  SymMatrix Lambda;
  Vector rho;
  Vector mu;
  std::vector<double> per_player;  ///< lambda^i
  double k = 1.0;
  double r = 1.0;

  /// Inverse covariance V / (k sqrt(r)).
  SymMatrix precision() const;
  QGSolution to_qg() const;
};

/// Throws InvalidArgument (ell != 0), AssumptionViolation, BNotInvertible.
VFamilySolution v_family_solve(const GameSpec& spec);

/// Limit value, measure and ergodic constant of a k -> 0 or r -> 0 limit.
struct LimitTriple {
  QuadraticForm value;  ///< v(x) = x^T M x + b^T x
  DistributionDesc measure;
  double lambda = 0.0;             ///< player 0 (mean-field value for mean-field specs)
  std::vector<double> per_player;  ///< one entry per player, or one for mean-field specs
  SymMatrix Vhat;
  Vector muhat;
};

/// k -> 0: V = sqrt(2Q + r A^2), Dirac measure at mu.
LimitTriple deterministic_limit(const GameSpec& spec);

/// r -> 0: V = sqrt(2Q), v identically zero, Dirac measure at mu.
LimitTriple cheap_control_limit(const GameSpec& spec);

struct CoefficientSeries {
  std::string name;
  std::vector<double> errors;  ///< aligned with ConvergenceReport::params
  bool decayed = false;
};

struct ConvergenceReport {
  std::string parameter;         ///< "ell", "k", "r" or "N"
  std::vector<double> params;
  std::vector<int> players;      ///< N for each row (0 for mean-field rows); may be empty
  std::vector<CoefficientSeries> coefficients;
  double tol = 0.0;

  bool all_decayed() const;
  /// Sum over coefficients of the error at row i.
  double total_error(std::size_t i) const;
};

/// Errors that end at or below tol and never exceed twice the largest earlier
/// entry (values under 1e-12 are treated as zero).
bool decays(const std::vector<double>& errors, double tol);

/// Discounted solutions along ell_seq against the ergodic solution of the
/// same spec. Errors for Sigma, mu, Lambda, rho and max_i |ell c^i - lambda^i|.
ConvergenceReport vanishing_discount_limit(const GameSpec& spec, const std::vector<double>& ell_seq,
                                           double tol = 1e-3);

/// N-player solutions of scaled games against the mean-field solution.
/// Uses the discounted solver when mf_spec.ell > 0.
ConvergenceReport mean_field_convergence(const GameSpec& mf_spec, const std::vector<int>& n_seq,
                                         QScaling scaling = QScaling::OnePlusInvN,
                                         double tol = 1e-3);

enum class LimitParameter { Discount, Noise, ControlCost };

const char* to_string(LimitParameter p) noexcept;

struct TableRow {
  double param = 0.0;
  int n = 0;  ///< 0 for mean-field
  std::string coefficient;
  double error = 0.0;
};

struct CommuteReport {
  LimitParameter parameter = LimitParameter::Discount;
  std::vector<std::string> names;
  std::vector<Matrix> mean_field_first;   ///< N -> infinity, then parameter -> 0
  std::vector<Matrix> parameter_first;    ///< parameter -> 0 for each N, then N -> infinity
  std::vector<double> discrepancies;      ///< max-abs difference per coefficient
  std::vector<TableRow> grid;             ///< finite solves on the diagonal (param_n, N_n)
  double tol = 0.0;
  bool passed = false;

  double max_discrepancy() const;
};

/// Compares both orders of the iterated limits. The parameter limit is taken
/// exactly (ergodic solve or limit formula); the player limit of the
/// parameter-first path uses one Richardson step in 1/N over the last two
/// entries of n_seq. The diagonal grid of finite solves is reported alongside.
CommuteReport commuting_diagram_check(const GameSpec& mf_spec, LimitParameter param,
                                      const std::vector<double>& param_seq,
                                      const std::vector<int>& n_seq, double tol = 1e-3,
                                      QScaling scaling = QScaling::OnePlusInvN);

std::vector<double> default_discount_sequence();  ///< 0.2 * 2^-n, n = 0..8
std::vector<double> default_noise_sequence();     ///< 2^-n
std::vector<double> default_control_sequence();   ///< 2^-n
std::vector<int> default_player_sequence();       ///< 10 * 2^n

std::vector<TableRow> to_rows(const ConvergenceReport& report);
void write_csv(std::ostream& os, const std::vector<TableRow>& rows);

}  // namespace lqmfg
