#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lqmfg/ergodic_solver.hpp"
#include "lqmfg/game_model.hpp"

namespace lqmfg {

/// Affine feedback alpha(x) = K x + c. The closed loop is
/// dX = [(A - K) X - c] dt + sqrt(2k) dW.
struct FeedbackLaw {
  Matrix K;
  Vector c;

  Vector operator()(const Vector& x) const { return K * x + c; }
  bool admissible(const Matrix& a) const { return is_hurwitz(a - K); }
};

/// K = Lambda / r, c = rho / r.
FeedbackLaw equilibrium_law(const QGSolution& sol, double r);

/// Invariant law of the closed loop under `law`; Dirac when k == 0.
/// Throws NotAdmissible.
DistributionDesc stationary_law(const Matrix& a, double k, const FeedbackLaw& law);

enum class HorizonPolicy {
  Extend,  ///< lengthen a discounted horizon until exp(-ell T) <= truncation_tol
  Strict,  ///< raise TruncationTooCoarse instead
};

struct SimConfig {
  double dt = 1e-3;
  double T = 50.0;
  int n_paths = 10000;
  std::uint64_t seed = 0;
  Vector x0;  ///< empty means the origin
  HorizonPolicy horizon_policy = HorizonPolicy::Extend;
  double truncation_tol = 1e-6;
  int batches = 20;  ///< path batches for moment standard errors
};

struct SimReport {
  double estimate = 0.0;
  double std_error = 0.0;  ///< sample std / sqrt(n_paths)
  int n_paths = 0;
  std::uint64_t seed = 0;
  double elapsed_seconds = 0.0;
  double dt = 0.0;
  double horizon = 0.0;     ///< simulated horizon (may exceed cfg.T when extended)
  double bias_bound = 0.0;  ///< truncation tail estimate for discounted costs
  Vector mean;              ///< empirical mean at the horizon
  Vector mean_std_error;
  Matrix cov;               ///< empirical covariance at the horizon
  Matrix cov_std_error;     ///< from path batching
  std::vector<double> path_values;  ///< per-path cost, empty for moment-only runs

  bool bit_identical(const SimReport& o) const;
};

enum class CostMode { Discounted, Ergodic };

/// Terminal moments of the closed loop. Throws NotAdmissible, UnstableStep,
/// InvalidArgument.
SimReport simulate_closed_loop(const GameSpec& spec, const FeedbackLaw& law, const SimConfig& cfg);

/// The evaluated player uses `own`; every opponent uses `others`, whose
/// invariant law enters the running cost.
struct PlayerLaws {
  FeedbackLaw own;
  FeedbackLaw others;
  int player = 0;
};

/// Monte Carlo cost of one player. Discounted: integral of
/// exp(-ell t)(r|alpha|^2/2 + f(X_t)) up to the horizon; Ergodic: time average
/// of the running cost over [T/2, T]. Throws TruncationTooCoarse (Strict
/// policy), NotAdmissible, UnstableStep, InvalidArgument.
SimReport estimate_cost(const GameSpec& spec, const PlayerLaws& laws, const SimConfig& cfg,
                        CostMode mode);

struct Deviation {
  std::string label;
  int player = 0;
  FeedbackLaw law;
};

struct DeviationResult {
  std::string label;
  int player = 0;
  double equilibrium_cost = 0.0;
  double deviation_cost = 0.0;
  double gap = 0.0;        ///< deviation_cost - equilibrium_cost
  double std_error = 0.0;  ///< of the paired per-path difference
  bool passed = false;     ///< gap >= -3 std_error
};

struct NashReport {
  std::vector<DeviationResult> results;
  bool passed() const;
};

/// Unilateral deviations against the equilibrium, using the same noise for
/// both runs so the gap is estimated from paired differences.
NashReport nash_deviation_test(const GameSpec& spec, const QGSolution& eq,
                               const std::vector<Deviation>& deviations, const SimConfig& cfg);

/// A standard battery of six unilateral deviations of player 0.
std::vector<Deviation> default_deviation_battery(const QGSolution& eq, double r);

/// Writes t,path_id,x0,...,x{d-1} every `stride` steps for the first n_dump paths.
void write_paths_csv(std::ostream& os, const GameSpec& spec, const FeedbackLaw& law,
                     const SimConfig& cfg, int n_dump, int stride = 1);

}  // namespace lqmfg
