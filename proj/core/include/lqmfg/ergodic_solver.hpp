#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "lqmfg/game_model.hpp"

namespace lqmfg {

enum class SolutionMode { Ergodic, Discounted, MeanFieldErgodic, MeanFieldDiscounted };

std::string_view to_string(SolutionMode mode) noexcept;

/// Quadratic-Gaussian equilibrium: every player uses v(x) = x^T Lambda x / 2
/// + rho^T x (+ c^i when discounted) and is distributed as N(mu, Sigma^-1).
/// per_player holds lambda^i for ergodic games and c^i for discounted ones;
/// mean-field solutions carry a single entry.
struct QGSolution {
  SymMatrix Lambda;
  SymMatrix Sigma;
  Vector rho;
  Vector mu;
  std::vector<double> per_player;
  SolutionMode mode = SolutionMode::Ergodic;
  double ell = 0.0;
  double cond_B = 0.0;  ///< condition number of the matrix of the linear system for mu

  bool discounted() const noexcept {
    return mode == SolutionMode::Discounted || mode == SolutionMode::MeanFieldDiscounted;
  }
  bool mean_field() const noexcept {
    return mode == SolutionMode::MeanFieldErgodic || mode == SolutionMode::MeanFieldDiscounted;
  }
  double constant(int player) const;
  /// v^i(x), including c^i for discounted solutions.
  double value(const Vector& x, int player = 0) const;
  Gaussian invariant_measure() const { return Gaussian(mu, Sigma); }
};

/// Condition-number ceiling for the mean-vector system.
inline constexpr double kMaxConditionB = 1e12;

/// Unique QG solution of the ergodic HJB-KFP system (N-player or mean-field,
/// depending on the spec). Requires spec.ell == 0.
/// Throws AssumptionViolation, BNotInvertible.
QGSolution solve_ergodic(const GameSpec& spec);

/// Dispatches to solve_ergodic when ell is below 1e-12, else to solve_discounted.
QGSolution solve(const GameSpec& spec);

struct ResidualPair {
  double hjb = 0.0;
  double kfp = 0.0;
};

/// Max pointwise residuals of the HJB and KFP equations at `xs`, each divided
/// by (1 + |x|^2). The KFP residual is taken relative to the density m(x).
/// Works for ergodic and discounted solutions alike.
ResidualPair hjb_kfp_residual(const QGSolution& sol, const GameSpec& spec,
                              std::span<const Vector> xs);

}  // namespace lqmfg
