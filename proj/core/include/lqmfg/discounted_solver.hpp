#pragma once

#include <vector>

#include "lqmfg/ergodic_solver.hpp"
#include "lqmfg/game_model.hpp"
#include "lqmfg/riccati.hpp"

namespace lqmfg {

/// Discount rates below this are treated as ergodic.
inline constexpr double kMinDiscount = 1e-12;

/// Coefficients of the discounted Riccati equation
/// Y R Y + Y A_l + A_l^T Y - Q_l = 0 satisfied by the inverse covariance.
struct DiscountedARE {
  SymMatrix cal_r;    ///< (k^2 r / 2) I
  SymMatrix cal_a;    ///< (ell k r / 4) I
  SymMatrix cal_q;    ///< Q + r A^2 / 2 - ell r A / 2

  AREProblem problem() const { return AREProblem(cal_a.matrix(), cal_r, cal_q); }
};

DiscountedARE assemble_discounted_are(const GameSpec& spec);

enum class FeasibilityReason { OK, ImaginaryEigs, NoSPDSolution, BNotInvertible };

const char* to_string(FeasibilityReason reason) noexcept;

struct FeasibilityReport {
  bool feasible = false;
  FeasibilityReason reason = FeasibilityReason::NoSPDSolution;
  SpectrumReport spectrum;
};

/// Whether solve_discounted succeeds for this spec, and why not otherwise.
FeasibilityReport check_feasibility(const GameSpec& spec);

/// QG solution of the discounted system (N-player or mean-field).
/// Throws InvalidArgument (ell < kMinDiscount), DiscountTooLarge,
/// ImaginaryEigenvalues, BNotInvertible, AssumptionViolation.
QGSolution solve_discounted(const GameSpec& spec);

/// Bisection estimate of the largest discount for which solve_discounted
/// succeeds, searched on (0, ell_max]. Returns ell_max when feasible there.
/// Throws InfeasibleAtZero when the ergodic problem has no solution.
double feasibility_threshold(const GameSpec& spec, double ell_max, double tol = 1e-8);

struct HeteroBlocks {
  Matrix Btilde;
  double cond = 0.0;
  bool invertible = false;
};

/// Row block alpha of the result is row block alpha of player alpha's cost
/// matrix, with (A^T R A / 2 - ell R A / 2) added on the diagonal block.
/// `player_costs` holds one (N d) x (N d) symmetric matrix per player.
HeteroBlocks assemble_hetero_blocks(const std::vector<Matrix>& player_costs, const SymMatrix& a,
                                    double r, double ell);

}  // namespace lqmfg
