#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lqmfg/matalg.hpp"

namespace lqmfg {

/// Nearly-identical-player cost blocks. Player i's cost matrix has Q on its
/// own diagonal block, B/2 between itself and any opponent, C_i on an
/// opponent's diagonal block and D_i between two distinct opponents; H is the
/// happy state and Delta the state opponents are pushed towards.
///
/// C and D hold either one shared matrix or one matrix per player.
struct CostStructure {
  SymMatrix Q;
  SymMatrix B;
  std::vector<SymMatrix> C;
  std::vector<SymMatrix> D;
  Vector H;
  Vector Delta;

  int dim() const noexcept { return Q.dim(); }
  const SymMatrix& C_for(int player) const;
  const SymMatrix& D_for(int player) const;
  /// True when C and D are shared so all players have identical costs.
  bool shared_opponent_costs() const noexcept { return C.size() == 1 && D.size() == 1; }
};

/// Mean-field limits of the scaled cost blocks.
struct MFCost {
  SymMatrix Qhat;
  SymMatrix Bhat;
  SymMatrix Chat;
  SymMatrix Dhat;
  Vector H;
  Vector Delta;

  int dim() const noexcept { return Qhat.dim(); }
};

/// How Q^N approaches Qhat in the scaled N-player family.
enum class QScaling {
  OnePlusInvN,  ///< Q^N = Qhat (1 + 1/N)
  Constant,     ///< Q^N = Qhat
};

/// Full game instance. Noise and control weights are scalar (nu = k I,
/// R = r I); ell = 0 selects the ergodic cost. Whether the game is an N-player
/// game or its mean-field limit is decided by which cost variant is held.
struct GameSpec {
  Matrix A;
  double k = 1.0;
  double r = 1.0;
  double ell = 0.0;
  int n_players = 1;  ///< ignored for mean-field specs
  std::variant<CostStructure, MFCost> cost;

  static GameSpec n_player(Matrix A, double k, double r, double ell, int n, CostStructure cost);
  static GameSpec mean_field(Matrix A, double k, double r, double ell, MFCost cost);

  int dim() const;
  bool is_mean_field() const noexcept { return std::holds_alternative<MFCost>(cost); }
  const CostStructure& n_player_cost() const;
  const MFCost& mf_cost() const;
  /// Own-state cost block: Q, or Qhat for mean-field specs.
  const SymMatrix& own_cost() const;
  /// A as a SymMatrix; throws AssumptionViolation when A is not symmetric.
  SymMatrix A_sym() const;
};

struct AssumptionCheck {
  std::string id;  ///< e.g. "(H1) sigma invertible"
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<AssumptionCheck> items;

  bool ok() const;
  std::vector<std::string> failures() const;
};

/// With `enumerate_are` the Riccati-Sylvester item is confirmed on every
/// enumerated SPD solution (d <= 6); otherwise it is inferred from the
/// symmetry items, which imply it.
ValidationReport validate_assumptions(const GameSpec& spec, bool enumerate_are = true);

/// Throws AssumptionViolation listing the failed items.
/// Solvers call this; it skips the enumeration.
void require_valid(const GameSpec& spec);

/// N-player cost blocks from their mean-field limits with the natural scaling:
/// B/(N-1), C/(N-1), D/(N-1)^2 and Q^N per `scaling`.
CostStructure scaled_costs(const MFCost& mf, int n, QScaling scaling = QScaling::OnePlusInvN);

/// Finite-N game with costs from scaled_costs and the same dynamics.
GameSpec scaled_game(const GameSpec& mf_spec, int n, QScaling scaling = QScaling::OnePlusInvN);

/// Covariance argument of the cost constant: a matrix, or nullopt for the
/// degenerate (Dirac) case in which trace terms vanish.
using Covariance = std::optional<SymMatrix>;

/// Constant part F^i(Sigma, mu) of player i's averaged running cost.
double eval_Fi(const CostStructure& cost, int n, int player, const Covariance& cov,
               const Vector& mu);
/// Mean-field counterpart Fhat(Sigma, mu).
double eval_Fi(const MFCost& cost, const Covariance& cov, const Vector& mu);

/// Gaussian law N(mean, precision^-1); the precision must be SPD.
class Gaussian {
 public:
  Gaussian(Vector mean, SymMatrix precision);

  const Vector& mean() const noexcept { return mean_; }
  const SymMatrix& precision() const noexcept { return precision_; }
  SymMatrix covariance() const { return precision_.inverse(); }
  double density(const Vector& x) const;

 private:
  Vector mean_;
  SymMatrix precision_;
};

struct Dirac {
  Vector point;
};

using DistributionDesc = std::variant<Gaussian, Dirac>;

const Vector& mean_of(const DistributionDesc& m);
/// Covariance, or nullopt for a Dirac mass.
Covariance covariance_of(const DistributionDesc& m);

/// x -> x^T M x + b^T x + c
struct QuadraticForm {
  SymMatrix M;
  Vector b;
  double c = 0.0;

  double operator()(const Vector& x) const { return x.dot(M * x) + b.dot(x) + c; }
  Vector gradient(const Vector& x) const { return 2.0 * (M * x) + b; }
  double laplacian() const { return 2.0 * M.trace(); }
};

/// Player i's running cost f^i(x) when every opponent is distributed as `others`.
double eval_fi_gaussian(const CostStructure& cost, int n, int player, const Vector& x,
                        const DistributionDesc& others);

/// The mean-field running cost Vhat[m] as a quadratic form in x.
QuadraticForm vhat_quadratic(const MFCost& mf, const DistributionDesc& m);

/// Player i's running cost x -> f^i(x; m, ..., m) as a quadratic form
/// (for mean-field specs, Vhat[m]).
QuadraticForm running_cost_form(const GameSpec& spec, int player, const DistributionDesc& others);

/// Per-player blocks obtained by rewriting a cost of the form
/// (x^i - Gamma * mean(x) - eta)^T Qb (x^i - Gamma * mean(x) - eta).
struct HcmBlocks {
  Matrix own;      ///< Q^i_ii
  Matrix cross;    ///< Q^i_ij, j != i (Q^i_ji is its transpose)
  Matrix others;   ///< Q^i_jk, j, k != i
  Vector ref_own;  ///< reference state of player i's own coordinate
  Vector ref_other;
};

HcmBlocks convert_hcm_cost(const Matrix& gamma, const Vector& eta, const SymMatrix& qb, int n);

/// Player i's full Nd x Nd cost matrix from HCM blocks.
Matrix assemble_player_matrix(const HcmBlocks& blocks, int n, int player);

/// Player i's full Nd x Nd cost matrix for nearly identical players.
Matrix assemble_player_matrix(const CostStructure& cost, int n, int player);

}  // namespace lqmfg
