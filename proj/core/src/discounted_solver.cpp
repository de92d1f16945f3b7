#include "lqmfg/discounted_solver.hpp"

#include <cmath>
#include <sstream>

#include "lqmfg/error.hpp"

namespace lqmfg {

const char* to_string(FeasibilityReason reason) noexcept {
  switch (reason) {
    case FeasibilityReason::OK: return "OK";
    case FeasibilityReason::ImaginaryEigs: return "ImaginaryEigs";
    case FeasibilityReason::NoSPDSolution: return "NoSPDSolution";
    case FeasibilityReason::BNotInvertible: return "BNotInvertible";
  }
  return "unknown";
}

DiscountedARE assemble_discounted_are(const GameSpec& spec) {
  const int d = spec.dim();
  const double k = spec.k;
  const double r = spec.r;
  const double ell = spec.ell;
  const Matrix& a = spec.A;
  const SymMatrix q = spec.own_cost() +
                      SymMatrix::symmetrize(0.5 * r * a.transpose() * a - 0.5 * ell * r * a);
  return DiscountedARE{SymMatrix::scalar(d, 0.5 * k * k * r), SymMatrix::scalar(d, 0.25 * ell * k * r),
                       q};
}

namespace {

// Matrix and right-hand side of the linear system for the mean.
struct MeanSystem {
  SymMatrix lhs;
  Vector rhs;
};

MeanSystem mean_system(const GameSpec& spec, const SymMatrix& cal_q) {
  if (spec.is_mean_field()) {
    const auto& c = spec.mf_cost();
    return {cal_q + c.Bhat * 0.5, c.Qhat * c.H + 0.5 * (c.Bhat * c.Delta)};
  }
  const auto& c = spec.n_player_cost();
  const double w = 0.5 * (spec.n_players - 1);
  return {cal_q + c.B * w, c.Q * c.H + w * (c.B * c.Delta)};
}

}  // namespace

QGSolution solve_discounted(const GameSpec& spec) {
  if (!(spec.ell >= kMinDiscount)) {
    fail(ErrorKind::InvalidArgument, "solve_discounted requires ell > 0; use solve_ergodic");
  }
  require_valid(spec);
  const DiscountedARE are = assemble_discounted_are(spec);
  const AREProblem problem = are.problem();

  SymMatrix sigma = SymMatrix::zero(spec.dim());
  try {
    sigma = solve_are_selected(problem);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ImaginaryEigenvalues) throw;
    fail(ErrorKind::DiscountTooLarge, std::string("no SPD inverse covariance: ") + e.what());
  }
  if (!is_spd(sigma)) {
    std::ostringstream os;
    os << "selected Riccati solution is not positive definite (min eigenvalue "
       << min_eigenvalue(sigma) << ") at ell = " << spec.ell;
    fail(ErrorKind::DiscountTooLarge, os.str());
  }

  const MeanSystem sys = mean_system(spec, are.cal_q);
  const double cond = condition_number(sys.lhs.matrix());
  if (!(cond <= kMaxConditionB)) {
    std::ostringstream os;
    os << "mean-vector system has condition number " << cond;
    fail(ErrorKind::BNotInvertible, os.str());
  }

  const double k = spec.k;
  const double r = spec.r;
  const Matrix& a = spec.A;
  const bool mf = spec.is_mean_field();
  QGSolution sol{SymMatrix::symmetrize(r * (k * sigma.matrix() + a)),
                 sigma,
                 Vector(),
                 sys.lhs.matrix().fullPivLu().solve(sys.rhs),
                 {},
                 mf ? SolutionMode::MeanFieldDiscounted : SolutionMode::Discounted,
                 spec.ell,
                 cond};
  sol.rho = -(r * k) * (sigma * sol.mu);

  const double trace_term = k * r * (k * sigma.matrix() + a).trace();
  const Vector sm = sigma * sol.mu;
  const double mean_term = 0.5 * k * k * r * sm.squaredNorm();
  const Covariance cov = sigma.inverse();
  if (mf) {
    sol.per_player.push_back((eval_Fi(spec.mf_cost(), cov, sol.mu) + trace_term - mean_term) /
                             spec.ell);
  } else {
    const auto& c = spec.n_player_cost();
    const int n = spec.n_players;
    const int players = c.shared_opponent_costs() ? 1 : n;
    for (int i = 0; i < players; ++i) {
      sol.per_player.push_back((eval_Fi(c, n, i, cov, sol.mu) + trace_term - mean_term) /
                               spec.ell);
    }
    if (players == 1) sol.per_player.assign(static_cast<std::size_t>(n), sol.per_player.front());
  }
  return sol;
}

FeasibilityReport check_feasibility(const GameSpec& spec) {
  FeasibilityReport report;
  report.spectrum = classify_spectrum(build_hamiltonian(assemble_discounted_are(spec).problem()));
  try {
    solve_discounted(spec);
    report.feasible = true;
    report.reason = FeasibilityReason::OK;
  } catch (const Error& e) {
    switch (e.kind()) {
      case ErrorKind::ImaginaryEigenvalues: report.reason = FeasibilityReason::ImaginaryEigs; break;
      case ErrorKind::BNotInvertible: report.reason = FeasibilityReason::BNotInvertible; break;
      case ErrorKind::DiscountTooLarge: report.reason = FeasibilityReason::NoSPDSolution; break;
      default: throw;
    }
  }
  return report;
}

double feasibility_threshold(const GameSpec& spec, double ell_max, double tol) {
  if (!(ell_max > 0.0) || !(tol > 0.0)) {
    fail(ErrorKind::InvalidArgument, "feasibility_threshold needs ell_max > 0 and tol > 0");
  }
  GameSpec probe = spec;
  probe.ell = 0.0;
  try {
    solve_ergodic(probe);
  } catch (const Error& e) {
    fail(ErrorKind::InfeasibleAtZero, e.what());
  }
  auto feasible = [&](double ell) {
    probe.ell = ell;
    return check_feasibility(probe).feasible;
  };
  if (feasible(ell_max)) return ell_max;
  double lo = 0.0;
  double hi = ell_max;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid < kMinDiscount || feasible(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

HeteroBlocks assemble_hetero_blocks(const std::vector<Matrix>& player_costs, const SymMatrix& a,
                                    double r, double ell) {
  const int n = static_cast<int>(player_costs.size());
  const int d = a.dim();
  if (n == 0) fail(ErrorKind::DimensionMismatch, "no player cost matrices given");
  for (int alpha = 0; alpha < n; ++alpha) {
    const Matrix& q = player_costs[static_cast<std::size_t>(alpha)];
    if (q.rows() != n * d || q.cols() != n * d) {
      std::ostringstream os;
      os << "player " << alpha << " cost matrix is " << q.rows() << "x" << q.cols()
         << ", expected " << n * d << "x" << n * d;
      fail(ErrorKind::DimensionMismatch, os.str());
    }
    SymMatrix check(q);  // throws AsymmetricInput
    (void)check;
  }
  const Matrix correction = 0.5 * r * a.matrix() * a.matrix() - 0.5 * ell * r * a.matrix();
  HeteroBlocks out;
  out.Btilde = Matrix::Zero(n * d, n * d);
  for (int alpha = 0; alpha < n; ++alpha) {
    out.Btilde.middleRows(alpha * d, d) =
        player_costs[static_cast<std::size_t>(alpha)].middleRows(alpha * d, d);
    out.Btilde.block(alpha * d, alpha * d, d, d) += correction;
  }
  out.cond = condition_number(out.Btilde);
  out.invertible = out.cond <= kMaxConditionB;
  return out;
}

}  // namespace lqmfg
