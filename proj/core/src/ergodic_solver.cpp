#include "lqmfg/ergodic_solver.hpp"

#include <cmath>
#include <sstream>

#include "lqmfg/discounted_solver.hpp"
#include "lqmfg/error.hpp"

namespace lqmfg {

std::string_view to_string(SolutionMode mode) noexcept {
  switch (mode) {
    case SolutionMode::Ergodic: return "ergodic";
    case SolutionMode::Discounted: return "discounted";
    case SolutionMode::MeanFieldErgodic: return "mf-ergodic";
    case SolutionMode::MeanFieldDiscounted: return "mf-discounted";
  }
  return "unknown";
}

double QGSolution::constant(int player) const {
  if (per_player.empty()) return 0.0;
  if (per_player.size() == 1) return per_player.front();
  return per_player.at(static_cast<std::size_t>(player));
}

double QGSolution::value(const Vector& x, int player) const {
  const double v = 0.5 * x.dot(Lambda * x) + rho.dot(x);
  return discounted() ? v + constant(player) : v;
}

QGSolution solve_ergodic(const GameSpec& spec) {
  if (spec.ell != 0.0) {
    fail(ErrorKind::InvalidArgument, "solve_ergodic requires ell == 0; use solve_discounted");
  }
  require_valid(spec);

  const int d = spec.dim();
  const double k = spec.k;
  const double r = spec.r;
  const SymMatrix a = spec.A_sym();
  const SymMatrix nu = SymMatrix::scalar(d, k);
  const SymMatrix rr = SymMatrix::scalar(d, r);
  const SymMatrix& q = spec.own_cost();
  const SymMatrix ara_half = SymMatrix::symmetrize(0.5 * a.matrix() * rr.matrix() * a.matrix());

  // Sigma (nu R nu / 2) Sigma = A^T R A / 2 + Q with nu, R scalar.
  const SymMatrix sigma = sqrt_spd((ara_half + q) * (2.0 / (k * k * r)));

  const bool mf = spec.is_mean_field();
  const int n = mf ? 0 : spec.n_players;
  SymMatrix b_mat = ara_half + q;
  Vector p;
  if (mf) {
    const auto& c = spec.mf_cost();
    b_mat = b_mat + c.Bhat * 0.5;
    p = c.Qhat * c.H + 0.5 * (c.Bhat * c.Delta);
  } else {
    const auto& c = spec.n_player_cost();
    b_mat = b_mat + c.B * (0.5 * (n - 1));
    p = c.Q * c.H + (0.5 * (n - 1)) * (c.B * c.Delta);
  }
  const double cond = condition_number(b_mat.matrix());
  if (!(cond <= kMaxConditionB)) {
    std::ostringstream os;
    os << "mean-vector system has condition number " << cond;
    fail(ErrorKind::BNotInvertible, os.str());
  }

  QGSolution sol{SymMatrix::symmetrize(rr.matrix() * (nu.matrix() * sigma.matrix() + a.matrix())),
                 sigma,
                 Vector::Zero(d),
                 b_mat.matrix().fullPivLu().solve(p),
                 {},
                 mf ? SolutionMode::MeanFieldErgodic : SolutionMode::Ergodic,
                 0.0,
                 cond};
  sol.rho = -(rr.matrix() * nu.matrix() * sigma.matrix() * sol.mu);

  const Matrix nrn = nu.matrix() * rr.matrix() * nu.matrix();
  const double trace_term = (nrn * sigma.matrix() + nu.matrix() * rr.matrix() * a.matrix()).trace();
  const double mean_term = 0.5 * sol.mu.dot(sigma.matrix() * nrn * sigma.matrix() * sol.mu);
  const Covariance cov = sigma.inverse();
  if (mf) {
    sol.per_player.push_back(eval_Fi(spec.mf_cost(), cov, sol.mu) + trace_term - mean_term);
  } else {
    const auto& c = spec.n_player_cost();
    const int players = c.shared_opponent_costs() ? 1 : n;
    for (int i = 0; i < players; ++i) {
      sol.per_player.push_back(eval_Fi(c, n, i, cov, sol.mu) + trace_term - mean_term);
    }
    if (players == 1) sol.per_player.assign(static_cast<std::size_t>(n), sol.per_player.front());
  }
  return sol;
}

QGSolution solve(const GameSpec& spec) {
  if (spec.ell < kMinDiscount) {
    GameSpec ergodic = spec;
    ergodic.ell = 0.0;
    return solve_ergodic(ergodic);
  }
  return solve_discounted(spec);
}

ResidualPair hjb_kfp_residual(const QGSolution& sol, const GameSpec& spec,
                              std::span<const Vector> xs) {
  const double k = spec.k;
  const double r = spec.r;
  const Matrix& a = spec.A;
  const Matrix& lambda = sol.Lambda.matrix();
  const Matrix& prec = sol.Sigma.matrix();
  const Gaussian m = sol.invariant_measure();

  int players = 1;
  if (!spec.is_mean_field() && !spec.n_player_cost().shared_opponent_costs()) {
    players = spec.n_players;
  }
  const double drift_trace = (lambda / r - a).trace();

  ResidualPair out;
  for (int i = 0; i < players; ++i) {
    const QuadraticForm f = running_cost_form(spec, i, m);
    for (const Vector& x : xs) {
      const double weight = 1.0 + x.squaredNorm();
      const Vector grad = lambda * x + sol.rho;
      double hjb = -k * lambda.trace() + grad.squaredNorm() / (2.0 * r) - grad.dot(a * x) - f(x);
      hjb += sol.discounted() ? sol.ell * sol.value(x, i) : sol.constant(i);
      out.hjb = std::max(out.hjb, std::abs(hjb) / weight);

      if (i == 0) {
        const Vector pz = prec * (x - sol.mu);
        const Vector drift = grad / r - a * x;
        const double kfp = -k * (pz.squaredNorm() - prec.trace()) + pz.dot(drift) - drift_trace;
        out.kfp = std::max(out.kfp, std::abs(kfp) / weight);
      }
    }
  }
  return out;
}

}  // namespace lqmfg
