#include "lqmfg/game_model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "lqmfg/error.hpp"
#include "lqmfg/riccati.hpp"

namespace lqmfg {

namespace {

double trace_product(const SymMatrix& a, const Covariance& cov) {
  if (!cov) return 0.0;
  return (a.matrix() * cov->matrix()).trace();
}

const SymMatrix& pick(const std::vector<SymMatrix>& list, int player, const char* name) {
  if (list.empty()) fail(ErrorKind::InvalidArgument, std::string(name) + " list is empty");
  if (list.size() == 1) return list.front();
  if (player < 0 || static_cast<std::size_t>(player) >= list.size()) {
    std::ostringstream os;
    os << name << " has no entry for player " << player;
    fail(ErrorKind::InvalidArgument, os.str());
  }
  return list[static_cast<std::size_t>(player)];
}

}  // namespace

const SymMatrix& CostStructure::C_for(int player) const { return pick(C, player, "C"); }
const SymMatrix& CostStructure::D_for(int player) const { return pick(D, player, "D"); }

GameSpec GameSpec::n_player(Matrix A, double k, double r, double ell, int n, CostStructure cost) {
  return GameSpec{std::move(A), k, r, ell, n, std::move(cost)};
}

GameSpec GameSpec::mean_field(Matrix A, double k, double r, double ell, MFCost cost) {
  return GameSpec{std::move(A), k, r, ell, 0, std::move(cost)};
}

int GameSpec::dim() const {
  return std::visit([](const auto& c) { return c.dim(); }, cost);
}

const CostStructure& GameSpec::n_player_cost() const {
  if (is_mean_field()) fail(ErrorKind::InvalidArgument, "spec holds mean-field costs");
  return std::get<CostStructure>(cost);
}

const MFCost& GameSpec::mf_cost() const {
  if (!is_mean_field()) fail(ErrorKind::InvalidArgument, "spec holds N-player costs");
  return std::get<MFCost>(cost);
}

const SymMatrix& GameSpec::own_cost() const {
  return is_mean_field() ? mf_cost().Qhat : n_player_cost().Q;
}

SymMatrix GameSpec::A_sym() const {
  try {
    return SymMatrix(A);
  } catch (const Error&) {
    fail(ErrorKind::AssumptionViolation, "(H3) the drift matrix A is not symmetric");
  }
}

bool ValidationReport::ok() const {
  for (const auto& it : items) {
    if (!it.passed) return false;
  }
  return true;
}

std::vector<std::string> ValidationReport::failures() const {
  std::vector<std::string> out;
  for (const auto& it : items) {
    if (!it.passed) out.push_back(it.id + (it.detail.empty() ? "" : ": " + it.detail));
  }
  return out;
}

ValidationReport validate_assumptions(const GameSpec& spec, bool enumerate_are) {
  ValidationReport rep;
  auto add = [&rep](std::string id, bool passed, std::string detail = {}) {
    rep.items.push_back({std::move(id), passed, std::move(detail)});
  };

  const int d = spec.dim();
  bool dims_ok = spec.A.rows() == d && spec.A.cols() == d;
  std::visit(
      [&](const auto& c) {
        dims_ok = dims_ok && c.H.size() == d && c.Delta.size() == d;
        if constexpr (std::is_same_v<std::decay_t<decltype(c)>, CostStructure>) {
          dims_ok = dims_ok && c.B.dim() == d;
          for (const auto& m : c.C) dims_ok = dims_ok && m.dim() == d;
          for (const auto& m : c.D) dims_ok = dims_ok && m.dim() == d;
        } else {
          dims_ok = dims_ok && c.Bhat.dim() == d && c.Chat.dim() == d && c.Dhat.dim() == d;
        }
      },
      spec.cost);
  add("dimensions consistent", dims_ok, dims_ok ? "" : "all blocks must be d x d, vectors length d");

  add("(H1) sigma invertible", spec.k > 0.0, "nu = k I requires k > 0");
  add("(H1) R SPD", spec.r > 0.0, "R = r I requires r > 0");
  add("discount nonnegative", spec.ell >= 0.0);

  bool q_spd = false;
  if (spec.is_mean_field()) {
    q_spd = dims_ok && is_spd(spec.mf_cost().Qhat);
    add("Qhat SPD", q_spd);
  } else {
    const auto& c = spec.n_player_cost();
    const auto n = static_cast<std::size_t>(spec.n_players);
    add("player count positive", spec.n_players >= 1);
    const bool layout = !c.C.empty() && !c.D.empty() && (c.C.size() == 1 || c.C.size() == n) &&
                        (c.D.size() == 1 || c.D.size() == n);
    add("(H2) block layout", layout, "C and D must be shared or given per player");
    q_spd = dims_ok && is_spd(c.Q);
    add("(H2) Q SPD", q_spd);
  }

  const bool a_sym = dims_ok && (spec.A - spec.A.transpose()).cwiseAbs().maxCoeff() <=
                                    kSymmetryTol * std::max(1.0, spec.A.cwiseAbs().maxCoeff());
  add("(H3) A symmetric", a_sym);
  add("(H3) nu and R scalar", true, "nu = k I and R = r I by construction");

  if (a_sym && q_spd && spec.k > 0.0 && spec.r > 0.0 && !enumerate_are) {
    add("Riccati-Sylvester property", true, "implied by symmetric A and scalar nu, R");
  } else if (a_sym && q_spd && spec.k > 0.0 && spec.r > 0.0) {
    const SymMatrix a = spec.A_sym();
    try {
      const auto rs = riccati_sylvester_check(a, SymMatrix::scalar(d, spec.k),
                                              SymMatrix::scalar(d, spec.r), spec.own_cost());
      std::ostringstream os;
      os << rs.n_spd_solutions << " SPD solution(s), max Sylvester residual " << rs.max_residual;
      add("Riccati-Sylvester property", rs.holds, os.str());
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DegenerateSpectrum && e.kind() != ErrorKind::DimensionTooLarge) throw;
      // The Sylvester equation reduces to kr(Y - Y) = r(A - A^T) = 0 under (H3).
      add("Riccati-Sylvester property", true,
          std::string("identically satisfied under (H3); enumeration skipped: ") + e.what());
    }
  } else {
    add("Riccati-Sylvester property", false, "not checked: prerequisites failed");
  }
  return rep;
}

void require_valid(const GameSpec& spec) {
  const auto rep = validate_assumptions(spec, false);
  if (rep.ok()) return;
  std::ostringstream os;
  os << "assumptions violated:";
  for (const auto& f : rep.failures()) os << " [" << f << "]";
  fail(ErrorKind::AssumptionViolation, os.str());
}

CostStructure scaled_costs(const MFCost& mf, int n, QScaling scaling) {
  if (n < 2) fail(ErrorKind::InvalidArgument, "scaled_costs requires N >= 2");
  const double n1 = n - 1.0;
  const double q_factor = scaling == QScaling::OnePlusInvN ? 1.0 + 1.0 / n : 1.0;
  return CostStructure{mf.Qhat * q_factor, mf.Bhat * (1.0 / n1), {mf.Chat * (1.0 / n1)},
                       {mf.Dhat * (1.0 / (n1 * n1))}, mf.H, mf.Delta};
}

GameSpec scaled_game(const GameSpec& mf_spec, int n, QScaling scaling) {
  return GameSpec::n_player(mf_spec.A, mf_spec.k, mf_spec.r, mf_spec.ell, n,
                            scaled_costs(mf_spec.mf_cost(), n, scaling));
}

double eval_Fi(const CostStructure& cost, int n, int player, const Covariance& cov,
               const Vector& mu) {
  const double n1 = n - 1.0;
  const Vector dev = mu - cost.Delta;
  const Vector& h = cost.H;
  const SymMatrix& c = cost.C_for(player);
  const SymMatrix& dmat = cost.D_for(player);
  const double half_b = 0.5 * h.dot(cost.B * dev);
  return h.dot(cost.Q * h) - n1 * half_b - n1 * 0.5 * dev.dot(cost.B * h) +
         n1 * trace_product(c, cov) + n1 * dev.dot(c * dev) + n1 * (n - 2.0) * dev.dot(dmat * dev);
}

double eval_Fi(const MFCost& cost, const Covariance& cov, const Vector& mu) {
  const Vector dev = mu - cost.Delta;
  const Vector& h = cost.H;
  return h.dot(cost.Qhat * h) - (0.5 * h.dot(cost.Bhat * dev) + 0.5 * dev.dot(cost.Bhat * h)) +
         trace_product(cost.Chat, cov) + dev.dot((cost.Chat + cost.Dhat) * dev);
}

Gaussian::Gaussian(Vector mean, SymMatrix precision)
    : mean_(std::move(mean)), precision_(std::move(precision)) {
  if (mean_.size() != precision_.dim()) fail(ErrorKind::DimensionMismatch, "Gaussian mean/precision");
  if (!is_spd(precision_)) fail(ErrorKind::NotSPD, "Gaussian precision must be SPD");
}

double Gaussian::density(const Vector& x) const {
  const Vector dx = x - mean_;
  const double d = static_cast<double>(mean_.size());
  const double det = precision_.matrix().determinant();
  return std::pow(2.0 * std::numbers::pi, -0.5 * d) * std::sqrt(det) *
         std::exp(-0.5 * dx.dot(precision_ * dx));
}

const Vector& mean_of(const DistributionDesc& m) {
  return std::visit(
      [](const auto& v) -> const Vector& {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, Gaussian>) return v.mean();
        else return v.point;
      },
      m);
}

Covariance covariance_of(const DistributionDesc& m) {
  if (const auto* g = std::get_if<Gaussian>(&m)) return g->covariance();
  return std::nullopt;
}

double eval_fi_gaussian(const CostStructure& cost, int n, int player, const Vector& x,
                        const DistributionDesc& others) {
  const double n1 = n - 1.0;
  const Vector xh = x - cost.H;
  const Vector dev = mean_of(others) - cost.Delta;
  const Covariance cov = covariance_of(others);
  const SymMatrix& c = cost.C_for(player);
  return xh.dot(cost.Q * xh) + n1 * xh.dot(cost.B * dev) +
         n1 * (trace_product(c, cov) + dev.dot(c * dev)) +
         n1 * (n - 2.0) * dev.dot(cost.D_for(player) * dev);
}

QuadraticForm vhat_quadratic(const MFCost& mf, const DistributionDesc& m) {
  const Vector dev = mean_of(m) - mf.Delta;
  const Vector b = -2.0 * (mf.Qhat * mf.H) + mf.Bhat * dev;
  return QuadraticForm{mf.Qhat, b, eval_Fi(mf, covariance_of(m), mean_of(m))};
}

QuadraticForm running_cost_form(const GameSpec& spec, int player, const DistributionDesc& others) {
  if (spec.is_mean_field()) return vhat_quadratic(spec.mf_cost(), others);
  const auto& cost = spec.n_player_cost();
  const int n = spec.n_players;
  const Vector dev = mean_of(others) - cost.Delta;
  const Vector b = -2.0 * (cost.Q * cost.H) + (n - 1.0) * (cost.B * dev);
  return QuadraticForm{cost.Q, b, eval_Fi(cost, n, player, covariance_of(others), mean_of(others))};
}

HcmBlocks convert_hcm_cost(const Matrix& gamma, const Vector& eta, const SymMatrix& qb, int n) {
  const int d = qb.dim();
  if (gamma.rows() != d || gamma.cols() != d || eta.size() != d) {
    fail(ErrorKind::DimensionMismatch, "convert_hcm_cost: Gamma, eta and Q must share dimension");
  }
  if (n < 1) fail(ErrorKind::InvalidArgument, "convert_hcm_cost requires N >= 1");
  const Matrix g = gamma / static_cast<double>(n);
  const Matrix left = Matrix::Identity(d, d) - g.transpose();
  if (!(condition_number(left) <= 1e12)) {
    fail(ErrorKind::SingularConversion, "I - Gamma^T/N is singular");
  }
  const Matrix& q = qb.matrix();
  HcmBlocks out;
  out.own = SymMatrix::symmetrize(left * q * left.transpose()).matrix();
  out.cross = -left * q * g;
  out.others = SymMatrix::symmetrize(g.transpose() * q * g).matrix();
  out.ref_own = eta;
  out.ref_other = Vector::Zero(d);
  return out;
}

Matrix assemble_player_matrix(const HcmBlocks& blocks, int n, int player) {
  const auto d = blocks.own.rows();
  Matrix big(n * d, n * d);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      auto blk = big.block(j * d, k * d, d, d);
      if (j == player && k == player) blk = blocks.own;
      else if (j == player) blk = blocks.cross;
      else if (k == player) blk = blocks.cross.transpose();
      else blk = blocks.others;
    }
  }
  return big;
}

Matrix assemble_player_matrix(const CostStructure& cost, int n, int player) {
  const int d = cost.dim();
  Matrix big(n * d, n * d);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      auto blk = big.block(j * d, k * d, d, d);
      if (j == player && k == player) blk = cost.Q.matrix();
      else if (j == player || k == player) blk = 0.5 * cost.B.matrix();
      else if (j == k) blk = cost.C_for(player).matrix();
      else blk = cost.D_for(player).matrix();
    }
  }
  return big;
}

}  // namespace lqmfg
