#include "lqmfg/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <lapacke.h>

#include "lqmfg/error.hpp"

namespace lqmfg {

namespace {

constexpr double kGraphCondLimit = 1e10;
constexpr double kSelectedResidualTol = 1e-10;
constexpr double kEnumeratedResidualTol = 1e-9;
constexpr double kSpectrumMatchTol = 1e-8;

lapack_logical positive_real_part(const double* wr, const double* /*wi*/) { return *wr > 0.0; }

// Scale of the individual terms of the ARE at Y; residuals are judged against it.
double residual_scale(const AREProblem& p, const SymMatrix& y) {
  const double ny = spec_norm(y);
  return 1.0 + spec_norm(p.cal_q) + spec_norm(p.cal_r) * ny * ny + 2.0 * p.cal_a.norm() * ny;
}

bool by_decreasing_real(const std::complex<double>& a, const std::complex<double>& b) {
  if (a.real() != b.real()) return a.real() > b.real();
  return a.imag() > b.imag();
}

// Y from the graph subspace Im [top; bot]; nullopt when top is ill-conditioned.
std::optional<Matrix> graph_solution(const Matrix& basis, int d) {
  const Matrix top = basis.topRows(d);
  const Matrix bot = basis.bottomRows(d);
  if (!(condition_number(top) <= kGraphCondLimit)) return std::nullopt;
  // Y top = bot  <=>  top^T Y^T = bot^T
  const Matrix yt = top.transpose().fullPivLu().solve(bot.transpose());
  return Matrix(yt.transpose());
}

}  // namespace

AREProblem::AREProblem(Matrix a, SymMatrix r, SymMatrix q)
    : cal_a(std::move(a)), cal_r(std::move(r)), cal_q(std::move(q)) {
  const int d = cal_r.dim();
  if (cal_q.dim() != d || cal_a.rows() != d || cal_a.cols() != d) {
    fail(ErrorKind::DimensionMismatch, "AREProblem blocks must share one dimension");
  }
  if (!is_spd(cal_r)) fail(ErrorKind::NotSPD, "AREProblem requires an SPD quadratic coefficient");
}

Matrix build_hamiltonian(const AREProblem& p) {
  const int d = p.dim();
  Matrix h(2 * d, 2 * d);
  h << p.cal_a, p.cal_r.matrix(), p.cal_q.matrix(), -p.cal_a.transpose();
  return h;
}

SpectrumReport classify_spectrum(const Matrix& h, double tol) {
  if (!(tol > 0.0)) fail(ErrorKind::InvalidArgument, "classify_spectrum: tol must be positive");
  Eigen::EigenSolver<Matrix> es(h, false);
  SpectrumReport rep;
  rep.eigenvalues.assign(es.eigenvalues().begin(), es.eigenvalues().end());
  std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end(), by_decreasing_real);
  for (const auto& ev : rep.eigenvalues) {
    const bool imag = std::abs(ev.imag()) > tol;
    if (imag) rep.all_real = false;
    if (imag && std::abs(ev.real()) <= tol) rep.has_imaginary = true;
    if (ev.real() > tol && (!rep.min_pos || ev.real() < *rep.min_pos)) rep.min_pos = ev.real();
  }
  return rep;
}

double are_residual(const AREProblem& p, const SymMatrix& y) {
  const Matrix& ym = y.matrix();
  const Matrix res = ym * p.cal_r.matrix() * ym + ym * p.cal_a + p.cal_a.transpose() * ym -
                     p.cal_q.matrix();
  return spec_norm(SymMatrix::symmetrize(res));
}

SymMatrix solve_are_selected(const AREProblem& p, double tol) {
  const int d = p.dim();
  const Matrix h = build_hamiltonian(p);
  const SpectrumReport spectrum = classify_spectrum(h, tol);
  if (spectrum.has_imaginary) {
    fail(ErrorKind::ImaginaryEigenvalues, "Hamiltonian has purely imaginary nonzero eigenvalues");
  }
  const auto n_pos = std::count_if(spectrum.eigenvalues.begin(), spectrum.eigenvalues.end(),
                                   [tol](const auto& ev) { return ev.real() > tol; });
  if (n_pos != d) {
    std::ostringstream os;
    os << n_pos << " Hamiltonian eigenvalues have positive real part, expected " << d;
    fail(ErrorKind::NoSymmetricSolution, os.str());
  }

  // Ordered real Schur form: the leading d Schur vectors span the invariant
  // subspace of the eigenvalues with positive real part.
  Matrix t = h;
  Matrix schur_vectors(2 * d, 2 * d);
  Vector wr(2 * d), wi(2 * d);
  lapack_int sdim = 0;
  const lapack_int info =
      LAPACKE_dgees(LAPACK_COL_MAJOR, 'V', 'S', positive_real_part, 2 * d, t.data(), 2 * d, &sdim,
                    wr.data(), wi.data(), schur_vectors.data(), 2 * d);
  if (info != 0 || sdim != d) {
    std::ostringstream os;
    os << "ordered Schur decomposition failed (info=" << info << ", selected " << sdim << ")";
    fail(ErrorKind::NoSymmetricSolution, os.str());
  }
  const auto y_raw = graph_solution(schur_vectors.leftCols(d), d);
  if (!y_raw) fail(ErrorKind::NoSymmetricSolution, "invariant subspace is not a graph subspace");
  const double asym = (*y_raw - y_raw->transpose()).norm();
  if (!(asym <= 1e-6 * (1.0 + y_raw->norm()))) {
    fail(ErrorKind::NoSymmetricSolution, "selected invariant subspace gives a non-symmetric solution");
  }
  SymMatrix y = SymMatrix::symmetrize(*y_raw);

  const double res = are_residual(p, y);
  if (!(res <= kSelectedResidualTol * residual_scale(p, y))) {
    std::ostringstream os;
    os << "selected solution residual " << res << " failed certification";
    fail(ErrorKind::NoSymmetricSolution, os.str());
  }
  Eigen::EigenSolver<Matrix> closed(p.cal_a + p.cal_r.matrix() * y.matrix(), false);
  std::vector<std::complex<double>> got(closed.eigenvalues().begin(), closed.eigenvalues().end());
  std::sort(got.begin(), got.end(), by_decreasing_real);
  for (int i = 0; i < d; ++i) {
    const auto& want = spectrum.eigenvalues[static_cast<std::size_t>(i)];
    if (std::abs(got[static_cast<std::size_t>(i)] - want) > kSpectrumMatchTol * (1.0 + std::abs(want))) {
      fail(ErrorKind::NoSymmetricSolution, "closed-loop spectrum does not match the positive Hamiltonian spectrum");
    }
  }
  return y;
}

std::vector<SymMatrix> enumerate_symmetric_solutions(const AREProblem& p, int dim_limit,
                                                     double tol) {
  const int d = p.dim();
  if (d > dim_limit) {
    std::ostringstream os;
    os << "dimension " << d << " exceeds enumeration limit " << dim_limit;
    fail(ErrorKind::DimensionTooLarge, os.str());
  }
  const Matrix h = build_hamiltonian(p);
  Eigen::EigenSolver<Matrix> es(h);
  const Eigen::VectorXcd evals = es.eigenvalues();
  const Eigen::MatrixXcd evecs = es.eigenvectors();

  const double scale = 1.0 + evals.cwiseAbs().maxCoeff();
  for (int i = 0; i < evals.size(); ++i) {
    for (int j = i + 1; j < evals.size(); ++j) {
      if (std::abs(evals(i) - evals(j)) <= 1e-8 * scale) {
        fail(ErrorKind::DegenerateSpectrum, "Hamiltonian has repeated eigenvalues");
      }
    }
  }

  // Real invariant blocks: a real eigenvector, or [Re v, Im v] for a conjugate pair.
  struct Block {
    std::complex<double> ev;
    Matrix cols;
  };
  std::vector<Block> blocks;
  for (int i = 0; i < evals.size(); ++i) {
    const auto ev = evals(i);
    if (std::abs(ev.imag()) <= tol) {
      blocks.push_back({{ev.real(), 0.0}, evecs.col(i).real()});
    } else if (ev.imag() > 0.0) {
      Matrix cols(h.rows(), 2);
      cols.col(0) = evecs.col(i).real();
      cols.col(1) = evecs.col(i).imag();
      blocks.push_back({ev, cols});
    }
  }
  std::sort(blocks.begin(), blocks.end(),
            [](const Block& a, const Block& b) { return by_decreasing_real(a.ev, b.ev); });

  std::vector<SymMatrix> out;
  std::vector<int> chosen;
  std::function<void(std::size_t, int)> visit = [&](std::size_t next, int ncols) {
    if (ncols == d) {
      Matrix basis(h.rows(), d);
      int c = 0;
      for (int idx : chosen) {
        const Matrix& cols = blocks[static_cast<std::size_t>(idx)].cols;
        basis.middleCols(c, cols.cols()) = cols;
        c += static_cast<int>(cols.cols());
      }
      const auto y_raw = graph_solution(basis, d);
      if (!y_raw) return;
      if ((*y_raw - y_raw->transpose()).norm() > 1e-7 * (1.0 + y_raw->norm())) return;
      SymMatrix y = SymMatrix::symmetrize(*y_raw);
      if (are_residual(p, y) <= kEnumeratedResidualTol * residual_scale(p, y)) out.push_back(y);
      return;
    }
    for (std::size_t i = next; i < blocks.size(); ++i) {
      const int w = static_cast<int>(blocks[i].cols.cols());
      if (ncols + w > d) continue;
      chosen.push_back(static_cast<int>(i));
      visit(i + 1, ncols + w);
      chosen.pop_back();
    }
  };
  visit(0, 0);
  return out;
}

RiccatiSylvesterReport riccati_sylvester_check(const SymMatrix& a, const SymMatrix& nu,
                                               const SymMatrix& r, const SymMatrix& q,
                                               double tol, int dim_limit) {
  const Matrix nrn = nu.matrix() * r.matrix() * nu.matrix();
  const Matrix ara = a.matrix().transpose() * r.matrix() * a.matrix();
  const AREProblem are(Matrix::Zero(a.dim(), a.dim()), SymMatrix::symmetrize(0.5 * nrn),
                       SymMatrix::symmetrize(0.5 * ara) + q);
  const Matrix nr = nu.matrix() * r.matrix();
  const Matrix rn = r.matrix() * nu.matrix();
  const Matrix rhs = r.matrix() * a.matrix() - a.matrix().transpose() * r.matrix();

  RiccatiSylvesterReport rep;
  for (const auto& y : enumerate_symmetric_solutions(are, dim_limit)) {
    if (!is_spd(y)) continue;
    ++rep.n_spd_solutions;
    const Matrix lhs = y.matrix() * nr - rn * y.matrix();
    const double res = (lhs - rhs).cwiseAbs().maxCoeff();
    rep.sylvester_residuals.push_back(res);
    rep.max_residual = std::max(rep.max_residual, res);
    if (!(res <= tol)) rep.holds = false;
  }
  return rep;
}

}  // namespace lqmfg
