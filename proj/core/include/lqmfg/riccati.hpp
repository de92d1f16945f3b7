#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "lqmfg/matalg.hpp"

namespace lqmfg {

/// Coefficients of Y R Y + Y A + A^T Y - Q = 0 with R SPD and Q symmetric.
struct AREProblem {
  AREProblem(Matrix cal_a, SymMatrix cal_r, SymMatrix cal_q);

  int dim() const noexcept { return cal_r.dim(); }

  Matrix cal_a;
  SymMatrix cal_r;
  SymMatrix cal_q;
};

struct SpectrumReport {
  std::vector<std::complex<double>> eigenvalues;
  bool has_imaginary = false;  ///< some |Re| <= tol with |Im| > tol
  bool all_real = true;
  std::optional<double> min_pos;  ///< least real part above tol, if any
};

/// Block matrix [[A, R], [Q, -A^T]].
Matrix build_hamiltonian(const AREProblem& p);

SpectrumReport classify_spectrum(const Matrix& h, double tol = kSignTol);

/// Spectral norm of Y R Y + Y A + A^T Y - Q.
double are_residual(const AREProblem& p, const SymMatrix& y);

/// The unique symmetric solution with spec(A + R Y) equal to the positive part
/// of spec(H). Certified by residual and spectrum match before returning.
/// Throws ImaginaryEigenvalues or NoSymmetricSolution.
SymMatrix solve_are_selected(const AREProblem& p, double tol = kSignTol);

inline constexpr int kEnumerationDimLimit = 6;

/// Every symmetric solution arising from a d-dimensional H-invariant graph
/// subspace spanned by eigenvectors of H. Ordered lexicographically by subset
/// of eigenvalues sorted by decreasing real part, so the first entry (when
/// present) is the selected solution. Throws DimensionTooLarge or
/// DegenerateSpectrum.
std::vector<SymMatrix> enumerate_symmetric_solutions(const AREProblem& p,
                                                     int dim_limit = kEnumerationDimLimit,
                                                     double tol = kSignTol);

struct RiccatiSylvesterReport {
  bool holds = true;
  int n_spd_solutions = 0;
  std::vector<double> sylvester_residuals;  ///< one per SPD solution
  double max_residual = 0.0;
};

/// Checks that every SPD solution of Y (N R N / 2) Y = A^T R A / 2 + Q also
/// solves Y N R - R N Y = R A - A^T R.
RiccatiSylvesterReport riccati_sylvester_check(const SymMatrix& a, const SymMatrix& nu,
                                               const SymMatrix& r, const SymMatrix& q,
                                               double tol = kSignTol,
                                               int dim_limit = kEnumerationDimLimit);

}  // namespace lqmfg
