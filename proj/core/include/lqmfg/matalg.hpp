#pragma once

#include <Eigen/Dense>

namespace lqmfg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Default threshold for classifying an eigenvalue as positive, zero or negative.
inline constexpr double kSignTol = 1e-9;
/// Relative asymmetry above which a matrix is rejected as non-symmetric.
inline constexpr double kSymmetryTol = 1e-12;

/// Real symmetric d x d matrix. The stored entries are exactly symmetric:
/// construction averages (M + M^T)/2 after checking the input is symmetric to
/// within kSymmetryTol relative to its largest entry.
class SymMatrix {
 public:
  explicit SymMatrix(const Matrix& m);

  /// Averages (M + M^T)/2 without the asymmetry check. Meant for results of
  /// arithmetic that is symmetric up to rounding.
  static SymMatrix symmetrize(const Matrix& m);
  static SymMatrix identity(int d);
  static SymMatrix zero(int d);
  static SymMatrix scalar(int d, double s);
  static SymMatrix diagonal(const Vector& diag);

  int dim() const noexcept { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const noexcept { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

  SymMatrix operator+(const SymMatrix& o) const;
  SymMatrix operator-(const SymMatrix& o) const;
  SymMatrix operator*(double s) const;
  SymMatrix operator-() const;
  Matrix operator*(const Matrix& o) const { return m_ * o; }
  Vector operator*(const Vector& v) const { return m_ * v; }

  SymMatrix inverse() const;
  double trace() const { return m_.trace(); }

 private:
  struct Unchecked {};
  SymMatrix(Matrix m, Unchecked) : m_(std::move(m)) {}

  Matrix m_;
};

inline SymMatrix operator*(double s, const SymMatrix& m) { return m * s; }

struct Inertia {
  int n_pos = 0;
  int n_zero = 0;
  int n_neg = 0;

  friend bool operator==(const Inertia&, const Inertia&) = default;
};

/// Ascending eigenvalues.
Vector eigenvalues(const SymMatrix& m);
double min_eigenvalue(const SymMatrix& m);

/// max |lambda| over the spectrum.
double spec_norm(const SymMatrix& m);

Inertia inertia(const SymMatrix& m, double tol = kSignTol);

/// Sign counts of the real parts of a general matrix's eigenvalues. Used for
/// products H K of a symmetric and an SPD matrix, whose spectrum is real.
Inertia inertia(const Matrix& m, double tol = kSignTol);

bool is_spd(const SymMatrix& m, double tol = kSignTol);

/// Principal square root of an SPD matrix. Throws NotSPD.
SymMatrix sqrt_spd(const SymMatrix& m, double tol = kSignTol);

/// Largest real part over the spectrum of a square matrix.
double max_real_eigenvalue(const Matrix& m);
bool is_hurwitz(const Matrix& m, double tol = kSignTol);

/// Solves F X + X F^T + W = 0 for X. Throws NotHurwitz unless every
/// eigenvalue of F has real part below -tol.
SymMatrix solve_lyapunov(const Matrix& f, const SymMatrix& w, double tol = kSignTol);

/// 2-norm condition number; +inf for singular input.
double condition_number(const Matrix& m);

}  // namespace lqmfg
