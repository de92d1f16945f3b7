#include "lqmfg/matalg.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "lqmfg/error.hpp"

namespace lqmfg {

namespace {

void require_square(const Matrix& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    std::ostringstream os;
    os << what << " must be a non-empty square matrix, got " << m.rows() << "x" << m.cols();
    fail(ErrorKind::DimensionMismatch, os.str());
  }
}

}  // namespace

SymMatrix::SymMatrix(const Matrix& m) {
  require_square(m, "SymMatrix");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (!(asym <= kSymmetryTol * scale)) {
    std::ostringstream os;
    os << "matrix asymmetry " << asym << " exceeds " << kSymmetryTol << " relative";
    fail(ErrorKind::AsymmetricInput, os.str());
  }
  m_ = 0.5 * (m + m.transpose());
}

SymMatrix SymMatrix::symmetrize(const Matrix& m) {
  require_square(m, "SymMatrix");
  return SymMatrix(Matrix(0.5 * (m + m.transpose())), Unchecked{});
}

SymMatrix SymMatrix::identity(int d) { return SymMatrix(Matrix::Identity(d, d), Unchecked{}); }
SymMatrix SymMatrix::zero(int d) { return SymMatrix(Matrix::Zero(d, d), Unchecked{}); }
SymMatrix SymMatrix::scalar(int d, double s) {
  return SymMatrix(Matrix(s * Matrix::Identity(d, d)), Unchecked{});
}
SymMatrix SymMatrix::diagonal(const Vector& diag) {
  return SymMatrix(Matrix(diag.asDiagonal()), Unchecked{});
}

SymMatrix SymMatrix::operator+(const SymMatrix& o) const {
  if (o.dim() != dim()) fail(ErrorKind::DimensionMismatch, "SymMatrix sum");
  return SymMatrix(Matrix(m_ + o.m_), Unchecked{});
}
SymMatrix SymMatrix::operator-(const SymMatrix& o) const {
  if (o.dim() != dim()) fail(ErrorKind::DimensionMismatch, "SymMatrix difference");
  return SymMatrix(Matrix(m_ - o.m_), Unchecked{});
}
SymMatrix SymMatrix::operator*(double s) const { return SymMatrix(Matrix(s * m_), Unchecked{}); }
SymMatrix SymMatrix::operator-() const { return SymMatrix(Matrix(-m_), Unchecked{}); }

SymMatrix SymMatrix::inverse() const {
  Eigen::FullPivLU<Matrix> lu(m_);
  if (!lu.isInvertible()) fail(ErrorKind::InvalidArgument, "inverse of a singular symmetric matrix");
  return symmetrize(lu.inverse());
}

Vector eigenvalues(const SymMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.matrix(), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double min_eigenvalue(const SymMatrix& m) { return eigenvalues(m).minCoeff(); }

double spec_norm(const SymMatrix& m) { return eigenvalues(m).cwiseAbs().maxCoeff(); }

Inertia inertia(const SymMatrix& m, double tol) {
  Inertia in;
  for (double ev : eigenvalues(m)) {
    if (ev > tol) ++in.n_pos;
    else if (ev < -tol) ++in.n_neg;
    else ++in.n_zero;
  }
  return in;
}

Inertia inertia(const Matrix& m, double tol) {
  require_square(m, "inertia");
  Eigen::EigenSolver<Matrix> es(m, false);
  Inertia in;
  for (const auto& ev : es.eigenvalues()) {
    if (ev.real() > tol) ++in.n_pos;
    else if (ev.real() < -tol) ++in.n_neg;
    else ++in.n_zero;
  }
  return in;
}

bool is_spd(const SymMatrix& m, double tol) { return min_eigenvalue(m) > tol; }

SymMatrix sqrt_spd(const SymMatrix& m, double tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.matrix());
  const Vector& ev = es.eigenvalues();
  if (!(ev.minCoeff() > tol)) {
    std::ostringstream os;
    os << "minimum eigenvalue " << ev.minCoeff() << " is not above " << tol;
    fail(ErrorKind::NotSPD, os.str());
  }
  const Matrix& u = es.eigenvectors();
  return SymMatrix::symmetrize(u * ev.cwiseSqrt().asDiagonal() * u.transpose());
}

double max_real_eigenvalue(const Matrix& m) {
  require_square(m, "max_real_eigenvalue");
  Eigen::EigenSolver<Matrix> es(m, false);
  return es.eigenvalues().real().maxCoeff();
}

bool is_hurwitz(const Matrix& m, double tol) { return max_real_eigenvalue(m) < -tol; }

SymMatrix solve_lyapunov(const Matrix& f, const SymMatrix& w, double tol) {
  require_square(f, "solve_lyapunov");
  const int d = static_cast<int>(f.rows());
  if (w.dim() != d) fail(ErrorKind::DimensionMismatch, "solve_lyapunov: F and W differ in size");
  const double top = max_real_eigenvalue(f);
  if (!(top < -tol)) {
    std::ostringstream os;
    os << "largest real part " << top << " is not below " << -tol;
    fail(ErrorKind::NotHurwitz, os.str());
  }
  // vec(F X + X F^T) = (I (x) F + F (x) I) vec(X), column-major vec.
  const Matrix eye = Matrix::Identity(d, d);
  Matrix op = Matrix::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      op.block(i * d, j * d, d, d) += eye(i, j) * f;
      op.block(i * d, j * d, d, d) += f(i, j) * eye;
    }
  }
  const Vector rhs = -Eigen::Map<const Vector>(w.matrix().data(), d * d);
  const Vector x = op.fullPivLu().solve(rhs);
  return SymMatrix::symmetrize(Eigen::Map<const Matrix>(x.data(), d, d));
}

double condition_number(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const Vector& s = svd.singularValues();
  if (s.size() == 0) return std::numeric_limits<double>::infinity();
  const double smallest = s(s.size() - 1);
  if (smallest == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smallest;
}

}  // namespace lqmfg
