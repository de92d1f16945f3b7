#include "instances.hpp"

namespace lqmfg::testing {

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Vector uniform_vector(Rng& rng, int d, double lo, double hi) {
  Vector v(d);
  for (int i = 0; i < d; ++i) v(i) = uniform(rng, lo, hi);
  return v;
}

Matrix random_orthogonal(Rng& rng, int d) {
  std::normal_distribution<double> normal;
  Matrix g(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) g(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ() * Matrix::Identity(d, d);
}

SymMatrix random_sym_spectrum(Rng& rng, int d, double lo, double hi) {
  const Matrix u = random_orthogonal(rng, d);
  const Vector eig = uniform_vector(rng, d, lo, hi);
  return SymMatrix::symmetrize(u * eig.asDiagonal() * u.transpose());
}

GameSpec scalar_game(double a, double q, double k, double r, double ell, int n, double b, double h,
                     double delta) {
  CostStructure cost{SymMatrix::scalar(1, q),          SymMatrix::scalar(1, b),
                     {SymMatrix::zero(1)},             {SymMatrix::zero(1)},
                     Vector::Constant(1, h),           Vector::Constant(1, delta)};
  return GameSpec::n_player(Matrix::Constant(1, 1, a), k, r, ell, n, std::move(cost));
}

GameSpec scalar_mf_game(double a, double qhat, double bhat, double h, double delta, double k,
                        double r, double ell, double chat, double dhat) {
  MFCost cost{SymMatrix::scalar(1, qhat), SymMatrix::scalar(1, bhat), SymMatrix::scalar(1, chat),
              SymMatrix::scalar(1, dhat), Vector::Constant(1, h),     Vector::Constant(1, delta)};
  return GameSpec::mean_field(Matrix::Constant(1, 1, a), k, r, ell, std::move(cost));
}

GameSpec random_game(Rng& rng, int d, int n, double ell) {
  const double n1 = std::max(1, n - 1);
  CostStructure cost{random_sym_spectrum(rng, d, 0.5, 2.0),
                     random_sym_spectrum(rng, d, -0.3, 0.3) * (1.0 / n1),
                     {random_sym_spectrum(rng, d, 0.0, 0.5) * (1.0 / n1)},
                     {random_sym_spectrum(rng, d, -0.2, 0.2) * (1.0 / (n1 * n1))},
                     uniform_vector(rng, d, -1.0, 1.0),
                     uniform_vector(rng, d, -1.0, 1.0)};
  const Matrix a = random_sym_spectrum(rng, d, -0.5, 0.5).matrix();
  return GameSpec::n_player(a, uniform(rng, 0.5, 2.0), uniform(rng, 0.5, 2.0), ell, n,
                            std::move(cost));
}

GameSpec random_mf_game(Rng& rng, int d, double ell) {
  MFCost cost{random_sym_spectrum(rng, d, 0.5, 2.0), random_sym_spectrum(rng, d, -0.3, 0.3),
              random_sym_spectrum(rng, d, 0.0, 0.5),  random_sym_spectrum(rng, d, -0.2, 0.2),
              uniform_vector(rng, d, -1.0, 1.0),      uniform_vector(rng, d, -1.0, 1.0)};
  const Matrix a = random_sym_spectrum(rng, d, -0.5, 0.5).matrix();
  return GameSpec::mean_field(a, uniform(rng, 0.5, 2.0), uniform(rng, 0.5, 2.0), ell,
                              std::move(cost));
}

std::vector<Vector> sample_points(Rng& rng, int d, int count, double radius) {
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out.push_back(uniform_vector(rng, d, -radius, radius));
  return out;
}

}  // namespace lqmfg::testing
