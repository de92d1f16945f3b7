#include <gtest/gtest.h>

#include <cmath>

#include "instances.hpp"
#include "lqmfg/error.hpp"
#include "lqmfg/game_model.hpp"

namespace lqmfg {
namespace {

using testing::Rng;

bool has_failure(const ValidationReport& report, const std::string& prefix) {
  for (const auto& f : report.failures()) {
    if (f.rfind(prefix, 0) == 0) return true;
  }
  return false;
}

TEST(Validation, ScalarSpecPasses) {
  const auto report = validate_assumptions(testing::scalar_game(0.0, 0.5));
  EXPECT_TRUE(report.ok()) << ::testing::PrintToString(report.failures());
}

TEST(Validation, ZeroNoiseFailsH1) {
  const auto report = validate_assumptions(testing::scalar_game(0.0, 0.5, 0.0));
  EXPECT_FALSE(report.ok());
  EXPECT_TRUE(has_failure(report, "(H1) sigma invertible"));
}

TEST(Validation, AsymmetricDriftFailsH3) {
  Rng rng(31);
  GameSpec spec = testing::random_game(rng, 2, 3);
  spec.A(0, 1) += 0.5;
  const auto report = validate_assumptions(spec);
  EXPECT_FALSE(report.ok());
  EXPECT_TRUE(has_failure(report, "(H3)"));
  EXPECT_THROW(require_valid(spec), Error);
}

TEST(Validation, RandomInstancesPass) {
  Rng rng(32);
  for (int d = 1; d <= 4; ++d) {
    EXPECT_TRUE(validate_assumptions(testing::random_game(rng, d, 5)).ok());
    EXPECT_TRUE(validate_assumptions(testing::random_mf_game(rng, d)).ok());
  }
}

TEST(ScaledCosts, Examples) {
  const GameSpec mf = testing::scalar_mf_game(0.0, 0.5, 0.5, 0.0, 0.0, 1, 1, 0, 0.0, 1.0);
  EXPECT_DOUBLE_EQ(scaled_costs(mf.mf_cost(), 2).B(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(scaled_costs(mf.mf_cost(), 3).D_for(0)(0, 0), 0.25);
  EXPECT_DOUBLE_EQ(scaled_costs(mf.mf_cost(), 4).Q(0, 0), 0.625);
  EXPECT_DOUBLE_EQ(scaled_costs(mf.mf_cost(), 4, QScaling::Constant).Q(0, 0), 0.5);
  EXPECT_THROW(scaled_costs(mf.mf_cost(), 1), Error);
}

TEST(ScaledCosts, MeanSystemMatrixConvergesLinearly) {
  Rng rng(33);
  const GameSpec mf = testing::random_mf_game(rng, 3);
  const SymMatrix a = mf.A_sym();
  const Matrix half_ara = 0.5 * mf.r * a.matrix() * a.matrix();
  const Matrix limit = mf.mf_cost().Qhat.matrix() + half_ara + 0.5 * mf.mf_cost().Bhat.matrix();
  double previous = 0.0;
  for (int n = 10; n <= 1280; n *= 2) {
    const CostStructure c = scaled_costs(mf.mf_cost(), n);
    const Matrix b = c.Q.matrix() + half_ara + 0.5 * (n - 1) * c.B.matrix();
    const double err = (b - limit).norm();
    if (previous > 0.0) EXPECT_NEAR(previous / err, 2.0, 0.2);
    previous = err;
  }
}

TEST(EvalFi, Examples) {
  EXPECT_DOUBLE_EQ(eval_Fi(testing::scalar_game(0, 0.5, 1, 1, 0, 1, 0, 1).n_player_cost(), 1, 0,
                           SymMatrix::identity(1), Vector::Zero(1)),
                   0.5);
  CostStructure c{SymMatrix::scalar(1, 3.0), SymMatrix::zero(1), {SymMatrix::identity(1)},
                  {SymMatrix::zero(1)},      Vector::Zero(1),    Vector::Constant(1, 0.4)};
  EXPECT_DOUBLE_EQ(eval_Fi(c, 2, 0, SymMatrix::identity(1), Vector::Constant(1, 0.4)), 1.0);
  const GameSpec g = testing::scalar_game(0, 0.5, 1, 1, 0, 2, 0.5, 1.0, 0.0);
  EXPECT_NEAR(eval_Fi(g.n_player_cost(), 2, 0, SymMatrix::identity(1), Vector::Constant(1, 2.0 / 3)),
              1.0 / 6, 1e-15);
}

TEST(EvalFi, DiracDropsTraceTerm) {
  CostStructure c{SymMatrix::scalar(1, 0.5), SymMatrix::zero(1), {SymMatrix::identity(1)},
                  {SymMatrix::zero(1)},      Vector::Zero(1),    Vector::Zero(1)};
  EXPECT_DOUBLE_EQ(eval_Fi(c, 2, 0, std::nullopt, Vector::Zero(1)), 0.0);
  EXPECT_DOUBLE_EQ(eval_Fi(c, 2, 0, SymMatrix::scalar(1, 2.0), Vector::Zero(1)), 2.0);
}

TEST(EvalFiGaussian, Examples) {
  const auto cost = testing::scalar_game(0, 0.5, 1, 1, 0, 1, 0, 1.0).n_player_cost();
  const Gaussian m(Vector::Zero(1), SymMatrix::identity(1));
  EXPECT_DOUBLE_EQ(eval_fi_gaussian(cost, 1, 0, Vector::Constant(1, 2.0), m), 0.5);
  EXPECT_DOUBLE_EQ(eval_fi_gaussian(cost, 1, 0, Vector::Constant(1, 1.0), m), 0.0);

  CostStructure c{SymMatrix::zero(1), SymMatrix::zero(1), {SymMatrix::zero(1)},
                  {SymMatrix::identity(1)}, Vector::Zero(1), Vector::Zero(1)};
  EXPECT_DOUBLE_EQ(eval_fi_gaussian(c, 3, 0, Vector::Constant(1, 0.7), Dirac{Vector::Ones(1)}), 2.0);
}

// f^i is the average of the pairwise cost over independent draws of the opponents.
TEST(EvalFiGaussian, MatchesMonteCarloAverage) {
  Rng rng(34);
  for (int trial = 0; trial < 3; ++trial) {
    const int d = 2;
    const int n = 3;
    const GameSpec spec = testing::random_game(rng, d, n);
    const CostStructure& c = spec.n_player_cost();
    const Vector mu = testing::uniform_vector(rng, d, -1, 1);
    const SymMatrix prec = testing::random_sym_spectrum(rng, d, 0.5, 2.0);
    const Gaussian m(mu, prec);
    const Vector x = testing::uniform_vector(rng, d, -1, 1);
    const Eigen::LLT<Matrix> chol(m.covariance().matrix());
    const Matrix l = chol.matrixL();
    std::normal_distribution<double> normal;
    auto draw = [&] {
      Vector z(d);
      for (int i = 0; i < d; ++i) z(i) = normal(rng);
      return Vector(mu + l * z);
    };
    const int samples = 1000000;
    double sum = 0.0;
    double sum_sq = 0.0;
    const Vector xh = x - c.H;
    for (int s = 0; s < samples; ++s) {
      const Vector y1 = draw() - c.Delta;
      const Vector y2 = draw() - c.Delta;
      // players 1 and 2 are the opponents of player 0
      double v = xh.dot(c.Q * xh);
      v += 0.5 * (xh.dot(c.B * y1) + y1.dot(c.B * xh)) + 0.5 * (xh.dot(c.B * y2) + y2.dot(c.B * xh));
      v += y1.dot(c.C_for(0) * y1) + y2.dot(c.C_for(0) * y2);
      v += y1.dot(c.D_for(0) * y2) + y2.dot(c.D_for(0) * y1);
      sum += v;
      sum_sq += v * v;
    }
    const double mean = sum / samples;
    const double se = std::sqrt((sum_sq / samples - mean * mean) / samples);
    EXPECT_NEAR(eval_fi_gaussian(c, n, 0, x, m), mean, 4 * se);
  }
}

TEST(VhatQuadratic, Examples) {
  const GameSpec plain = testing::scalar_mf_game(0, 0.5, 0.0, 1.0, 0.0);
  const QuadraticForm q0 = vhat_quadratic(plain.mf_cost(), Gaussian(Vector::Constant(1, 3.0), SymMatrix::identity(1)));
  EXPECT_NEAR(q0(Vector::Constant(1, 2.5)), 0.5 * 1.5 * 1.5, 1e-14);

  const GameSpec g = testing::scalar_mf_game(0, 0.5, 0.5, 1.0, 0.0, 1, 1, 0, 1.0, 0.0);
  const QuadraticForm q = vhat_quadratic(g.mf_cost(), Gaussian(Vector::Constant(1, 2.0), SymMatrix::identity(1)));
  for (double x : {-2.0, 0.0, 1.0, 3.5}) {
    const double expected = 0.5 * (x - 1) * (x - 1) + 0.5 * (x - 1) * 2 + (1 + 4);
    EXPECT_NEAR(q(Vector::Constant(1, x)), expected, 1e-13);
  }

  const GameSpec centered = testing::scalar_mf_game(0, 0.5, 0.7, 1.0, 0.3, 1, 1, 0, 0.4, 0.2);
  const QuadraticForm qd = vhat_quadratic(centered.mf_cost(), Dirac{Vector::Constant(1, 0.3)});
  EXPECT_NEAR(qd(Vector::Constant(1, 2.0)), 0.5, 1e-14);
}

TEST(VhatQuadratic, IsTheLimitOfTheScaledRunningCost) {
  Rng rng(35);
  const GameSpec mf = testing::random_mf_game(rng, 2);
  const Gaussian m(testing::uniform_vector(rng, 2, -1, 1), testing::random_sym_spectrum(rng, 2, 0.5, 2));
  const Vector x = testing::uniform_vector(rng, 2, -2, 2);
  const double limit = vhat_quadratic(mf.mf_cost(), m)(x);
  double previous = 0.0;
  for (int n = 10; n <= 1280; n *= 2) {
    const double err = std::abs(eval_fi_gaussian(scaled_costs(mf.mf_cost(), n), n, 0, x, m) - limit);
    if (previous > 0.0) EXPECT_NEAR(previous / err, 2.0, 0.3);
    previous = err;
  }
}

TEST(HcmConversion, Examples) {
  const HcmBlocks zero = convert_hcm_cost(Matrix::Zero(1, 1), Vector::Ones(1), SymMatrix::identity(1), 3);
  EXPECT_DOUBLE_EQ(zero.own(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(zero.cross(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(zero.others(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(zero.ref_own(0), 1.0);
  EXPECT_DOUBLE_EQ(zero.ref_other(0), 0.0);

  const HcmBlocks two = convert_hcm_cost(Matrix::Identity(1, 1), Vector::Zero(1), SymMatrix::identity(1), 2);
  EXPECT_DOUBLE_EQ(two.own(0, 0), 0.25);
  EXPECT_DOUBLE_EQ(two.cross(0, 0), -0.25);

  const HcmBlocks four = convert_hcm_cost(Matrix::Identity(1, 1), Vector::Zero(1), SymMatrix::identity(1), 4);
  EXPECT_DOUBLE_EQ(four.others(0, 0), 1.0 / 16);
}

TEST(HcmConversion, SingularIsReported) {
  try {
    convert_hcm_cost(Matrix::Constant(1, 1, 2.0), Vector::Zero(1), SymMatrix::identity(1), 2);
    FAIL() << "expected SingularConversion";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SingularConversion);
  }
}

TEST(HcmConversion, PlayerMatricesAreSymmetric) {
  Rng rng(36);
  for (int trial = 0; trial < 10; ++trial) {
    const int d = 1 + trial % 3;
    const int n = 2 + trial % 4;
    const Matrix gamma = Matrix::NullaryExpr(d, d, [&] { return testing::uniform(rng, -1, 1); });
    const HcmBlocks blocks = convert_hcm_cost(gamma, testing::uniform_vector(rng, d, -1, 1),
                                              testing::random_sym_spectrum(rng, d, 0.5, 2), n);
    for (int i = 0; i < n; ++i) {
      const Matrix q = assemble_player_matrix(blocks, n, i);
      EXPECT_EQ(q, q.transpose());
    }
  }
}

}  // namespace
}  // namespace lqmfg
