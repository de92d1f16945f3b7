#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "instances.hpp"
#include "lqmfg/error.hpp"
#include "lqmfg/limits.hpp"

namespace lqmfg {
namespace {

using testing::Rng;

TEST(VFamily, ScalarExamples) {
  for (double k : {1.0, 0.3, 0.01}) {
    const VFamilySolution v = v_family_solve(testing::scalar_game(0.0, 0.5, k));
    EXPECT_NEAR(v.V(0, 0), 1.0, 1e-14);
    EXPECT_NEAR(v.per_player[0], k, 1e-14);
  }
  const VFamilySolution v = v_family_solve(testing::scalar_game(0.0, 0.5));
  EXPECT_NEAR(v.precision()(0, 0), 1.0, 1e-14);
}

TEST(VFamily, CoincidesWithErgodicSolver) {
  Rng rng(61);
  for (int trial = 0; trial < 40; ++trial) {
    const int d = 1 + trial % 6;
    const GameSpec spec = trial % 2 ? testing::random_game(rng, d, 2 + trial % 6)
                                    : testing::random_mf_game(rng, d);
    const VFamilySolution v = v_family_solve(spec);
    const QGSolution s = solve_ergodic(spec);
    EXPECT_LE((v.precision().matrix() - s.Sigma.matrix()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((v.Lambda.matrix() - s.Lambda.matrix()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((v.rho - s.rho).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((v.mu - s.mu).cwiseAbs().maxCoeff(), 1e-12);
    for (std::size_t i = 0; i < v.per_player.size(); ++i) {
      EXPECT_NEAR(v.per_player[i], s.per_player[i], 1e-12 * (1 + std::abs(s.per_player[i])));
    }
  }
}

TEST(VFamily, NoiseOnlyMovesTheErgodicConstant) {
  Rng rng(62);
  GameSpec spec = testing::random_mf_game(rng, 3);
  std::vector<VFamilySolution> sols;
  for (double k : {1.0, 0.1, 0.01}) {
    spec.k = k;
    sols.push_back(v_family_solve(spec));
  }
  for (std::size_t i = 1; i < sols.size(); ++i) {
    EXPECT_LE((sols[i].Lambda.matrix() - sols[0].Lambda.matrix()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((sols[i].rho - sols[0].rho).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((sols[i].mu - sols[0].mu).cwiseAbs().maxCoeff(), 1e-12);
  }
  const double s01 = (sols[0].per_player[0] - sols[1].per_player[0]) / 0.9;
  const double s12 = (sols[1].per_player[0] - sols[2].per_player[0]) / 0.09;
  EXPECT_NEAR(s01, s12, 1e-10);
  const double ratio = min_eigenvalue(sols[2].precision()) / min_eigenvalue(sols[1].precision());
  EXPECT_NEAR(ratio, 10.0, 0.1);
}

TEST(DeterministicLimit, ScalarExample) {
  const LimitTriple t = deterministic_limit(testing::scalar_mf_game(0.0, 0.5, 0.0, 1.0, 0.0));
  EXPECT_NEAR(t.Vhat(0, 0), 1.0, 1e-14);
  EXPECT_NEAR(t.muhat(0), 1.0, 1e-14);
  EXPECT_NEAR(t.lambda, 0.0, 1e-14);
  ASSERT_TRUE(std::holds_alternative<Dirac>(t.measure));
  EXPECT_NEAR(std::get<Dirac>(t.measure).point(0), 1.0, 1e-14);
}

TEST(DeterministicLimit, CenteredValueIsLinearFeedbackPotential) {
  const double r = 0.7;
  const double a = 0.3;
  const LimitTriple t = deterministic_limit(testing::scalar_mf_game(a, 0.5, 0.0, 0.0, 0.0, 1, r));
  EXPECT_NEAR(t.muhat(0), 0.0, 1e-15);
  EXPECT_NEAR(t.lambda, 0.0, 1e-15);
  const double vhat = std::sqrt(1.0 + r * a * a);
  EXPECT_NEAR(t.Vhat(0, 0), vhat, 1e-14);
  // gradient of the value is sqrt(r) V x + r A x
  for (double x : {-1.0, 0.5, 2.0}) {
    EXPECT_NEAR(t.value.gradient(Vector::Constant(1, x))(0), std::sqrt(r) * vhat * x + r * a * x, 1e-13);
  }
}

TEST(DeterministicLimit, FiniteNoiseConstantIsAffineInNoise) {
  Rng rng(63);
  GameSpec spec = testing::random_mf_game(rng, 2);
  const LimitTriple t = deterministic_limit(spec);
  std::vector<double> gaps;
  for (double k : {1e-1, 1e-2, 1e-3}) {
    spec.k = k;
    gaps.push_back((v_family_solve(spec).per_player[0] - t.lambda) / k);
  }
  EXPECT_NEAR(gaps[0], gaps[1], 1e-9);
  EXPECT_NEAR(gaps[1], gaps[2], 1e-9);
}

TEST(CheapControlLimit, ScalarExample) {
  for (double a : {0.0, 0.7, -0.4}) {
    const LimitTriple t = cheap_control_limit(testing::scalar_mf_game(a, 0.5, 0.0, 1.0, 0.0));
    EXPECT_NEAR(t.Vhat(0, 0), 1.0, 1e-14);
    EXPECT_NEAR(t.muhat(0), 1.0, 1e-14);
    EXPECT_NEAR(t.lambda, 0.0, 1e-14);
    EXPECT_EQ(t.value(Vector::Constant(1, 3.0)), 0.0);
  }
  const LimitTriple c = cheap_control_limit(testing::scalar_mf_game(0.5, 0.5, 0.0, 0.0, 0.0));
  EXPECT_EQ(c.muhat(0), 0.0);
  EXPECT_EQ(c.lambda, 0.0);
}

TEST(CheapControlLimit, ValueHessianVanishesLikeRootR) {
  Rng rng(64);
  GameSpec spec = testing::random_mf_game(rng, 2);
  std::vector<double> norms;
  for (double r : {1e-2, 1e-4, 1e-6}) {
    spec.r = r;
    norms.push_back(spec_norm(v_family_solve(spec).Lambda));
  }
  EXPECT_NEAR(norms[0] / norms[1], 10.0, 0.2);
  EXPECT_NEAR(norms[1] / norms[2], 10.0, 0.02);
}

TEST(Limits, RejectDiscountedSpec) {
  EXPECT_THROW(v_family_solve(testing::scalar_game(0.0, 0.5, 1, 1, 0.1)), Error);
  EXPECT_THROW(deterministic_limit(testing::scalar_game(0.0, 0.5, 1, 1, 0.1)), Error);
}

TEST(VanishingDiscount, ScalarRates) {
  const auto report = vanishing_discount_limit(testing::scalar_game(0.0, 0.5), {0.2, 0.02});
  ASSERT_EQ(report.coefficients.size(), 5u);
  const auto& sigma = report.coefficients[0].errors;
  EXPECT_NEAR(sigma[0], 1.0 - (-0.1 + std::sqrt(1.01)), 1e-12);
  EXPECT_NEAR(sigma[0], 0.09501, 1e-5);
  EXPECT_NEAR(sigma[1], 0.00995, 1e-5);
  // ell c = k r k Sigma_ell
  EXPECT_NEAR(report.coefficients[4].errors[1], sigma[1], 1e-10);
}

TEST(VanishingDiscount, CenteredMeanIsExact) {
  const auto report = vanishing_discount_limit(testing::scalar_game(0.3, 0.5, 1, 1, 0, 3, 0.2),
                                               default_discount_sequence());
  for (double e : report.coefficients[1].errors) EXPECT_EQ(e, 0.0);
  EXPECT_TRUE(report.all_decayed());
}

TEST(VanishingDiscount, RandomInstancesDecayLinearly) {
  Rng rng(65);
  for (int trial = 0; trial < 10; ++trial) {
    const GameSpec spec = testing::random_game(rng, 1 + trial % 4, 3);
    const auto report = vanishing_discount_limit(spec, default_discount_sequence(), 1e-2);
    EXPECT_TRUE(report.all_decayed());
    for (const auto& c : report.coefficients) {
      const std::size_t last = c.errors.size() - 1;
      if (c.errors[last] < 1e-12) continue;
      EXPECT_NEAR(c.errors[last - 1] / c.errors[last], 2.0, 0.05) << c.name;
    }
  }
}

TEST(VanishingDiscount, UnitScaleInstancesEndBelowTolerance) {
  Rng rng(68);
  for (int trial = 0; trial < 10; ++trial) {
    GameSpec spec = testing::random_game(rng, 1 + trial % 2, 3);
    spec.k = 1.0;
    spec.r = 1.0;
    EXPECT_TRUE(vanishing_discount_limit(spec, default_discount_sequence()).all_decayed());
  }
}

TEST(Decays, Rule) {
  EXPECT_TRUE(decays({1.0, 0.5, 0.6, 1e-4}, 1e-3));
  EXPECT_FALSE(decays({1.0, 2.5, 1e-4}, 1e-3));
  EXPECT_TRUE(decays({1.0, 1e-3, 0.1, 1e-4}, 1e-3));
  EXPECT_FALSE(decays({1.0, 0.5, 0.1}, 1e-3));
  EXPECT_TRUE(decays({0.0, 1e-16, 0.0}, 1e-3));
}

TEST(MeanFieldConvergence, HalvesForBothModes) {
  Rng rng(66);
  for (double ell : {0.0, 0.2}) {
    const GameSpec mf = testing::random_mf_game(rng, 2, ell);
    const auto report = mean_field_convergence(mf, default_player_sequence());
    for (std::size_t i = 1; i < report.params.size(); ++i) {
      const double ratio = report.total_error(i - 1) / report.total_error(i);
      EXPECT_GE(ratio, 1.6);
      EXPECT_LE(ratio, 2.4);
    }
  }
}

TEST(CommutingDiagram, ScalarDiscount) {
  const GameSpec mf = testing::scalar_mf_game(0.0, 0.5, 0.0, 0.0, 0.0);
  const CommuteReport rep =
      commuting_diagram_check(mf, LimitParameter::Discount, default_discount_sequence(),
                              default_player_sequence(), 1e-3, QScaling::Constant);
  EXPECT_TRUE(rep.passed);
  const std::vector<double> expected{1, 0, 1, 0, 1};
  for (std::size_t c = 0; c < expected.size(); ++c) {
    EXPECT_NEAR(rep.mean_field_first[c](0, 0), expected[c], 1e-9);
    EXPECT_NEAR(rep.parameter_first[c](0, 0), expected[c], 1e-9);
  }
  EXPECT_LE(rep.max_discrepancy(), 1e-12);
}

TEST(CommutingDiagram, ScalarNoiseAndControl) {
  const GameSpec mf = testing::scalar_mf_game(0.0, 0.5, 0.0, 1.0, 0.0);
  for (auto param : {LimitParameter::Noise, LimitParameter::ControlCost}) {
    const CommuteReport rep = commuting_diagram_check(
        mf, param, default_noise_sequence(), default_player_sequence(), 1e-3, QScaling::Constant);
    EXPECT_TRUE(rep.passed);
    for (const auto* path : {&rep.mean_field_first, &rep.parameter_first}) {
      EXPECT_NEAR((*path)[0](0, 0), 1.0, 1e-9);  // V
      EXPECT_NEAR((*path)[1](0), 1.0, 1e-9);     // mu
      EXPECT_NEAR((*path)[4](0, 0), 0.0, 1e-9);  // lambda
    }
  }
}

TEST(CommutingDiagram, GridErrorShrinksAlongDiagonal) {
  Rng rng(67);
  const GameSpec mf = testing::random_mf_game(rng, 2);
  const CommuteReport rep = commuting_diagram_check(mf, LimitParameter::ControlCost,
                                                    default_control_sequence(), default_player_sequence());
  EXPECT_TRUE(rep.passed);
  double first = -1.0;
  double last = -1.0;
  for (const auto& row : rep.grid) {
    if (row.n == 0 || row.coefficient != "mu") continue;
    if (first < 0) first = row.error;
    last = row.error;
  }
  EXPECT_LT(last, first / 50);
}

TEST(Csv, ConvergenceTable) {
  const auto report = vanishing_discount_limit(testing::scalar_game(0.0, 0.5), {0.2, 0.1});
  std::ostringstream os;
  write_csv(os, to_rows(report));
  const std::string text = os.str();
  EXPECT_EQ(text.rfind("param,N,coefficient,error\n", 0), 0u);
  EXPECT_NE(text.find("0.20000000000000001,1,Sigma,"), std::string::npos);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 11);
}

}  // namespace
}  // namespace lqmfg
