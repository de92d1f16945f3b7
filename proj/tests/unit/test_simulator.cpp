#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "instances.hpp"
#include "lqmfg/discounted_solver.hpp"
#include "lqmfg/error.hpp"
#include "lqmfg/rng.hpp"
#include "lqmfg/simulator.hpp"

namespace lqmfg {
namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::InvalidArgument;
}

TEST(Philox, KnownAnswers) {
  using B = Philox4x32::Block;
  EXPECT_EQ(Philox4x32::bijection({0, 0, 0, 0}, {0, 0}),
            (B{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
  EXPECT_EQ(Philox4x32::bijection({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                  {0xffffffffu, 0xffffffffu}),
            (B{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
  EXPECT_EQ(Philox4x32::bijection({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                  {0xa4093822u, 0x299f31d0u}),
            (B{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(Philox, StreamsAreIndependentOfOrder) {
  Philox4x32 a(7, 3);
  Philox4x32 b(7, 4);
  Philox4x32 a2(7, 3);
  const auto a0 = a();
  (void)b();
  EXPECT_EQ(a0, a2());
  EXPECT_NE(Philox4x32(7, 3)(), Philox4x32(7, 4)());
}

TEST(NormalStream, Moments) {
  NormalStream z(1, 0);
  const int n = 200000;
  double s1 = 0, s2 = 0, s4 = 0;
  for (int i = 0; i < n; ++i) {
    const double v = z();
    s1 += v;
    s2 += v * v;
    s4 += v * v * v * v;
  }
  EXPECT_NEAR(s1 / n, 0.0, 4 / std::sqrt(n));
  EXPECT_NEAR(s2 / n, 1.0, 4 * std::sqrt(2.0 / n));
  EXPECT_NEAR(s4 / n, 3.0, 4 * std::sqrt(96.0 / n));
}

SimConfig config(double dt, double t, int paths, std::uint64_t seed) {
  SimConfig cfg;
  cfg.dt = dt;
  cfg.T = t;
  cfg.n_paths = paths;
  cfg.seed = seed;
  return cfg;
}

TEST(SimulateClosedLoop, StationaryMomentsOfScalarEquilibrium) {
  const GameSpec spec = testing::scalar_game(0.0, 0.5);
  const QGSolution eq = solve_ergodic(spec);
  const SimReport rep = simulate_closed_loop(spec, equilibrium_law(eq, spec.r), config(1e-2, 20, 10000, 5));
  EXPECT_NEAR(rep.mean(0), 0.0, 3 * rep.mean_std_error(0));
  EXPECT_NEAR(rep.cov(0, 0), 1.0, 4 * rep.cov_std_error(0, 0));
  EXPECT_NEAR(rep.cov_std_error(0, 0), std::sqrt(2.0 / 10000), 0.01);
}

TEST(SimulateClosedLoop, StationaryCovarianceMatchesInverseOfSigma) {
  testing::Rng rng(71);
  const GameSpec spec = testing::random_game(rng, 2, 3);
  const QGSolution eq = solve_ergodic(spec);
  const FeedbackLaw law = equilibrium_law(eq, spec.r);
  SimConfig cfg = config(5e-3, 15, 8000, 9);
  cfg.x0 = eq.mu;
  const SimReport rep = simulate_closed_loop(spec, law, cfg);
  const Matrix target = eq.Sigma.inverse().matrix();
  for (int i = 0; i < 2; ++i) {
    EXPECT_NEAR(rep.mean(i), eq.mu(i), 4 * rep.mean_std_error(i));
    for (int j = 0; j < 2; ++j) EXPECT_NEAR(rep.cov(i, j), target(i, j), 4 * rep.cov_std_error(i, j));
  }
}

TEST(SimulateClosedLoop, InadmissibleAndUnstable) {
  const GameSpec spec = testing::scalar_game(0.0, 0.5);
  EXPECT_EQ(kind_of([&] {
              simulate_closed_loop(spec, {Matrix::Constant(1, 1, -1.0), Vector::Zero(1)},
                                   config(1e-2, 1, 10, 1));
            }),
            ErrorKind::NotAdmissible);
  EXPECT_EQ(kind_of([&] {
              simulate_closed_loop(spec, {Matrix::Constant(1, 1, 10.0), Vector::Zero(1)},
                                   config(0.1, 1, 10, 1));
            }),
            ErrorKind::UnstableStep);
}

TEST(SimulateClosedLoop, ZeroNoiseConvergesToFixedPoint) {
  GameSpec spec = testing::scalar_game(0.0, 0.5, 1, 1, 0, 2, 0.5, 1.0, 0.0);
  const QGSolution eq = solve_ergodic(spec);
  spec.k = 0.0;
  SimConfig cfg = config(1e-2, 30, 4, 3);
  cfg.x0 = Vector::Constant(1, -2.0);
  const SimReport rep = simulate_closed_loop(spec, equilibrium_law(eq, 1.0), cfg);
  EXPECT_NEAR(rep.mean(0), eq.mu(0), 1e-9);
  EXPECT_NEAR(rep.cov(0, 0), 0.0, 1e-18);
}

TEST(EstimateCost, ScalarDiscountedEqualsValueAtStart) {
  const GameSpec spec = testing::scalar_game(0.0, 0.5, 1, 1, 0.2);
  const QGSolution eq = solve_discounted(spec);
  const FeedbackLaw law = equilibrium_law(eq, spec.r);
  const SimReport rep = estimate_cost(spec, {law, law, 0}, config(2e-3, 50, 2000, 11), CostMode::Discounted);
  EXPECT_NEAR(rep.horizon, std::log(1e6) / 0.2, 2e-3);
  EXPECT_LE(rep.bias_bound, 1e-4);
  EXPECT_NEAR(rep.estimate, eq.value(Vector::Zero(1)), 3 * rep.std_error);
}

TEST(EstimateCost, StrictHorizonRefusesTruncation) {
  const GameSpec spec = testing::scalar_game(0.0, 0.5, 1, 1, 0.2);
  const FeedbackLaw law = equilibrium_law(solve_discounted(spec), 1.0);
  SimConfig cfg = config(1e-2, 50, 10, 1);
  cfg.horizon_policy = HorizonPolicy::Strict;
  EXPECT_EQ(kind_of([&] { estimate_cost(spec, {law, law, 0}, cfg, CostMode::Discounted); }),
            ErrorKind::TruncationTooCoarse);
  cfg.T = 70;
  EXPECT_NO_THROW(estimate_cost(spec, {law, law, 0}, cfg, CostMode::Discounted));
}

TEST(EstimateCost, ScalarErgodicTimeAverage) {
  const GameSpec spec = testing::scalar_game(0.0, 0.5);
  const QGSolution eq = solve_ergodic(spec);
  const FeedbackLaw law = equilibrium_law(eq, spec.r);
  const SimReport rep = estimate_cost(spec, {law, law, 0}, config(5e-3, 40, 2000, 12), CostMode::Ergodic);
  EXPECT_NEAR(rep.estimate, eq.per_player[0], 3 * rep.std_error);
}

// Zero running cost: only r|alpha|^2/2 accumulates along an OU process with
// closed-form mean and variance.
TEST(EstimateCost, ControlEnergyOfOrnsteinUhlenbeck) {
  const double kk = 1.5, c = 0.3, noise = 0.5, r = 1.0, ell = 0.5, x0 = 1.0;
  GameSpec spec = testing::scalar_game(0.0, 0.0, noise, r, ell);
  const double a = kk;  // A - K = -a
  const double m_inf = -c / a;
  const double u = kk * m_inf + c;
  const double w = kk * (x0 - m_inf);
  const double oracle = 0.5 * r *
                        (u * u / ell + 2 * u * w / (ell + a) + w * w / (ell + 2 * a) +
                         kk * kk * (noise / a) * (1 / ell - 1 / (ell + 2 * a)));
  const FeedbackLaw law{Matrix::Constant(1, 1, kk), Vector::Constant(1, c)};
  SimConfig cfg = config(1e-3, 40, 4000, 13);
  cfg.x0 = Vector::Constant(1, x0);
  const SimReport rep = estimate_cost(spec, {law, law, 0}, cfg, CostMode::Discounted);
  EXPECT_NEAR(rep.estimate, oracle, 3 * rep.std_error + 2e-3 * oracle);
}

TEST(EstimateCost, HalvingStepStaysWithinNoise) {
  const GameSpec spec = testing::scalar_game(0.0, 0.5, 1, 1, 1.0);
  const FeedbackLaw law = equilibrium_law(solve_discounted(spec), 1.0);
  const SimReport coarse = estimate_cost(spec, {law, law, 0}, config(2e-2, 14, 20000, 14), CostMode::Discounted);
  const SimReport fine = estimate_cost(spec, {law, law, 0}, config(1e-2, 14, 20000, 14), CostMode::Discounted);
  EXPECT_LT(std::abs(coarse.estimate - fine.estimate),
            3 * std::hypot(coarse.std_error, fine.std_error));
}

TEST(EstimateCost, BitIdenticalUnderFixedSeed) {
  const GameSpec spec = testing::scalar_game(0.0, 0.5, 1, 1, 0.5);
  const FeedbackLaw law = equilibrium_law(solve_discounted(spec), 1.0);
  const SimConfig cfg = config(1e-2, 30, 500, 77);
  const SimReport a = estimate_cost(spec, {law, law, 0}, cfg, CostMode::Discounted);
  const SimReport b = estimate_cost(spec, {law, law, 0}, cfg, CostMode::Discounted);
  EXPECT_TRUE(a.bit_identical(b));
  SimConfig other = cfg;
  other.seed = 78;
  EXPECT_FALSE(a.bit_identical(estimate_cost(spec, {law, law, 0}, other, CostMode::Discounted)));
}

TEST(NashDeviation, ScalarDiscountedBattery) {
  const GameSpec spec = testing::scalar_game(0.0, 0.5, 1, 1, 0.2);
  const QGSolution eq = solve_discounted(spec);
  const auto battery = default_deviation_battery(eq, spec.r);
  ASSERT_EQ(battery.size(), 6u);
  const NashReport rep = nash_deviation_test(spec, eq, battery, config(1e-2, 70, 1000, 21));
  EXPECT_TRUE(rep.passed());
  for (const auto& r : rep.results) {
    if (r.label == "equilibrium") {
      EXPECT_EQ(r.gap, 0.0);
    } else {
      EXPECT_GT(r.gap, 3 * r.std_error) << r.label;
    }
  }
}

TEST(NashDeviation, TwoPlayerErgodic) {
  const GameSpec spec = testing::scalar_game(0.0, 0.5, 1, 1, 0, 2, 0.5, 1.0, 0.0);
  const QGSolution eq = solve_ergodic(spec);
  const NashReport rep =
      nash_deviation_test(spec, eq, default_deviation_battery(eq, spec.r), config(1e-2, 30, 500, 22));
  EXPECT_TRUE(rep.passed());
}

TEST(PathDump, WritesRows) {
  const GameSpec spec = testing::scalar_game(0.0, 0.5);
  const FeedbackLaw law = equilibrium_law(solve_ergodic(spec), 1.0);
  std::ostringstream os;
  write_paths_csv(os, spec, law, config(0.1, 1.0, 5, 1), 2, 5);
  const std::string text = os.str();
  EXPECT_EQ(text.rfind("t,path_id,x0\n", 0), 0u);
  // steps 0 and 5 plus the terminal row for each of two paths
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 2 * 3);
}

}  // namespace
}  // namespace lqmfg
