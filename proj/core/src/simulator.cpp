#include "lqmfg/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "lqmfg/error.hpp"
#include "lqmfg/rng.hpp"

namespace lqmfg {

FeedbackLaw equilibrium_law(const QGSolution& sol, double r) {
  if (!(r > 0.0)) fail(ErrorKind::InvalidArgument, "control cost r must be positive");
  return FeedbackLaw{sol.Lambda.matrix() / r, sol.rho / r};
}

DistributionDesc stationary_law(const Matrix& a, double k, const FeedbackLaw& law) {
  const Matrix f = a - law.K;
  if (!is_hurwitz(f)) fail(ErrorKind::NotAdmissible, "A - K is not Hurwitz");
  Vector mean = f.fullPivLu().solve(law.c);
  if (k == 0.0) return Dirac{std::move(mean)};
  const SymMatrix cov = solve_lyapunov(f, SymMatrix::scalar(static_cast<int>(a.rows()), 2.0 * k));
  return Gaussian(std::move(mean), cov.inverse());
}

bool SimReport::bit_identical(const SimReport& o) const {
  return estimate == o.estimate && std_error == o.std_error && n_paths == o.n_paths &&
         seed == o.seed && horizon == o.horizon && mean == o.mean && cov == o.cov &&
         mean_std_error == o.mean_std_error && cov_std_error == o.cov_std_error &&
         path_values == o.path_values;
}

namespace {

// Flattened closed-loop data for the inner loop.
struct Kernel {
  int d = 0;
  double dt = 0.0;
  long steps = 0;
  double noise = 0.0;     // sqrt(2 k dt)
  std::vector<double> f;  // A - K, row-major
  std::vector<double> k;  // K, row-major
  std::vector<double> c;
  std::vector<double> x0;
};

std::vector<double> row_major(const Matrix& m) {
  std::vector<double> out(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[static_cast<std::size_t>(i * m.cols() + j)] = m(i, j);
  }
  return out;
}

double operator_norm(const Matrix& m) {
  return Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
}

Kernel make_kernel(const GameSpec& spec, const FeedbackLaw& law, const SimConfig& cfg, double horizon) {
  const int d = static_cast<int>(spec.A.rows());
  if (spec.A.cols() != d || law.K.rows() != d || law.K.cols() != d || law.c.size() != d) {
    fail(ErrorKind::DimensionMismatch, "feedback law does not match the state dimension");
  }
  if (cfg.x0.size() != 0 && cfg.x0.size() != d) {
    fail(ErrorKind::DimensionMismatch, "x0 does not match the state dimension");
  }
  if (!(cfg.dt > 0.0) || !(horizon > 0.0)) fail(ErrorKind::InvalidArgument, "dt and T must be positive");
  if (cfg.n_paths < 2) fail(ErrorKind::InvalidArgument, "n_paths must be at least 2");
  if (!(spec.k >= 0.0)) fail(ErrorKind::InvalidArgument, "noise level k must be nonnegative");

  const Matrix f = spec.A - law.K;
  if (!is_hurwitz(f)) {
    std::ostringstream os;
    os << "A - K has an eigenvalue with real part " << max_real_eigenvalue(f);
    fail(ErrorKind::NotAdmissible, os.str());
  }
  const double limit = 1.0 / (2.0 * operator_norm(f));
  if (!(cfg.dt < limit)) {
    std::ostringstream os;
    os << "dt = " << cfg.dt << " must be below " << limit;
    fail(ErrorKind::UnstableStep, os.str());
  }

  Kernel kn;
  kn.d = d;
  kn.dt = cfg.dt;
  kn.steps = std::max<long>(1, std::lround(horizon / cfg.dt));
  kn.noise = std::sqrt(2.0 * spec.k * cfg.dt);
  kn.f = row_major(f);
  kn.k = row_major(law.K);
  kn.c.assign(law.c.data(), law.c.data() + d);
  if (cfg.x0.size() == d) {
    kn.x0.assign(cfg.x0.data(), cfg.x0.data() + d);
  } else {
    kn.x0.assign(static_cast<std::size_t>(d), 0.0);
  }
  return kn;
}

// Euler-Maruyama path; obs(step, x) sees the state before each step.
template <class Observer>
void run_path(const Kernel& kn, std::uint64_t seed, std::uint64_t path, double* x, double* drift,
              Observer&& obs) {
  NormalStream normal(seed, path);
  const int d = kn.d;
  for (int i = 0; i < d; ++i) x[i] = kn.x0[static_cast<std::size_t>(i)];
  for (long step = 0; step < kn.steps; ++step) {
    obs(step, static_cast<const double*>(x));
    for (int i = 0; i < d; ++i) {
      double acc = -kn.c[static_cast<std::size_t>(i)];
      const double* row = kn.f.data() + static_cast<std::size_t>(i) * d;
      for (int j = 0; j < d; ++j) acc += row[j] * x[j];
      drift[i] = acc;
    }
    for (int i = 0; i < d; ++i) x[i] += drift[i] * kn.dt + kn.noise * normal();
  }
}

double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

// Mean and standard error of independent samples.
std::pair<double, double> mean_and_error(const std::vector<double>& v) {
  const std::size_t n = v.size();
  const double mean = pairwise_sum(v.data(), n) / static_cast<double>(n);
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) sq[i] = (v[i] - mean) * (v[i] - mean);
  const double var = pairwise_sum(sq.data(), n) / static_cast<double>(n - 1);
  return {mean, std::sqrt(var / static_cast<double>(n))};
}

// Empirical mean and covariance of the columns of `xs`, with batch standard errors.
void fill_moments(const Matrix& xs, int batches, SimReport& rep) {
  const Eigen::Index n = xs.cols();
  const Eigen::Index d = xs.rows();
  auto moments = [&](Eigen::Index begin, Eigen::Index end, Vector& mean, Matrix& cov) {
    const double m = static_cast<double>(end - begin);
    mean = xs.middleCols(begin, end - begin).rowwise().sum() / m;
    const Matrix centered = xs.middleCols(begin, end - begin).colwise() - mean;
    cov = centered * centered.transpose() / (m - 1.0);
  };
  moments(0, n, rep.mean, rep.cov);

  const int b = std::max(2, std::min<int>(batches, static_cast<int>(n / 2)));
  std::vector<Vector> means(static_cast<std::size_t>(b));
  std::vector<Matrix> covs(static_cast<std::size_t>(b));
  for (int i = 0; i < b; ++i) {
    moments(n * i / b, n * (i + 1) / b, means[static_cast<std::size_t>(i)], covs[static_cast<std::size_t>(i)]);
  }
  Vector mean_var = Vector::Zero(d);
  Matrix cov_var = Matrix::Zero(d, d);
  for (int i = 0; i < b; ++i) {
    mean_var += (means[static_cast<std::size_t>(i)] - rep.mean).cwiseAbs2();
    cov_var += (covs[static_cast<std::size_t>(i)] - rep.cov).cwiseAbs2();
  }
  const double scale = 1.0 / (static_cast<double>(b) * (b - 1));
  rep.mean_std_error = (mean_var * scale).cwiseSqrt();
  rep.cov_std_error = (cov_var * scale).cwiseSqrt();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Runs all paths; per_path(path, x, drift, terminal column) does one path.
template <class PerPath>
Matrix run_all(const Kernel& kn, int n_paths, PerPath&& per_path) {
  Matrix terminal(kn.d, n_paths);
#if defined(_OPENMP)
#pragma omp parallel
#endif
  {
    std::vector<double> x(static_cast<std::size_t>(kn.d));
    std::vector<double> drift(static_cast<std::size_t>(kn.d));
#if defined(_OPENMP)
#pragma omp for schedule(static)
#endif
    for (int p = 0; p < n_paths; ++p) {
      per_path(p, x.data(), drift.data());
      for (int i = 0; i < kn.d; ++i) terminal(i, p) = x[static_cast<std::size_t>(i)];
    }
  }
  return terminal;
}

}  // namespace

SimReport simulate_closed_loop(const GameSpec& spec, const FeedbackLaw& law, const SimConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const Kernel kn = make_kernel(spec, law, cfg, cfg.T);
  const Matrix terminal = run_all(kn, cfg.n_paths, [&](int p, double* x, double* drift) {
    run_path(kn, cfg.seed, static_cast<std::uint64_t>(p), x, drift, [](long, const double*) {});
  });
  SimReport rep;
  rep.n_paths = cfg.n_paths;
  rep.seed = cfg.seed;
  rep.dt = cfg.dt;
  rep.horizon = static_cast<double>(kn.steps) * kn.dt;
  fill_moments(terminal, cfg.batches, rep);
  rep.estimate = rep.mean.size() > 0 ? rep.mean(0) : 0.0;
  rep.std_error = rep.mean_std_error.size() > 0 ? rep.mean_std_error(0) : 0.0;
  rep.elapsed_seconds = seconds_since(t0);
  return rep;
}

SimReport estimate_cost(const GameSpec& spec, const PlayerLaws& laws, const SimConfig& cfg,
                        CostMode mode) {
  const auto t0 = std::chrono::steady_clock::now();
  double horizon = cfg.T;
  const double ell = spec.ell;
  if (mode == CostMode::Discounted) {
    if (!(ell > 0.0)) fail(ErrorKind::InvalidArgument, "discounted cost requires ell > 0");
    if (!(cfg.truncation_tol > 0.0 && cfg.truncation_tol < 1.0)) {
      fail(ErrorKind::InvalidArgument, "truncation_tol must lie in (0, 1)");
    }
    const double needed = std::log(1.0 / cfg.truncation_tol) / ell;
    if (std::exp(-ell * horizon) > cfg.truncation_tol) {
      if (cfg.horizon_policy == HorizonPolicy::Strict) {
        std::ostringstream os;
        os << "exp(-ell T) = " << std::exp(-ell * horizon) << " exceeds " << cfg.truncation_tol
           << "; need T >= " << needed;
        fail(ErrorKind::TruncationTooCoarse, os.str());
      }
      horizon = needed;
    }
  }
  const Kernel kn = make_kernel(spec, laws.own, cfg, horizon);
  if (mode == CostMode::Ergodic && kn.steps < 2) {
    fail(ErrorKind::InvalidArgument, "ergodic averaging window is empty");
  }

  const QuadraticForm f =
      running_cost_form(spec, laws.player, stationary_law(spec.A, spec.k, laws.others));
  const int d = kn.d;
  const std::vector<double> m = row_major(f.M.matrix());
  const std::vector<double> b(f.b.data(), f.b.data() + d);
  const double half_r = 0.5 * spec.r;
  auto running = [&](const double* x) {
    double control = 0.0;
    double quad = f.c;
    for (int i = 0; i < d; ++i) {
      double a = kn.c[static_cast<std::size_t>(i)];
      double mx = 0.0;
      const double* krow = kn.k.data() + static_cast<std::size_t>(i) * d;
      const double* mrow = m.data() + static_cast<std::size_t>(i) * d;
      for (int j = 0; j < d; ++j) {
        a += krow[j] * x[j];
        mx += mrow[j] * x[j];
      }
      control += a * a;
      quad += x[i] * mx + b[static_cast<std::size_t>(i)] * x[i];
    }
    return half_r * control + quad;
  };

  std::vector<double> values(static_cast<std::size_t>(cfg.n_paths));
  const long window_start = kn.steps / 2;
  const double decay = std::exp(-ell * kn.dt);
  const Matrix terminal = run_all(kn, cfg.n_paths, [&](int p, double* x, double* drift) {
    double acc = 0.0;
    if (mode == CostMode::Discounted) {
      double w = kn.dt;
      run_path(kn, cfg.seed, static_cast<std::uint64_t>(p), x, drift, [&](long, const double* s) {
        acc += w * running(s);
        w *= decay;
      });
    } else {
      run_path(kn, cfg.seed, static_cast<std::uint64_t>(p), x, drift, [&](long step, const double* s) {
        if (step >= window_start) acc += running(s);
      });
      acc /= static_cast<double>(kn.steps - window_start);
    }
    values[static_cast<std::size_t>(p)] = acc;
  });

  SimReport rep;
  rep.n_paths = cfg.n_paths;
  rep.seed = cfg.seed;
  rep.dt = cfg.dt;
  rep.horizon = static_cast<double>(kn.steps) * kn.dt;
  std::tie(rep.estimate, rep.std_error) = mean_and_error(values);
  fill_moments(terminal, cfg.batches, rep);
  if (mode == CostMode::Discounted) {
    std::vector<double> tail(static_cast<std::size_t>(cfg.n_paths));
    for (int p = 0; p < cfg.n_paths; ++p) {
      tail[static_cast<std::size_t>(p)] = std::abs(running(terminal.col(p).data()));
    }
    const double g = pairwise_sum(tail.data(), tail.size()) / cfg.n_paths;
    rep.bias_bound = std::exp(-ell * rep.horizon) * g / ell;
  }
  rep.path_values = std::move(values);
  rep.elapsed_seconds = seconds_since(t0);
  return rep;
}

bool NashReport::passed() const {
  return std::all_of(results.begin(), results.end(), [](const DeviationResult& r) { return r.passed; });
}

NashReport nash_deviation_test(const GameSpec& spec, const QGSolution& eq,
                               const std::vector<Deviation>& deviations, const SimConfig& cfg) {
  const CostMode mode = eq.discounted() ? CostMode::Discounted : CostMode::Ergodic;
  const FeedbackLaw eq_law = equilibrium_law(eq, spec.r);
  std::vector<std::pair<int, SimReport>> baselines;
  auto baseline = [&](int player) -> const SimReport& {
    for (const auto& [p, rep] : baselines) {
      if (p == player) return rep;
    }
    baselines.emplace_back(player, estimate_cost(spec, PlayerLaws{eq_law, eq_law, player}, cfg, mode));
    return baselines.back().second;
  };

  NashReport report;
  for (const Deviation& dev : deviations) {
    const SimReport& base = baseline(dev.player);
    const SimReport alt = estimate_cost(spec, PlayerLaws{dev.law, eq_law, dev.player}, cfg, mode);
    std::vector<double> diff(base.path_values.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = alt.path_values[i] - base.path_values[i];
    const auto [gap, err] = mean_and_error(diff);
    report.results.push_back(
        {dev.label, dev.player, base.estimate, alt.estimate, gap, err, gap >= -3.0 * err});
  }
  return report;
}

std::vector<Deviation> default_deviation_battery(const QGSolution& eq, double r) {
  const FeedbackLaw law = equilibrium_law(eq, r);
  const Eigen::Index d = law.c.size();
  const Matrix eye = Matrix::Identity(d, d);
  const Vector ones = Vector::Ones(d);
  return {
      {"equilibrium", 0, law},
      {"K+0.1", 0, {law.K + 0.1 * eye, law.c}},
      {"K-0.1", 0, {law.K - 0.1 * eye, law.c}},
      {"c+0.5", 0, {law.K, law.c + 0.5 * ones}},
      {"c-0.5", 0, {law.K, law.c - 0.5 * ones}},
      {"K+0.3,c+0.2", 0, {law.K + 0.3 * eye, law.c + 0.2 * ones}},
  };
}

void write_paths_csv(std::ostream& os, const GameSpec& spec, const FeedbackLaw& law,
                     const SimConfig& cfg, int n_dump, int stride) {
  if (stride < 1) fail(ErrorKind::InvalidArgument, "stride must be positive");
  const Kernel kn = make_kernel(spec, law, cfg, cfg.T);
  os << "t,path_id";
  for (int i = 0; i < kn.d; ++i) os << ",x" << i;
  os << '\n' << std::setprecision(17);
  std::vector<double> x(static_cast<std::size_t>(kn.d));
  std::vector<double> drift(static_cast<std::size_t>(kn.d));
  auto emit = [&](double t, int p, const double* s) {
    os << t << ',' << p;
    for (int i = 0; i < kn.d; ++i) os << ',' << s[i];
    os << '\n';
  };
  for (int p = 0; p < std::min(n_dump, cfg.n_paths); ++p) {
    run_path(kn, cfg.seed, static_cast<std::uint64_t>(p), x.data(), drift.data(),
             [&](long step, const double* s) {
               if (step % stride == 0) emit(static_cast<double>(step) * kn.dt, p, s);
             });
    emit(static_cast<double>(kn.steps) * kn.dt, p, x.data());
  }
  if (!os) fail(ErrorKind::IOError, "failed writing path dump");
}

}  // namespace lqmfg
