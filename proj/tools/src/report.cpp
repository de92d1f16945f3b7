#include "lqmfg/cli/report.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

namespace lqmfg::cli {

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::ParseError:
    case ErrorKind::ValidationError:
    case ErrorKind::AssumptionViolation:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::AsymmetricInput:
    case ErrorKind::InvalidArgument:
      return kExitValidation;
    case ErrorKind::DiscountTooLarge:
    case ErrorKind::InfeasibleAtZero:
    case ErrorKind::ImaginaryEigenvalues:
    case ErrorKind::NoSymmetricSolution:
    case ErrorKind::BNotInvertible:
    case ErrorKind::NotAdmissible:
      return kExitInfeasible;
    case ErrorKind::IOError:
      return kExitIO;
    default:
      return kExitFailure;
  }
}

Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) fail(ErrorKind::ParseError, "expected a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      fail(ErrorKind::ParseError, "ragged matrix in JSON");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

Vector vector_from_json(const Json& j) {
  if (!j.is_array()) fail(ErrorKind::ParseError, "expected an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

std::vector<Vector> residual_points(int d, int count) {
  std::mt19937_64 gen(0x5eed);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::vector<Vector> pts;
  pts.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Vector x(d);
    for (int j = 0; j < d; ++j) x(j) = u(gen);
    pts.push_back(std::move(x));
  }
  return pts;
}

Json solution_to_json(const QGSolution& sol, const ResidualPair& residuals) {
  return Json{{"mode", std::string(to_string(sol.mode))},
              {"ell", sol.ell},
              {"dim", sol.Sigma.dim()},
              {"Lambda", to_json(sol.Lambda.matrix())},
              {"Sigma", to_json(sol.Sigma.matrix())},
              {"rho", to_json(sol.rho)},
              {"mu", to_json(sol.mu)},
              {"per_player", sol.per_player},
              {"cond_B", sol.cond_B},
              {"residuals", {{"hjb", residuals.hjb}, {"kfp", residuals.kfp}}}};
}

QGSolution solution_from_json(const Json& j) {
  try {
    QGSolution s{SymMatrix(matrix_from_json(j.at("Lambda"))),
                 SymMatrix(matrix_from_json(j.at("Sigma"))),
                 vector_from_json(j.at("rho")),
                 vector_from_json(j.at("mu")),
                 j.at("per_player").get<std::vector<double>>(),
                 SolutionMode::Ergodic,
                 j.at("ell").get<double>(),
                 j.value("cond_B", 0.0)};
    const std::string mode = j.at("mode").get<std::string>();
    bool known = false;
    for (auto m : {SolutionMode::Ergodic, SolutionMode::Discounted, SolutionMode::MeanFieldErgodic,
                   SolutionMode::MeanFieldDiscounted}) {
      if (to_string(m) == mode) {
        s.mode = m;
        known = true;
      }
    }
    if (!known) fail(ErrorKind::ParseError, "unknown solution mode '" + mode + "'");
    return s;
  } catch (const Json::exception& e) {
    fail(ErrorKind::ParseError, std::string("malformed solution JSON: ") + e.what());
  }
}

Json to_json(const ConvergenceReport& rep) {
  Json coeffs = Json::array();
  for (const auto& c : rep.coefficients) {
    coeffs.push_back({{"name", c.name}, {"errors", c.errors}, {"decayed", c.decayed}});
  }
  return Json{{"parameter", rep.parameter}, {"params", rep.params},  {"players", rep.players},
              {"tol", rep.tol},             {"coefficients", coeffs}, {"all_decayed", rep.all_decayed()}};
}

Json to_json(const CommuteReport& rep) {
  Json coeffs = Json::array();
  for (std::size_t i = 0; i < rep.names.size(); ++i) {
    coeffs.push_back({{"name", rep.names[i]},
                      {"mean_field_first", to_json(rep.mean_field_first[i])},
                      {"parameter_first", to_json(rep.parameter_first[i])},
                      {"discrepancy", rep.discrepancies[i]}});
  }
  return Json{{"parameter", to_string(rep.parameter)},
              {"tol", rep.tol},
              {"passed", rep.passed},
              {"max_discrepancy", rep.max_discrepancy()},
              {"coefficients", coeffs}};
}

Json to_json(const LimitTriple& lim) {
  Json measure;
  if (const auto* g = std::get_if<Gaussian>(&lim.measure)) {
    measure = {{"kind", "gaussian"}, {"mean", to_json(g->mean())}, {"precision", to_json(g->precision().matrix())}};
  } else {
    measure = {{"kind", "dirac"}, {"point", to_json(std::get<Dirac>(lim.measure).point)}};
  }
  return Json{{"value", {{"M", to_json(lim.value.M.matrix())}, {"b", to_json(lim.value.b)}, {"c", lim.value.c}}},
              {"measure", measure},
              {"lambda", lim.lambda},
              {"per_player", lim.per_player},
              {"Vhat", to_json(lim.Vhat.matrix())},
              {"muhat", to_json(lim.muhat)}};
}

Json to_json(const SimReport& rep) {
  return Json{{"estimate", rep.estimate},
              {"std_error", rep.std_error},
              {"n_paths", rep.n_paths},
              {"seed", rep.seed},
              {"dt", rep.dt},
              {"horizon", rep.horizon},
              {"bias_bound", rep.bias_bound},
              {"elapsed_seconds", rep.elapsed_seconds},
              {"terminal_mean", to_json(rep.mean)},
              {"terminal_mean_std_error", to_json(rep.mean_std_error)},
              {"terminal_cov", to_json(rep.cov)}};
}

Json to_json(const NashReport& rep) {
  Json rows = Json::array();
  for (const auto& r : rep.results) {
    rows.push_back({{"label", r.label},
                    {"player", r.player},
                    {"equilibrium_cost", r.equilibrium_cost},
                    {"deviation_cost", r.deviation_cost},
                    {"gap", r.gap},
                    {"std_error", r.std_error},
                    {"passed", r.passed}});
  }
  return Json{{"passed", rep.passed()}, {"deviations", rows}};
}

namespace {

void print_matrix(std::ostream& os, const std::string& name, const Matrix& m) {
  os << "  " << name << " =";
  if (m.cols() == 1 || m.rows() == 1) {
    os << " [";
    for (Eigen::Index i = 0; i < m.size(); ++i) os << (i ? ", " : "") << m.data()[i];
    os << "]\n";
    return;
  }
  os << "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    os << "    [";
    for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? ", " : "") << m(i, j);
    os << "]\n";
  }
}

}  // namespace

void print_solution(std::ostream& os, const QGSolution& sol, const ResidualPair& residuals) {
  const auto old = os.precision(10);
  os << "mode: " << to_string(sol.mode);
  if (sol.discounted()) os << " (ell = " << sol.ell << ")";
  os << "\n";
  print_matrix(os, "Lambda", sol.Lambda.matrix());
  print_matrix(os, "Sigma", sol.Sigma.matrix());
  print_matrix(os, "rho", sol.rho);
  print_matrix(os, "mu", sol.mu);
  os << "  " << (sol.discounted() ? "c" : "lambda");
  const auto& pp = sol.per_player;
  if (pp.size() > 1 && std::all_of(pp.begin(), pp.end(), [&](double v) { return v == pp.front(); })) {
    os << " = " << pp.front() << " (all " << pp.size() << " players)";
  } else {
    os << (pp.size() > 1 ? " per player =" : " =");
    for (double v : pp) os << " " << v;
  }
  os << "\n  cond(B) = " << sol.cond_B << "\n";
  os << std::setprecision(3) << "  residuals: HJB " << residuals.hjb << ", KFP "
     << residuals.kfp << "\n";
  os.precision(old);
}

void print_convergence(std::ostream& os, const ConvergenceReport& rep) {
  const auto old = os.precision(4);
  const bool player_column = !rep.players.empty() && rep.parameter != "N";
  os << std::setw(12) << rep.parameter;
  if (player_column) os << std::setw(8) << "N";
  for (const auto& c : rep.coefficients) os << std::setw(12) << c.name;
  os << "\n";
  for (std::size_t i = 0; i < rep.params.size(); ++i) {
    os << std::setw(12) << rep.params[i];
    if (player_column) os << std::setw(8) << rep.players[i];
    for (const auto& c : rep.coefficients) os << std::setw(12) << c.errors[i];
    os << "\n";
  }
  os << "decayed below " << rep.tol << ":";
  for (const auto& c : rep.coefficients) os << " " << c.name << "=" << (c.decayed ? "yes" : "no");
  os << "\n";
  os.precision(old);
}

void print_commute(std::ostream& os, const CommuteReport& rep) {
  const auto old = os.precision(4);
  os << "limit in " << to_string(rep.parameter) << " vs N -> infinity\n";
  for (std::size_t i = 0; i < rep.names.size(); ++i) {
    os << "  " << std::setw(8) << rep.names[i] << "  discrepancy " << rep.discrepancies[i] << "\n";
  }
  os << (rep.passed ? "commutes" : "does not commute") << " within " << rep.tol << " (max "
     << rep.max_discrepancy() << ")\n";
  os.precision(old);
}

void print_nash(std::ostream& os, const NashReport& rep) {
  const auto old = os.precision(5);
  for (const auto& r : rep.results) {
    os << "  " << (r.passed ? "ok  " : "FAIL") << " " << std::setw(12) << r.label << "  gap " << std::setw(11)
       << r.gap << " ± " << r.std_error << "\n";
  }
  os << "Nash battery " << (rep.passed() ? "passed" : "failed") << "\n";
  os.precision(old);
}

std::string sim_summary_line(const SimReport& rep) {
  std::ostringstream os;
  os << std::setprecision(8) << rep.estimate << " ± " << std::setprecision(3) << rep.std_error << " ("
     << rep.n_paths << " paths, seed " << rep.seed << ")";
  return os.str();
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::IOError, "cannot open '" + path + "' for writing");
  out << contents;
  if (!out) fail(ErrorKind::IOError, "failed writing '" + path + "'");
}

void write_json_file(const std::string& path, const Json& j) { write_text_file(path, j.dump(2) + "\n"); }

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::IOError, "cannot read '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    fail(ErrorKind::ParseError, "'" + path + "': " + e.what());
  }
}

}  // namespace lqmfg::cli
