#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "lqmfg/error.hpp"
#include "lqmfg/limits.hpp"
#include "lqmfg/simulator.hpp"

namespace lqmfg::cli {

using Json = nlohmann::json;

/// Stable process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitValidation = 2,
  kExitInfeasible = 3,
  kExitIO = 4,
};

int exit_code_for(ErrorKind kind) noexcept;

Json to_json(const Matrix& m);
Json to_json(const Vector& v);
Matrix matrix_from_json(const Json& j);
Vector vector_from_json(const Json& j);

/// Fixed evaluation points for residual reports: `count` points drawn
/// uniformly from [-5, 5]^d by a generator with a fixed seed, so reports made
/// at different times are comparable.
std::vector<Vector> residual_points(int d, int count = 100);

/// Keys: mode, ell, dim, Lambda, Sigma, rho, mu, per_player, cond_B, residuals.
Json solution_to_json(const QGSolution& sol, const ResidualPair& residuals);
/// Inverse of solution_to_json; throws ParseError on missing or malformed keys.
QGSolution solution_from_json(const Json& j);

Json to_json(const ConvergenceReport& rep);
Json to_json(const CommuteReport& rep);
Json to_json(const LimitTriple& lim);
Json to_json(const SimReport& rep);
Json to_json(const NashReport& rep);

void print_solution(std::ostream& os, const QGSolution& sol, const ResidualPair& residuals);
void print_convergence(std::ostream& os, const ConvergenceReport& rep);
void print_commute(std::ostream& os, const CommuteReport& rep);
void print_nash(std::ostream& os, const NashReport& rep);
/// "estimate ± stderr (n_paths paths, seed S)"
std::string sim_summary_line(const SimReport& rep);

/// Throws IOError when the file cannot be written.
void write_text_file(const std::string& path, const std::string& contents);
void write_json_file(const std::string& path, const Json& j);
Json read_json_file(const std::string& path);

}  // namespace lqmfg::cli
