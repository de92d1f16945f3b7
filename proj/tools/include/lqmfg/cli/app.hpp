#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lqmfg/cli/config.hpp"
#include "lqmfg/ergodic_solver.hpp"

namespace lqmfg::cli {

enum class Command { Validate, Solve, Limit, Simulate, Verify };

/// Everything a command needs besides the game itself. Unset optionals fall
/// back to the config file and then to per-command defaults.
struct RunConfig {
  Command command = Command::Validate;
  std::string spec_path;

  std::optional<std::string> mode;  ///< ergodic | discounted | mf-ergodic | mf-discounted
  std::optional<double> ell;
  std::optional<int> n_players;

  std::string kind = "discount";  ///< limit kind
  std::string param = "discount"; ///< commute parameter: discount | noise | control
  std::vector<double> seq;
  std::vector<int> n_seq;
  double tol = 1e-3;

  std::optional<int> paths;
  std::optional<double> dt;
  std::optional<double> T;
  std::optional<std::uint64_t> seed;
  int dump_paths = 0;
  int stride = 10;
  bool skip_monte_carlo = false;

  std::string out_path;
  std::string csv_path;
  std::string solution_path;
};

/// The game a command operates on: the config's spec with --mode, --ell and
/// --N applied. ergodic and discounted modes on a mean-field config build the
/// scaled N-player game (--N required). Throws ValidationError when the mode
/// and the spec disagree.
GameSpec resolve_spec(const ParsedConfig& cfg, const RunConfig& run);

/// Parses argv, runs one command and returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lqmfg::cli
