#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "lqmfg/game_model.hpp"

namespace lqmfg::cli {

/// Optional run settings that may live in a config file next to the game.
/// Command-line flags take precedence over these.
struct RunDefaults {
  std::optional<std::string> mode;
  std::optional<std::uint64_t> seed;
  std::optional<int> paths;
  std::optional<double> dt;
  std::optional<double> T;
};

struct ParsedConfig {
  GameSpec spec;
  QScaling scaling = QScaling::OnePlusInvN;
  RunDefaults run;
};

/// Parses the flat `key = value` format. Matrices are bracketed rows
/// (`[[1, 0], [0, 1]]`), vectors a single bracket (`[1, 0]`).
///
/// Required keys: A, k, r, Q, N (a positive integer or `mf`). Optional keys
/// with zero defaults: ell, B, C, D, H, Delta. Per-player opponent blocks are
/// given as C.1 .. C.N and D.1 .. D.N instead of C and D. Unknown or repeated
/// keys and malformed literals raise ParseError naming the line and key; a
/// spec that breaks the standing assumptions raises ValidationError unless
/// `validate` is false.
ParsedConfig parse_config(std::string_view text, bool validate = true);

/// Reads and parses a file; throws IOError when it cannot be read.
ParsedConfig parse_config_file(const std::string& path, bool validate = true);

/// Parses a matrix literal. Exposed for tests and for reading solutions.
Matrix parse_matrix_literal(std::string_view text);
Vector parse_vector_literal(std::string_view text);

}  // namespace lqmfg::cli
