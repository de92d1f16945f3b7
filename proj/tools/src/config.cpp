#include "lqmfg/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "lqmfg/error.hpp"

namespace lqmfg::cli {
namespace {

struct Literal {
  bool is_list = false;
  double number = 0.0;
  std::vector<Literal> items;
};

class LiteralParser {
 public:
  explicit LiteralParser(std::string_view s) : s_(s) {}

  Literal parse_all() {
    Literal v = parse_value();
    skip_ws();
    if (pos_ != s_.size()) throw_here("trailing characters");
    return v;
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }

  [[noreturn]] void throw_here(const std::string& what) const {
    throw std::invalid_argument(what + " at column " + std::to_string(pos_ + 1));
  }

  Literal parse_value() {
    skip_ws();
    if (pos_ >= s_.size()) throw_here("unexpected end of value");
    if (s_[pos_] == '[') {
      ++pos_;
      Literal list;
      list.is_list = true;
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == ']') throw_here("empty list");
      while (true) {
        list.items.push_back(parse_value());
        skip_ws();
        if (pos_ >= s_.size()) throw_here("missing ']'");
        if (s_[pos_] == ',') {
          ++pos_;
          continue;
        }
        if (s_[pos_] == ']') {
          ++pos_;
          return list;
        }
        throw_here("expected ',' or ']'");
      }
    }
    Literal num;
    const char* first = s_.data() + pos_;
    const char* last = s_.data() + s_.size();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, num.number);
    if (ec != std::errc{}) throw_here("expected a number");
    pos_ = static_cast<std::size_t>(ptr - s_.data());
    return num;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

Matrix to_matrix(const Literal& lit) {
  if (!lit.is_list) throw std::invalid_argument("expected a matrix literal [[...], ...]");
  const auto rows = static_cast<Eigen::Index>(lit.items.size());
  Eigen::Index cols = -1;
  Matrix m;
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Literal& row = lit.items[static_cast<std::size_t>(i)];
    if (!row.is_list) throw std::invalid_argument("matrix rows must be bracketed");
    if (cols < 0) {
      cols = static_cast<Eigen::Index>(row.items.size());
      m.resize(rows, cols);
    } else if (cols != static_cast<Eigen::Index>(row.items.size())) {
      throw std::invalid_argument("ragged matrix rows");
    }
    for (Eigen::Index j = 0; j < cols; ++j) {
      const Literal& x = row.items[static_cast<std::size_t>(j)];
      if (x.is_list) throw std::invalid_argument("matrix entries must be numbers");
      m(i, j) = x.number;
    }
  }
  return m;
}

Vector to_vector(const Literal& lit) {
  if (!lit.is_list) throw std::invalid_argument("expected a vector literal [...]");
  Vector v(static_cast<Eigen::Index>(lit.items.size()));
  for (std::size_t i = 0; i < lit.items.size(); ++i) {
    if (lit.items[i].is_list) throw std::invalid_argument("vector entries must be numbers");
    v(static_cast<Eigen::Index>(i)) = lit.items[i].number;
  }
  return v;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  int line = 0;
  std::string value;
};

[[noreturn]] void parse_error(int line, const std::string& key, const std::string& what) {
  std::ostringstream os;
  os << "line " << line;
  if (!key.empty()) os << " (key '" << key << "')";
  os << ": " << what;
  fail(ErrorKind::ParseError, os.str());
}

bool is_per_player_key(const std::string& key, char block) {
  return key.size() > 2 && key[0] == block && key[1] == '.' &&
         key.find_first_not_of("0123456789", 2) == std::string::npos;
}

class Reader {
 public:
  explicit Reader(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  int line(const std::string& key) const { return entries_.at(key).line; }

  const Entry& require(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) parse_error(0, key, "missing required key");
    return it->second;
  }

  template <class F>
  auto convert(const std::string& key, F&& f) const {
    const Entry& e = require(key);
    try {
      return f(e.value);
    } catch (const std::invalid_argument& ex) {
      parse_error(e.line, key, ex.what());
    }
  }

  double number(const std::string& key) const {
    return convert(key, [](const std::string& v) {
      const Literal lit = LiteralParser(v).parse_all();
      if (lit.is_list) throw std::invalid_argument("expected a number");
      return lit.number;
    });
  }

  Matrix matrix(const std::string& key, int d) const {
    Matrix m = convert(key, [](const std::string& v) { return to_matrix(LiteralParser(v).parse_all()); });
    if (m.rows() != d || m.cols() != d) {
      std::ostringstream os;
      os << "dimension mismatch: expected " << d << "x" << d << ", got " << m.rows() << "x" << m.cols();
      parse_error(line(key), key, os.str());
    }
    return m;
  }

  SymMatrix sym(const std::string& key, int d) const {
    const Matrix m = matrix(key, d);
    try {
      return SymMatrix(m);
    } catch (const Error& e) {
      parse_error(line(key), key, e.what());
    }
  }

  SymMatrix sym_or_zero(const std::string& key, int d) const {
    return has(key) ? sym(key, d) : SymMatrix::zero(d);
  }

  Vector vector_or_zero(const std::string& key, int d) const {
    if (!has(key)) return Vector::Zero(d);
    Vector v = convert(key, [](const std::string& s) { return to_vector(LiteralParser(s).parse_all()); });
    if (v.size() != d) {
      parse_error(line(key), key,
                  "dimension mismatch: expected length " + std::to_string(d) + ", got " +
                      std::to_string(v.size()));
    }
    return v;
  }

  std::string word(const std::string& key) const { return require(key).value; }

  std::vector<std::string> indexed_keys() const {
    std::vector<std::string> out;
    for (const auto& [key, e] : entries_) {
      if (is_per_player_key(key, 'C') || is_per_player_key(key, 'D')) out.push_back(key);
    }
    return out;
  }

 private:
  std::map<std::string, Entry> entries_;
};

const std::set<std::string> kKnownKeys{"A", "k",   "r",     "ell",     "N",    "Q",     "B", "C",
                                       "D", "H",   "Delta", "scaling", "mode", "seed",  "paths",
                                       "dt", "T"};

std::vector<SymMatrix> per_player_blocks(const Reader& rd, char block, int n, int d) {
  const std::string shared(1, block);
  std::vector<std::string> keys;
  for (int i = 1; i <= n; ++i) keys.push_back(shared + "." + std::to_string(i));
  const bool any_indexed = std::any_of(keys.begin(), keys.end(), [&](const auto& k) { return rd.has(k); });
  if (!any_indexed) return {rd.sym_or_zero(shared, d)};
  if (rd.has(shared)) {
    parse_error(rd.line(shared), shared, "give either a shared block or per-player blocks, not both");
  }
  std::vector<SymMatrix> out;
  for (const auto& k : keys) {
    if (!rd.has(k)) parse_error(0, k, "missing per-player block");
    out.push_back(rd.sym(k, d));
  }
  return out;
}

}  // namespace

Matrix parse_matrix_literal(std::string_view text) {
  try {
    return to_matrix(LiteralParser(text).parse_all());
  } catch (const std::invalid_argument& e) {
    fail(ErrorKind::ParseError, e.what());
  }
}

Vector parse_vector_literal(std::string_view text) {
  try {
    return to_vector(LiteralParser(text).parse_all());
  } catch (const std::invalid_argument& e) {
    fail(ErrorKind::ParseError, e.what());
  }
}

ParsedConfig parse_config(std::string_view text, bool validate) {
  std::map<std::string, Entry> entries;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) parse_error(lineno, "", "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) parse_error(lineno, "", "empty key");
    if (value.empty()) parse_error(lineno, key, "empty value");
    if (!kKnownKeys.count(key) && !is_per_player_key(key, 'C') && !is_per_player_key(key, 'D')) {
      parse_error(lineno, key, "unknown key");
    }
    if (!entries.emplace(key, Entry{lineno, value}).second) {
      parse_error(lineno, key, "repeated key (first on line " + std::to_string(entries[key].line) + ")");
    }
  }

  const Reader rd(std::move(entries));
  const Matrix a = rd.convert("A", [](const std::string& v) { return to_matrix(LiteralParser(v).parse_all()); });
  if (a.rows() != a.cols()) parse_error(rd.line("A"), "A", "A must be square");
  const int d = static_cast<int>(a.rows());

  const double k = rd.number("k");
  const double r = rd.number("r");
  const double ell = rd.has("ell") ? rd.number("ell") : 0.0;

  const std::string n_text = rd.word("N");
  const bool mean_field = n_text == "mf";
  int n = 0;
  if (!mean_field) {
    const auto [ptr, ec] = std::from_chars(n_text.data(), n_text.data() + n_text.size(), n);
    if (ec != std::errc{} || ptr != n_text.data() + n_text.size() || n < 1) {
      parse_error(rd.line("N"), "N", "expected a positive integer or 'mf'");
    }
  }

  const SymMatrix q = rd.sym("Q", d);
  const SymMatrix b = rd.sym_or_zero("B", d);
  const Vector h = rd.vector_or_zero("H", d);
  const Vector delta = rd.vector_or_zero("Delta", d);
  auto build = [&]() {
    for (const auto& key : rd.indexed_keys()) {
      if (mean_field) parse_error(rd.line(key), key, "per-player blocks need a finite N");
      int idx = 0;
      const auto [ptr, ec] = std::from_chars(key.data() + 2, key.data() + key.size(), idx);
      if (ec != std::errc{} || idx < 1 || idx > n) parse_error(rd.line(key), key, "player index out of range 1..N");
    }
    if (!mean_field) {
      return GameSpec::n_player(a, k, r, ell, n,
                                CostStructure{q, b, per_player_blocks(rd, 'C', n, d),
                                              per_player_blocks(rd, 'D', n, d), h, delta});
    }
    return GameSpec::mean_field(a, k, r, ell,
                                MFCost{q, b, rd.sym_or_zero("C", d), rd.sym_or_zero("D", d), h, delta});
  };
  ParsedConfig out{build(), QScaling::OnePlusInvN, {}};

  if (rd.has("scaling")) {
    const std::string s = rd.word("scaling");
    if (s == "one-plus-inv-n") {
      out.scaling = QScaling::OnePlusInvN;
    } else if (s == "constant") {
      out.scaling = QScaling::Constant;
    } else {
      parse_error(rd.line("scaling"), "scaling", "expected 'one-plus-inv-n' or 'constant'");
    }
  }

  if (rd.has("mode")) out.run.mode = rd.word("mode");
  if (rd.has("seed")) {
    const std::string s = rd.word("seed");
    std::uint64_t seed = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), seed);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
      parse_error(rd.line("seed"), "seed", "expected an unsigned integer");
    }
    out.run.seed = seed;
  }
  if (rd.has("paths")) {
    const double p = rd.number("paths");
    if (p < 1 || p != static_cast<int>(p)) parse_error(rd.line("paths"), "paths", "expected a positive integer");
    out.run.paths = static_cast<int>(p);
  }
  if (rd.has("dt")) out.run.dt = rd.number("dt");
  if (rd.has("T")) out.run.T = rd.number("T");

  if (!validate) return out;
  const ValidationReport report = validate_assumptions(out.spec);
  if (!report.ok()) {
    std::ostringstream os;
    os << "spec fails validation:";
    for (const auto& f : report.failures()) os << " [" << f << "]";
    fail(ErrorKind::ValidationError, os.str());
  }
  return out;
}

ParsedConfig parse_config_file(const std::string& path, bool validate) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::IOError, "cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), validate);
}

}  // namespace lqmfg::cli
