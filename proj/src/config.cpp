#include "iadmm/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>
#include <vector>

namespace iadmm {

std::string_view to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::Iadmm: return "iadmm";
    case SolverKind::ClassicalAdmm: return "classical_admm";
    case SolverKind::Idr: return "idr";
    case SolverKind::ConsensusSum1: return "consensus_sum1";
    case SolverKind::ConsensusSum2: return "consensus_sum2";
    case SolverKind::BoydConsensus: return "boyd_consensus";
  }
  return "unknown";
}

std::optional<SolverKind> parse_solver_kind(std::string_view name) {
  for (auto k : {SolverKind::Iadmm, SolverKind::ClassicalAdmm, SolverKind::Idr, SolverKind::ConsensusSum1,
                 SolverKind::ConsensusSum2, SolverKind::BoydConsensus}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

bool is_consensus(SolverKind kind) {
  return kind == SolverKind::ConsensusSum1 || kind == SolverKind::ConsensusSum2 || kind == SolverKind::BoydConsensus;
}

namespace {

std::string format_parse_error(int line, const std::string& field, const std::string& message) {
  std::ostringstream os;
  if (line > 0) os << "line " << line << ": ";
  if (!field.empty()) os << field << ": ";
  os << message;
  return os.str();
}

}  // namespace

ParseError::ParseError(int line, std::string field, const std::string& message)
    : InputError(format_parse_error(line, field, message)), line_(line), field_(std::move(field)) {}

namespace {

struct Line {
  int number;
  std::string key;
  std::vector<std::string> args;
};

std::vector<Line> tokenize(std::string_view text) {
  std::vector<Line> lines;
  std::istringstream in{std::string(text)};
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream words(raw);
    Line line{number, {}, {}};
    if (!(words >> line.key)) continue;
    for (std::string w; words >> w;) line.args.push_back(w);
    lines.push_back(std::move(line));
  }
  return lines;
}

double to_real(const Line& l, const std::string& token) {
  double v = 0.0;
  const char* first = token.data();
  const char* last = first + token.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw ParseError(l.number, l.key, "malformed number '" + token + "'");
  }
  return v;
}

long to_integer(const Line& l, const std::string& token) {
  long v = 0;
  const char* first = token.data();
  const char* last = first + token.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw ParseError(l.number, l.key, "malformed integer '" + token + "'");
  return v;
}

double one_real(const Line& l) {
  if (l.args.size() != 1) throw ParseError(l.number, l.key, "expects exactly one value");
  return to_real(l, l.args[0]);
}

long one_integer(const Line& l) {
  if (l.args.size() != 1) throw ParseError(l.number, l.key, "expects exactly one value");
  return to_integer(l, l.args[0]);
}

std::string one_word(const Line& l) {
  if (l.args.size() != 1) throw ParseError(l.number, l.key, "expects exactly one value");
  return l.args[0];
}

Vector real_list(const Line& l) {
  if (l.args.empty()) throw ParseError(l.number, l.key, "expects at least one value");
  Vector v(static_cast<Eigen::Index>(l.args.size()));
  for (std::size_t i = 0; i < l.args.size(); ++i) v[static_cast<Eigen::Index>(i)] = to_real(l, l.args[i]);
  return v;
}

class Cursor {
 public:
  explicit Cursor(std::vector<Line> lines) : lines_(std::move(lines)) {}
  bool done() const { return pos_ >= lines_.size(); }
  const Line& next() { return lines_[pos_++]; }
  int last_line() const { return lines_.empty() ? 0 : lines_.back().number; }

 private:
  std::vector<Line> lines_;
  std::size_t pos_ = 0;
};

// Rows of reals up to `end`.
Matrix read_matrix(Cursor& cur, const Line& opener) {
  std::vector<Vector> rows;
  while (true) {
    if (cur.done()) throw ParseError(opener.number, opener.key, "matrix not closed by 'end'");
    const Line& l = cur.next();
    if (l.key == "end") break;
    Line row = l;
    row.args.insert(row.args.begin(), row.key);
    row.key = opener.key;
    rows.push_back(real_list(row));
    if (rows.back().size() != rows.front().size()) throw ParseError(l.number, opener.key, "ragged matrix rows");
  }
  if (rows.empty()) throw ParseError(opener.number, opener.key, "empty matrix");
  Matrix m(static_cast<Eigen::Index>(rows.size()), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  return m;
}

struct Section {
  int line;
  std::string name;
  std::map<std::string, Line> scalars;
  std::map<std::string, std::pair<Line, Matrix>> matrices;

  const Line* find(const std::string& key) const {
    auto it = scalars.find(key);
    return it == scalars.end() ? nullptr : &it->second;
  }
  const Line& require(const std::string& key) const {
    if (const Line* l = find(key)) return *l;
    throw ParseError(line, name + "." + key, "missing required field");
  }
};

Section read_section(Cursor& cur, const Line& opener, const std::vector<std::string>& scalar_keys,
                     const std::vector<std::string>& matrix_keys) {
  Section s{opener.number, opener.key + (opener.args.empty() ? "" : " " + opener.args[0]), {}, {}};
  while (true) {
    if (cur.done()) throw ParseError(opener.number, opener.key, "section not closed by 'end'");
    const Line& l = cur.next();
    if (l.key == "end") {
      if (!l.args.empty()) throw ParseError(l.number, "end", "unexpected trailing values");
      return s;
    }
    const bool is_matrix = std::find(matrix_keys.begin(), matrix_keys.end(), l.key) != matrix_keys.end();
    const bool is_scalar = std::find(scalar_keys.begin(), scalar_keys.end(), l.key) != scalar_keys.end();
    if (!is_matrix && !is_scalar) throw ParseError(l.number, l.key, "unknown field in " + s.name);
    if (s.scalars.count(l.key) || s.matrices.count(l.key)) throw ParseError(l.number, l.key, "duplicate field");
    if (is_matrix) {
      if (!l.args.empty()) throw ParseError(l.number, l.key, "matrix rows go on the following lines");
      Line copy = l;
      Matrix m = read_matrix(cur, copy);
      s.matrices.emplace(l.key, std::make_pair(std::move(copy), std::move(m)));
    } else {
      s.scalars.emplace(l.key, l);
    }
  }
}

const std::vector<std::string> kFunctionScalars = {"kind", "dim", "tau", "center", "q", "r", "b", "a", "lo", "hi"};
const std::vector<std::string> kFunctionMatrices = {"Q", "D"};

Vector sized_list(const Section& s, const std::string& key, Eigen::Index n) {
  const Line& l = s.require(key);
  Vector v = real_list(l);
  if (v.size() != n) {
    throw ParseError(l.number, key, "expected " + std::to_string(n) + " values, got " + std::to_string(v.size()));
  }
  return v;
}

ConvexFn build_function(const Section& s) {
  const Line& kind_line = s.require("kind");
  const std::string kind = one_word(kind_line);
  auto dim_of = [&]() -> Eigen::Index {
    const Line& l = s.require("dim");
    const long n = one_integer(l);
    if (n < 1) throw ParseError(l.number, "dim", "dimension must be >= 1");
    return n;
  };
  auto allow_only = [&](std::initializer_list<const char*> keys) {
    for (const auto& [k, l] : s.scalars) {
      if (k == "kind") continue;
      if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; })) {
        throw ParseError(l.number, k, "field not used by kind '" + kind + "'");
      }
    }
    for (const auto& [k, entry] : s.matrices) {
      if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; })) {
        throw ParseError(entry.first.number, k, "field not used by kind '" + kind + "'");
      }
    }
  };
  auto matrix = [&](const std::string& key) -> const std::pair<Line, Matrix>& {
    auto it = s.matrices.find(key);
    if (it == s.matrices.end()) throw ParseError(s.line, s.name + "." + key, "missing required matrix");
    return it->second;
  };
  auto tau_of = [&]() {
    const Line& l = s.require("tau");
    const double t = one_real(l);
    if (!(t > 0.0)) throw ParseError(l.number, "tau", "τ must be positive");
    return t;
  };

  try {
    if (kind == "zero") {
      allow_only({"dim"});
      return ConvexFn::zero(dim_of());
    }
    if (kind == "l1" || kind == "l2norm") {
      allow_only({"dim", "tau", "center"});
      const auto n = dim_of();
      std::optional<Vector> center;
      if (s.find("center")) center = sized_list(s, "center", n);
      return kind == "l1" ? ConvexFn::l1(n, tau_of(), center) : ConvexFn::l2norm(n, tau_of(), center);
    }
    if (kind == "quadratic") {
      allow_only({"dim", "Q", "q", "r"});
      const auto n = dim_of();
      const auto& [ql, Q] = matrix("Q");
      if (Q.rows() != n || Q.cols() != n) throw ParseError(ql.number, "Q", "must be dim x dim");
      const Vector q = s.find("q") ? sized_list(s, "q", n) : Vector::Zero(n);
      const double r = s.find("r") ? one_real(s.require("r")) : 0.0;
      return ConvexFn::quadratic(Q, q, r);
    }
    if (kind == "least_squares") {
      // 1/2 ||D x - b||^2 expanded into quadratic form.
      allow_only({"dim", "D", "b"});
      const auto n = dim_of();
      const auto& [dl, D] = matrix("D");
      if (D.cols() != n) throw ParseError(dl.number, "D", "must have dim columns");
      const Vector b = sized_list(s, "b", D.rows());
      return ConvexFn::quadratic(D.transpose() * D, -D.transpose() * b, 0.5 * b.squaredNorm());
    }
    if (kind == "indicator_point") {
      allow_only({"dim", "a"});
      return ConvexFn::indicator_point(sized_list(s, "a", dim_of()));
    }
    if (kind == "indicator_box") {
      allow_only({"dim", "lo", "hi"});
      const auto n = dim_of();
      return ConvexFn::indicator_box(sized_list(s, "lo", n), sized_list(s, "hi", n));
    }
    if (kind == "indicator_hyperplane") {
      allow_only({"dim", "a", "b"});
      const auto n = dim_of();
      return ConvexFn::indicator_hyperplane(sized_list(s, "a", n), one_real(s.require("b")));
    }
  } catch (const ParseError&) {
    throw;
  } catch (const InputError& e) {
    throw ParseError(s.line, s.name, e.what());
  }
  throw ParseError(kind_line.number, "kind", "unknown function kind '" + kind + "'");
}

LinearMap build_operator(const Section& s) {
  const Line& kind_line = s.require("kind");
  const std::string kind = one_word(kind_line);
  try {
    if (kind == "identity" || kind == "scaled_identity") {
      const Line& dl = s.require("dim");
      const long n = one_integer(dl);
      if (n < 1) throw ParseError(dl.number, "dim", "dimension must be >= 1");
      if (kind == "identity") return LinearMap::identity(n);
      return LinearMap::scaled_identity(n, one_real(s.require("scale")));
    }
    if (kind == "dense") {
      auto it = s.matrices.find("matrix");
      if (it == s.matrices.end()) throw ParseError(s.line, "operator.matrix", "missing required matrix");
      return LinearMap::dense(it->second.second);
    }
  } catch (const ParseError&) {
    throw;
  } catch (const InputError& e) {
    throw ParseError(s.line, s.name, e.what());
  }
  throw ParseError(kind_line.number, "kind", "unknown operator kind '" + kind + "'");
}

}  // namespace

void check_compatibility(const RunConfig& config) {
  if (is_consensus(config.solver)) {
    if (!config.consensus) {
      throw ParseError(0, "solver", std::string(to_string(config.solver)) + " needs 'block' sections");
    }
  } else if (!config.problem) {
    throw ParseError(0, "solver", std::string(to_string(config.solver)) + " needs 'function f', 'function g' and 'operator L'");
  }
}

RunConfig parse_config(std::string_view text) {
  Cursor cur(tokenize(text));
  RunConfig config;

  std::map<std::string, Line> top;
  std::optional<Section> f_section, g_section, l_section;
  std::vector<Section> blocks;
  const std::vector<std::string> top_keys = {"solver", "gamma", "alpha", "alpha_ramp", "sigma", "delta",
                                             "lambda", "lambda_lower", "init_mode", "max_iters", "tol",
                                             "seed", "output", "strategy"};

  while (!cur.done()) {
    const Line& l = cur.next();
    if (l.key == "function") {
      if (l.args.size() != 1 || (l.args[0] != "f" && l.args[0] != "g")) {
        throw ParseError(l.number, "function", "expected 'function f' or 'function g'");
      }
      auto& slot = l.args[0] == "f" ? f_section : g_section;
      if (slot) throw ParseError(l.number, "function", "duplicate section 'function " + l.args[0] + "'");
      slot = read_section(cur, l, kFunctionScalars, kFunctionMatrices);
    } else if (l.key == "operator") {
      if (l.args.size() != 1 || l.args[0] != "L") throw ParseError(l.number, "operator", "expected 'operator L'");
      if (l_section) throw ParseError(l.number, "operator", "duplicate section");
      l_section = read_section(cur, l, {"kind", "dim", "scale"}, {"matrix"});
    } else if (l.key == "block") {
      if (!l.args.empty()) throw ParseError(l.number, "block", "unexpected values after 'block'");
      blocks.push_back(read_section(cur, l, kFunctionScalars, kFunctionMatrices));
    } else if (l.key == "end") {
      throw ParseError(l.number, "end", "'end' outside of a section");
    } else if (std::find(top_keys.begin(), top_keys.end(), l.key) != top_keys.end()) {
      if (top.count(l.key)) throw ParseError(l.number, l.key, "duplicate field");
      top.emplace(l.key, l);
    } else {
      throw ParseError(l.number, l.key, "unknown field");
    }
  }

  auto get = [&](const std::string& key) -> const Line* {
    auto it = top.find(key);
    return it == top.end() ? nullptr : &it->second;
  };

  if (const Line* l = get("solver")) {
    const auto kind = parse_solver_kind(one_word(*l));
    if (!kind) throw ParseError(l->number, "solver", "unknown solver '" + l->args[0] + "'");
    config.solver = *kind;
  }

  // Parameters: preset for the given alpha, then explicit overrides.
  double gamma = 1.0;
  if (const Line* l = get("gamma")) {
    gamma = one_real(*l);
    if (!(gamma > 0.0)) throw ParseError(l->number, "gamma", "γ must be positive");
  }
  double alpha = 0.0;
  if (const Line* l = get("alpha")) {
    alpha = one_real(*l);
    if (!(alpha >= 0.0 && alpha < 1.0)) throw ParseError(l->number, "alpha", "α must lie in [0,1)");
  }
  InertialParams& p = config.params;
  p = InertialParams::preset(alpha, gamma);
  if (const Line* l = get("sigma")) {
    p.sigma = one_real(*l);
    if (!(p.sigma > 0.0)) throw ParseError(l->number, "sigma", "σ must be positive");
  }
  const double lower = delta_lower_bound(alpha, p.sigma);
  p.delta = lower > 0.0 ? 1.5 * lower : 1.0;
  if (const Line* l = get("delta")) {
    p.delta = one_real(*l);
    if (!(p.delta > lower) || !(p.delta > 0.0)) {
      std::ostringstream os;
      os << "δ must exceed " << lower << " for α = " << alpha << ", σ = " << p.sigma;
      throw ParseError(l->number, "delta", os.str());
    }
  }
  const double lam_max = max_relaxation(alpha, p.sigma, p.delta);
  double lambda = 0.9 * lam_max;
  if (const Line* l = get("lambda")) {
    lambda = one_real(*l);
    if (!(lambda > 0.0 && lambda <= lam_max)) {
      std::ostringstream os;
      os << "λ must lie in (0, " << lam_max << "]";
      throw ParseError(l->number, "lambda", os.str());
    }
  }
  p.lambda_schedule = Schedule::constant(lambda);
  p.lambda_lower = lambda;
  if (const Line* l = get("lambda_lower")) {
    p.lambda_lower = one_real(*l);
    if (!(p.lambda_lower > 0.0 && p.lambda_lower <= lambda)) {
      throw ParseError(l->number, "lambda_lower", "λ̲ must lie in (0, λ]");
    }
  }
  p.alpha_schedule = Schedule::constant(alpha);
  if (const Line* l = get("alpha_ramp")) {
    if (l->args.size() != 2) throw ParseError(l->number, "alpha_ramp", "expects <start> <length>");
    const long start = to_integer(*l, l->args[0]);
    const long length = to_integer(*l, l->args[1]);
    if (start < 1 || length < 0) throw ParseError(l->number, "alpha_ramp", "start must be >= 1, length >= 0");
    p.alpha_schedule = Schedule::ramp(0.0, alpha, start, length);
  }
  if (const Line* l = get("init_mode")) {
    const std::string mode = one_word(*l);
    if (mode == "alpha2_zero") {
      p.init_mode = InitMode::Alpha2Zero;
    } else if (mode == "lambda1_alpha1_zero") {
      p.init_mode = InitMode::Lambda1Alpha1Zero;
    } else {
      throw ParseError(l->number, "init_mode", "unknown init mode '" + mode + "'");
    }
  }

  if (const Line* l = get("max_iters")) {
    config.stop.max_iters = one_integer(*l);
    if (config.stop.max_iters < 1) throw ParseError(l->number, "max_iters", "must be >= 1");
  }
  if (const Line* l = get("tol")) {
    config.stop.tol = one_real(*l);
    if (config.stop.tol < 0.0) throw ParseError(l->number, "tol", "must be nonnegative");
  }
  if (const Line* l = get("seed")) {
    const long seed = one_integer(*l);
    if (seed < 0) throw ParseError(l->number, "seed", "must be nonnegative");
    config.seed = static_cast<std::uint64_t>(seed);
  }
  if (const Line* l = get("output")) config.output = one_word(*l);
  if (const Line* l = get("strategy")) {
    const std::string s = one_word(*l);
    if (s == "auto") config.strategy = StrategyChoice::Auto;
    else if (s == "prox_identity") config.strategy = StrategyChoice::ProxIdentity;
    else if (s == "quadratic_solve") config.strategy = StrategyChoice::QuadraticSolve;
    else if (s == "inner_iterative") config.strategy = StrategyChoice::InnerIterative;
    else throw ParseError(l->number, "strategy", "unknown strategy '" + s + "'");
  }

  const auto report = validate(p, std::min<long>(config.stop.max_iters + 1, 1000000));
  if (!report.ok()) throw ParseError(0, "parameters", report.to_text());

  if (f_section || g_section || l_section) {
    std::optional<ConvexFn> f_fn, g_fn;
    std::optional<LinearMap> l_op;
    if (f_section) f_fn = build_function(*f_section);
    if (g_section) g_fn = build_function(*g_section);
    if (l_section) l_op = build_operator(*l_section);
    if (!f_section) throw ParseError(cur.last_line(), "function f", "missing section");
    if (!g_section) throw ParseError(cur.last_line(), "function g", "missing section");
    if (!l_section) throw ParseError(cur.last_line(), "operator L", "missing section");
    ConvexFn f = std::move(*f_fn);
    ConvexFn g = std::move(*g_fn);
    LinearMap L = std::move(*l_op);
    if (f.dim() != L.cols()) throw ParseError(l_section->line, "operator L", "columns must equal dim of f");
    if (g.dim() != L.rows()) throw ParseError(l_section->line, "operator L", "rows must equal dim of g");
    try {
      config.problem.emplace(std::move(f), std::move(g), std::move(L));
    } catch (const HypothesisError& e) {
      throw ParseError(l_section->line, "operator L", e.what());
    }
  }
  if (!blocks.empty()) {
    if (config.problem) throw ParseError(blocks.front().line, "block", "cannot mix blocks with function f/g");
    std::vector<ConvexFn> fns;
    for (const auto& b : blocks) fns.push_back(build_function(b));
    try {
      config.consensus.emplace(std::move(fns));
    } catch (const InputError& e) {
      throw ParseError(blocks.front().line, "block", e.what());
    }
  }
  if (!config.problem && !config.consensus) throw ParseError(0, "problem", "no problem sections found");
  check_compatibility(config);
  return config;
}

}  // namespace iadmm
