#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "iadmm/admm.hpp"
#include "iadmm/consensus.hpp"
#include "iadmm/errors.hpp"
#include "iadmm/params.hpp"
#include "iadmm/trace.hpp"

namespace iadmm {

enum class SolverKind { Iadmm, ClassicalAdmm, Idr, ConsensusSum1, ConsensusSum2, BoydConsensus };

std::string_view to_string(SolverKind kind);
std::optional<SolverKind> parse_solver_kind(std::string_view name);
bool is_consensus(SolverKind kind);

enum class StrategyChoice { Auto, ProxIdentity, QuadraticSolve, InnerIterative };

/// Parse failure with the offending line (1-based; 0 when not tied to a line)
/// and field name.
class ParseError : public InputError {
 public:
  ParseError(int line, std::string field, const std::string& message);
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

struct RunConfig {
  SolverKind solver = SolverKind::Iadmm;
  std::optional<ProblemSpec> problem;
  std::optional<ConsensusProblem> consensus;
  InertialParams params;
  StopRule stop;
  StrategyChoice strategy = StrategyChoice::Auto;
  std::string output;
  std::uint64_t seed = 0;
};

/// Line-oriented `key value...` format with `function f|g`, `operator L`,
/// and repeated `block` sections closed by `end`; matrices are row-major
/// lines closed by `end`. Unknown keys are rejected. Throws ParseError.
RunConfig parse_config(std::string_view text);

/// Re-derives parameter defaults after a CLI override of alpha/solver and
/// checks solver/problem compatibility. Throws ParseError.
void check_compatibility(const RunConfig& config);

}  // namespace iadmm
