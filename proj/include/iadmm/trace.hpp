#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "iadmm/linalg.hpp"

namespace iadmm {

struct StopRule {
  long max_iters = 100000;
  double tol = 1e-10;
  /// Store the iterate vectors in every trace row (scalars are always kept).
  bool keep_iterates = true;
};

enum class RunStatus { Converged, BudgetExhausted };

/// One iteration of a solver run. Scalars not defined for a given solver
/// are NaN. For the Douglas-Rachford runs `coupling` holds ||v^k - y^k||.
struct TraceRow {
  long k = 0;
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
  double coupling = 0.0;   // ||L x^{k+1} - z^k||
  double zbar_norm = 0.0;  // ||zbar^k||
  double dw_norm = 0.0;    // ||w^{k+1} - w^k||
  double dw_sq_sum = 0.0;  // running sum of ||w^{j+1} - w^j||^2

  // Iterates (empty when StopRule::keep_iterates is false).
  Vector x;     // x^{k+1}
  Vector z;     // z^{k+1}
  Vector zbar;  // zbar^{k+1}
  Vector y;     // y^k
  Vector v;     // v^k
  Vector w;     // w^k
};

struct SolveTrace {
  std::vector<TraceRow> rows;
  RunStatus status = RunStatus::BudgetExhausted;
  long iterations = 0;

  // Final iterates, always stored.
  Vector x;
  Vector z;
  Vector y;
  Vector v;
  Vector w;
};

/// Gap as primal - dual, +inf when either side is infinite.
double duality_gap(double primal, double dual);

/// CSV header: k,primal,dual,gap,coupling,zbar_norm,dw_norm,dw_sq_sum
extern const char* const kTraceCsvHeader;

/// One line per row, 17 significant digits, '\n' line endings.
void write_trace_csv(std::ostream& os, const SolveTrace& trace);
std::string format_real(double v);

}  // namespace iadmm
