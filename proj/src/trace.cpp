#include "iadmm/trace.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace iadmm {

const char* const kTraceCsvHeader = "k,primal,dual,gap,coupling,zbar_norm,dw_norm,dw_sq_sum";

double duality_gap(double primal, double dual) {
  if (!std::isfinite(primal) || !std::isfinite(dual)) return std::numeric_limits<double>::infinity();
  return primal - dual;
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trace_csv(std::ostream& os, const SolveTrace& trace) {
  os << kTraceCsvHeader << '\n';
  for (const auto& r : trace.rows) {
    os << r.k << ',' << format_real(r.primal) << ',' << format_real(r.dual) << ',' << format_real(r.gap) << ','
       << format_real(r.coupling) << ',' << format_real(r.zbar_norm) << ',' << format_real(r.dw_norm) << ','
       << format_real(r.dw_sq_sum) << '\n';
  }
}

}  // namespace iadmm
