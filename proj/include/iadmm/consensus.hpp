#pragma once

#include <cstdint>
#include <vector>

#include "iadmm/params.hpp"
#include "iadmm/prox.hpp"
#include "iadmm/trace.hpp"

namespace iadmm {

/// min_x sum_i f_i(x) over m >= 2 blocks sharing the dimension n.
class ConsensusProblem {
 public:
  explicit ConsensusProblem(std::vector<ConvexFn> blocks);

  std::size_t m() const { return blocks_.size(); }
  Eigen::Index n() const { return blocks_.front().dim(); }
  const ConvexFn& block(std::size_t i) const { return blocks_[i]; }
  const std::vector<ConvexFn>& blocks() const { return blocks_; }

  double objective(const Vector& x) const;

 private:
  std::vector<ConvexFn> blocks_;
};

using BlockVectors = std::vector<Vector>;

struct ConsensusState {
  long k = 1;
  BlockVectors x;       // x_i^k (first algorithm; empty before the first step)
  BlockVectors z;       // z_i^k
  BlockVectors z_prev;  // z_i^{k-1}
  BlockVectors zbar;    // zbar_i^k
  BlockVectors y;       // y_i^k
  BlockVectors y_prev;  // y_i^{k-1}
  BlockVectors v;       // v_i^{k-1}
  Vector shared;        // u^k (first algorithm) or x^k (second algorithm)
};

struct ConsensusInit {
  BlockVectors y0, y1, z0, z1;
  static ConsensusInit zeros(std::size_t m, Eigen::Index n);
  ConsensusState state() const;
};

Vector block_sum(const BlockVectors& blocks);

/// First product-space algorithm: per-block prox x-updates, shared u^{k+1}
/// and z_i^{k+1} = u^{k+1} - zbar_i^{k+1}. Keeps sum_i y_i = 0.
ConsensusState sum1_step(const ConsensusState& s, const ConsensusProblem& cp, const InertialParams& params);

/// Second product-space algorithm (roles of the two functions interchanged):
/// shared x^{k+1} as a corrected block mean, per-block prox z-updates.
ConsensusState sum2_step(const ConsensusState& s, const ConsensusProblem& cp, const InertialParams& params);

/// Runs sum1_step. Rejects an initialization whose dual blocks do not sum
/// to zero. Trace rows: primal sum_i f_i(x_i^{k+1}), dual -sum_i f_i*(-v_i^k),
/// coupling max_i ||x_i^{k+1} - z_i^k||, zbar_norm ||zbar^k||, w = y + gamma z.
SolveTrace run_sum1(const ConsensusProblem& cp, const InertialParams& params, const ConsensusInit& init,
                    const StopRule& stop, ConsensusState* final_state = nullptr);

/// Runs sum2_step. Trace rows: primal sum_i f_i(z_i^k + zbar_i^k), dual
/// -sum_i f_i*(-y_i^k), coupling max_i ||x^{k+1} - z_i^k||.
SolveTrace run_sum2(const ConsensusProblem& cp, const InertialParams& params, const ConsensusInit& init,
                    const StopRule& stop, ConsensusState* final_state = nullptr);

/// Classical consensus ADMM:
///   x_i = prox_{f_i/gamma}(xbar^k - y_i/gamma),  y_i += gamma (x_i - xbar^{k+1}).
/// Starts from the dual blocks y1 and the consensus point z1[0].
SolveTrace boyd_consensus(const ConsensusProblem& cp, double gamma, const ConsensusInit& init, const StopRule& stop,
                          ConsensusState* final_state = nullptr);

/// max_i (violation of v_i in df_i(x), probed) + ||sum_i v_i||.
double consensus_optimality_residual(const Vector& x, const BlockVectors& v, const ConsensusProblem& cp,
                                     int probes = 50, std::uint64_t seed = 0);

/// Stacks blocks into one vector of length m n.
Vector stack(const BlockVectors& blocks);
BlockVectors unstack(const Vector& v, std::size_t m);

}  // namespace iadmm
