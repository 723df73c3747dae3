#pragma once

#include <cstdint>
#include <vector>

#include "csbm/messages.hpp"
#include "csbm/metrics.hpp"
#include "csbm/model.hpp"

namespace csbm {

struct LinBPOptions {
  /// false: the reduced updates where sum_q B_qi^2 ~ 1, tau ~ 1 and the
  /// mean-field centering uses lambda sqrt(d) / n.
  /// true: the exact linearization of the full AMP, keeping the B^2 weights,
  /// the tau recursion and the centering coefficient tanh(rho_n) =
  /// lambda sqrt(d) / (n - d).
  bool exact_onsager = false;
};

/// One step of linearized message passing. Returns the t+1 state; the input
/// is not modified. Throws std::invalid_argument on an index mismatch.
MessageState linbp_step(const Instance& inst, const MessageState& state,
                        const LinBPOptions& opts = {});

struct LinBPResult {
  MessageState initial;
  MessageState final_state;
  std::vector<StepSummary> trace;  // steps 0..t_max
  std::vector<int> v_hat;
  Decision decision = Decision::kAccept;
};

/// Random N(0, init_scale) start (t = -1 iterates zero), t_max steps.
LinBPResult linbp_run(const Instance& inst, std::int64_t t_max, double init_scale,
                      std::uint64_t seed, const LinBPOptions& opts = {});

/// Runs from a caller-supplied initial state.
LinBPResult linbp_run_from(const Instance& inst, MessageState init, std::int64_t t_max,
                           const LinBPOptions& opts = {});

/// Reject the null iff the final vertex norm exceeds the initial one.
Decision null_test(double norm0, double norm_t);

}  // namespace csbm
