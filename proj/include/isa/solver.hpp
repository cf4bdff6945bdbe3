#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "isa/oracles.hpp"
#include "isa/projections.hpp"
#include "isa/schedules.hpp"
#include "isa/types.hpp"

namespace isa {

enum class SolveStatus {
  MaxIterations,
  StepBelowThreshold,
  OptimalFeasibleZeroSubgrad,
  TargetReachedFeasible,
  Stalled,
  NumericalBreakdown,
};

std::string to_string(SolveStatus status);

// One row per recorded iteration: the state at x^k plus the transition taken
// from it. Terminal rows describe the aborted or stopping transition.
struct SolveTraceRecord {
  int k = 0;
  double f_k = 0.0;
  double alpha_k = 0.0;
  double eps_requested = 0.0;
  double eps_certified = 0.0;
  double h_norm = 0.0;
  int inner_iterations = 0;
  double feasibility_inf = 0.0;
  std::optional<double> dist_opt;
  bool exact_fallback_taken = false;
};

struct StoppingConfig {
  int max_iterations = 100000;
  double min_step = 2.220446049250313e-16;
  double feas_tolerance = 1e-9;
  std::optional<int> stall_window;  // no new best f or feasibility in the window

  void validate() const;
};

struct TraceOptions {
  int stride = 1;  // record rows with k % stride == 0, plus every terminal row
  std::function<double(const DenseVector&)> dist;
};

struct SolveResult {
  SolveStatus status = SolveStatus::MaxIterations;
  DenseVector final_x;
  int iterations = 0;  // final_x is the iterate with this index
  std::vector<SolveTraceRecord> trace;
  std::optional<double> best_feasible_f;
  double final_f = 0.0;
  double final_feasibility_inf = 0.0;
};

// Projected subgradient steps with a predetermined step/accuracy pair. A zero
// subgradient is not an optimality certificate here; the loop keeps going
// with a zero step and lets the shrinking accuracies move the iterate.
SolveResult solve_predetermined(ObjectiveOracle& oracle, const InexactProjector& projector,
                                const PredeterminedSchedule& schedule, DenseVector x0,
                                const StoppingConfig& stop = {},
                                const TraceOptions& trace_options = {});

/// Target-gap variant: steps lambda_k (f_k - phi) / |h|^2 toward the target phi,
// projection accuracy chosen by the configured mode. A zero subgradient stops
// at feasible points and forces an exact projection at infeasible ones; an
// iterate at or below the target is re-projected exactly, then stops feasible.
SolveResult solve_dynamic(ObjectiveOracle& oracle, const InexactProjector& projector,
                          const DynamicConfig& config, DenseVector x0,
                          const StoppingConfig& stop = {},
                          const TraceOptions& trace_options = {});

struct RestartPlan {
  DynamicConfig config;
  DenseVector x0;
};

// After a target-reached stop, move the target part way from phi toward the
// achieved value and continue from the final iterate. One step, not a loop.
RestartPlan restart_with_lower_phi(const SolveResult& result, const DynamicConfig& config,
                                   double shrink);

}  // namespace isa
