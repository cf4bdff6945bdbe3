#include "isa/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace isa {

namespace {

constexpr double kZeroSubgradNorm = 1e-14;
constexpr int kZeroSubgradAbortStreak = 3;

struct RunningBest {
  double f = std::numeric_limits<double>::infinity();
  double feas = std::numeric_limits<double>::infinity();
  int last_improvement = 0;

  // strict improvement in either value resets the stall clock
  bool update(int k, double f_k, double feas_k) {
    bool improved = false;
    if (f_k < f) {
      f = f_k;
      improved = true;
    }
    if (feas_k < feas) {
      feas = feas_k;
      improved = true;
    }
    if (improved) last_improvement = k;
    return improved;
  }
};

void fold_best_feasible(SolveResult& res, double f, double feas, double tol) {
  if (feas <= tol && (!res.best_feasible_f || f < *res.best_feasible_f)) {
    res.best_feasible_f = f;
  }
}

void finish(SolveResult& res, const ObjectiveOracle& oracle, const InexactProjector& projector,
            DenseVector x, int final_index, const StoppingConfig& stop) {
  res.final_x = std::move(x);
  res.iterations = final_index;
  res.final_f = oracle.value(res.final_x);
  res.final_feasibility_inf = projector.feasibility_inf(res.final_x);
  if (std::isfinite(res.final_f) && std::isfinite(res.final_feasibility_inf)) {
    fold_best_feasible(res, res.final_f, res.final_feasibility_inf, stop.feas_tolerance);
  }
}

}  // namespace

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::MaxIterations:
      return "max_iterations";
    case SolveStatus::StepBelowThreshold:
      return "step_below_threshold";
    case SolveStatus::OptimalFeasibleZeroSubgrad:
      return "optimal_feasible_zero_subgradient";
    case SolveStatus::TargetReachedFeasible:
      return "target_reached_feasible";
    case SolveStatus::Stalled:
      return "stalled";
    case SolveStatus::NumericalBreakdown:
      return "numerical_breakdown";
  }
  return "unknown";
}

void StoppingConfig::validate() const {
  if (max_iterations < 1) throw UsageError("stopping: max_iterations must be at least 1");
  if (!(min_step >= 0.0) || !std::isfinite(min_step)) {
    throw UsageError("stopping: min_step must be nonnegative and finite");
  }
  if (!(feas_tolerance >= 0.0) || !std::isfinite(feas_tolerance)) {
    throw UsageError("stopping: feas_tolerance must be nonnegative and finite");
  }
  if (stall_window && *stall_window < 1) {
    throw UsageError("stopping: stall_window must be at least 1");
  }
}

SolveResult solve_predetermined(ObjectiveOracle& oracle, const InexactProjector& projector,
                                const PredeterminedSchedule& schedule, DenseVector x0,
                                const StoppingConfig& stop, const TraceOptions& trace_options) {
  stop.validate();
  if (trace_options.stride < 1) throw UsageError("trace stride must be at least 1");
  if (!schedule.alpha || !schedule.eps) throw UsageError("schedule is incomplete");
  ensure_finite(x0, "start point");

  SolveResult res;
  auto record = [&](const SolveTraceRecord& row, bool terminal) {
    if (terminal || row.k % trace_options.stride == 0) res.trace.push_back(row);
  };

  DenseVector x = std::move(x0);
  RunningBest best;
  SolveStatus status = SolveStatus::MaxIterations;
  int final_index = stop.max_iterations;

  int k = 0;
  for (; k < stop.max_iterations; ++k) {
    SolveTraceRecord row;
    row.k = k;
    row.f_k = oracle.value(x);
    row.feasibility_inf = projector.feasibility_inf(x);
    if (trace_options.dist) row.dist_opt = trace_options.dist(x);
    if (!std::isfinite(row.f_k) || !std::isfinite(row.feasibility_inf)) {
      status = SolveStatus::NumericalBreakdown;
      final_index = k;
      record(row, true);
      break;
    }
    best.update(k, row.f_k, row.feasibility_inf);
    fold_best_feasible(res, row.f_k, row.feasibility_inf, stop.feas_tolerance);

    DenseVector h = oracle.subgradient(x);
    row.h_norm = h.norm();
    if (!h.allFinite()) {
      status = SolveStatus::NumericalBreakdown;
      final_index = k;
      record(row, true);
      break;
    }
    if (stop.stall_window && k - best.last_improvement >= *stop.stall_window) {
      status = SolveStatus::Stalled;
      final_index = k;
      record(row, true);
      break;
    }

    double alpha = schedule.alpha(k);
    double eps = schedule.eps(k);
    if (!(alpha >= 0.0) || !std::isfinite(alpha) || !(eps >= 0.0)) {
      throw UsageError("schedule produced an invalid step or accuracy");
    }
    row.alpha_k = alpha;
    row.eps_requested = eps;
    if (alpha < stop.min_step) {
      status = SolveStatus::StepBelowThreshold;
      final_index = k;
      record(row, true);
      break;
    }

    try {
      // zero subgradients take a zero step here by design; the projection
      // accuracy keeps shrinking and is what moves the iterate
      DenseVector y = x - alpha * h;
      ProjectionResult proj = projector.project(y, eps);
      row.eps_certified = proj.certificate.certified_error_bound;
      row.inner_iterations = proj.certificate.inner_iterations;
      row.exact_fallback_taken = proj.certificate.exact_fallback_taken;
      if (!proj.point.allFinite()) {
        status = SolveStatus::NumericalBreakdown;
        final_index = k;
        record(row, true);
        break;
      }
      x = std::move(proj.point);
    } catch (const NumericalError&) {
      status = SolveStatus::NumericalBreakdown;
      final_index = k;
      record(row, true);
      break;
    }
    record(row, false);
  }

  res.status = status;
  finish(res, oracle, projector, std::move(x), final_index, stop);
  return res;
}

SolveResult solve_dynamic(ObjectiveOracle& oracle, const InexactProjector& projector,
                          const DynamicConfig& config, DenseVector x0, const StoppingConfig& stop,
                          const TraceOptions& trace_options) {
  config.validate();
  stop.validate();
  if (trace_options.stride < 1) throw UsageError("trace stride must be at least 1");
  if (!projector.supports_exact()) {
    throw UsageError("dynamic variant needs a projector with an exact mode");
  }
  ensure_finite(x0, "start point");
  double f0 = oracle.value(x0);
  ensure_finite(f0, "objective at start");
  if (!(f0 >= config.phi)) {
    throw UsageError("target exceeds the starting objective value; lower phi");
  }

  SolveResult res;
  auto record = [&](const SolveTraceRecord& row, bool terminal) {
    if (terminal || row.k % trace_options.stride == 0) res.trace.push_back(row);
  };

  DenseVector x = std::move(x0);
  RunningBest best;
  SolveStatus status = SolveStatus::MaxIterations;
  int final_index = stop.max_iterations;
  int zero_subgrad_streak = 0;

  int k = 0;
  for (; k < stop.max_iterations; ++k) {
    SolveTraceRecord row;
    row.k = k;
    row.f_k = oracle.value(x);
    row.feasibility_inf = projector.feasibility_inf(x);
    if (trace_options.dist) row.dist_opt = trace_options.dist(x);
    if (!std::isfinite(row.f_k) || !std::isfinite(row.feasibility_inf)) {
      status = SolveStatus::NumericalBreakdown;
      final_index = k;
      record(row, true);
      break;
    }
    best.update(k, row.f_k, row.feasibility_inf);
    fold_best_feasible(res, row.f_k, row.feasibility_inf, stop.feas_tolerance);

    DenseVector h = oracle.subgradient(x);
    row.h_norm = h.norm();
    if (!h.allFinite()) {
      status = SolveStatus::NumericalBreakdown;
      final_index = k;
      record(row, true);
      break;
    }
    if (stop.stall_window && k - best.last_improvement >= *stop.stall_window) {
      status = SolveStatus::Stalled;
      final_index = k;
      record(row, true);
      break;
    }

    if (row.h_norm <= kZeroSubgradNorm) {
      // a vanishing subgradient is conclusive only at feasible points
      if (row.feasibility_inf <= stop.feas_tolerance) {
        status = SolveStatus::OptimalFeasibleZeroSubgrad;
        final_index = k;
        record(row, true);
        break;
      }
      ++zero_subgrad_streak;
      if (zero_subgrad_streak >= kZeroSubgradAbortStreak) {
        status = SolveStatus::NumericalBreakdown;
        final_index = k;
        record(row, true);
        break;
      }
      try {
        ProjectionResult proj = projector.project(x, 0.0);
        row.eps_certified = proj.certificate.certified_error_bound;
        row.inner_iterations = proj.certificate.inner_iterations;
        row.exact_fallback_taken = proj.certificate.exact_fallback_taken;
        if (!proj.point.allFinite()) {
          status = SolveStatus::NumericalBreakdown;
          final_index = k;
          record(row, true);
          break;
        }
        double f_next = oracle.value(proj.point);
        if (!std::isfinite(f_next)) {
          status = SolveStatus::NumericalBreakdown;
          final_index = k;
          record(row, true);
          break;
        }
        if (f_next <= config.phi) {
          x = std::move(proj.point);
          status = SolveStatus::TargetReachedFeasible;
          final_index = k + 1;
          record(row, true);
          break;
        }
        x = std::move(proj.point);
      } catch (const NumericalError&) {
        status = SolveStatus::NumericalBreakdown;
        final_index = k;
        record(row, true);
        break;
      }
      record(row, false);
      continue;
    }
    zero_subgrad_streak = 0;

    double lambda_k = config.lambda(k);
    double alpha = dynamic_step(row.f_k, config.phi, lambda_k, row.h_norm * row.h_norm);
    row.alpha_k = alpha;
    if (alpha < stop.min_step) {
      status = SolveStatus::StepBelowThreshold;
      final_index = k;
      record(row, true);
      break;
    }

    bool fixed_cg = config.accuracy == AccuracyMode::FixedCg;
    double eps_req = 0.0;
    if (config.accuracy == AccuracyMode::FixedEps) {
      eps_req = config.fixed_eps_value;
    } else if (config.accuracy == AccuracyMode::OverestimationBound) {
      double d = config.distance_bound->bound(x, row.f_k);
      eps_req = std::min(eps_bar(row.f_k, config.phi, lambda_k, row.h_norm, d), config.nu(k));
    } else if (config.accuracy == AccuracyMode::UnderestimationBound) {
      double d = config.distance_bound->bound(x, row.f_k);
      EpsTilde t = eps_tilde(row.f_k, config.phi, *config.f_star_hint, lambda_k, config.beta,
                             row.h_norm, d);
      eps_req = t.negative_discriminant ? 0.0 : std::min(t.value, config.nu(k));
    }

    try {
      DenseVector y = x - alpha * h;
      ProjectionResult proj = fixed_cg ? projector.project_fixed_iters(y, config.fixed_cg_iters)
                                       : projector.project(y, eps_req);
      row.eps_requested = proj.certificate.requested_eps;
      row.eps_certified = proj.certificate.certified_error_bound;
      row.inner_iterations = proj.certificate.inner_iterations;
      row.exact_fallback_taken = proj.certificate.exact_fallback_taken;
      if (!proj.point.allFinite()) {
        status = SolveStatus::NumericalBreakdown;
        final_index = k;
        record(row, true);
        break;
      }
      double f_next = oracle.value(proj.point);
      if (!std::isfinite(f_next)) {
        status = SolveStatus::NumericalBreakdown;
        final_index = k;
        record(row, true);
        break;
      }

      // at or below the target through an uncertified projection: redo the
      // same pre-image exactly before trusting the stop test
      if (f_next <= config.phi && proj.certificate.certified_error_bound > 0.0) {
        ProjectionResult redo = projector.project(y, 0.0);
        row.inner_iterations += redo.certificate.inner_iterations;
        row.exact_fallback_taken =
            row.exact_fallback_taken || redo.certificate.exact_fallback_taken;
        row.eps_certified = redo.certificate.certified_error_bound;
        if (!redo.point.allFinite()) {
          status = SolveStatus::NumericalBreakdown;
          final_index = k;
          record(row, true);
          break;
        }
        proj.point = std::move(redo.point);
        f_next = oracle.value(proj.point);
        if (!std::isfinite(f_next)) {
          status = SolveStatus::NumericalBreakdown;
          final_index = k;
          record(row, true);
          break;
        }
      }

      if (f_next <= config.phi) {
        x = std::move(proj.point);
        status = SolveStatus::TargetReachedFeasible;
        final_index = k + 1;
        record(row, true);
        break;
      }
      x = std::move(proj.point);
    } catch (const NumericalError&) {
      status = SolveStatus::NumericalBreakdown;
      final_index = k;
      record(row, true);
      break;
    }
    record(row, false);
  }

  res.status = status;
  finish(res, oracle, projector, std::move(x), final_index, stop);
  return res;
}

RestartPlan restart_with_lower_phi(const SolveResult& result, const DynamicConfig& config,
                                   double shrink) {
  if (result.status != SolveStatus::TargetReachedFeasible) {
    throw UsageError("restart requires a target-reached result");
  }
  if (!(shrink > 0.0) || shrink > 1.0) throw UsageError("shrink must lie in (0, 1]");
  RestartPlan plan{config, result.final_x};
  plan.config.phi = result.final_f - shrink * (result.final_f - config.phi);
  return plan;
}

}  // namespace isa
