#include <cmath>
#include <limits>
#include <memory>

#include "doctest.h"
#include "isa/instances.hpp"
#include "isa/solver.hpp"

using namespace isa;

namespace {

std::shared_ptr<AffineProjector> line_projector(double b_value) {
  DenseMatrix A(1, 1);
  A << 1.0;
  DenseVector b(1);
  b << b_value;
  return std::make_shared<AffineProjector>(std::make_shared<GramFactorization>(A), b);
}

// constant objective whose subgradient vanishes everywhere
struct FlatOracle : ObjectiveOracle {
  double value(const DenseVector&) const override { return 5.0; }
  DenseVector subgradient(const DenseVector& x) override { return DenseVector::Zero(x.size()); }
};

// claims exact projections but never produces a feasible point
struct StuckProjector : InexactProjector {
  ProjectionResult project(const DenseVector& y, double eps) const override {
    ProjectionResult out;
    out.point = y;
    out.certificate.requested_eps = eps;
    return out;
  }
  bool supports_exact() const override { return true; }
  double feasibility_inf(const DenseVector&) const override { return 1.0; }
};

struct InfGradOracle : ObjectiveOracle {
  double value(const DenseVector& x) const override { return x(0); }
  DenseVector subgradient(const DenseVector& x) override {
    return DenseVector::Constant(x.size(), std::numeric_limits<double>::infinity());
  }
};

}  // namespace

TEST_CASE("predetermined steps drive the scalar problem to its optimum") {
  L1Objective oracle;
  auto projector = line_projector(0.0);
  DenseVector x0(1);
  x0 << 5.0;
  StoppingConfig stop;
  stop.max_iterations = 10000;

  SolveResult res =
      solve_predetermined(oracle, *projector, harmonic_pair_schedule(1.0, 1.0), x0, stop);
  CHECK(res.status == SolveStatus::MaxIterations);
  CHECK(res.iterations == 10000);
  CHECK(std::abs(res.final_x(0)) <= 0.01);
  CHECK(res.final_f <= 0.01);
  REQUIRE(res.best_feasible_f.has_value());
  CHECK(*res.best_feasible_f == 0.0);
}

TEST_CASE("exact projections onto a point set land in one step") {
  L1Objective oracle;
  auto projector = line_projector(0.0);
  DenseVector x0(1);
  x0 << 5.0;
  StoppingConfig stop;
  stop.max_iterations = 40;

  SolveResult res =
      solve_predetermined(oracle, *projector, harmonic_pair_schedule(1.0, 0.0), x0, stop);
  REQUIRE(res.trace.size() == 40);
  CHECK(res.trace[0].f_k == 5.0);
  CHECK(res.trace[1].f_k == 0.0);
  CHECK(res.final_x(0) == 0.0);
}

TEST_CASE("a zero subgradient keeps the predetermined loop running in place") {
  L1Objective oracle;
  DenseVector lo = DenseVector::Constant(2, -1.0);
  DenseVector hi = DenseVector::Constant(2, 1.0);
  BoxProjector projector(lo, hi);
  StoppingConfig stop;
  stop.max_iterations = 25;

  SolveResult res = solve_predetermined(oracle, projector, harmonic_pair_schedule(1.0, 1.0),
                                        DenseVector::Zero(2), stop);
  CHECK(res.status == SolveStatus::MaxIterations);
  for (const auto& row : res.trace) {
    CHECK(row.f_k == 0.0);
    CHECK(row.h_norm == 0.0);
  }
  CHECK(res.final_x.norm() == 0.0);
}

TEST_CASE("zero-accuracy runs replay the exact reference trajectory bit for bit") {
  BpInstance inst = generate_instance(8, 2, 3u);
  auto fact = std::make_shared<GramFactorization>(inst.A);
  auto base = std::make_shared<AffineProjector>(fact, inst.b);
  auto pert = perturbed_exact_projector(base, 42u);
  L1Objective oracle;
  DenseVector x0 = default_start(inst.A, inst.b);
  auto schedule = harmonic_pair_schedule(1.0, 0.0);
  StoppingConfig stop;
  stop.max_iterations = 50;

  SolveResult res = solve_predetermined(oracle, *pert, schedule, x0, stop);

  DenseVector x = x0;
  for (int k = 0; k < 50; ++k) {
    CHECK(res.trace[k].f_k == l1_value(x));
    double alpha = schedule.alpha(k);
    DenseVector y = x - alpha * l1_subgradient(x);
    x = affine_project_exact(*fact, inst.b, y);
  }
  REQUIRE(res.final_x.size() == x.size());
  CHECK((res.final_x - x).norm() == 0.0);
}

TEST_CASE("target steps with the exact optimal value close the gap") {
  BpInstance inst = generate_instance(32, 3, 3u);
  REQUIRE(inst.erc_certified);
  auto fact = std::make_shared<GramFactorization>(inst.A);
  AffineProjector projector(fact, inst.b);
  L1Objective oracle;

  DynamicConfig config;
  config.phi = inst.f_star();
  config.lambda = lambda_constant(1.0);
  config.beta = 1.0;
  config.nu = nu_default(1.0);
  config.accuracy = AccuracyMode::FixedEps;
  config.fixed_eps_value = 0.0;

  StoppingConfig stop;
  stop.max_iterations = 20000;

  SolveResult res =
      solve_dynamic(oracle, projector, config, default_start(inst.A, inst.b), stop);
  double best_gap = std::numeric_limits<double>::infinity();
  for (const auto& row : res.trace) best_gap = std::min(best_gap, row.f_k - inst.f_star());
  CHECK(best_gap <= 1e-4);
  CHECK(res.final_feasibility_inf <= 1e-6);
}

TEST_CASE("a target above the start value is rejected") {
  L1Objective oracle;
  auto projector = line_projector(0.0);
  DynamicConfig config;
  config.phi = 100.0;
  config.lambda = lambda_constant(1.0);
  DenseVector x0(1);
  x0 << 5.0;
  CHECK_THROWS_AS(solve_dynamic(oracle, *projector, config, x0), UsageError);
}

TEST_CASE("every positive step is taken from a value strictly above the target") {
  BpInstance inst = generate_instance(16, 2, 4u);
  auto fact = std::make_shared<GramFactorization>(inst.A);
  AffineProjector projector(fact, inst.b);
  L1Objective oracle;

  DynamicConfig config;
  config.phi = 0.0;
  config.lambda = lambda_constant(1.0);
  config.accuracy = AccuracyMode::FixedCg;
  config.fixed_cg_iters = 2;

  StoppingConfig stop;
  stop.max_iterations = 3000;

  SolveResult res =
      solve_dynamic(oracle, projector, config, default_start(inst.A, inst.b), stop);
  REQUIRE(!res.trace.empty());
  for (const auto& row : res.trace) {
    if (row.alpha_k > 0.0) CHECK(row.f_k > 0.0);
  }
}

TEST_CASE("zero subgradient at a feasible point stops as optimal") {
  L1Objective oracle;
  BoxProjector projector(DenseVector::Constant(2, -1.0), DenseVector::Constant(2, 1.0));
  DynamicConfig config;
  config.phi = -1.0;
  config.lambda = lambda_constant(1.0);

  SolveResult res = solve_dynamic(oracle, projector, config, DenseVector::Zero(2));
  CHECK(res.status == SolveStatus::OptimalFeasibleZeroSubgrad);
  CHECK(res.iterations == 0);
  REQUIRE(res.trace.size() == 1);
  CHECK(res.trace[0].h_norm == 0.0);
  CHECK(res.final_x.norm() == 0.0);
}

TEST_CASE("zero subgradient at an infeasible point forces an exact projection") {
  L1Objective oracle;
  BoxProjector projector(DenseVector::Constant(2, 1.0), DenseVector::Constant(2, 2.0));
  DynamicConfig config;
  config.phi = -0.5;
  config.lambda = lambda_constant(1.0);
  StoppingConfig stop;
  stop.max_iterations = 10;

  SolveResult res = solve_dynamic(oracle, projector, config, DenseVector::Zero(2), stop);
  CHECK(res.status == SolveStatus::MaxIterations);
  REQUIRE(res.trace.size() >= 2);
  CHECK(res.trace[0].h_norm == 0.0);
  CHECK(res.trace[0].alpha_k == 0.0);
  CHECK(res.trace[0].feasibility_inf == 1.0);
  CHECK(res.trace[1].f_k == 2.0);  // landed on the box corner
}

TEST_CASE("repeated zero-subgradient projections abort as a breakdown") {
  FlatOracle oracle;
  StuckProjector projector;
  DynamicConfig config;
  config.phi = 0.0;
  config.lambda = lambda_constant(1.0);
  StoppingConfig stop;
  stop.max_iterations = 10;

  SolveResult res = solve_dynamic(oracle, projector, config, DenseVector::Zero(2), stop);
  CHECK(res.status == SolveStatus::NumericalBreakdown);
  CHECK(res.iterations == 2);
  CHECK(res.trace.size() == 3);
}

TEST_CASE("reaching the target through an exact projection stops feasible") {
  L1Objective oracle;
  auto projector = line_projector(0.0);
  DynamicConfig config;
  config.phi = 0.2;
  config.lambda = lambda_constant(1.0);
  config.accuracy = AccuracyMode::FixedEps;
  config.fixed_eps_value = 0.15;
  DenseVector x0(1);
  x0 << 5.0;

  SolveResult res = solve_dynamic(oracle, *projector, config, x0);
  CHECK(res.status == SolveStatus::TargetReachedFeasible);
  CHECK(res.iterations == 1);
  CHECK(res.final_f == 0.0);
  CHECK(res.final_x(0) == 0.0);
}

TEST_CASE("an inexact target hit is redone exactly before stopping") {
  L1Objective oracle;
  auto pert = perturbed_exact_projector(line_projector(0.0), 7u);
  DynamicConfig config;
  config.phi = 0.2;
  config.lambda = lambda_constant(1.0);
  config.accuracy = AccuracyMode::FixedEps;
  config.fixed_eps_value = 0.15;
  DenseVector x0(1);
  x0 << 5.0;

  SolveResult res = solve_dynamic(oracle, *pert, config, x0);
  CHECK(res.status == SolveStatus::TargetReachedFeasible);
  CHECK(res.final_f == 0.0);
  CHECK(res.final_x(0) == 0.0);
  const auto& last = res.trace.back();
  CHECK(last.eps_requested == 0.15);
  CHECK(last.eps_certified == 0.0);  // the redo's exact certificate wins

  SUBCASE("the restart hook moves the target toward the achieved value") {
    RestartPlan plan = restart_with_lower_phi(res, config, 0.5);
    CHECK(plan.config.phi == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(plan.x0(0) == res.final_x(0));

    RestartPlan flat = restart_with_lower_phi(res, config, 1.0);
    CHECK(flat.config.phi == doctest::Approx(0.2).epsilon(1e-12));

    CHECK_THROWS_AS(restart_with_lower_phi(res, config, 0.0), UsageError);
    CHECK_THROWS_AS(restart_with_lower_phi(res, config, 1.5), UsageError);
  }
}

TEST_CASE("restarts demand a target-reached result") {
  L1Objective oracle;
  auto projector = line_projector(0.0);
  DenseVector x0(1);
  x0 << 5.0;
  StoppingConfig stop;
  stop.max_iterations = 5;
  SolveResult res =
      solve_predetermined(oracle, *projector, harmonic_pair_schedule(1.0, 1.0), x0, stop);
  DynamicConfig config;
  config.phi = 0.0;
  config.lambda = lambda_constant(1.0);
  CHECK_THROWS_AS(restart_with_lower_phi(res, config, 0.5), UsageError);
}

TEST_CASE("a stall window halts a run that stopped improving") {
  L1Objective oracle;
  auto projector = line_projector(0.0);
  StoppingConfig stop;
  stop.max_iterations = 100;
  stop.stall_window = 5;

  SolveResult res = solve_predetermined(oracle, *projector, harmonic_pair_schedule(1.0, 1.0),
                                        DenseVector::Zero(1), stop);
  CHECK(res.status == SolveStatus::Stalled);
  CHECK(res.iterations == 5);
}

TEST_CASE("trace thinning keeps every stride-th row and the distance column") {
  L1Objective oracle;
  auto projector = line_projector(0.0);
  DenseVector x0(1);
  x0 << 5.0;
  StoppingConfig stop;
  stop.max_iterations = 100;
  TraceOptions topts;
  topts.stride = 10;
  topts.dist = [](const DenseVector& x) { return std::abs(x(0)); };

  SolveResult res =
      solve_predetermined(oracle, *projector, harmonic_pair_schedule(1.0, 1.0), x0, stop, topts);
  REQUIRE(res.trace.size() == 10);
  for (size_t i = 0; i < res.trace.size(); ++i) {
    CHECK(res.trace[i].k == static_cast<int>(10 * i));
    REQUIRE(res.trace[i].dist_opt.has_value());
  }
  CHECK(*res.trace[0].dist_opt == 5.0);
}

TEST_CASE("non-finite oracle output turns into a breakdown status") {
  InfGradOracle oracle;
  auto projector = line_projector(0.0);
  DenseVector x0(1);
  x0 << 1.0;
  SolveResult res =
      solve_predetermined(oracle, *projector, harmonic_pair_schedule(1.0, 1.0), x0);
  CHECK(res.status == SolveStatus::NumericalBreakdown);
  CHECK(res.iterations == 0);
  CHECK(res.trace.size() == 1);
}

TEST_CASE("slack-budget subgradients still converge on a line constraint") {
  DenseMatrix A(1, 2);
  A << 1.0, 1.0;
  DenseVector b(1);
  b << 1.0;
  auto fact = std::make_shared<GramFactorization>(A);
  AffineProjector projector(fact, b);

  auto schedule = harmonic_pair_schedule(1.0, 1.0);
  auto wrapped = eps_subgradient_wrap(std::make_shared<L1Objective>(),
                                      [&](int k) { return schedule.eps(k); }, 5u);
  DenseVector x0(2);
  x0 << 3.0, -2.0;
  StoppingConfig stop;
  stop.max_iterations = 5000;

  SolveResult res = solve_predetermined(*wrapped, projector, schedule, x0, stop);
  REQUIRE(res.best_feasible_f.has_value());
  CHECK(*res.best_feasible_f <= 1.0 + 0.05);  // optimal value is 1 on this line
  CHECK(res.final_feasibility_inf <= 1e-9);
}

TEST_CASE("distances to a known optimum never increase under the safe accuracy") {
  // x1 + 0.5 x2 = 1 has the unique minimum-l1 point (1, 0)
  DenseMatrix A(1, 2);
  A << 1.0, 0.5;
  DenseVector b(1);
  b << 1.0;
  auto base = std::make_shared<AffineProjector>(std::make_shared<GramFactorization>(A), b);
  auto pert = perturbed_exact_projector(base, 9u);
  L1Objective oracle;
  DenseVector x_star(2);
  x_star << 1.0, 0.0;

  DynamicConfig config;
  config.phi = 1.1;  // above the optimal value 1
  config.lambda = lambda_constant(1.0);
  config.beta = 1.0;
  config.nu = nu_default(1.0);
  config.accuracy = AccuracyMode::OverestimationBound;
  config.distance_bound = std::make_shared<KnownOptimumDistance>(x_star);

  TraceOptions topts;
  topts.dist = [&](const DenseVector& x) { return (x - x_star).norm(); };
  StoppingConfig stop;
  stop.max_iterations = 500;

  DenseVector x0(2);
  x0 << 3.0, -2.0;
  SolveResult res = solve_dynamic(oracle, *pert, config, x0, stop, topts);
  REQUIRE(res.trace.size() >= 3);  // several genuine steps before any stop
  for (size_t i = 1; i < res.trace.size(); ++i) {
    CHECK(*res.trace[i].dist_opt <= *res.trace[i - 1].dist_opt + 1e-12);
  }
  CHECK((res.final_x - x_star).norm() <= *res.trace.back().dist_opt + 1e-12);
}

TEST_CASE("truncated-iteration accuracy needs a projector that supports it") {
  L1Objective oracle;
  BoxProjector projector(DenseVector::Constant(1, -1.0), DenseVector::Constant(1, 1.0));
  DynamicConfig config;
  config.phi = 0.0;
  config.lambda = lambda_constant(1.0);
  config.accuracy = AccuracyMode::FixedCg;
  config.fixed_cg_iters = 2;
  DenseVector x0(1);
  x0 << 0.5;
  CHECK_THROWS_AS(solve_dynamic(oracle, projector, config, x0), UsageError);
}

TEST_CASE("stopping configuration rejects out-of-range values") {
  StoppingConfig stop;
  stop.max_iterations = 0;
  CHECK_THROWS_AS(stop.validate(), UsageError);
  stop = StoppingConfig{};
  stop.min_step = -1.0;
  CHECK_THROWS_AS(stop.validate(), UsageError);
  stop = StoppingConfig{};
  stop.feas_tolerance = -1.0;
  CHECK_THROWS_AS(stop.validate(), UsageError);
  stop = StoppingConfig{};
  stop.stall_window = 0;
  CHECK_THROWS_AS(stop.validate(), UsageError);
}
