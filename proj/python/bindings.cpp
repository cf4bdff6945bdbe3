#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "isa/instances.hpp"
#include "isa/reporting.hpp"
#include "isa/solver.hpp"

namespace py = pybind11;
using namespace isa;

PYBIND11_MODULE(_isa, m) {
  m.doc() = "Projected subgradient solver with inexact projections, basis pursuit edition";

  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<DegenerateInstanceError>(m, "DegenerateInstanceError", PyExc_ValueError);

  py::class_<GramFactorization, std::shared_ptr<GramFactorization>>(m, "GramFactorization")
      .def(py::init<DenseMatrix>(), py::arg("A"))
      .def_property_readonly("matrix", &GramFactorization::matrix)
      .def("solve", &GramFactorization::solve, py::arg("rhs"))
      .def("sigma_min", &GramFactorization::sigma_min);

  py::class_<BpInstance>(m, "BpInstance")
      .def(py::init<>())
      .def_readwrite("A", &BpInstance::A)
      .def_readwrite("b", &BpInstance::b)
      .def_readwrite("x_star", &BpInstance::x_star)
      .def_readonly("sigma_min", &BpInstance::sigma_min)
      .def_readonly("erc_value", &BpInstance::erc_value)
      .def_readonly("erc_certified", &BpInstance::erc_certified)
      .def("support", &BpInstance::support)
      .def("f_star", &BpInstance::f_star);

  m.def("hadamard", &hadamard, py::arg("m"));
  m.def("build_concat_dictionary", &build_concat_dictionary, py::arg("m"), py::arg("seed"));
  m.def("erc_check", &erc_check, py::arg("A"), py::arg("support"));
  m.def("generate_instance", &generate_instance, py::arg("m"), py::arg("support_size"),
        py::arg("seed"));
  m.def("default_start", &default_start, py::arg("A"), py::arg("b"));
  m.def("save_instance", &save_instance, py::arg("instance"), py::arg("path"));
  m.def("load_instance", &load_instance, py::arg("path"));

  py::class_<ProjectionCertificate>(m, "ProjectionCertificate")
      .def_readonly("requested_eps", &ProjectionCertificate::requested_eps)
      .def_readonly("certified_error_bound", &ProjectionCertificate::certified_error_bound)
      .def_readonly("inner_iterations", &ProjectionCertificate::inner_iterations)
      .def_readonly("residual_norm", &ProjectionCertificate::residual_norm)
      .def_readonly("exact_fallback_taken", &ProjectionCertificate::exact_fallback_taken)
      .def_readonly("moved_closer_guaranteed", &ProjectionCertificate::moved_closer_guaranteed);

  py::class_<ProjectionResult>(m, "ProjectionResult")
      .def_readonly("point", &ProjectionResult::point)
      .def_readonly("certificate", &ProjectionResult::certificate);

  py::class_<InexactProjector, std::shared_ptr<InexactProjector>>(m, "InexactProjector")
      .def("project", &InexactProjector::project, py::arg("y"), py::arg("eps"))
      .def("project_fixed_iters", &InexactProjector::project_fixed_iters, py::arg("y"),
           py::arg("iters"))
      .def("supports_exact", &InexactProjector::supports_exact)
      .def("feasibility_inf", &InexactProjector::feasibility_inf, py::arg("x"));

  py::class_<AffineProjector, InexactProjector, std::shared_ptr<AffineProjector>>(
      m, "AffineProjector")
      .def(py::init([](std::shared_ptr<GramFactorization> fact, DenseVector b) {
             return std::make_shared<AffineProjector>(std::move(fact), std::move(b));
           }),
           py::arg("factorization"), py::arg("b"));

  py::class_<BoxProjector, InexactProjector, std::shared_ptr<BoxProjector>>(m, "BoxProjector")
      .def(py::init<DenseVector, DenseVector>(), py::arg("lower"), py::arg("upper"));

  m.def(
      "perturbed_exact_projector",
      [](std::shared_ptr<InexactProjector> base, std::uint64_t seed) {
        return perturbed_exact_projector(std::move(base), seed);
      },
      py::arg("base"), py::arg("seed"));

  py::class_<ObjectiveOracle, std::shared_ptr<ObjectiveOracle>>(m, "ObjectiveOracle")
      .def("value", &ObjectiveOracle::value, py::arg("x"))
      .def("subgradient", &ObjectiveOracle::subgradient, py::arg("x"));

  py::class_<L1Objective, ObjectiveOracle, std::shared_ptr<L1Objective>>(m, "L1Objective")
      .def(py::init<>());

  m.def("l1_value", &l1_value, py::arg("x"));
  m.def("l1_subgradient", &l1_subgradient, py::arg("x"));
  m.def(
      "eps_subgradient_wrap",
      [](std::shared_ptr<ObjectiveOracle> base, GammaSchedule gamma, std::uint64_t seed) {
        return eps_subgradient_wrap(std::move(base), std::move(gamma), seed);
      },
      py::arg("base"), py::arg("gamma"), py::arg("seed") = 0);

  py::class_<PredeterminedSchedule>(m, "PredeterminedSchedule")
      .def_readwrite("alpha", &PredeterminedSchedule::alpha)
      .def_readwrite("eps", &PredeterminedSchedule::eps)
      .def_readwrite("tail_bound", &PredeterminedSchedule::tail_bound)
      .def_readwrite("tag", &PredeterminedSchedule::tag);

  m.def("harmonic_pair_schedule", &harmonic_pair_schedule, py::arg("scale_a"), py::arg("scale_e"));
  m.def("dynamic_step", &dynamic_step, py::arg("f_k"), py::arg("phi"), py::arg("lambda_k"),
        py::arg("h_norm_sq"));
  m.def("eps_bar", &eps_bar, py::arg("f_k"), py::arg("phi"), py::arg("lambda_k"), py::arg("h_norm"),
        py::arg("dist_bound"));

  py::class_<EpsTilde>(m, "EpsTilde")
      .def_readonly("value", &EpsTilde::value)
      .def_readonly("negative_discriminant", &EpsTilde::negative_discriminant);

  m.def("eps_tilde", &eps_tilde, py::arg("f_k"), py::arg("phi"), py::arg("f_star_hint"),
        py::arg("lambda_k"), py::arg("beta"), py::arg("h_norm"), py::arg("dist_bound"));

  m.def("lambda_constant", &lambda_constant, py::arg("value"));
  m.def("lambda_vanishing", &lambda_vanishing, py::arg("lambda0"));
  m.def("lambda_geometric", &lambda_geometric, py::arg("lambda0"), py::arg("rho"));
  m.def("nu_default", &nu_default, py::arg("nu0"));

  m.def("distance_bound_strongly_convex", &distance_bound_strongly_convex, py::arg("f_x"),
        py::arg("f_star"), py::arg("convexity"), py::arg("min_subgrad_norm"));
  m.def("distance_bound_weak_sharp", &distance_bound_weak_sharp, py::arg("f_x"), py::arg("phi"),
        py::arg("sharpness"), py::arg("feasible"), py::arg("d_X_bound"));

  py::class_<DistanceBound, std::shared_ptr<DistanceBound>>(m, "DistanceBound")
      .def("bound", &DistanceBound::bound, py::arg("x"), py::arg("f_x"))
      .def("kind", &DistanceBound::kind);

  py::class_<KnownOptimumDistance, DistanceBound, std::shared_ptr<KnownOptimumDistance>>(
      m, "KnownOptimumDistance")
      .def(py::init<DenseVector>(), py::arg("x_star"));

  py::class_<BpDistance, DistanceBound, std::shared_ptr<BpDistance>>(m, "BpDistance")
      .def(py::init([](std::shared_ptr<GramFactorization> fact, DenseVector b, double phi) {
             return std::make_shared<BpDistance>(std::move(fact), std::move(b), phi);
           }),
           py::arg("factorization"), py::arg("b"), py::arg("phi"));

  py::enum_<AccuracyMode>(m, "AccuracyMode")
      .value("OverestimationBound", AccuracyMode::OverestimationBound)
      .value("UnderestimationBound", AccuracyMode::UnderestimationBound)
      .value("FixedCg", AccuracyMode::FixedCg)
      .value("FixedEps", AccuracyMode::FixedEps);

  py::class_<DynamicConfig>(m, "DynamicConfig")
      .def(py::init<>())
      .def_readwrite("phi", &DynamicConfig::phi)
      .def_readwrite("lambda_", &DynamicConfig::lambda)
      .def_readwrite("beta", &DynamicConfig::beta)
      .def_readwrite("nu", &DynamicConfig::nu)
      .def_readwrite("accuracy", &DynamicConfig::accuracy)
      .def_readwrite("fixed_cg_iters", &DynamicConfig::fixed_cg_iters)
      .def_readwrite("fixed_eps_value", &DynamicConfig::fixed_eps_value)
      .def_readwrite("distance_bound", &DynamicConfig::distance_bound)
      .def_readwrite("f_star_hint", &DynamicConfig::f_star_hint)
      .def("validate", &DynamicConfig::validate);

  py::enum_<SolveStatus>(m, "SolveStatus")
      .value("MaxIterations", SolveStatus::MaxIterations)
      .value("StepBelowThreshold", SolveStatus::StepBelowThreshold)
      .value("OptimalFeasibleZeroSubgrad", SolveStatus::OptimalFeasibleZeroSubgrad)
      .value("TargetReachedFeasible", SolveStatus::TargetReachedFeasible)
      .value("Stalled", SolveStatus::Stalled)
      .value("NumericalBreakdown", SolveStatus::NumericalBreakdown);

  m.def("status_string", [](SolveStatus s) { return to_string(s); }, py::arg("status"));

  py::class_<SolveTraceRecord>(m, "SolveTraceRecord")
      .def_readonly("k", &SolveTraceRecord::k)
      .def_readonly("f_k", &SolveTraceRecord::f_k)
      .def_readonly("alpha_k", &SolveTraceRecord::alpha_k)
      .def_readonly("eps_requested", &SolveTraceRecord::eps_requested)
      .def_readonly("eps_certified", &SolveTraceRecord::eps_certified)
      .def_readonly("h_norm", &SolveTraceRecord::h_norm)
      .def_readonly("inner_iterations", &SolveTraceRecord::inner_iterations)
      .def_readonly("feasibility_inf", &SolveTraceRecord::feasibility_inf)
      .def_readonly("dist_opt", &SolveTraceRecord::dist_opt)
      .def_readonly("exact_fallback_taken", &SolveTraceRecord::exact_fallback_taken);

  py::class_<StoppingConfig>(m, "StoppingConfig")
      .def(py::init<>())
      .def_readwrite("max_iterations", &StoppingConfig::max_iterations)
      .def_readwrite("min_step", &StoppingConfig::min_step)
      .def_readwrite("feas_tolerance", &StoppingConfig::feas_tolerance)
      .def_readwrite("stall_window", &StoppingConfig::stall_window);

  py::class_<TraceOptions>(m, "TraceOptions")
      .def(py::init<>())
      .def_readwrite("stride", &TraceOptions::stride)
      .def_readwrite("dist", &TraceOptions::dist);

  py::class_<SolveResult>(m, "SolveResult")
      .def_readonly("status", &SolveResult::status)
      .def_readonly("final_x", &SolveResult::final_x)
      .def_readonly("iterations", &SolveResult::iterations)
      .def_readonly("trace", &SolveResult::trace)
      .def_readonly("best_feasible_f", &SolveResult::best_feasible_f)
      .def_readonly("final_f", &SolveResult::final_f)
      .def_readonly("final_feasibility_inf", &SolveResult::final_feasibility_inf);

  m.def("solve_predetermined", &solve_predetermined, py::arg("oracle"), py::arg("projector"),
        py::arg("schedule"), py::arg("x0"), py::arg("stop") = StoppingConfig{},
        py::arg("trace_options") = TraceOptions{});
  m.def("solve_dynamic", &solve_dynamic, py::arg("oracle"), py::arg("projector"),
        py::arg("config"), py::arg("x0"), py::arg("stop") = StoppingConfig{},
        py::arg("trace_options") = TraceOptions{});

  py::class_<RestartPlan>(m, "RestartPlan")
      .def_readonly("config", &RestartPlan::config)
      .def_readonly("x0", &RestartPlan::x0);

  m.def("restart_with_lower_phi", &restart_with_lower_phi, py::arg("result"), py::arg("config"),
        py::arg("shrink"));

  m.def(
      "write_trace_csv",
      [](const std::string& path, const std::vector<SolveTraceRecord>& rows) {
        write_trace_csv(path, rows);
      },
      py::arg("path"), py::arg("rows"));
}
