#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <future>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "isa/instances.hpp"
#include "isa/reporting.hpp"
#include "isa/solver.hpp"

using namespace isa;

namespace {

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };
LogLevel g_log_level = LogLevel::Info;
bool g_quiet = false;

void log_error(const std::string& msg) { std::cerr << "[error] " << msg << "\n"; }
void log_info(const std::string& msg) {
  if (g_log_level >= LogLevel::Info) std::cerr << "[info] " << msg << "\n";
}
void log_debug(const std::string& msg) {
  if (g_log_level >= LogLevel::Debug) std::cerr << "[debug] " << msg << "\n";
}

void init_log_level() {
  const char* env = std::getenv("ISA_LOG_LEVEL");
  if (!env) return;
  std::string v(env);
  if (v == "error") {
    g_log_level = LogLevel::Error;
  } else if (v == "info") {
    g_log_level = LogLevel::Info;
  } else if (v == "debug") {
    g_log_level = LogLevel::Debug;
  } else {
    throw UsageError("ISA_LOG_LEVEL must be one of error, info, debug");
  }
}

std::vector<std::string> split_tag(const std::string& s) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(':', start);
    if (pos == std::string::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

Sequence parse_lambda_tag(const std::string& tag) {
  auto parts = split_tag(tag);
  if (parts.size() == 2 && parts[0] == "constant") return lambda_constant(parse_double(parts[1]));
  if (parts.size() == 2 && parts[0] == "vanishing") return lambda_vanishing(parse_double(parts[1]));
  if (parts.size() == 3 && parts[0] == "geometric") {
    return lambda_geometric(parse_double(parts[1]), parse_double(parts[2]));
  }
  if (parts.size() == 1) return lambda_constant(parse_double(parts[0]));  // bare value
  throw UsageError("unrecognized relaxation tag: " + tag);
}

struct AccuracySpec {
  AccuracyMode mode = AccuracyMode::FixedEps;
  int fixed_cg_iters = 2;
  double fixed_eps_value = 0.0;
};

AccuracySpec parse_accuracy_tag(const std::string& tag) {
  auto parts = split_tag(tag);
  AccuracySpec spec;
  if (parts.size() == 1 && parts[0] == "theorem_over") {
    spec.mode = AccuracyMode::OverestimationBound;
    return spec;
  }
  if (parts.size() == 1 && parts[0] == "theorem_under") {
    spec.mode = AccuracyMode::UnderestimationBound;
    return spec;
  }
  if (parts.size() == 2 && parts[0] == "fixed_cg") {
    spec.mode = AccuracyMode::FixedCg;
    spec.fixed_cg_iters = parse_int(parts[1]);
    return spec;
  }
  if (parts.size() == 2 && parts[0] == "fixed_eps") {
    spec.mode = AccuracyMode::FixedEps;
    spec.fixed_eps_value = parse_double(parts[1]);
    return spec;
  }
  throw UsageError("unrecognized accuracy tag: " + tag);
}

constexpr int kDeskM = 128;
constexpr int kDeskSupport = 4;
constexpr std::uint64_t kDeskSeed = 7;
constexpr int kSmallM = 32;
constexpr int kSmallSupport = 3;
constexpr std::uint64_t kSmallSeed = 3;

BpInstance resolve_problem(const std::string& spec) {
  if (spec == "builtin:desk") return generate_instance(kDeskM, kDeskSupport, kDeskSeed);
  if (spec == "builtin:small") return generate_instance(kSmallM, kSmallSupport, kSmallSeed);
  if (spec.rfind("builtin:", 0) == 0) throw UsageError("unknown builtin problem: " + spec);
  return load_instance(spec);
}

std::string describe(const BpInstance& inst) {
  std::string s = std::to_string(inst.A.rows()) + "x" + std::to_string(inst.A.cols());
  if (inst.x_star) s += ", planted support " + std::to_string(inst.support().size());
  if (inst.erc_value) {
    s += ", erc " + format_double(*inst.erc_value) + (inst.erc_certified ? "" : " (uncertified)");
  }
  return s;
}

// forces every projection through the exact path regardless of requested eps
class ExactOnlyProjector : public InexactProjector {
 public:
  explicit ExactOnlyProjector(std::shared_ptr<const InexactProjector> base)
      : base_(std::move(base)) {}
  ProjectionResult project(const DenseVector& y, double) const override {
    return base_->project(y, 0.0);
  }
  bool supports_exact() const override { return true; }
  double feasibility_inf(const DenseVector& x) const override
  { return base_->feasibility_inf(x); }

 private:
  std::shared_ptr<const InexactProjector> base_;
};

struct RunPlan {
  BpInstance instance;
  std::shared_ptr<GramFactorization> fact;
  std::shared_ptr<InexactProjector> projector;
  std::shared_ptr<ObjectiveOracle> oracle;
  bool predetermined = true;
  PredeterminedSchedule schedule;
  DynamicConfig dynamic;
  StoppingConfig stop;
  TraceOptions trace;
  std::string trace_path;
  std::string summary_path;
};

const std::vector<std::string> kRunKeys = {
    "problem",     "variant",        "projector",  "projector.seed", "schedule.scale_a",
    "schedule.scale_e", "gamma",     "phi",        "lambda",         "beta",
    "nu0",         "accuracy",       "dist_bound", "f_star_hint",    "seed",
    "max_iterations", "min_step",    "feas_tolerance", "stall_window", "trace_path",
    "summary_path", "trace_stride",  "trace_dist"};

RunPlan build_run_plan(const KvConfig& cfg) {
  cfg.require_known(kRunKeys);
  RunPlan plan;

  plan.instance = resolve_problem(cfg.get("problem"));
  log_info("problem: " + describe(plan.instance));
  plan.fact = std::make_shared<GramFactorization>(plan.instance.A);

  std::uint64_t seed = 0;
  if (cfg.has("seed")) seed = static_cast<std::uint64_t>(parse_int(cfg.get("seed")));

  auto base = std::make_shared<AffineProjector>(plan.fact, plan.instance.b);
  std::string projector_kind = cfg.get_or("projector", "cg");
  if (projector_kind == "cg") {
    plan.projector = base;
  } else if (projector_kind == "exact") {
    plan.projector = std::make_shared<ExactOnlyProjector>(base);
  } else if (projector_kind == "perturbed") {
    std::uint64_t pseed = seed;
    if (cfg.has("projector.seed")) {
      pseed = static_cast<std::uint64_t>(parse_int(cfg.get("projector.seed")));
    }
    plan.projector = perturbed_exact_projector(base, pseed);
  } else {
    throw UsageError("unrecognized projector kind: " + projector_kind);
  }

  std::string variant = cfg.get("variant");
  if (variant != "predetermined" && variant != "dynamic") {
    throw UsageError("variant must be predetermined or dynamic");
  }
  plan.predetermined = variant == "predetermined";

  double phi = cfg.has("phi") ? parse_double(cfg.get("phi")) : 0.0;

  std::string gamma_tag = cfg.get_or("gamma", "none");
  if (plan.predetermined) {
    double scale_a = parse_double(cfg.get("schedule.scale_a"));
    double scale_e = parse_double(cfg.get("schedule.scale_e"));
    plan.schedule = harmonic_pair_schedule(scale_a, scale_e);

    if (gamma_tag == "none") {
      plan.oracle = std::make_shared<L1Objective>();
    } else {
      auto parts = split_tag(gamma_tag);
      if (parts.size() != 2 || (parts[0] != "alpha" && parts[0] != "eps")) {
        throw UsageError("unrecognized gamma tag: " + gamma_tag);
      }
      double mu = parse_double(parts[1]);
      if (!(mu >= 0.0)) throw UsageError("gamma factor must be nonnegative");
      PredeterminedSchedule sched = plan.schedule;
      GammaSchedule gamma =
          parts[0] == "alpha" ? GammaSchedule([sched, mu](int k) { return mu * sched.alpha(k); })
                              : GammaSchedule([sched, mu](int k) { return mu * sched.eps(k); });
      plan.oracle = eps_subgradient_wrap(std::make_shared<L1Objective>(), gamma, seed);
      log_debug("subgradient slack: gamma = " + gamma_tag);
    }
  } else {
    if (gamma_tag != "none") {
      throw UsageError("gamma slack schedules pair with the predetermined variant only");
    }
    plan.oracle = std::make_shared<L1Objective>();

    DynamicConfig& dyn = plan.dynamic;
    dyn.phi = phi;
    dyn.lambda = parse_lambda_tag(cfg.get("lambda"));
    if (cfg.has("beta")) dyn.beta = parse_double(cfg.get("beta"));
    double nu0 = cfg.has("nu0") ? parse_double(cfg.get("nu0")) : 1.0;
    dyn.nu = nu_default(nu0);

    AccuracySpec acc = parse_accuracy_tag(cfg.get("accuracy"));
    dyn.accuracy = acc.mode;
    dyn.fixed_cg_iters = acc.fixed_cg_iters;
    dyn.fixed_eps_value = acc.fixed_eps_value;

    if (cfg.has("f_star_hint")) {
      std::string hint = cfg.get("f_star_hint");
      dyn.f_star_hint = hint == "known" ? plan.instance.f_star() : parse_double(hint);
    }
    if (cfg.has("dist_bound")) {
      std::string kind = cfg.get("dist_bound");
      if (kind == "bp") {
        dyn.distance_bound = std::make_shared<BpDistance>(plan.fact, plan.instance.b, dyn.phi);
      } else if (kind == "known") {
        if (!plan.instance.x_star) {
          throw UsageError("dist_bound = known needs an instance with a planted solution");
        }
        dyn.distance_bound = std::make_shared<KnownOptimumDistance>(*plan.instance.x_star);
      } else {
        throw UsageError("unrecognized distance bound kind: " + kind);
      }
    }
  }

  if (cfg.has("max_iterations")) plan.stop.max_iterations = parse_int(cfg.get("max_iterations"));
  if (cfg.has("min_step")) plan.stop.min_step = parse_double(cfg.get("min_step"));
  if (cfg.has("feas_tolerance")) plan.stop.feas_tolerance = parse_double(cfg.get("feas_tolerance"));
  if (cfg.has("stall_window")) {
    int w = parse_int(cfg.get("stall_window"));
    if (w < 0) throw UsageError("stall_window must be nonnegative (0 disables)");
    if (w > 0) plan.stop.stall_window = w;
  }

  plan.trace_path = cfg.get_or("trace_path", "");
  plan.summary_path = cfg.get_or("summary_path", "");
  if (cfg.has("trace_stride")) plan.trace.stride = parse_int(cfg.get("trace_stride"));

  std::string dist_mode = cfg.get_or("trace_dist", "auto");
  if (dist_mode == "none") {
    // leave the distance column empty
  } else if (dist_mode == "auto") {
    if (plan.instance.x_star) {
      DenseVector xs = *plan.instance.x_star;
      plan.trace.dist = [xs](const DenseVector& x) { return (x - xs).norm(); };
    }
  } else if (dist_mode == "bp") {
    auto bp = std::make_shared<BpDistance>(plan.fact, plan.instance.b, phi);
    plan.trace.dist = [bp](const DenseVector& x) { return bp->bound(x, l1_value(x)); };
  } else {
    throw UsageError("trace_dist must be auto, none, or bp");
  }
  return plan;
}

void print_kv(const std::string& key, const std::string& value) {
  if (!g_quiet) std::cout << key << " = " << value << "\n";
}

int cmd_generate(int m, int support, std::uint64_t seed, const std::string& out) {
  BpInstance inst = generate_instance(m, support, seed);
  save_instance(inst, out);
  log_info("wrote " + out + " (" + describe(inst) + ")");
  if (inst.erc_value) print_kv("erc_value", format_double(*inst.erc_value));
  print_kv("erc_certified", inst.erc_certified ? "1" : "0");
  print_kv("sigma_min", format_double(inst.sigma_min));
  return 0;
}

int cmd_check(const std::string& path) {
  BpInstance inst = load_instance(path);
  print_kv("rows", std::to_string(inst.A.rows()));
  print_kv("cols", std::to_string(inst.A.cols()));
  print_kv("sigma_min", format_double(inst.sigma_min));
  if (inst.erc_value) print_kv("erc_value", format_double(*inst.erc_value));
  print_kv("erc_certified", inst.erc_certified ? "1" : "0");
  if (inst.x_star) {
    print_kv("planted_support", std::to_string(inst.support().size()));
    print_kv("f_star", format_double(inst.f_star()));
  }
  log_info("instance file is consistent");
  return 0;
}

int cmd_run(const std::string& config_path) {
  KvConfig cfg = KvConfig::load_file(config_path);
  RunPlan plan = build_run_plan(cfg);

  log_info(std::string("variant: ") + (plan.predetermined ? "predetermined" : "dynamic"));
  auto t0 = std::chrono::steady_clock::now();
  SolveResult res =
      plan.predetermined
          ? solve_predetermined(*plan.oracle, *plan.projector, plan.schedule,
                                default_start(plan.instance.A, plan.instance.b), plan.stop,
                                plan.trace)
          : solve_dynamic(*plan.oracle, *plan.projector, plan.dynamic,
                          default_start(plan.instance.A, plan.instance.b), plan.stop, plan.trace);
  auto t1 = std::chrono::steady_clock::now();
  double wall = std::chrono::duration<double>(t1 - t0).count();
  log_info("solve: status " + to_string(res.status) + " after " + std::to_string(res.iterations) +
           " iterations");

  if (!plan.trace_path.empty()) {
    write_trace_csv(plan.trace_path, res.trace);
    log_debug("trace written to " + plan.trace_path);
  }
  if (!plan.summary_path.empty()) {
    write_json_file(plan.summary_path, run_summary(res, wall, cfg.entries()));
    log_debug("summary written to " + plan.summary_path);
  }

  print_kv("status", to_string(res.status));
  print_kv("iterations", std::to_string(res.iterations));
  print_kv("final_f", format_double(res.final_f));
  print_kv("final_feas_inf", format_double(res.final_feasibility_inf));
  if (res.best_feasible_f) print_kv("best_feasible_f", format_double(*res.best_feasible_f));
  return res.status == SolveStatus::NumericalBreakdown ? 3 : 0;
}

struct Figure2Run {
  SolveResult result;
  double wall_seconds = 0.0;
};

Figure2Run figure2_solve(const BpInstance& inst, const Sequence& lambda, bool accurate,
                         int max_iters) {
  auto fact = std::make_shared<GramFactorization>(inst.A);
  AffineProjector projector(fact, inst.b);
  L1Objective oracle;

  DynamicConfig config;
  config.phi = 0.0;
  config.lambda = lambda;
  config.beta = 1.9999;  // admit relaxation values across the whole (0, 2) window
  if (accurate) {
    config.accuracy = AccuracyMode::FixedEps;
    config.fixed_eps_value = 1e-12;
  } else {
    config.accuracy = AccuracyMode::FixedCg;
    config.fixed_cg_iters = 2;
  }
  StoppingConfig stop;
  stop.max_iterations = max_iters;
  TraceOptions topts;
  DenseVector xs = *inst.x_star;
  topts.dist = [xs](const DenseVector& x) { return (x - xs).norm(); };

  Figure2Run out;
  auto t0 = std::chrono::steady_clock::now();
  out.result =
      solve_dynamic(oracle, projector, config, default_start(inst.A, inst.b), stop, topts);
  auto t1 = std::chrono::steady_clock::now();
  out.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
  return out;
}

// peak violation among the iterates the run produced; the shared start x^0
// (recorded as row k = 0) is excluded
double peak_feas_from(const std::vector<SolveTraceRecord>& rows) {
  double peak = 0.0;
  for (const auto& row : rows) {
    if (row.k >= 1 && row.feasibility_inf > peak) peak = row.feasibility_inf;
  }
  return peak;
}

nlohmann::ordered_json figure2_run_json(const Figure2Run& run, const std::string& accuracy,
                                        const BpInstance& inst) {
  nlohmann::ordered_json doc;
  doc["accuracy"] = accuracy;
  doc["status"] = to_string(run.result.status);
  doc["iterations"] = run.result.iterations;
  doc["wall_seconds"] = run.wall_seconds;
  doc["final_f"] = run.result.final_f;
  doc["final_feas_inf"] = run.result.final_feasibility_inf;
  doc["final_dist_opt"] = (run.result.final_x - *inst.x_star).norm();
  doc["peak_feas_inf"] = peak_feas_from(run.result.trace);
  return doc;
}

int cmd_figure2(int m, int support, std::uint64_t seed, const std::string& out_dir,
                const std::string& lambda_tag, int max_iters, bool sequential) {
  BpInstance inst = generate_instance(m, support, seed);
  if (!inst.x_star) throw UsageError("the comparison needs an instance with a planted solution");
  log_info("instance: " + describe(inst));
  Sequence lambda = parse_lambda_tag(lambda_tag);

  Figure2Run inexact;
  Figure2Run accurate;
  if (sequential) {
    inexact = figure2_solve(inst, lambda, false, max_iters);
    accurate = figure2_solve(inst, lambda, true, max_iters);
  } else {
    auto fut = std::async(std::launch::async,
                          [&] { return figure2_solve(inst, lambda, false, max_iters); });
    accurate = figure2_solve(inst, lambda, true, max_iters);
    inexact = fut.get();
  }
  log_info("inexact: status " + to_string(inexact.result.status) + ", accurate: status " +
           to_string(accurate.result.status));

  std::filesystem::create_directories(out_dir);
  std::filesystem::path dir(out_dir);
  write_trace_csv((dir / "inexact_trace.csv").string(), inexact.result.trace);
  write_trace_csv((dir / "accurate_trace.csv").string(), accurate.result.trace);

  nlohmann::ordered_json doc;
  doc["m"] = m;
  doc["n"] = static_cast<int>(inst.A.cols());
  doc["support"] = support;
  doc["seed"] = seed;
  doc["f_star"] = inst.f_star();
  doc["lambda"] = lambda_tag;
  doc["max_iterations"] = max_iters;
  doc["inexact"] = figure2_run_json(inexact, "fixed_cg:2", inst);
  doc["accurate"] = figure2_run_json(accurate, "fixed_eps:1e-12", inst);
  double peak_in = doc["inexact"]["peak_feas_inf"].get<double>();
  double peak_acc = doc["accurate"]["peak_feas_inf"].get<double>();
  if (peak_acc > 0.0) {
    doc["peak_feas_ratio"] = peak_in / peak_acc;
  } else {
    doc["peak_feas_ratio"] = nullptr;
  }
  write_json_file((dir / "comparison.json").string(), doc);

  print_kv("inexact_peak_feas", format_double(peak_in));
  print_kv("accurate_peak_feas", format_double(peak_acc));
  print_kv("comparison", (dir / "comparison.json").string());
  bool broke = inexact.result.status == SolveStatus::NumericalBreakdown ||
               accurate.result.status == SolveStatus::NumericalBreakdown;
  return broke ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Infeasible-point subgradient solver for basis pursuit"};
  app.require_subcommand(1);
  app.add_flag("--quiet", g_quiet, "suppress everything except errors");

  int m = kDeskM;
  int support = kDeskSupport;
  std::uint64_t seed = kDeskSeed;
  std::string out;
  std::string config_path;
  std::string instance_path;
  std::string lambda_tag = "constant:1";
  int max_iters = 21000;
  bool sequential = false;

  CLI::App* gen = app.add_subcommand("generate", "generate a sparse recovery instance file");
  gen->add_option("--m", m, "rows (power of two, at least 4)");
  gen->add_option("--support", support, "planted support size");
  gen->add_option("--seed", seed, "generator seed");
  gen->add_option("--out", out, "output instance path")->required();

  CLI::App* run = app.add_subcommand("run", "run a solve described by a config file");
  run->add_option("--config", config_path, "key = value config file")->required();

  CLI::App* fig = app.add_subcommand(
      "figure2", "compare a truncated-CG run against a high-accuracy run on one instance");
  fig->add_option("--m", m, "rows (power of two, at least 4)");
  fig->add_option("--support", support, "planted support size");
  fig->add_option("--seed", seed, "generator seed");
  fig->add_option("--out", out, "output directory")->required();
  fig->add_option("--lambda", lambda_tag, "relaxation tag for both runs");
  fig->add_option("--max-iters", max_iters, "iteration cap for both runs");
  fig->add_flag("--sequential", sequential, "run the two solves one after the other");

  CLI::App* check = app.add_subcommand("check", "validate an instance file");
  check->add_option("instance", instance_path, "instance file to validate")->required();

  for (CLI::App* sub : {gen, run, fig, check}) sub->fallthrough();

  try {
    app.parse(argc, argv);
    init_log_level();
    if (g_quiet) g_log_level = LogLevel::Error;

    if (gen->parsed()) return cmd_generate(m, support, seed, out);
    if (run->parsed()) return cmd_run(config_path);
    if (fig->parsed()) return cmd_figure2(m, support, seed, out, lambda_tag, max_iters, sequential);
    if (check->parsed()) return cmd_check(instance_path);
    return 2;
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const UsageError& e) {
    log_error(e.what());
    return 2;
  } catch (const DegenerateInstanceError& e) {
    log_error(e.what());
    return 2;
  } catch (const NumericalError& e) {
    log_error(e.what());
    return 3;
  } catch (const std::exception& e) {
    log_error(std::string("internal error: ") + e.what());
    return 3;
  }
}
