#include "isa/reporting.hpp"

#include <cmath>
#include <fstream>

namespace isa {

namespace {

constexpr const char* kTraceHeader =
    "k,f_k,alpha_k,eps_requested,eps_certified,h_norm,inner_iters,feas_inf,dist_opt,"
    "exact_fallback";

// nlohmann serializes non-finite doubles as null; the summary keeps that
nlohmann::ordered_json number_or_null(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

}  // namespace

void write_trace_csv(std::ostream& out, const std::vector<SolveTraceRecord>& rows) {
  out << kTraceHeader << '\n';
  for (const auto& row : rows) {
    out << row.k << ',' << format_double(row.f_k) << ',' << format_double(row.alpha_k) << ','
        << format_double(row.eps_requested) << ',' << format_double(row.eps_certified) << ','
        << format_double(row.h_norm) << ',' << row.inner_iterations << ','
        << format_double(row.feasibility_inf) << ',';
    if (row.dist_opt) out << format_double(*row.dist_opt);
    out << ',' << (row.exact_fallback_taken ? '1' : '0') << '\n';
  }
}

void write_trace_csv(const std::string& path, const std::vector<SolveTraceRecord>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot open trace output: " + path);
  write_trace_csv(out, rows);
  out.flush();
  if (!out) throw UsageError("failed writing trace output: " + path);
}

nlohmann::ordered_json run_summary(const SolveResult& result, double wall_seconds,
                                   const std::vector<KvEntry>& config_echo) {
  nlohmann::ordered_json doc;
  doc["status"] = to_string(result.status);
  doc["iterations"] = result.iterations;
  doc["wall_seconds"] = wall_seconds;
  doc["final_f"] = number_or_null(result.final_f);
  doc["final_feas_inf"] = number_or_null(result.final_feasibility_inf);
  if (result.best_feasible_f) {
    doc["best_feasible_f"] = number_or_null(*result.best_feasible_f);
  } else {
    doc["best_feasible_f"] = nullptr;
  }
  nlohmann::ordered_json echo = nlohmann::ordered_json::object();
  for (const auto& entry : config_echo) echo[entry.key] = entry.value;
  doc["config"] = echo;
  return doc;
}

void write_json_file(const std::string& path, const nlohmann::ordered_json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot open summary output: " + path);
  out << doc.dump(2) << '\n';
  out.flush();
  if (!out) throw UsageError("failed writing summary output: " + path);
}

}  // namespace isa
