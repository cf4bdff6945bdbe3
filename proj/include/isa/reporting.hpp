#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "isa/solver.hpp"
#include "isa/textio.hpp"

namespace isa {

// Per-iteration trace in the solver's column layout, '\n' terminated, doubles
// in shortest round-trip form, non-finite values spelled as to_chars spells
// them, a missing distance column left empty.
void write_trace_csv(std::ostream& out, const std::vector<SolveTraceRecord>& rows);
void write_trace_csv(const std::string& path, const std::vector<SolveTraceRecord>& rows);

// Summary document for one solve; config_echo keys and values are copied
// verbatim so the summary round-trips the exact configuration it ran under.
nlohmann::ordered_json run_summary(const SolveResult& result, double wall_seconds,
                                   const std::vector<KvEntry>& config_echo);

void write_json_file(const std::string& path, const nlohmann::ordered_json& doc);

}  // namespace isa
