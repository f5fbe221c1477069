#pragma once

#include "cfo/plan.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace cfo {

/// Instance documents are JSON with top-level keys "units", "nodes",
/// "edges", "stations" and "params"; see README for the schema. A station's
/// "intensity_file" is resolved against `base_dir`.
[[nodiscard]] Instance instance_from_json(const std::string& text, const std::string& base_dir = ".");
[[nodiscard]] std::string instance_to_json(const Instance& instance);
[[nodiscard]] Instance load_instance(const std::string& path);
void save_instance(const Instance& instance, const std::string& path);

[[nodiscard]] Plan plan_from_json(const std::string& text);
/// The summary block is informational; plan_from_json ignores it.
[[nodiscard]] std::string plan_to_json(const Plan& plan, const PlanSummary* summary = nullptr);
[[nodiscard]] Plan load_plan(const std::string& path);
void save_plan(const Plan& plan, const std::string& path, const PlanSummary* summary = nullptr);

/// Header "carbon_kg,energy_kwh,distance,time_h,feasible".
void write_summary_csv(std::ostream& out, const std::vector<PlanSummary>& rows);

[[nodiscard]] std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

} // namespace cfo
