#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "opinion/concentration.hpp"
#include "opinion/ode_analysis.hpp"
#include "opinion/strategy_opt.hpp"

namespace opinion {

enum class OutputFormat { Csv, Json };

OutputFormat parse_output_format(const std::string& name);

// Decimal values in CSV output carry 12 significant digits.
std::string format_value(double v);

std::string winner_name(Winner w);
Winner winner_from_name(const std::string& name);
std::string method_name(DiffMethod m);
DiffMethod method_from_name(const std::string& name);

// CSV rows mirror the documented column orders:
//   trajectory     t,delta_N
//   sweep          sweep_value,value_SL,value_SF,diff,winner,method
//   concentration  epsilon,empirical_tail,analytic_bound,pass
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
void write_sweep_header(std::ostream& os, const std::string& sweep_name);
void write_sweep_row(std::ostream& os, double sweep_value, const StrategyDiffReport& report);
void write_concentration_csv(std::ostream& os, const ConcentrationReport& report);
void write_search_result_csv(std::ostream& os, const ScheduleSearchResult& result);
void write_report_csv(std::ostream& os, const StrategyDiffReport& report);

nlohmann::json to_json(const Trajectory& traj);
nlohmann::json to_json(const StrategyDiffReport& report);
nlohmann::json to_json(const ScheduleSearchResult& result);
nlohmann::json to_json(const ConcentrationReport& report);
StrategyDiffReport report_from_json(const nlohmann::json& j);

// Write a finished artifact; the file is only created once the content is
// fully rendered, so failed runs leave nothing behind.
void write_file(const std::string& path, const std::string& content);

void emit_trajectory(const Trajectory& traj, OutputFormat format, const std::string& path);
void emit_report(const StrategyDiffReport& report, OutputFormat format, const std::string& path);
void emit_search_result(const ScheduleSearchResult& result, OutputFormat format,
                        const std::string& path);
void emit_concentration(const ConcentrationReport& report, OutputFormat format,
                        const std::string& path);

}  // namespace opinion
