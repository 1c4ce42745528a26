#include "opinion/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace opinion {

using nlohmann::json;

OutputFormat parse_output_format(const std::string& name) {
    if (name == "csv") return OutputFormat::Csv;
    if (name == "json") return OutputFormat::Json;
    throw ValidationError("unknown output format '" + name + "' (expected csv or json)");
}

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string winner_name(Winner w) {
    switch (w) {
        case Winner::SLast: return "S_L";
        case Winner::SFirst: return "S_F";
        case Winner::Tie: return "tie";
    }
    return "tie";
}

Winner winner_from_name(const std::string& name) {
    if (name == "S_L") return Winner::SLast;
    if (name == "S_F") return Winner::SFirst;
    if (name == "tie") return Winner::Tie;
    throw ValidationError("unknown winner name '" + name + "'");
}

std::string method_name(DiffMethod m) {
    switch (m) {
        case DiffMethod::ClosedForm: return "closed-form";
        case DiffMethod::OdeNumeric: return "ode";
        case DiffMethod::ExactMarkov: return "exact";
        case DiffMethod::MonteCarlo: return "mc";
    }
    return "closed-form";
}

DiffMethod method_from_name(const std::string& name) {
    if (name == "closed-form") return DiffMethod::ClosedForm;
    if (name == "ode") return DiffMethod::OdeNumeric;
    if (name == "exact") return DiffMethod::ExactMarkov;
    if (name == "mc") return DiffMethod::MonteCarlo;
    throw ValidationError("unknown method name '" + name + "'");
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << "t,delta_N\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        os << traj.times[i] << "," << format_value(traj.values[i]) << "\n";
}

void write_sweep_header(std::ostream& os, const std::string& sweep_name) {
    os << sweep_name << ",value_SL,value_SF,diff,winner,method\n";
}

void write_sweep_row(std::ostream& os, double sweep_value, const StrategyDiffReport& report) {
    os << format_value(sweep_value) << "," << format_value(report.delta_last_final) << ","
       << format_value(report.delta_first_final) << "," << format_value(report.difference) << ","
       << winner_name(report.winner) << "," << method_name(report.method) << "\n";
}

void write_concentration_csv(std::ostream& os, const ConcentrationReport& report) {
    os << "epsilon,empirical_tail,analytic_bound,pass\n";
    os << format_value(report.epsilon) << "," << format_value(report.empirical_tail) << ","
       << format_value(report.analytic_bound) << "," << (report.pass ? "true" : "false") << "\n";
}

namespace {

std::string mask_string(const Schedule& schedule) {
    std::string s;
    s.reserve(static_cast<std::size_t>(schedule.horizon()));
    for (std::int64_t t = 0; t < schedule.horizon(); ++t)
        s.push_back(schedule.influenced(t) ? '1' : '0');
    return s;
}

}  // namespace

void write_search_result_csv(std::ostream& os, const ScheduleSearchResult& result) {
    os << "best_mask,best_value,evaluated_count,value_SL,value_SF,rank_SL,rank_SF\n";
    os << mask_string(result.best_schedule) << "," << format_value(result.best_value) << ","
       << result.evaluated_count << "," << format_value(result.value_of_s_last) << ","
       << format_value(result.value_of_s_first) << "," << result.rank_of_s_last << ","
       << result.rank_of_s_first << "\n";
}

void write_report_csv(std::ostream& os, const StrategyDiffReport& report) {
    os << "value_SL,value_SF,diff,winner,method\n";
    os << format_value(report.delta_last_final) << "," << format_value(report.delta_first_final)
       << "," << format_value(report.difference) << "," << winner_name(report.winner) << ","
       << method_name(report.method) << "\n";
}

json to_json(const Trajectory& traj) {
    const char* source = "mc";
    switch (traj.source) {
        case TrajectorySource::MonteCarlo: source = "mc"; break;
        case TrajectorySource::ExactMarkov: source = "exact"; break;
        case TrajectorySource::OdeNumeric: source = "ode"; break;
        case TrajectorySource::ClosedForm: source = "closed-form"; break;
    }
    return json{{"schema_version", 1},
                {"source", source},
                {"times", traj.times},
                {"values", traj.values}};
}

json to_json(const StrategyDiffReport& report) {
    json j{{"schema_version", 1},
           {"delta_last_final", report.delta_last_final},
           {"delta_first_final", report.delta_first_final},
           {"difference", report.difference},
           {"winner", winner_name(report.winner)},
           {"method", method_name(report.method)},
           {"tie_tolerance", report.tie_tolerance}};
    if (report.diff_stderr) j["diff_stderr"] = *report.diff_stderr;
    if (report.aux) {
        j["aux"] = json{{"rate", report.aux->rate},
                        {"d1", report.aux->d1},
                        {"d2", report.aux->d2},
                        {"d3", report.aux->d3}};
    }
    return j;
}

StrategyDiffReport report_from_json(const json& j) {
    if (!j.contains("schema_version") || j.at("schema_version").get<int>() != 1)
        throw ValidationError("unsupported report schema version");
    StrategyDiffReport report;
    report.delta_last_final = j.at("delta_last_final").get<double>();
    report.delta_first_final = j.at("delta_first_final").get<double>();
    report.difference = j.at("difference").get<double>();
    report.winner = winner_from_name(j.at("winner").get<std::string>());
    report.method = method_from_name(j.at("method").get<std::string>());
    report.tie_tolerance = j.at("tie_tolerance").get<double>();
    if (j.contains("diff_stderr")) report.diff_stderr = j.at("diff_stderr").get<double>();
    if (j.contains("aux")) {
        const json& a = j.at("aux");
        report.aux = ClosedFormAux{a.at("rate").get<double>(), a.at("d1").get<double>(),
                                   a.at("d2").get<double>(), a.at("d3").get<double>()};
    }
    return report;
}

json to_json(const ScheduleSearchResult& result) {
    return json{{"schema_version", 1},
                {"best_mask", mask_string(result.best_schedule)},
                {"best_value", result.best_value},
                {"evaluated_count", result.evaluated_count},
                {"value_SL", result.value_of_s_last},
                {"value_SF", result.value_of_s_first},
                {"rank_SL", result.rank_of_s_last},
                {"rank_SF", result.rank_of_s_first}};
}

json to_json(const ConcentrationReport& report) {
    return json{{"schema_version", 1},
                {"epsilon", report.epsilon},
                {"empirical_tail", report.empirical_tail},
                {"analytic_bound", report.analytic_bound},
                {"pass", report.pass}};
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure("cannot open '" + path + "' for writing");
    out << content;
    out.flush();
    if (!out) throw IoFailure("write to '" + path + "' failed");
}

namespace {

template <typename T>
void emit_generic(const T& value, OutputFormat format, const std::string& path,
                  void (*csv_writer)(std::ostream&, const T&)) {
    std::ostringstream buf;
    if (format == OutputFormat::Csv) {
        csv_writer(buf, value);
    } else {
        buf << to_json(value).dump(2) << "\n";
    }
    write_file(path, buf.str());
}

}  // namespace

void emit_trajectory(const Trajectory& traj, OutputFormat format, const std::string& path) {
    emit_generic(traj, format, path, &write_trajectory_csv);
}

void emit_report(const StrategyDiffReport& report, OutputFormat format, const std::string& path) {
    emit_generic(report, format, path, &write_report_csv);
}

void emit_search_result(const ScheduleSearchResult& result, OutputFormat format,
                        const std::string& path) {
    emit_generic(result, format, path, &write_search_result_csv);
}

void emit_concentration(const ConcentrationReport& report, OutputFormat format,
                        const std::string& path) {
    emit_generic(report, format, path, &write_concentration_csv);
}

}  // namespace opinion
