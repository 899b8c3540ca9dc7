#pragma once

#include "bbp/oracle.hpp"
#include "bbp/simulate.hpp"

#include <json.hpp>

#include <cstdio>
#include <sstream>
#include <string>

namespace bbp {

using Json = nlohmann::ordered_json;

inline constexpr const char* kResultsSchema = "bbp.results.v1";

// Shortest decimal that is stable across runs; plots do not need more.
inline std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.12g", value);
  return buffer;
}

template <typename T, typename Fn>
std::string join(const std::vector<T>& values, const char* sep, Fn&& render) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += sep;
    out += render(values[i]);
  }
  return out;
}

inline std::string schedule_exact_str(const ProbeSchedule& schedule) {
  return join(schedule.exact, ";", [](const Rat& c) { return rat_to_string(c); });
}

inline std::string schedule_feasible_str(const ProbeSchedule& schedule) {
  return join(schedule.feasible, ";",
              [](std::int64_t c) { return std::to_string(c); });
}

// ---- versioned simulation results schema -----------------------------------

inline std::string results_csv_header() {
  return std::string("# ") + kResultsSchema +
         "\nm,l,b_peak,policy,mode,blocks,seed,empirical_distortion,std_error,"
         "theoretical_distortion,zero_distortion\n";
}

inline std::string results_csv_row(const SimulationReport& report) {
  std::ostringstream out;
  out << report.cfg.m << ',' << report.cfg.l << ',' << report.cfg.b_peak << ','
      << report.policy_name << ',' << to_string(report.mode) << ',' << report.blocks << ','
      << report.seed.value << ',' << format_double(report.mean_distortion) << ','
      << format_double(report.std_error) << ','
      << format_double(report.theoretical.d_min.as_double()) << ','
      << (report.theoretical.zero_distortion ? "true" : "false") << '\n';
  return out.str();
}

// Class histogram as schema-preserving comment lines after a row.
inline std::string class_histogram_comment(const SimulationReport& report) {
  std::ostringstream out;
  for (const ClassHistogramRow& row : report.class_histogram) {
    out << "# class " << to_string(row.cls) << ": count=" << row.count
        << " probability=" << format_double(row.probability)
        << " mean_final_size=" << format_double(row.mean_final_size) << '\n';
  }
  return out.str();
}

inline Json to_json(const ClassHistogramRow& row) {
  return Json{{"class", to_string(row.cls)},
              {"count", row.count},
              {"probability", row.probability},
              {"mean_final_size", row.mean_final_size}};
}

inline Json to_json(const DistortionFormulaReport& report) {
  Json terms = Json::array();
  for (const Rat& term : report.terms) terms.push_back(rat_to_string(term));
  return Json{{"m", report.cfg.m},
              {"l", report.cfg.l},
              {"b_peak", report.cfg.b_peak},
              {"d_min", report.d_min.as_double()},
              {"d_min_exact", report.d_min.str()},
              {"zero_distortion", report.zero_distortion},
              {"schedule_exact", schedule_exact_str(report.schedule)},
              {"schedule_feasible", schedule_feasible_str(report.schedule)},
              {"terms", terms},
              {"residual", rat_to_string(report.residual)},
              {"feasible_value", report.feasible_value.as_double()},
              {"feasible_value_exact", report.feasible_value.str()}};
}

inline Json to_json(const SimulationReport& report) {
  Json row{{"m", report.cfg.m},
           {"l", report.cfg.l},
           {"b_peak", report.cfg.b_peak},
           {"policy", report.policy_name},
           {"mode", to_string(report.mode)},
           {"blocks", report.blocks},
           {"seed", report.seed.value},
           {"empirical_distortion", report.mean_distortion},
           {"std_error", report.std_error},
           {"error_count", report.error_count},
           {"theoretical_distortion", report.theoretical.d_min.as_double()},
           {"theoretical_exact", report.theoretical.d_min.str()},
           {"zero_distortion", report.theoretical.zero_distortion}};
  if (report.exact_interval) {
    row["exact_interval"] = Json{{"confidence", report.exact_interval->confidence},
                                 {"lower", report.exact_interval->lower},
                                 {"upper", report.exact_interval->upper}};
  } else {
    row["exact_interval"] = nullptr;
  }
  Json classes = Json::array();
  for (const ClassHistogramRow& histogram_row : report.class_histogram)
    classes.push_back(to_json(histogram_row));
  row["classes"] = classes;
  return row;
}

// ---- analyze rows -----------------------------------------------------------

inline std::string analyze_csv_header() {
  return std::string("# ") + kResultsSchema +
         "\nm,l,b_peak,d_min,d_min_exact,zero_distortion,schedule_exact,schedule_feasible,"
         "terms,residual,feasible_value,feasible_value_exact\n";
}

inline std::string analyze_csv_row(const DistortionFormulaReport& report) {
  std::ostringstream out;
  out << report.cfg.m << ',' << report.cfg.l << ',' << report.cfg.b_peak << ','
      << format_double(report.d_min.as_double()) << ',' << report.d_min.str() << ','
      << (report.zero_distortion ? "true" : "false") << ',' << schedule_exact_str(report.schedule)
      << ',' << schedule_feasible_str(report.schedule) << ','
      << join(report.terms, ";", [](const Rat& term) { return rat_to_string(term); }) << ','
      << rat_to_string(report.residual) << ','
      << format_double(report.feasible_value.as_double()) << ',' << report.feasible_value.str()
      << '\n';
  return out.str();
}

// ---- oracle rows ------------------------------------------------------------

inline void render_probe_table(const PolicyTree& tree, std::size_t node, std::int32_t depth,
                               std::string& history, Json& rows) {
  if (depth == tree.config().l) return;
  Json probe = Json::array();
  for (std::int32_t s : tree.probe_at(node).support()) probe.push_back(s);
  rows.push_back(Json{{"history", history.empty() ? "-" : history}, {"probe", probe}});
  for (std::int32_t y : {1, 0}) {
    history.push_back(y == 1 ? '1' : '0');
    render_probe_table(tree, PolicyTree::child(node, y), depth + 1, history, rows);
    history.pop_back();
  }
}

inline Json to_json(const OracleResult& result, const DistortionFormulaReport& formula,
                    const std::string& engine) {
  const BlockConfig& cfg = result.argmin_tree.config();
  Json argmin = Json::array();
  std::string history;
  render_probe_table(result.argmin_tree, 0, 0, history, argmin);
  return Json{{"m", cfg.m},
              {"l", cfg.l},
              {"b_peak", cfg.b_peak},
              {"engine", engine},
              {"oracle_min", result.min_distortion.as_double()},
              {"oracle_min_exact", result.min_distortion.str()},
              {"formula", formula.d_min.as_double()},
              {"formula_exact", formula.d_min.str()},
              {"equal", result.min_distortion == formula.d_min},
              {"policies_evaluated", result.policies_evaluated},
              {"argmin_tree", argmin}};
}

inline std::string oracle_csv_header() {
  return std::string("# ") + kResultsSchema +
         "\nm,l,b_peak,engine,oracle_min,oracle_min_exact,formula,formula_exact,equal,"
         "policies_evaluated\n";
}

inline std::string oracle_csv_row(const OracleResult& result,
                                  const DistortionFormulaReport& formula,
                                  const std::string& engine) {
  const BlockConfig& cfg = result.argmin_tree.config();
  std::ostringstream out;
  out << cfg.m << ',' << cfg.l << ',' << cfg.b_peak << ',' << engine << ','
      << format_double(result.min_distortion.as_double()) << ',' << result.min_distortion.str()
      << ',' << format_double(formula.d_min.as_double()) << ',' << formula.d_min.str() << ','
      << (result.min_distortion == formula.d_min ? "true" : "false") << ','
      << result.policies_evaluated << '\n';
  return out.str();
}

inline std::string probe_table_comment(const PolicyTree& tree) {
  Json rows = Json::array();
  std::string history;
  render_probe_table(tree, 0, 0, history, rows);
  std::ostringstream out;
  for (const Json& row : rows) {
    out << "# probe " << row["history"].get<std::string>() << " -> {";
    const auto& probe = row["probe"];
    for (std::size_t i = 0; i < probe.size(); ++i)
      out << (i ? "," : "") << probe[i].get<std::int64_t>();
    out << "}\n";
  }
  return out.str();
}

}  // namespace bbp
