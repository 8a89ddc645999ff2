#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dysonprop/dyson.hpp"
#include "dysonprop/evolution.hpp"
#include "dysonprop/fock.hpp"
#include "dysonprop/oracle.hpp"
#include "dysonprop/qed.hpp"
#include "dysonprop/report.hpp"

namespace dysonprop {

using json = nlohmann::json;

// Schema violation; field is a JSON pointer to the offending entry.
class SchemaError : public InputError {
 public:
  SchemaError(std::string field, const std::string& detail);
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Parses JSON text; syntax errors become SchemaError carrying line and column.
json parse_json_text(const std::string& text, const std::string& source);
json read_json_file(const std::string& path);

// Complex entries are [re, im] pairs; plain numbers are read as real.
json complex_to_json(cplx z);
cplx complex_from_json(const json& j, const std::string& field);
json vector_to_json(const Vector& v);
Vector vector_from_json(const json& j, const std::string& field);
// Row-major array of rows.
json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const json& j, const std::string& field);

json space_to_json(const GradedSpace& s);
// {"dim", "grades", "matrix"}
json linop_to_json(const LinOp& op);
LinOp linop_from_json(const json& j, const std::string& field);

json series_to_json(const SeriesResult& r);
json trajectory_to_json(const Trajectory& tr);
json track_to_json(const ObservableTrack& track, const std::vector<double>& residuals);

json modespec_to_json(const ModeSpec& spec);
ModeSpec modespec_from_json(const json& j, const std::string& field);

json qedconfig_to_json(const QedConfig& cfg);
// Missing optional fields fall back to the default toy configuration.
QedConfig qedconfig_from_json(const json& j, const std::string& field);

json report_to_json(const Report& r);
json reports_to_json(const std::vector<Report>& rs);
std::string junit_xml(const std::string& suite, const std::vector<Report>& rs, const json& properties);

json convergence_table_to_json(const ConvergenceTable& tab);

// RFC 4180 tables; extra columns are appended to every row with a constant value.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::string str() const;
  void append_constant(const std::string& column, const std::string& value);
};

std::string format_number(double x);
CsvTable series_csv(const SeriesResult& r);  // order,sup_norm,apriori_bound
CsvTable trajectory_csv(const Trajectory& tr);  // time,norm,residual
CsvTable track_csv(const ObservableTrack& track, const std::vector<double>& residuals);  // time,norm,residual
CsvTable convergence_table_csv(const ConvergenceTable& tab);
CsvTable reports_csv(const std::vector<Report>& rs);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace dysonprop
