#include "dysonprop/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace dysonprop {

SchemaError::SchemaError(std::string field, const std::string& detail)
    : InputError("schema error at " + (field.empty() ? std::string("/") : field) + ": " + detail),
      field_(std::move(field)) {}

json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // Recover line and column from the byte offset.
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw SchemaError("", source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what());
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str(), path);
}

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from_json(const json& j, const std::string& field) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw SchemaError(field, "expected a number or a [re, im] pair");
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
  return out;
}

Vector vector_from_json(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw SchemaError(field, "expected a non-empty array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i], field + "/" + std::to_string(i));
  return v;
}

json matrix_to_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    out.push_back(std::move(row));
  }
  return out;
}

Matrix matrix_from_json(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw SchemaError(field, "expected a non-empty array of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array()) throw SchemaError(field + "/0", "expected an array");
  const std::size_t cols = j[0].size();
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string rf = field + "/" + std::to_string(r);
    if (!j[r].is_array() || j[r].size() != cols) throw SchemaError(rf, "row length differs from the first row");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          complex_from_json(j[r][c], rf + "/" + std::to_string(c));
  }
  return m;
}

json space_to_json(const GradedSpace& s) { return {{"dim", s.dim()}, {"grades", s.grades()}}; }

json linop_to_json(const LinOp& op) {
  json out = space_to_json(op.space());
  out["matrix"] = matrix_to_json(op.matrix());
  return out;
}

LinOp linop_from_json(const json& j, const std::string& field) {
  if (!j.is_object()) throw SchemaError(field, "expected an object");
  if (!j.contains("grades") || !j["grades"].is_array()) throw SchemaError(field + "/grades", "missing grade list");
  std::vector<double> grades;
  for (std::size_t i = 0; i < j["grades"].size(); ++i) {
    if (!j["grades"][i].is_number()) throw SchemaError(field + "/grades/" + std::to_string(i), "expected a number");
    grades.push_back(j["grades"][i].get<double>());
  }
  if (j.contains("dim") && (!j["dim"].is_number_integer() || j["dim"].get<std::size_t>() != grades.size()))
    throw SchemaError(field + "/dim", "does not match the number of grades");
  if (!j.contains("matrix")) throw SchemaError(field + "/matrix", "missing");
  Matrix m = matrix_from_json(j["matrix"], field + "/matrix");
  try {
    return LinOp(make_space(std::move(grades)), std::move(m));
  } catch (const AssumptionViolation&) {
    throw;
  } catch (const InputError& e) {
    throw SchemaError(field, e.what());
  }
}

json series_to_json(const SeriesResult& r) {
  return {{"achieved_order", r.achieved_order},
          {"tail_bound", r.tail_bound},
          {"quadrature_estimate", r.quadrature_estimate},
          {"max_bound_ratio", r.max_bound_ratio},
          {"grade_shift", r.cert.b},
          {"relative_bound", r.cert.C},
          {"support_grade", r.L_xi},
          {"norm_xi", r.norm_xi},
          {"grid", {{"t_start", r.grid.t_start}, {"t_end", r.grid.t_end}, {"panels", r.grid.panels},
                    {"nodes_per_panel", r.grid.nodes_per_panel}}},
          {"per_order_sup_norms", r.per_order_sup_norms},
          {"per_order_bounds", r.per_order_bounds},
          {"result", vector_to_json(r.partial_sum)}};
}

json trajectory_to_json(const Trajectory& tr) {
  json states = json::array();
  for (const auto& s : tr.states) states.push_back(vector_to_json(s));
  return {{"times", tr.times}, {"residuals", tr.residuals}, {"states", states}};
}

json track_to_json(const ObservableTrack& track, const std::vector<double>& residuals) {
  json mats = json::array();
  for (const auto& m : track.matrices) mats.push_back(matrix_to_json(m.matrix()));
  return {{"times", track.times}, {"residuals", residuals}, {"matrices", mats}};
}

json modespec_to_json(const ModeSpec& spec) {
  json bosons = json::array(), fermions = json::array();
  for (const auto& b : spec.bosons) bosons.push_back({{"label", b.label}, {"energy", b.energy}, {"cutoff", b.cutoff}});
  for (const auto& f : spec.fermions) fermions.push_back({{"label", f.label}, {"energy", f.energy}});
  json out = {{"bosons", bosons}, {"fermions", fermions}, {"scalar_modes", spec.scalar_modes}};
  if (spec.boson_cap) out["boson_cap"] = *spec.boson_cap;
  return out;
}

namespace {

const json& require_field(const json& j, const char* key, const std::string& field) {
  if (!j.is_object()) throw SchemaError(field, "expected an object");
  if (!j.contains(key)) throw SchemaError(field + "/" + key, "missing");
  return j[key];
}

double number_at(const json& j, const std::string& field) {
  if (!j.is_number()) throw SchemaError(field, "expected a number");
  return j.get<double>();
}

int integer_at(const json& j, const std::string& field) {
  if (!j.is_number_integer()) throw SchemaError(field, "expected an integer");
  return j.get<int>();
}

std::string string_at(const json& j, const std::string& field) {
  if (!j.is_string()) throw SchemaError(field, "expected a string");
  return j.get<std::string>();
}

std::vector<double> numbers_at(const json& j, const std::string& field) {
  if (!j.is_array()) throw SchemaError(field, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number_at(j[i], field + "/" + std::to_string(i)));
  return out;
}

std::vector<Vec3> points_at(const json& j, const std::string& field) {
  if (!j.is_array()) throw SchemaError(field, "expected an array of 3-vectors");
  std::vector<Vec3> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string f = field + "/" + std::to_string(i);
    const auto v = numbers_at(j[i], f);
    if (v.size() != 3) throw SchemaError(f, "expected 3 components");
    out.emplace_back(v[0], v[1], v[2]);
  }
  return out;
}

json points_to_json(const std::vector<Vec3>& ps) {
  json out = json::array();
  for (const auto& p : ps) out.push_back({p.x(), p.y(), p.z()});
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

ModeSpec modespec_from_json(const json& j, const std::string& field) {
  if (!j.is_object()) throw SchemaError(field, "expected an object");
  ModeSpec spec;
  if (j.contains("bosons")) {
    const json& bs = j["bosons"];
    if (!bs.is_array()) throw SchemaError(field + "/bosons", "expected an array");
    for (std::size_t i = 0; i < bs.size(); ++i) {
      const std::string f = field + "/bosons/" + std::to_string(i);
      BosonMode b;
      b.label = string_at(require_field(bs[i], "label", f), f + "/label");
      b.energy = number_at(require_field(bs[i], "energy", f), f + "/energy");
      b.cutoff = integer_at(require_field(bs[i], "cutoff", f), f + "/cutoff");
      spec.bosons.push_back(std::move(b));
    }
  }
  if (j.contains("fermions")) {
    const json& fs = j["fermions"];
    if (!fs.is_array()) throw SchemaError(field + "/fermions", "expected an array");
    for (std::size_t i = 0; i < fs.size(); ++i) {
      const std::string f = field + "/fermions/" + std::to_string(i);
      FermionMode m;
      m.label = string_at(require_field(fs[i], "label", f), f + "/label");
      m.energy = number_at(require_field(fs[i], "energy", f), f + "/energy");
      spec.fermions.push_back(std::move(m));
    }
  }
  if (j.contains("scalar_modes")) {
    const json& ss = j["scalar_modes"];
    if (!ss.is_array()) throw SchemaError(field + "/scalar_modes", "expected an array");
    for (std::size_t i = 0; i < ss.size(); ++i)
      spec.scalar_modes.push_back(string_at(ss[i], field + "/scalar_modes/" + std::to_string(i)));
  }
  if (j.contains("boson_cap")) spec.boson_cap = integer_at(j["boson_cap"], field + "/boson_cap");
  try {
    spec.validate();
  } catch (const InputError& e) {
    throw SchemaError(field, e.what());
  }
  return spec;
}

json qedconfig_to_json(const QedConfig& cfg) {
  return {{"momentum_points", points_to_json(cfg.momentum_points)},
          {"momentum_weights", cfg.momentum_weights},
          {"fermion_momenta", points_to_json(cfg.fermion_momenta)},
          {"fermion_weights", cfg.fermion_weights},
          {"positions", points_to_json(cfg.positions)},
          {"position_weights", cfg.position_weights},
          {"mass", cfg.mass},
          {"coupling", cfg.coupling},
          {"photon_cap", cfg.photon_cap},
          {"chi_sp", cfg.chi_sp},
          {"chi_ph", cfg.chi_ph},
          {"chi_el", cfg.chi_el}};
}

QedConfig qedconfig_from_json(const json& j, const std::string& field) {
  if (!j.is_object()) throw SchemaError(field, "expected an object");
  QedConfig cfg = default_toy_config();
  auto f = [&](const char* k) { return field + "/" + k; };
  if (j.contains("momentum_points")) {
    cfg.momentum_points = points_at(j["momentum_points"], f("momentum_points"));
    cfg.momentum_weights.assign(cfg.momentum_points.size(), 1.0);
  }
  if (j.contains("momentum_weights")) cfg.momentum_weights = numbers_at(j["momentum_weights"], f("momentum_weights"));
  if (j.contains("fermion_momenta")) {
    cfg.fermion_momenta = points_at(j["fermion_momenta"], f("fermion_momenta"));
    cfg.fermion_weights.assign(cfg.fermion_momenta.size(), 1.0);
  }
  if (j.contains("fermion_weights")) cfg.fermion_weights = numbers_at(j["fermion_weights"], f("fermion_weights"));
  if (j.contains("positions")) {
    cfg.positions = points_at(j["positions"], f("positions"));
    cfg.position_weights.assign(cfg.positions.size(), 1.0);
  }
  if (j.contains("position_weights")) cfg.position_weights = numbers_at(j["position_weights"], f("position_weights"));
  if (j.contains("mass")) cfg.mass = number_at(j["mass"], f("mass"));
  if (j.contains("coupling")) cfg.coupling = number_at(j["coupling"], f("coupling"));
  if (j.contains("photon_cap")) cfg.photon_cap = integer_at(j["photon_cap"], f("photon_cap"));
  if (j.contains("chi_sp")) cfg.chi_sp = numbers_at(j["chi_sp"], f("chi_sp"));
  if (j.contains("chi_ph")) cfg.chi_ph = numbers_at(j["chi_ph"], f("chi_ph"));
  if (j.contains("chi_el")) cfg.chi_el = numbers_at(j["chi_el"], f("chi_el"));
  try {
    cfg.validate();
  } catch (const DomainError&) {
    throw;
  } catch (const InputError& e) {
    throw SchemaError(field, e.what());
  }
  return cfg;
}

json report_to_json(const Report& r) {
  return {{"check_name", r.check_name},
          {"residual", r.residual},
          {"tolerance", r.tolerance},
          {"passed", r.passed},
          {"context", r.context}};
}

json reports_to_json(const std::vector<Report>& rs) {
  json out = json::array();
  for (const auto& r : rs) out.push_back(report_to_json(r));
  return out;
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string junit_xml(const std::string& suite, const std::vector<Report>& rs, const json& properties) {
  int failures = 0;
  for (const auto& r : rs) failures += r.passed ? 0 : 1;
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<testsuites tests=\"" << rs.size() << "\" failures=\"" << failures << "\">\n";
  os << "  <testsuite name=\"" << xml_escape(suite) << "\" tests=\"" << rs.size() << "\" failures=\"" << failures
     << "\" errors=\"0\">\n";
  os << "    <properties>\n";
  for (const auto& [k, v] : properties.items())
    os << "      <property name=\"" << xml_escape(k) << "\" value=\""
       << xml_escape(v.is_string() ? v.get<std::string>() : v.dump()) << "\"/>\n";
  os << "    </properties>\n";
  for (const auto& r : rs) {
    os << "    <testcase classname=\"" << xml_escape(suite) << "\" name=\"" << xml_escape(r.check_name) << "\"";
    if (r.passed) {
      os << "/>\n";
    } else {
      os << ">\n      <failure message=\"residual " << format_number(r.residual) << " exceeds tolerance "
         << format_number(r.tolerance) << "\">" << xml_escape(r.context.dump()) << "</failure>\n    </testcase>\n";
    }
  }
  os << "  </testsuite>\n</testsuites>\n";
  return os.str();
}

json convergence_table_to_json(const ConvergenceTable& tab) {
  return {{"alphas", tab.alphas},     {"n_max", tab.n_max},       {"norms", tab.norms},
          {"bounds", tab.bounds},     {"onset", tab.onset},       {"dominated", tab.dominated},
          {"worst_ratio", tab.worst_ratio}};
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += csv_field(cells[i]);
    }
    out += "\r\n";
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

void CsvTable::append_constant(const std::string& column, const std::string& value) {
  header.push_back(column);
  for (auto& r : rows) r.push_back(value);
}

CsvTable series_csv(const SeriesResult& r) {
  CsvTable t{{"order", "sup_norm", "apriori_bound"}, {}};
  for (std::size_t n = 0; n < r.per_order_sup_norms.size(); ++n)
    t.rows.push_back({std::to_string(n), format_number(r.per_order_sup_norms[n]),
                      n < r.per_order_bounds.size() ? format_number(r.per_order_bounds[n]) : ""});
  return t;
}

CsvTable trajectory_csv(const Trajectory& tr) {
  CsvTable t{{"time", "norm", "residual"}, {}};
  for (std::size_t i = 0; i < tr.times.size(); ++i)
    t.rows.push_back({format_number(tr.times[i]), format_number(tr.states[i].norm()),
                      i < tr.residuals.size() ? format_number(tr.residuals[i]) : ""});
  return t;
}

CsvTable track_csv(const ObservableTrack& track, const std::vector<double>& residuals) {
  CsvTable t{{"time", "norm", "residual"}, {}};
  const std::size_t n = track.times.size();
  for (std::size_t i = 0; i < n; ++i) {
    // Residuals exist at interior points only.
    const bool interior = i > 0 && i + 1 < n && i - 1 < residuals.size();
    t.rows.push_back({format_number(track.times[i]), format_number(spectral_norm(track.matrices[i].matrix())),
                      interior ? format_number(residuals[i - 1]) : ""});
  }
  return t;
}

CsvTable convergence_table_csv(const ConvergenceTable& tab) {
  CsvTable t;
  t.header.push_back("order");
  for (double a : tab.alphas) t.header.push_back("norm_alpha_" + format_number(a));
  for (double a : tab.alphas) t.header.push_back("bound_alpha_" + format_number(a));
  for (int n = 0; n <= tab.n_max; ++n) {
    std::vector<std::string> row{std::to_string(n)};
    for (double v : tab.norms[n]) row.push_back(format_number(v));
    for (double v : tab.bounds[n]) row.push_back(format_number(v));
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable reports_csv(const std::vector<Report>& rs) {
  CsvTable t{{"check_name", "residual", "tolerance", "passed"}, {}};
  for (const auto& r : rs)
    t.rows.push_back({r.check_name, format_number(r.residual), format_number(r.tolerance), r.passed ? "true" : "false"});
  return t;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
  if (!out) throw InputError("write failed for '" + path + "'");
}

}  // namespace dysonprop
