#include "cli.hpp"

#include <CLI11.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>

#include "dysonprop/dyson.hpp"
#include "dysonprop/evolution.hpp"
#include "dysonprop/io.hpp"
#include "dysonprop/oracle.hpp"
#include "dysonprop/qed.hpp"
#include "dysonprop/random.hpp"
#include "dysonprop/random_models.hpp"

namespace dysonprop::cli {

namespace fs = std::filesystem;

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

namespace {

struct Context {
  std::string command;
  json config;
  fs::path out_dir;
  json meta;
  std::ostream& out;
};

double number_or(const json& cfg, const char* key, double fallback) {
  if (!cfg.contains(key)) return fallback;
  if (!cfg[key].is_number()) throw SchemaError(std::string("/") + key, "expected a number");
  return cfg[key].get<double>();
}

int int_or(const json& cfg, const char* key, int fallback, const std::string& prefix = "") {
  if (!cfg.contains(key)) return fallback;
  if (!cfg[key].is_number_integer()) throw SchemaError(prefix + "/" + key, "expected an integer");
  return cfg[key].get<int>();
}

std::uint64_t seed_or(const json& cfg, const char* key, std::uint64_t fallback, const std::string& prefix = "") {
  if (!cfg.contains(key)) return fallback;
  if (!cfg[key].is_number_unsigned()) throw SchemaError(prefix + "/" + key, "expected a non-negative integer");
  return cfg[key].get<std::uint64_t>();
}

std::vector<double> numbers_or(const json& cfg, const char* key, std::vector<double> fallback) {
  if (!cfg.contains(key)) return fallback;
  const json& a = cfg[key];
  if (!a.is_array() || a.empty()) throw SchemaError(std::string("/") + key, "expected a non-empty array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_number()) throw SchemaError("/" + std::string(key) + "/" + std::to_string(i), "expected a number");
    out.push_back(a[i].get<double>());
  }
  return out;
}

double positive_tol(const json& cfg, const char* key, double fallback) {
  const double t = number_or(cfg, key, fallback);
  if (!(t > 0) || !std::isfinite(t)) throw SchemaError(std::string("/") + key, "must be a positive number");
  return t;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(n == 1 ? b : a + (b - a) * i / (n - 1));
  return out;
}

struct Model {
  LinOp H0;
  LinOp H1;
  std::optional<QedModel> qed;
};

Model load_model(const json& cfg) {
  if (!cfg.contains("model")) throw SchemaError("/model", "missing");
  const json& m = cfg["model"];
  if (!m.is_object()) throw SchemaError("/model", "expected an object");
  if (m.contains("qed")) {
    QedModel q(qedconfig_from_json(m["qed"], "/model/qed"));
    LinOp H0 = q.H_fr(), H1 = q.H_int();
    return {H0, H1, std::move(q)};
  }
  if (m.contains("random")) {
    const json& r = m["random"];
    if (!r.is_object()) throw SchemaError("/model/random", "expected an object");
    const int dim = int_or(r, "dim", 8, "/model/random");
    const int b = int_or(r, "b", 1, "/model/random");
    const bool herm = r.value("hermitian", false);
    const double coupling = r.contains("coupling") ? r["coupling"].get<double>() : 0.5;
    try {
      auto rm = random_graded_model(seed_or(r, "seed", 1, "/model/random"), dim, b, herm, coupling);
      return {rm.H0, rm.H1, std::nullopt};
    } catch (const SchemaError&) {
      throw;
    } catch (const InputError& e) {
      throw SchemaError("/model/random", e.what());
    }
  }
  if (!m.contains("grades")) throw SchemaError("/model", "expected one of 'grades', 'random' or 'qed'");
  json h0 = {{"grades", m["grades"]}, {"matrix", m.value("H0", json())}};
  json h1 = {{"grades", m["grades"]}, {"matrix", m.value("H1", json())}};
  if (!m.contains("H0")) throw SchemaError("/model/H0", "missing");
  if (!m.contains("H1")) throw SchemaError("/model/H1", "missing");
  LinOp H0 = linop_from_json(h0, "/model");
  LinOp H1 = linop_from_json(h1, "/model");
  if (H0.matrix().rows() != H0.matrix().cols() || H0.matrix().rows() != static_cast<Eigen::Index>(H0.dim()))
    throw SchemaError("/model/H0", "shape does not match grades");
  return {H0, H1, std::nullopt};
}

Vector load_xi(const json& cfg, std::size_t dim) {
  if (!cfg.contains("xi")) {
    Vector e = Vector::Zero(static_cast<Eigen::Index>(dim));
    e(0) = 1.0;
    return e;
  }
  Vector xi = vector_from_json(cfg["xi"], "/xi");
  if (xi.size() != static_cast<Eigen::Index>(dim)) throw SchemaError("/xi", "length does not match the model");
  return xi;
}

void write_json(const Context& c, const std::string& name, json body) {
  body["meta"] = c.meta;
  write_text_file((c.out_dir / name).string(), body.dump(2) + "\n");
}

void write_csv(const Context& c, const std::string& name, CsvTable t) {
  t.append_constant("config_digest", c.meta["config_digest"].get<std::string>());
  t.append_constant("version", c.meta["version"].get<std::string>());
  write_text_file((c.out_dir / name).string(), t.str());
}

int summarize(const Context& c, const std::vector<Report>& rs) {
  bool ok = true;
  for (const auto& r : rs) {
    c.out << (r.passed ? "PASS " : "FAIL ") << r.check_name << " residual=" << format_number(r.residual)
          << " tol=" << format_number(r.tolerance) << "\n";
    ok = ok && r.passed;
  }
  return ok ? kOk : kChecksFailed;
}

int cmd_evolve(const Context& c) {
  const json& cfg = c.config;
  const Model m = load_model(cfg);
  const double tol = positive_tol(cfg, "tol", 1e-10);
  const double t_start = number_or(cfg, "t_start", 0.0);
  const double t_end = number_or(cfg, "t_end", 1.0);
  const double h = positive_tol(cfg, "step", kDefaultStep);
  const Vector xi = load_xi(cfg, m.H0.dim());
  const DysonEngine engine(m.H0, m.H1);
  const TimeGrid grid = engine.grid_for(support_grade(m.H0.space(), xi), xi.norm(), t_start, t_end, tol);
  const SeriesResult r = engine.evolve(xi, grid, tol);
  const std::vector<double> times = numbers_or(cfg, "times", linspace(0.0, t_end, 11));
  const Trajectory tr = schrodinger_trajectory(engine, xi, times, tol, h);
  write_json(c, "evolve.json", {{"series", series_to_json(r)}, {"trajectory", trajectory_to_json(tr)}});
  write_csv(c, "series.csv", series_csv(r));
  write_csv(c, "trajectory.csv", trajectory_csv(tr));
  c.out << "achieved_order=" << r.achieved_order << " tail_bound=" << format_number(r.tail_bound) << "\n";
  return kOk;
}

int cmd_heisenberg(const Context& c) {
  const json& cfg = c.config;
  const Model m = load_model(cfg);
  const double tol = positive_tol(cfg, "tol", 1e-10);
  const double t_end = number_or(cfg, "t_end", 1.0);
  const double h = positive_tol(cfg, "step", kDefaultStep);
  const double residual_tol = positive_tol(cfg, "residual_tol", 1e-4);
  if (!cfg.contains("observable")) throw SchemaError("/observable", "missing");
  const LinOp B(m.H0.space_ptr(), matrix_from_json(cfg["observable"], "/observable"));
  std::optional<double> b0;
  if (cfg.contains("b0")) b0 = number_or(cfg, "b0", 0.0);
  const std::string mode_name = cfg.value("mode", std::string("strong"));
  if (mode_name != "strong" && mode_name != "weak") throw SchemaError("/mode", "expected 'strong' or 'weak'");
  const HeisenbergMode mode = mode_name == "strong" ? HeisenbergMode::Strong : HeisenbergMode::Weak;
  const std::vector<double> times = numbers_or(cfg, "times", {t_end - h, t_end, t_end + h});
  const DysonEngine engine(m.H0, m.H1);
  const ObservableTrack track = heisenberg_track(engine, B, times, tol, b0);
  const LinOp H(m.H0.space_ptr(), m.H0.matrix() + m.H1.matrix());
  const std::vector<double> res =
      heisenberg_residuals(track, H, mode, seed_or(cfg, "seed", 20240611), int_or(cfg, "pairs", 20));
  const double worst = res.empty() ? 0.0 : *std::max_element(res.begin(), res.end());
  const std::vector<Report> rs{make_report("heisenberg_" + mode_name, worst, residual_tol, {{"step", times[1] - times[0]}})};
  write_json(c, "heisenberg.json", {{"track", track_to_json(track, res)}, {"reports", reports_to_json(rs)}});
  write_csv(c, "heisenberg.csv", track_csv(track, res));
  return summarize(c, rs);
}

HermitianPolicy parse_policy(const json& fleet) {
  const std::string p = fleet.value("hermitian", std::string("alternate"));
  if (p == "none") return HermitianPolicy::None;
  if (p == "alternate") return HermitianPolicy::Alternate;
  if (p == "all") return HermitianPolicy::All;
  throw SchemaError("/fleet/hermitian", "expected 'none', 'alternate' or 'all'");
}

int cmd_verify(const Context& c) {
  const json& cfg = c.config;
  const json fleet_cfg = cfg.value("fleet", json::object());
  const json suite_cfg = cfg.value("suite", json::object());
  if (!fleet_cfg.is_object()) throw SchemaError("/fleet", "expected an object");
  if (!suite_cfg.is_object()) throw SchemaError("/suite", "expected an object");
  const std::uint64_t seed = seed_or(cfg, "seed", 1);
  const int count = int_or(fleet_cfg, "count", 20, "/fleet");
  const int min_dim = int_or(fleet_cfg, "min_dim", 4, "/fleet");
  const int max_dim = int_or(fleet_cfg, "max_dim", 64, "/fleet");
  if (count < 1 || min_dim < 2 || max_dim < min_dim) throw SchemaError("/fleet", "invalid fleet size or dimensions");
  SuiteParams sp;
  sp.seed = seed_or(suite_cfg, "seed", sp.seed, "/suite");
  sp.tuples = int_or(suite_cfg, "tuples", sp.tuples, "/suite");
  sp.pairs = int_or(suite_cfg, "pairs", sp.pairs, "/suite");
  sp.probe_vectors = int_or(suite_cfg, "probe_vectors", sp.probe_vectors, "/suite");
  sp.time_range = number_or(suite_cfg, "time_range", sp.time_range);
  sp.tol = number_or(suite_cfg, "tol", sp.tol);
  sp.unitarity_tol = number_or(suite_cfg, "unitarity_tol", sp.unitarity_tol);
  sp.duality_tol = number_or(suite_cfg, "duality_tol", sp.duality_tol);
  sp.series_tol = positive_tol(cfg, "tol", sp.series_tol);
  const std::vector<double> oracle_times = numbers_or(cfg, "oracle_times", {0.25, 0.5, 1.0});
  const double oracle_tol = positive_tol(cfg, "oracle_tol", 1e-7);

  const auto fleet = model_fleet(seed, count, parse_policy(fleet_cfg), min_dim, max_dim);
  std::vector<Report> all;
  for (std::size_t i = 0; i < fleet.size(); ++i) {
    const auto& m = fleet[i];
    const DysonEngine engine(m.H0, m.H1);
    const std::string tag = "model" + std::to_string(i) + ".";
    double oracle = 0.0, bound_ratio = 0.0;
    const auto n = static_cast<Eigen::Index>(m.H0.dim());
    for (double t : oracle_times) {
      const Matrix U = engine.propagator(t, 0.0, sp.series_tol);
      oracle = std::max(oracle, spectral_norm(U - oracle_propagator(m.H0, m.H1, t, 0.0).matrix()));
      const BlockResult br = engine.evolve_block(Matrix::Identity(n, n),
                                                 engine.grid_for(0.0, 1.0, 0.0, t, sp.series_tol), sp.series_tol);
      bound_ratio = std::max(bound_ratio, br.max_bound_ratio);
    }
    const json ctx = {{"dim", n}, {"grade_shift", m.grade_shift}, {"hermitian", m.hermitian}, {"seed", m.seed}};
    all.push_back(make_report(tag + "oracle_equivalence", oracle, oracle_tol, ctx));
    all.push_back(make_report(tag + "apriori_bound_ratio", bound_ratio, 1.0 + 1e-6, ctx));
    for (auto r : identity_suite(engine, sp)) {
      r.check_name = tag + r.check_name;
      r.context["model_seed"] = m.seed;
      all.push_back(std::move(r));
    }
  }
  write_json(c, "verify.json", {{"reports", reports_to_json(all)}});
  write_text_file((c.out_dir / "verify.xml").string(), junit_xml("verify", all, c.meta));
  write_csv(c, "verify.csv", reports_csv(all));
  return summarize(c, all);
}

int cmd_qed_demo(const Context& c) {
  const json& cfg = c.config;
  const QedConfig qc = cfg.contains("qed") ? qedconfig_from_json(cfg["qed"], "/qed") : default_toy_config();
  const QedModel model(qc);
  const double tol = positive_tol(cfg, "tol", 1e-6);
  const std::vector<double> times = numbers_or(cfg, "times", {0.5, number_or(cfg, "t_end", 1.0)});
  const int pairs = int_or(cfg, "pairs", 50);
  const std::uint64_t seed = seed_or(cfg, "seed", 8);
  std::vector<Report> rs = structure_reports(model);
  rs.push_back(field_commutators(model));
  for (double t : times) {
    Report r = eta_unitarity_check(model, t, tol, pairs, seed);
    r.check_name += "_t=" + format_number(t);
    rs.push_back(std::move(r));
    const double leak = rs.back().context["leakage"].get<double>();
    rs.push_back(make_report("top_sector_leakage_t=" + format_number(t), leak, 1e-6,
                             {{"photon_cap", qc.photon_cap}}));
  }
  // Heisenberg equation for the smeared field A_0(x) at the first lattice point.
  const json hz = cfg.value("heisenberg", json::object());
  const double th = number_or(hz, "t", 0.5);
  const double h = number_or(hz, "step", kDefaultStep);
  const double heis_tol = number_or(hz, "residual_tol", 1e-4);
  const DysonEngine engine(model.H_fr(), model.H_int());
  const Matrix B = model.lift_photon(model.field_A(0, 0));
  Rng rng(seed + 1);
  const auto n = static_cast<Eigen::Index>(model.basis().dim());
  Matrix Xi(n, 4);
  for (Eigen::Index k = 0; k < Xi.cols(); ++k) Xi.col(k) = random_unit_vector(rng, n);
  const auto r1 = heisenberg_vector_residuals(engine, B, th, h, Xi, 1e-12);
  const auto r2 = heisenberg_vector_residuals(engine, B, th, h / 2, Xi, 1e-12);
  const double m1 = *std::max_element(r1.begin(), r1.end());
  const double m2 = *std::max_element(r2.begin(), r2.end());
  rs.push_back(make_report("heisenberg_field", m1, heis_tol, {{"t", th}, {"step", h}, {"residual_half_step", m2}}));
  rs.push_back(make_report("heisenberg_field_order", std::abs(m1 / m2 - 4.0) / 4.0, 0.2, {{"ratio", m1 / m2}}));
  write_json(c, "qed.json",
             {{"model",
               {{"dim", model.basis().dim()},
                {"M_el", model.M_el()},
                {"M_ph", model.M_ph()},
                {"grade_shift", model.H_int().certificate().b},
                {"relative_bound", model.H_int().certificate().C},
                {"config", qedconfig_to_json(qc)}}},
              {"reports", reports_to_json(rs)}});
  write_csv(c, "qed.csv", reports_csv(rs));
  return summarize(c, rs);
}

int cmd_convergence(const Context& c) {
  const json& cfg = c.config;
  const Model m = cfg.contains("model") ? load_model(cfg) : [] {
    QedModel q(default_toy_config());
    LinOp H0 = q.H_fr(), H1 = q.H_int();
    return Model{H0, H1, std::move(q)};
  }();
  const Vector xi = load_xi(cfg, m.H0.dim());
  const double t_end = number_or(cfg, "t_end", 1.0);
  const int n_max = int_or(cfg, "n_max", 12);
  const std::vector<double> alphas = numbers_or(cfg, "alphas", {0.0, 1.0, 2.0});
  TimeGrid grid{0.0, t_end, int_or(cfg, "panels", 4), int_or(cfg, "nodes_per_panel", 8)};
  const ConvergenceTable tab = appendix_convergence(m.H0, m.H1, xi, grid, alphas, n_max);
  int worst_onset = 0;
  bool decreasing = true;
  for (int o : tab.onset) {
    decreasing = decreasing && o >= 0;
    worst_onset = std::max(worst_onset, o);
  }
  std::vector<Report> rs{
      make_report("tail_domination", tab.worst_ratio, 1.001, {{"dominated", tab.dominated}}),
      make_report("strict_decrease", decreasing ? 0.0 : 1.0, 0.0, {{"onset", tab.onset}, {"worst_onset", worst_onset}})};
  write_json(c, "convergence.json", {{"table", convergence_table_to_json(tab)}, {"reports", reports_to_json(rs)}});
  write_csv(c, "convergence.csv", convergence_table_csv(tab));
  return summarize(c, rs);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dyson-series propagators on graded spaces", "dysonprop"};
  app.require_subcommand(1);
  std::string config_path, out_dir = ".";
  std::optional<double> tol, t_end;
  std::optional<std::uint64_t> seed;
  const std::vector<std::string> names{"evolve", "heisenberg", "verify", "qed-demo", "convergence"};
  const std::vector<std::string> blurbs{"evolve a state and write trajectory tables",
                                        "evolve an observable and check the Heisenberg equation",
                                        "run oracle and identity checks on a seeded model fleet",
                                        "build the QED toy model and check its structure",
                                        "tabulate grade-weighted series convergence"};
  for (std::size_t i = 0; i < names.size(); ++i) {
    auto* sub = app.add_subcommand(names[i], blurbs[i]);
    sub->add_option("-c,--config", config_path, "JSON configuration file")
        ->check(CLI::ExistingFile)
        ->required(names[i] == "evolve" || names[i] == "heisenberg");
    sub->add_option("-o,--out", out_dir, "output directory");
    sub->add_option("--tol", tol, "series tolerance");
    sub->add_option("--t-end", t_end, "final time");
    sub->add_option("--seed", seed, "random seed");
  }
  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kSchemaError;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    json cfg = config_path.empty() ? json::object() : read_json_file(config_path);
    if (!cfg.is_object()) throw SchemaError("", "configuration must be a JSON object");
    if (tol) cfg["tol"] = *tol;
    if (t_end) cfg["t_end"] = *t_end;
    if (seed) cfg["seed"] = *seed;
    fs::create_directories(out_dir);
    Context c{command, cfg, fs::path(out_dir), json::object(), out};
    c.meta = {{"command", command}, {"version", DYSONPROP_VERSION}, {"config_digest", sha256_hex(cfg.dump())}};
    if (command == "evolve") return cmd_evolve(c);
    if (command == "heisenberg") return cmd_heisenberg(c);
    if (command == "verify") return cmd_verify(c);
    if (command == "qed-demo") return cmd_qed_demo(c);
    return cmd_convergence(c);
  } catch (const SchemaError& e) {
    err << e.what() << "\n";
    return kSchemaError;
  } catch (const AssumptionViolation& e) {
    err << e.what() << "\n";
    return kAssumptionError;
  } catch (const TruncationError& e) {
    err << e.what() << " (last tail bound " << format_number(e.tail_bound()) << ")\n";
    return kTruncationError;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kSchemaError;
  } catch (const json::exception& e) {
    err << "schema error: " << e.what() << "\n";
    return kSchemaError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kChecksFailed;
  }
}

}  // namespace dysonprop::cli
