#include "lipdiff/scenario.hpp"

#include <cctype>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "lipdiff/catalog.hpp"
#include "lipdiff/derived_set.hpp"
#include "lipdiff/karcher.hpp"
#include "lipdiff/regularity.hpp"
#include "lipdiff/rng.hpp"
#include "lipdiff/theorem_lab.hpp"
#include "lipdiff/version.hpp"

namespace lipdiff::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

json vec_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json mat_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

Vec vec_from_json(const json& a, const char* field) {
  if (!a.is_array() || a.empty()) {
    throw ParseError(std::string("scenario: '") + field + "' must be a non-empty array");
  }
  Vec v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_number()) {
      throw ParseError(std::string("scenario: '") + field + "' must contain numbers");
    }
    v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
  }
  return v;
}

Mat mat_from_json(const json& rows, const char* field) {
  if (!rows.is_array() || rows.empty()) {
    throw ParseError(std::string("scenario: '") + field + "' must be a matrix");
  }
  const std::size_t r = rows.size();
  const std::size_t c = rows[0].is_array() ? rows[0].size() : 0;
  if (c == 0) throw ParseError(std::string("scenario: '") + field + "' must be a matrix");
  Mat m(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    if (!rows[i].is_array() || rows[i].size() != c) {
      throw ParseError(std::string("scenario: ragged matrix in '") + field + "'");
    }
    for (std::size_t j = 0; j < c; ++j) m(i, j) = rows[i][j].get<double>();
  }
  return m;
}

double positive_tol(const json& tolerances, const char* key, double fallback) {
  if (!tolerances.contains(key)) return fallback;
  const double v = tolerances.at(key).get<double>();
  if (!(v > 0.0)) {
    throw ParseError(std::string("scenario: tolerance '") + key + "' must be > 0");
  }
  return v;
}

derived::StepSchedule schedule_from(const json& s, double t0, double ratio, int count) {
  if (s.contains("schedule")) {
    const json& sch = s.at("schedule");
    t0 = sch.value("t0", t0);
    ratio = sch.value("ratio", ratio);
    count = sch.value("count", count);
  }
  return derived::StepSchedule(t0, ratio, count);
}

std::string resolve_path(const std::string& base_dir, const std::string& p) {
  fs::path path(p);
  if (path.is_absolute()) return p;
  return (fs::path(base_dir) / path).string();
}

std::vector<Mat> load_operands(const json& s, const char* files_key, const char* inline_key,
                               const std::string& base_dir) {
  std::vector<Mat> ops;
  if (s.contains(inline_key)) {
    for (const json& m : s.at(inline_key)) ops.push_back(mat_from_json(m, inline_key));
  }
  if (s.contains(files_key)) {
    for (const json& f : s.at(files_key)) {
      const std::string path = resolve_path(base_dir, f.get<std::string>());
      if (!fs::exists(path)) throw ParseError("scenario: file not found: " + path);
      ops.push_back(spd::load_matrix(path));
    }
  }
  return ops;
}

CatalogParams params_from(const json& map_obj, const std::string& base_dir) {
  CatalogParams params;
  if (map_obj.contains("A")) params.matrix = mat_from_json(map_obj.at("A"), "map.A");
  if (map_obj.contains("b")) params.offset = vec_from_json(map_obj.at("b"), "map.b");
  params.fixed_operands = load_operands(map_obj, "fixed", "fixed_inline", base_dir);
  if (map_obj.contains("y0")) {
    const std::string path = resolve_path(base_dir, map_obj.at("y0").get<std::string>());
    if (!fs::exists(path)) throw ParseError("scenario: file not found: " + path);
    params.y0 = spd::load_matrix(path);
  }
  if (map_obj.contains("y0_inline")) {
    params.y0 = mat_from_json(map_obj.at("y0_inline"), "map.y0_inline");
  }
  return params;
}

struct MapSelection {
  std::string catalog;
  std::string component;  // "", "g" or "f"
  CatalogParams params;
};

MapSelection map_selection(const json& s, const std::string& base_dir) {
  if (!s.contains("map")) throw ParseError("scenario: missing 'map'");
  const json& m = s.at("map");
  MapSelection sel;
  if (m.is_string()) {
    sel.catalog = m.get<std::string>();
  } else {
    if (!m.contains("catalog")) throw ParseError("scenario: map needs 'catalog'");
    sel.catalog = m.at("catalog").get<std::string>();
    sel.component = m.value("component", "");
    sel.params = params_from(m, base_dir);
  }
  return sel;
}

EvaluableMap resolve_map(const MapSelection& sel) {
  if (sel.component == "g") return catalog_get(sel.catalog, sel.params).g;
  if (sel.component == "f") return catalog_get(sel.catalog, sel.params).f;
  if (!sel.component.empty()) {
    throw ParseError("scenario: map component must be 'g' or 'f'");
  }
  return catalog_map(sel.catalog, sel.params);
}

json quotients_json(const derived::DerivedSetSample& s) {
  json q = json::array();
  for (const auto& [t, v] : s.quotients) q.push_back(json{{"t", t}, {"q", vec_json(v)}});
  return q;
}

json derived_json(const derived::DerivedSetSample& s) {
  json clusters = json::array();
  for (const auto& c : s.clusters) {
    clusters.push_back(json{{"representative", vec_json(c.representative)},
                            {"members", c.members},
                            {"spread", c.spread}});
  }
  return json{{"base", vec_json(s.base)},
              {"direction", vec_json(s.direction)},
              {"verdict", derived::verdict_name(s.verdict)},
              {"cluster_tol", s.cluster_tol},
              {"tail_start", s.tail_start},
              {"clusters", clusters},
              {"hull_lo", vec_json(s.hull_lo)},
              {"hull_hi", vec_json(s.hull_hi)},
              {"quotients", quotients_json(s)}};
}

json jacobian_json(const reg::JacobianReport& r) {
  json curve = json::array();
  for (const auto& [radius, residual] : r.frechet_curve) {
    curve.push_back(json{{"radius", radius}, {"residual", residual}});
  }
  return json{{"matrix", mat_json(r.jacobian)},
              {"step", r.step},
              {"scheme", r.scheme == reg::FdScheme::Central ? "central" : "forward"},
              {"singular_values", r.svd.singular_values},
              {"sigma_min", r.svd.sigma_min},
              {"sigma_max", r.svd.sigma_max},
              {"condition", finite_or_null(r.svd.condition)},
              {"invertible", r.svd.invertible},
              {"reason", r.svd.reason},
              {"frechet_curve", curve}};
}

json lipschitz_json(const reg::LipschitzEstimate& e) {
  json profile = json::array();
  for (const auto& p : e.profile) {
    profile.push_back(json{{"radius", p.radius}, {"estimate", p.estimate}, {"pairs", p.pairs}});
  }
  return json{{"center", vec_json(e.center)},
              {"profile", profile},
              {"verdict", reg::lipschitz_verdict_name(e.verdict)},
              {"max_estimate", e.max_estimate}};
}

json inverse_json(const InverseCheckReport& r) {
  return json{{"max_fg_residual", r.max_fg_residual},
              {"max_gf_residual", r.max_gf_residual},
              {"samples", r.samples},
              {"tol", r.tol},
              {"passed", r.passed}};
}

json identity_json(const lab::IdentityCheckReport& r) {
  json dirs = json::array();
  for (const auto& [dir, res] : r.residuals) {
    dirs.push_back(json{{"direction", vec_json(dir)}, {"residual", res}});
  }
  return json{{"max_residual", r.max_residual}, {"residuals", dirs}};
}

json certificate_json(const lab::ConverseIftCertificate& c) {
  return json{{"x", vec_json(c.x)},
              {"y", vec_json(c.y)},
              {"inverse_check", inverse_json(c.inverse)},
              {"jacobian_g", jacobian_json(c.jac_g)},
              {"jacobian_f", jacobian_json(c.jac_f)},
              {"lipschitz_f", lipschitz_json(c.lipschitz_f)},
              {"inverse_consistency", finite_or_null(c.inverse_consistency)},
              {"identity_check", identity_json(c.identity)},
              {"verdict", lab::cert_verdict_name(c.verdict)},
              {"reason", c.reason}};
}

int verdict_exit(lab::CertVerdict v) {
  switch (v) {
    case lab::CertVerdict::Certified:
      return 0;
    case lab::CertVerdict::Refuted:
      return 2;
    case lab::CertVerdict::Inconclusive:
      return 3;
  }
  return 1;
}

lab::CertifyConfig certify_config(const json& s) {
  lab::CertifyConfig cfg;
  cfg.seed = s.at("seed").get<std::uint64_t>();
  const json tol = s.value("tolerances", json::object());
  cfg.inverse_tol = positive_tol(tol, "inverse", cfg.inverse_tol);
  cfg.consistency_tol = positive_tol(tol, "consistency", cfg.consistency_tol);
  cfg.identity_tol = positive_tol(tol, "identity", cfg.identity_tol);
  cfg.inverse_samples = s.value("inverse_samples", cfg.inverse_samples);
  cfg.lipschitz_pairs = s.value("lipschitz_pairs", cfg.lipschitz_pairs);
  if (s.value("norm", "euclidean") == std::string("sup")) cfg.norm = Norm::Sup;
  return cfg;
}

json run_pipeline(const json& s, const std::string& base_dir, int& exit_code,
                  std::string& verdict) {
  const std::string pipeline = s.at("pipeline").get<std::string>();
  json reports = json::object();

  if (pipeline == "certify") {
    const MapSelection sel = map_selection(s, base_dir);
    MapPair pair = catalog_get(sel.catalog, sel.params);
    const Vec x = vec_from_json(s.at("point"), "point");
    const lab::ConverseIftCertificate cert =
        lab::converse_ift_certify(pair, x, certify_config(s));
    reports["certificate"] = certificate_json(cert);
    verdict = lab::cert_verdict_name(cert.verdict);
    if (cert.verdict == lab::CertVerdict::Refuted) verdict += "(" + cert.reason + ")";
    exit_code = verdict_exit(cert.verdict);
  } else if (pipeline == "chain-rule") {
    const MapSelection sel = map_selection(s, base_dir);
    const MapPair pair = catalog_get(sel.catalog, sel.params);
    const Vec x = vec_from_json(s.at("point"), "point");
    const Vec v = vec_from_json(s.at("direction"), "direction");
    const derived::StepSchedule schedule = schedule_from(s, 1e-2, 0.7, 44);
    lab::ChainRuleConfig cfg;
    cfg.seed = s.at("seed").get<std::uint64_t>();
    const json tol = s.value("tolerances", json::object());
    const double gap_tol = positive_tol(tol, "gap", 1e-6);
    const double hull_tol = positive_tol(tol, "hull", 0.05);
    cfg.directional_tol = positive_tol(tol, "directional", cfg.directional_tol);
    if (s.contains("cluster_tol")) cfg.cluster_tol = s.at("cluster_tol").get<double>();
    const lab::ChainRuleReport rep = lab::chain_rule_check(pair, x, v, schedule, cfg);
    json trace = json::array();
    for (const auto& e : rep.trace) {
      trace.push_back(json{{"t", e.t},
                           {"quotient_gap", e.quotient_gap},
                           {"bound", e.bound},
                           {"within_bound", e.within_bound}});
    }
    reports["chain_rule"] = json{{"x", vec_json(rep.x)},
                                 {"v", vec_json(rep.v)},
                                 {"g_directional", vec_json(rep.g_directional)},
                                 {"hausdorff_gap", rep.hausdorff_gap},
                                 {"hull_gap", rep.hull_gap},
                                 {"kappa", rep.kappa},
                                 {"all_within_bound", rep.all_within_bound},
                                 {"lhs", derived_json(rep.lhs)},
                                 {"rhs", derived_json(rep.rhs)},
                                 {"trace", trace}};
    const bool both_multi = rep.lhs.verdict == derived::Verdict::Multivalued &&
                            rep.rhs.verdict == derived::Verdict::Multivalued;
    const bool pass =
        rep.hausdorff_gap <= gap_tol || (both_multi && rep.hull_gap <= hull_tol);
    verdict = pass ? "chain-rule-holds" : "chain-rule-gap";
    exit_code = pass ? 0 : 2;
  } else if (pipeline == "derived-set") {
    const EvaluableMap map = resolve_map(map_selection(s, base_dir));
    const Vec y = vec_from_json(s.at("point"), "point");
    const Vec v = vec_from_json(s.at("direction"), "direction");
    const derived::StepSchedule schedule = schedule_from(s, 1e-2, 0.7, 60);
    const double cluster_tol = s.value("cluster_tol", 0.0);
    const derived::DerivedSetSample sample =
        derived::derived_set_estimate(map, y, v, schedule, cluster_tol);
    reports["derived_set"] = derived_json(sample);
    verdict = derived::verdict_name(sample.verdict);
    exit_code = 0;
  } else if (pipeline == "density-probe") {
    const MapSelection sel = map_selection(s, base_dir);
    MapPair pair = catalog_get(sel.catalog, sel.params);
    const Vec x = vec_from_json(s.at("point"), "point");
    const Vec w = vec_from_json(s.at("w"), "w");
    const derived::StepSchedule schedule = schedule_from(s, 1e-2, 0.7, 30);
    lab::DensityProbeConfig cfg;
    cfg.seed = s.at("seed").get<std::uint64_t>();
    const json tol = s.value("tolerances", json::object());
    const double step1_tol = positive_tol(tol, "step1", 1e-8);
    const lab::DensityProbeReport rep = lab::density_probe(pair, x, w, schedule, cfg);
    json trace = json::array();
    for (const auto& e : rep.trace) {
      trace.push_back(json{{"t", e.t},
                           {"z", vec_json(e.z)},
                           {"z_norm", e.z_norm},
                           {"step1_residual", e.step1_residual},
                           {"jac_gap", e.jac_gap}});
    }
    reports["density_probe"] = json{{"x", vec_json(rep.x)},
                                    {"y", vec_json(rep.y)},
                                    {"w", vec_json(rep.w)},
                                    {"jacobian", mat_json(rep.jacobian)},
                                    {"kappa", rep.kappa},
                                    {"max_z_norm", rep.max_z_norm},
                                    {"bound_ok", rep.bound_ok},
                                    {"max_step1_residual", rep.max_step1_residual},
                                    {"gap_decreasing", rep.gap_decreasing},
                                    {"final_gap", rep.final_gap},
                                    {"trace", trace}};
    const bool step1_ok = rep.max_step1_residual <= step1_tol;
    if (!rep.bound_ok) {
      verdict = "lipschitz-bound-violated";
      exit_code = 2;
    } else if (step1_ok && rep.gap_decreasing) {
      verdict = "density-probe-consistent";
      exit_code = 0;
    } else {
      verdict = "density-probe-inconclusive";
      exit_code = 3;
    }
  } else if (pipeline == "lipschitz") {
    const EvaluableMap map = resolve_map(map_selection(s, base_dir));
    const Vec center = vec_from_json(s.at("point"), "point");
    std::vector<double> radii;
    if (s.contains("radii")) {
      for (const json& r : s.at("radii")) radii.push_back(r.get<double>());
    } else {
      radii = {1e-2, 1e-3, 1e-4};
    }
    const int pairs = s.value("pairs", 256);
    const reg::LipschitzEstimate est = reg::lipschitz_estimate(
        map, center, radii, pairs, derive_seed(s.at("seed").get<std::uint64_t>(), "cli/lipschitz"));
    reports["lipschitz"] = lipschitz_json(est);
    verdict = reg::lipschitz_verdict_name(est.verdict);
    exit_code = est.verdict == reg::LipschitzVerdict::Lipschitz
                    ? 0
                    : (est.verdict == reg::LipschitzVerdict::Blowup ? 2 : 3);
  } else if (pipeline == "karcher-mean") {
    const std::vector<Mat> ops = load_operands(s, "operands", "operands_inline", base_dir);
    if (ops.empty()) throw ParseError("scenario: karcher-mean needs operands");
    const double tol = s.value("tol", 1e-10);
    if (!(tol > 0.0)) throw ParseError("scenario: tol must be > 0");
    const int max_iter = s.value("max_iter", 300);
    const spd::KarcherTrace trace = spd::karcher_mean(ops, tol, max_iter);
    json residuals = json::array();
    for (const auto& step : trace.steps) {
      residuals.push_back(json{{"iteration", step.k}, {"residual", step.residual}});
    }
    reports["karcher_mean"] = json{{"converged", trace.converged},
                                   {"iterations", trace.iterations},
                                   {"final_residual", trace.final_residual},
                                   {"mean", mat_json(trace.mean)},
                                   {"residuals", residuals}};
    verdict = trace.converged ? "converged" : "no-convergence";
    exit_code = trace.converged ? 0 : 3;
  } else if (pipeline == "karcher-regularity") {
    spd::KarcherProblem problem;
    problem.fixed = load_operands(s, "fixed", "fixed_inline", base_dir);
    if (problem.fixed.empty()) throw ParseError("scenario: karcher-regularity needs fixed operands");
    if (s.contains("y0")) {
      const std::string path = resolve_path(base_dir, s.at("y0").get<std::string>());
      if (!fs::exists(path)) throw ParseError("scenario: file not found: " + path);
      problem.y0 = spd::load_matrix(path);
    } else if (s.contains("y0_inline")) {
      problem.y0 = mat_from_json(s.at("y0_inline"), "y0_inline");
    } else {
      throw ParseError("scenario: karcher-regularity needs y0 or y0_inline");
    }
    lab::CertifyConfig cfg = certify_config(s);
    if (!s.value("tolerances", json::object()).contains("consistency")) {
      cfg.consistency_tol = 1e-4;  // two stacked solves behind the FD probes
    }
    const lab::ConverseIftCertificate cert = spd::karcher_regularity_pipeline(problem, cfg);
    reports["certificate"] = certificate_json(cert);
    verdict = lab::cert_verdict_name(cert.verdict);
    if (cert.verdict == lab::CertVerdict::Refuted) verdict += "(" + cert.reason + ")";
    exit_code = verdict_exit(cert.verdict);
  } else {
    throw ParseError("scenario: unknown pipeline '" + pipeline + "'");
  }
  return reports;
}

void validate_scenario(const json& s) {
  if (!s.is_object()) throw ParseError("scenario: top level must be an object");
  for (const char* field : {"name", "pipeline", "seed"}) {
    if (!s.contains(field)) {
      throw ParseError(std::string("scenario: missing required field '") + field + "'");
    }
  }
  if (!s.at("seed").is_number_unsigned() && !s.at("seed").is_number_integer()) {
    throw ParseError("scenario: 'seed' must be an integer (no wall-clock default)");
  }
  const std::string schema = s.value("schema", "lipdiff-scenario/1");
  if (schema != "lipdiff-scenario/1") {
    throw ParseError("scenario: unsupported schema '" + schema + "'");
  }
}

}  // namespace

RunResult run_scenario_json(const json& scenario, const std::string& base_dir) {
  const auto start = std::chrono::steady_clock::now();
  RunResult result;
  result.envelope = json{{"schema", "lipdiff-report/1"},
                         {"toolkit_version", kVersion},
                         {"scenario", scenario}};
  try {
    validate_scenario(scenario);
    std::string verdict;
    int exit_code = 1;
    result.envelope["reports"] = run_pipeline(scenario, base_dir, exit_code, verdict);
    result.envelope["verdict"] = verdict;
    result.envelope["exit_code"] = exit_code;
    result.exit_code = exit_code;
  } catch (const ParseError& e) {
    result.envelope["error"] = json{{"type", "parse-error"}, {"message", e.what()}};
    result.exit_code = 1;
  } catch (const HypothesisFailure& e) {
    result.envelope["error"] =
        json{{"type", "hypothesis-failure"}, {"kind", e.kind}, {"message", e.what()}};
    result.exit_code = 1;
  } catch (const Error& e) {
    result.envelope["error"] = json{{"type", "module-error"}, {"message", e.what()}};
    result.exit_code = 1;
  }
  if (result.exit_code == 1 && !result.envelope.contains("exit_code")) {
    result.envelope["exit_code"] = 1;
  }
  const auto end = std::chrono::steady_clock::now();
  result.envelope["wall_time_ms"] =
      std::chrono::duration<double, std::milli>(end - start).count();
  return result;
}

RunResult run_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    RunResult r;
    r.envelope = json{{"schema", "lipdiff-report/1"},
                      {"toolkit_version", kVersion},
                      {"error", json{{"type", "io-error"},
                                     {"message", "cannot open scenario file: " + path}}},
                      {"wall_time_ms", 0.0}};
    r.exit_code = 1;
    return r;
  }
  json scenario;
  try {
    scenario = json::parse(in);
  } catch (const json::parse_error& e) {
    RunResult r;
    r.envelope = json{{"schema", "lipdiff-report/1"},
                      {"toolkit_version", kVersion},
                      {"error", json{{"type", "parse-error"}, {"message", e.what()}}},
                      {"wall_time_ms", 0.0}};
    r.exit_code = 1;
    return r;
  }
  return run_scenario_json(scenario, fs::path(path).parent_path().string());
}

nlohmann::json strip_volatile(nlohmann::json envelope) {
  envelope.erase("wall_time_ms");
  return envelope;
}

namespace {

std::string sanitize(const std::string& name) {
  std::string out;
  for (const char c : name) {
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
  }
  return out.empty() ? "scenario" : out;
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::string>& rows, std::vector<std::string>& written) {
  std::ofstream out(path);
  if (!out) throw IoError("emit_profiles: cannot open " + path);
  out << header << "\n";
  for (const std::string& r : rows) out << r << "\n";
  written.push_back(path);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void quotient_csv(const json& sample, const std::string& path,
                  std::vector<std::string>& written) {
  const json& quotients = sample.at("quotients");
  const std::size_t dim = quotients.empty() ? 0 : quotients[0].at("q").size();
  std::string header = "t";
  for (std::size_t i = 0; i < dim; ++i) header += ",q" + std::to_string(i);
  std::vector<std::string> rows;
  for (const json& q : quotients) {
    std::string row = fmt(q.at("t").get<double>());
    for (const json& c : q.at("q")) row += "," + fmt(c.get<double>());
    rows.push_back(row);
  }
  write_csv(path, header, rows, written);
}

void certificate_profiles(const json& cert, const std::string& stem,
                          std::vector<std::string>& written) {
  std::vector<std::string> rows;
  for (const json& e : cert.at("jacobian_g").at("frechet_curve")) {
    rows.push_back(fmt(e.at("radius").get<double>()) + "," +
                   fmt(e.at("residual").get<double>()));
  }
  write_csv(stem + "__frechet.csv", "radius,residual", rows, written);

  rows.clear();
  for (const json& e : cert.at("lipschitz_f").at("profile")) {
    rows.push_back(fmt(e.at("radius").get<double>()) + "," +
                   fmt(e.at("estimate").get<double>()) + "," +
                   std::to_string(e.at("pairs").get<int>()));
  }
  write_csv(stem + "__lipschitz.csv", "radius,estimate,pairs", rows, written);

  rows.clear();
  int i = 0;
  for (const json& e : cert.at("identity_check").at("residuals")) {
    rows.push_back(std::to_string(i++) + "," + fmt(e.at("residual").get<double>()));
  }
  write_csv(stem + "__directions.csv", "direction_index,residual", rows, written);
}

}  // namespace

std::vector<std::string> emit_profiles(const json& envelope, const std::string& dir) {
  std::vector<std::string> written;
  if (!envelope.contains("reports")) return written;
  fs::create_directories(dir);
  const std::string name =
      sanitize(envelope.value("scenario", json::object()).value("name", "scenario"));
  const std::string stem = (fs::path(dir) / name).string();
  const json& reports = envelope.at("reports");

  if (reports.contains("certificate")) {
    certificate_profiles(reports.at("certificate"), stem, written);
  }
  if (reports.contains("derived_set")) {
    quotient_csv(reports.at("derived_set"), stem + "__quotients.csv", written);
  }
  if (reports.contains("chain_rule")) {
    quotient_csv(reports.at("chain_rule").at("lhs"), stem + "__lhs_quotients.csv", written);
    quotient_csv(reports.at("chain_rule").at("rhs"), stem + "__rhs_quotients.csv", written);
    std::vector<std::string> rows;
    for (const json& e : reports.at("chain_rule").at("trace")) {
      rows.push_back(fmt(e.at("t").get<double>()) + "," +
                     fmt(e.at("quotient_gap").get<double>()) + "," +
                     fmt(e.at("bound").get<double>()));
    }
    write_csv(stem + "__chain_trace.csv", "t,quotient_gap,bound", rows, written);
  }
  if (reports.contains("lipschitz")) {
    std::vector<std::string> rows;
    for (const json& e : reports.at("lipschitz").at("profile")) {
      rows.push_back(fmt(e.at("radius").get<double>()) + "," +
                     fmt(e.at("estimate").get<double>()) + "," +
                     std::to_string(e.at("pairs").get<int>()));
    }
    write_csv(stem + "__lipschitz.csv", "radius,estimate,pairs", rows, written);
  }
  if (reports.contains("density_probe")) {
    std::vector<std::string> rows;
    for (const json& e : reports.at("density_probe").at("trace")) {
      rows.push_back(fmt(e.at("t").get<double>()) + "," + fmt(e.at("z_norm").get<double>()) +
                     "," + fmt(e.at("step1_residual").get<double>()) + "," +
                     fmt(e.at("jac_gap").get<double>()));
    }
    write_csv(stem + "__density.csv", "t,z_norm,step1_residual,jac_gap", rows, written);
  }
  if (reports.contains("karcher_mean")) {
    std::vector<std::string> rows;
    for (const json& e : reports.at("karcher_mean").at("residuals")) {
      rows.push_back(std::to_string(e.at("iteration").get<int>()) + "," +
                     fmt(e.at("residual").get<double>()));
    }
    write_csv(stem + "__karcher_trace.csv", "iteration,residual", rows, written);
  }
  return written;
}

std::string catalog_text() {
  std::ostringstream os;
  os << "built-in inverse pairs:\n";
  for (const CatalogEntry& e : catalog_list()) {
    if (e.is_pair && e.inverse_pair) os << "  " << e.name << " — " << e.description << "\n";
  }
  os << "scenario pairs (not inverse pairs):\n";
  for (const CatalogEntry& e : catalog_list()) {
    if (e.is_pair && !e.inverse_pair) os << "  " << e.name << " — " << e.description << "\n";
  }
  os << "standalone maps:\n";
  for (const CatalogEntry& e : catalog_list()) {
    if (!e.is_pair) os << "  " << e.name << " — " << e.description << "\n";
  }
  return os.str();
}

}  // namespace lipdiff::cli
