#include "plurigeo/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <unistd.h>

#include "plurigeo/static_analysis.hpp"

namespace plurigeo {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorKind::config, msg); }

double get_number(const json& j, const std::string& key) {
  if (!j.is_number()) config_error("'" + key + "' must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) config_error("'" + key + "' must be finite");
  return v;
}

long get_integer(const json& j, const std::string& key) {
  if (!j.is_number_integer()) config_error("'" + key + "' must be an integer");
  return j.get<long>();
}

std::string get_string(const json& j, const std::string& key) {
  if (!j.is_string()) config_error("'" + key + "' must be a string");
  return j.get<std::string>();
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) config_error("'" + where + "' must be an object");
  for (const auto& item : j.items())
    if (!allowed.count(item.key())) config_error("unknown key '" + item.key() + "' in " + where);
}

cplx get_complex(const json& j, const std::string& key) {
  if (j.is_number()) return {get_number(j, key), 0.0};
  if (j.is_array() && j.size() == 2) return {get_number(j[0], key), get_number(j[1], key)};
  config_error("'" + key + "' entries must be numbers or [re, im] pairs");
}

json num(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

json dims_json(const Dims& d) { return json::array({d[0], d[1], d[2], d[3]}); }

/// Required keys and kinds; a report failing this is never written.
struct FieldSpec {
  const char* key;
  json::value_t type;
};

void validate_schema(const json& report, const std::vector<FieldSpec>& schema, const std::string& name) {
  for (const FieldSpec& f : schema) {
    if (!report.contains(f.key))
      throw Error(ErrorKind::io, name + ": missing field '" + f.key + "'");
    const json& v = report.at(f.key);
    const bool numeric = f.type == json::value_t::number_float;
    const bool ok = numeric ? (v.is_number() || v.is_string()) : v.type() == f.type;
    if (!ok) throw Error(ErrorKind::io, name + ": field '" + f.key + "' has the wrong type");
  }
}

const json::value_t t_num = json::value_t::number_float;
const json::value_t t_obj = json::value_t::object;
const json::value_t t_str = json::value_t::string;
const json::value_t t_bool = json::value_t::boolean;
const json::value_t t_arr = json::value_t::array;

void write_json(const std::filesystem::path& dir, const std::string& name, const json& report,
                const std::vector<FieldSpec>& schema) {
  validate_schema(report, schema, name);
  write_atomic((dir / name).string(), report.dump(2) + "\n");
}

std::filesystem::path prepare_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::io, "cannot create output directory " + dir + ": " + ec.message());
  return std::filesystem::path(dir);
}

MetricField load_field(const Scenario& sc) {
  if (sc.field_file) return load_binary(*sc.field_file);
  return sample(sc.family, sc.dims);
}

json field_source(const Scenario& sc, const MetricField& f) {
  json j;
  if (sc.field_file) {
    j["file"] = *sc.field_file;
  } else {
    j["family"] = sc.family.name();
    j["epsilon"] = sc.family.epsilon;
  }
  j["dims"] = dims_json(f.grid.dims);
  return j;
}

}  // namespace

Command parse_command(const std::string& s) {
  if (s == "identities") return Command::identities;
  if (s == "flow") return Command::flow;
  if (s == "static") return Command::static_;
  if (s == "hopf") return Command::hopf;
  config_error("unknown command '" + s + "'");
}

std::string to_string(Command c) {
  switch (c) {
    case Command::identities: return "identities";
    case Command::flow: return "flow";
    case Command::static_: return "static";
    case Command::hopf: return "hopf";
  }
  return "?";
}

void Scenario::check() const {
  family.check();
  for (int d : dims)
    if (d < 4 || d > 512 || d % 2 != 0) config_error("dims entries must be even and lie in [4, 512]");
  if (!(dt_safety > 0.0 && dt_safety <= 1.0)) config_error("dt.safety must lie in (0, 1]");
  if (fixed_dt && !(*fixed_dt > 0.0)) config_error("dt.fixed must be positive");
  if (!(t_end > 0.0 && t_end <= 1e6)) config_error("t_end must lie in (0, 1e6]");
  if (cadence < 1) config_error("cadence must be at least 1");
  if (count < 1 || count > 100000000) config_error("count must lie in [1, 1e8]");
  if (samples < 1 || samples > 100000000) config_error("samples must lie in [1, 1e8]");
  for (double t : {tolerances.identities, tolerances.hopf, tolerances.pluriclosed, tolerances.flat_gate})
    if (!(t > 0.0) || !std::isfinite(t)) config_error("tolerances must be positive");
  if (!(blowup_factor > 1.0)) config_error("blowup_factor must exceed 1");
  if (output_dir.empty()) config_error("output_dir must be nonempty");
  if (max_abs(c1L - c1L.adjoint()) > 0.0) config_error("c1L must be Hermitian");
  if (lambda && *lambda == 0.0) config_error("construction undefined at lambda = 0");
}

Scenario parse_scenario(const json& j) {
  reject_unknown(j,
                 {"command", "family", "dims", "dt", "t_end", "cadence", "variant", "seed", "count",
                  "samples", "tolerances", "output_dir", "blowup_factor", "field_file", "c1L", "lambda",
                  "points"},
                 "config");
  Scenario sc;
  if (!j.contains("command")) config_error("missing key 'command'");
  sc.command = parse_command(get_string(j.at("command"), "command"));

  if (j.contains("family")) {
    const json& f = j.at("family");
    reject_unknown(f, {"kind", "epsilon"}, "family");
    if (!f.contains("kind")) config_error("family requires 'kind'");
    try {
      sc.family.kind = parse_family_kind(get_string(f.at("kind"), "family.kind"));
    } catch (const Error& e) {
      config_error(e.what());
    }
    if (f.contains("epsilon")) sc.family.epsilon = get_number(f.at("epsilon"), "family.epsilon");
  }
  if (j.contains("dims")) {
    const json& d = j.at("dims");
    if (!d.is_array() || d.size() != 4) config_error("'dims' must be an array of four integers");
    for (int a = 0; a < 4; ++a) sc.dims[a] = static_cast<int>(get_integer(d[a], "dims"));
  }
  if (j.contains("dt")) {
    const json& d = j.at("dt");
    reject_unknown(d, {"safety", "fixed"}, "dt");
    if (d.contains("safety") && d.contains("fixed")) config_error("dt takes 'safety' or 'fixed', not both");
    if (d.contains("safety")) sc.dt_safety = get_number(d.at("safety"), "dt.safety");
    if (d.contains("fixed")) sc.fixed_dt = get_number(d.at("fixed"), "dt.fixed");
  }
  if (j.contains("t_end")) sc.t_end = get_number(j.at("t_end"), "t_end");
  if (j.contains("cadence")) {
    const long c = get_integer(j.at("cadence"), "cadence");
    if (c < 1 || c > 1000000000) config_error("cadence must lie in [1, 1e9]");
    sc.cadence = static_cast<int>(c);
  }
  if (j.contains("variant")) {
    try {
      sc.variant = parse_variant(get_string(j.at("variant"), "variant"));
    } catch (const Error& e) {
      config_error(e.what());
    }
  }
  if (j.contains("seed")) {
    const json& s = j.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
      config_error("'seed' must be a nonnegative integer");
    sc.seed = s.get<std::uint64_t>();
  }
  if (j.contains("count")) sc.count = get_integer(j.at("count"), "count");
  if (j.contains("samples")) sc.samples = get_integer(j.at("samples"), "samples");
  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    reject_unknown(t, {"identities", "hopf", "pluriclosed", "flat_gate"}, "tolerances");
    if (t.contains("identities")) sc.tolerances.identities = get_number(t.at("identities"), "tolerances.identities");
    if (t.contains("hopf")) sc.tolerances.hopf = get_number(t.at("hopf"), "tolerances.hopf");
    if (t.contains("pluriclosed")) sc.tolerances.pluriclosed = get_number(t.at("pluriclosed"), "tolerances.pluriclosed");
    if (t.contains("flat_gate")) sc.tolerances.flat_gate = get_number(t.at("flat_gate"), "tolerances.flat_gate");
  }
  if (j.contains("output_dir")) sc.output_dir = get_string(j.at("output_dir"), "output_dir");
  if (j.contains("blowup_factor")) sc.blowup_factor = get_number(j.at("blowup_factor"), "blowup_factor");
  if (j.contains("field_file")) sc.field_file = get_string(j.at("field_file"), "field_file");
  if (j.contains("c1L")) {
    const json& m = j.at("c1L");
    if (!m.is_array() || m.size() != 2 || !m[0].is_array() || m[0].size() != 2 || !m[1].is_array() ||
        m[1].size() != 2)
      config_error("'c1L' must be a 2x2 array");
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) sc.c1L(a, b) = get_complex(m[a][b], "c1L");
  }
  if (j.contains("lambda")) sc.lambda = get_number(j.at("lambda"), "lambda");
  if (j.contains("points")) {
    const json& p = j.at("points");
    if (!p.is_array()) config_error("'points' must be an array");
    for (const json& z : p) {
      if (!z.is_array() || z.size() != 2) config_error("each point must be [z1, z2]");
      sc.points.push_back({get_complex(z[0], "points"), get_complex(z[1], "points")});
    }
  }
  sc.check();
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open config " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    config_error(std::string("malformed config: ") + e.what());
  }
  return parse_scenario(j);
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::singular_metric:
    case ErrorKind::degenerate:
    case ErrorKind::blowup: return exit_numerical;
    default: return exit_usage;
  }
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string diagnostics_csv(const std::vector<DiagnosticsRecord>& series) {
  std::string out =
      "step,t,vol,degree,E_w,maxT2,maxOmega,pluriclosed_resid,kahler_resid,dvol_dt_measured,"
      "dvol_dt_predicted\n";
  for (const DiagnosticsRecord& r : series) {
    out += std::to_string(r.step);
    for (double v : {r.t, r.vol, r.degree, r.E_w, r.maxT2, r.maxOmega, r.pluriclosed_resid,
                     r.kahler_resid, r.dvol_dt_measured, r.dvol_dt_predicted}) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io, "cannot write " + tmp);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::remove(tmp.c_str());
      throw Error(ErrorKind::io, "write failed for " + path);
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::remove(tmp.c_str());
    throw Error(ErrorKind::io, "cannot rename onto " + path + ": " + ec.message());
  }
}

json identities_campaign(const Scenario& sc, int& code, std::ostream& log) {
  std::vector<std::string> names;
  std::vector<double> worst;
  double audit_gap = 0.0;
  auto absorb = [&](const IdentityReport& r) {
    for (const auto& [name, v] : r.residuals) {
      std::size_t k = 0;
      while (k < names.size() && names[k] != name) ++k;
      if (k == names.size()) {
        names.push_back(name);
        worst.push_back(0.0);
      }
      worst[k] = std::max(worst[k], v);
    }
    audit_gap = std::max(audit_gap, r.curvature_q2_half_scalar_gap);
  };
  for (long i = 0; i < sc.count; ++i) {
    const std::uint64_t s = sc.seed + static_cast<std::uint64_t>(i);
    absorb(identity_suite(random_jet(s, false), false));
    absorb(identity_suite(random_jet(s, true), true));
  }

  std::string first_failure;
  json ids = json::object();
  for (std::size_t k = 0; k < names.size(); ++k) {
    ids[names[k]] = num(worst[k]);
    if (first_failure.empty() && !(worst[k] <= sc.tolerances.identities)) first_failure = names[k];
  }

  // analytic families at seeded points
  std::mt19937_64 rng(sc.seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * pi), radius(0.5, 2.0);
  std::normal_distribution<double> normal;
  const std::vector<MetricFamily> families{{FamilyKind::flat, 0.0},
                                           {FamilyKind::kahler_potential, 0.4},
                                           {FamilyKind::torus_pluriclosed, 0.5},
                                           {FamilyKind::hopf, 0.0}};
  json fams = json::object();
  for (const MetricFamily& fam : families) {
    json fj = json::object();
    std::vector<double> suite_worst;
    std::vector<std::string> suite_names;
    const std::vector<Prediction> preds = family_predictions(fam);
    std::vector<double> pred_worst(preds.size(), 0.0);
    for (int p = 0; p < 16; ++p) {
      RealPoint x;
      if (fam.kind == FamilyKind::hopf) {
        std::array<double, 4> n{};
        double r2 = 0.0;
        for (double& c : n) {
          c = normal(rng);
          r2 += c * c;
        }
        const double rho = radius(rng) / std::sqrt(r2);
        for (int a = 0; a < 4; ++a) x[a] = n[a] * rho;
      } else {
        for (double& c : x) c = angle(rng);
      }
      const HermitianJet jet = jet_at(fam, x);
      const bool pc = pluriclosed_residual(jet) <= 1e-12;
      const IdentityReport r = identity_suite(jet, pc);
      for (const auto& [name, v] : r.residuals) {
        std::size_t k = 0;
        while (k < suite_names.size() && suite_names[k] != name) ++k;
        if (k == suite_names.size()) {
          suite_names.push_back(name);
          suite_worst.push_back(0.0);
        }
        suite_worst[k] = std::max(suite_worst[k], v);
      }
      for (std::size_t q = 0; q < preds.size(); ++q)
        pred_worst[q] = std::max(pred_worst[q], preds[q].residual(jet, x));
    }
    json sj = json::object(), pj = json::object();
    for (std::size_t k = 0; k < suite_names.size(); ++k) {
      sj[suite_names[k]] = num(suite_worst[k]);
      if (first_failure.empty() && !(suite_worst[k] <= sc.tolerances.identities))
        first_failure = fam.name() + "/" + suite_names[k];
    }
    for (std::size_t q = 0; q < preds.size(); ++q) {
      pj[preds[q].name] = num(pred_worst[q]);
      const double tol = std::max(preds[q].tolerance, sc.tolerances.identities);
      if (first_failure.empty() && !(pred_worst[q] <= tol)) first_failure = fam.name() + "/" + preds[q].name;
    }
    fj["identities"] = sj;
    fj["predictions"] = pj;
    fams[fam.name()] = fj;
  }

  json rep;
  rep["command"] = "identities";
  rep["seed"] = sc.seed;
  rep["count"] = sc.count;
  rep["tolerance"] = sc.tolerances.identities;
  rep["max_residuals"] = ids;
  rep["families"] = fams;
  rep["audit"] = {{"curvature_q2_half_scalar_gap", num(audit_gap)}};
  rep["status"] = first_failure.empty() ? "pass" : "fail";
  rep["first_failure"] = first_failure.empty() ? json(nullptr) : json(first_failure);
  write_json(prepare_dir(sc.output_dir), "identities_report.json", rep,
             {{"command", t_str}, {"seed", json::value_t::number_unsigned}, {"tolerance", t_num},
              {"max_residuals", t_obj}, {"families", t_obj}, {"audit", t_obj}, {"status", t_str}});
  if (!first_failure.empty()) {
    log << "identity failed: " << first_failure << "\n";
    code = exit_tolerance;
  } else {
    code = exit_ok;
  }
  return rep;
}

json flow_campaign(const Scenario& sc, int& code, std::ostream& log) {
  RunConfig cfg;
  cfg.initial = load_field(sc);
  cfg.variant = sc.variant;
  cfg.t_end = sc.t_end;
  cfg.cadence = sc.cadence;
  cfg.dt_safety = sc.dt_safety;
  cfg.fixed_dt = sc.fixed_dt;
  cfg.blowup_factor = sc.blowup_factor;
  cfg.pluriclosed_tol = sc.tolerances.pluriclosed;
  const RunResult res = run(cfg);

  const DiagnosticsRecord& first = res.series.front();
  const DiagnosticsRecord& last = res.series.back();
  double vol_law = 0.0, degree_drift = 0.0, slice_drift = 0.0, vol_drift = 0.0, b_max = 0.0,
         sym_dev = 0.0;
  for (const DiagnosticsRecord& r : res.series) {
    vol_law = std::max(vol_law, std::abs(r.dvol_dt_measured - r.dvol_dt_predicted) /
                                    std::max(std::abs(r.dvol_dt_measured), 1e-8));
    degree_drift = std::max(degree_drift, std::abs(r.degree - first.degree));
    slice_drift = std::max(slice_drift, std::abs(r.slice_integral - first.slice_integral));
    vol_drift = std::max(vol_drift, std::abs(r.vol - first.vol) / first.vol);
    b_max = std::max(b_max, r.pluriclosed_resid);
    sym_dev = std::max(sym_dev, r.jet_symmetry_deviation);
  }
  const double b_bound = std::min(1e-6, std::max(10.0 * first.pluriclosed_resid, 1e-12));

  json audit;
  audit["volume_law_max_rel_error"] = num(vol_law);
  audit["degree_drift"] = num(degree_drift);
  audit["slice_integral_drift"] = num(slice_drift);
  audit["volume_rel_drift"] = num(vol_drift);
  audit["pluriclosed_initial"] = num(first.pluriclosed_resid);
  audit["pluriclosed_max"] = num(b_max);
  audit["pluriclosed_bound"] = num(b_bound);
  audit["pluriclosed_preserved"] = b_max <= b_bound;
  audit["max_jet_symmetry_deviation"] = num(sym_dev);
  if (sc.variant == Variant::gflow && res.status == RunStatus::completed) {
    const TnormCheck tc = tnorm_evolution_check(res.final_state, res.dt);
    double term = 0.0, mean_res = 0.0, mean_term = 0.0;
    for (std::size_t i = 0; i < tc.residual.size(); ++i) {
      term = std::max(term, std::abs(tc.grad10_term[i]));
      mean_res += tc.residual[i];
      mean_term += tc.grad10_term[i];
    }
    json t;
    t["residual_max"] = num(tc.max_abs);
    t["residual_l2"] = num(tc.l2);
    t["grad10_term_max"] = num(term);
    t["attribution_ratio"] = std::abs(mean_term) > 1e-14 ? num(mean_res / mean_term) : json(nullptr);
    audit["tnorm_evolution"] = t;
  } else {
    audit["tnorm_evolution"] = nullptr;
  }

  auto record = [](const DiagnosticsRecord& r) {
    return json{{"step", r.step},
                {"t", num(r.t)},
                {"vol", num(r.vol)},
                {"degree", num(r.degree)},
                {"E_w", num(r.E_w)},
                {"maxT2", num(r.maxT2)},
                {"maxOmega", num(r.maxOmega)},
                {"pluriclosed_resid", num(r.pluriclosed_resid)},
                {"kahler_resid", num(r.kahler_resid)},
                {"slice_integral", num(r.slice_integral)}};
  };
  json sum;
  sum["command"] = "flow";
  sum["status"] = to_string(res.status);
  sum["message"] = res.message;
  sum["variant"] = to_string(sc.variant);
  sum["field"] = field_source(sc, cfg.initial);
  sum["dt"] = num(res.dt);
  sum["steps"] = res.final_state.step;
  sum["t_final"] = num(res.final_state.t);
  sum["initial"] = record(first);
  sum["final"] = record(last);
  sum["max_hermitian_deviation"] = num(res.max_hermitian_deviation);
  sum["convention_audit"] = audit;

  const std::filesystem::path dir = prepare_dir(sc.output_dir);
  const std::string csv = diagnostics_csv(res.series);
  validate_schema(sum, {{"status", t_str}, {"variant", t_str}, {"field", t_obj}, {"dt", t_num},
                        {"initial", t_obj}, {"final", t_obj}, {"convention_audit", t_obj}},
                  "summary.json");
  write_atomic((dir / "diagnostics.csv").string(), csv);
  write_json(dir, "summary.json", sum, {{"status", t_str}});
  if (res.status != RunStatus::completed) {
    log << "flow stopped: " << to_string(res.status) << " (" << res.message << ")\n";
    code = exit_numerical;
  } else {
    code = exit_ok;
  }
  return sum;
}

json static_campaign(const Scenario& sc, int& code, std::ostream& log) {
  const MetricField field = load_field(sc);
  const StaticReport r = static_report(field, sc.c1L);
  json rep = to_json(r);
  for (auto& item : rep.items())
    if (item.value().is_number()) item.value() = num(item.value().get<double>());
  rep["command"] = "static";
  rep["field"] = field_source(sc, field);
  json c1 = json::array();
  for (int a = 0; a < 2; ++a) {
    json row = json::array();
    for (int b = 0; b < 2; ++b) row.push_back(json::array({sc.c1L(a, b).real(), sc.c1L(a, b).imag()}));
    c1.push_back(row);
  }
  rep["c1L"] = c1;

  bool flat = true;
  for (const Mat2& g : field.values)
    if (max_abs(g - field.values.front()) != 0.0) flat = false;
  rep["flat_field"] = flat;
  std::string gate_failure;
  if (flat) {
    const std::vector<std::pair<const char*, double>> gates{
        {"lambda", r.lambda},           {"degree", r.degree},
        {"gap_volume", r.gap_volume},   {"gap_volume_check", r.gap_volume_check},
        {"gap_line_bundle", r.gap_line_bundle}, {"c1_squared", r.c1_squared},
        {"E_w", r.E_w}};
    for (const auto& [name, v] : gates)
      if (gate_failure.empty() && !(std::abs(v) <= sc.tolerances.flat_gate)) gate_failure = name;
  }
  rep["sanity_gate"] = gate_failure.empty() ? json("pass") : json("fail: " + gate_failure);

  if (sc.lambda) {
    const HermitianSymplectic hs = hermitian_symplectic(field, *sc.lambda);
    rep["hermitian_symplectic"] = {{"lambda", *sc.lambda},
                                   {"closedness_max", num(hs.closedness.max)},
                                   {"closedness_l2", num(hs.closedness.l2)},
                                   {"identity_max", num(hs.identity.max)},
                                   {"identity_l2", num(hs.identity.l2)},
                                   {"self_intersection", num(hs.self_intersection)},
                                   {"volume", num(hs.volume)}};
  } else {
    rep["hermitian_symplectic"] = nullptr;
  }
  write_json(prepare_dir(sc.output_dir), "static_report.json", rep,
             {{"lambda", t_num}, {"residual_l2", t_num}, {"residual_max", t_num}, {"degree", t_num},
              {"vol", t_num}, {"E_w", t_num}, {"gap_volume", t_num}, {"gap_line_bundle", t_num},
              {"c1_squared", t_num}, {"bound_lower", t_num}, {"bound_upper", t_num},
              {"field", t_obj}, {"c1L", t_arr}, {"flat_field", t_bool}, {"sanity_gate", t_str}});
  if (!gate_failure.empty()) {
    log << "flat-field sanity gate failed: " << gate_failure << "\n";
    code = exit_tolerance;
  } else {
    code = exit_ok;
  }
  return rep;
}

json hopf_campaign(const Scenario& sc, int& code, std::ostream& log) {
  const MetricFamily hopf{FamilyKind::hopf, 0.0};
  double err_S = 0.0, err_Q1 = 0.0, err_rhs = 0.0;
  auto probe = [&](const std::array<cplx, 2>& z) {
    const HermitianJet jet = jet_at(hopf, z);
    const double gn = max_abs(jet.g);
    err_S = std::max(err_S, max_abs(chern_curvature(jet).S - jet.g) / gn);
    err_Q1 = std::max(err_Q1, max_abs(torsion_quadratics(jet).Q1 - jet.g) / gn);
    err_rhs = std::max(err_rhs, max_abs(gflow_rhs(jet)) / gn);
  };
  for (const auto& z : sc.points) probe(z);

  std::mt19937_64 rng(sc.seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> radius(0.5, 2.0);
  for (long s = 0; s < sc.samples; ++s) {
    std::array<double, 4> n{};
    double r2 = 0.0;
    for (double& c : n) {
      c = normal(rng);
      r2 += c * c;
    }
    const double scale = radius(rng) / std::sqrt(r2);
    probe({cplx{n[0] * scale, n[1] * scale}, cplx{n[2] * scale, n[3] * scale}});
  }
  const bool pass = err_S <= sc.tolerances.hopf && err_Q1 <= sc.tolerances.hopf && err_rhs <= sc.tolerances.hopf;
  json rep;
  rep["command"] = "hopf";
  rep["seed"] = sc.seed;
  rep["samples"] = sc.samples;
  rep["explicit_points"] = sc.points.size();
  rep["tolerance"] = sc.tolerances.hopf;
  rep["max_rel_error_S"] = num(err_S);
  rep["max_rel_error_Q1"] = num(err_Q1);
  rep["max_rel_error_gflow_rhs"] = num(err_rhs);
  rep["status"] = pass ? "pass" : "fail";
  write_json(prepare_dir(sc.output_dir), "hopf_report.json", rep,
             {{"max_rel_error_S", t_num}, {"max_rel_error_Q1", t_num},
              {"max_rel_error_gflow_rhs", t_num}, {"status", t_str}});
  if (!pass) log << "hopf static check failed\n";
  code = pass ? exit_ok : exit_tolerance;
  return rep;
}

int run_scenario(const Scenario& sc, std::ostream& log) {
  int code = exit_ok;
  switch (sc.command) {
    case Command::identities: identities_campaign(sc, code, log); break;
    case Command::flow: flow_campaign(sc, code, log); break;
    case Command::static_: static_campaign(sc, code, log); break;
    case Command::hopf: hopf_campaign(sc, code, log); break;
  }
  return code;
}

}  // namespace plurigeo
