#include "wasse/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "wasse/case_parser.hpp"
#include "wasse/errors.hpp"

namespace wasse {

namespace {

using nlohmann::json;

void expect_object(const json& j, const std::string& ctx) {
  if (!j.is_object()) throw ConfigError(ctx + ": expected an object");
}

void check_keys(const json& j, const std::string& ctx, const std::set<std::string>& allowed) {
  expect_object(j, ctx);
  for (const auto& [key, value] : j.items()) {
    if (allowed.find(key) == allowed.end()) {
      throw ConfigError(ctx + ": unknown key \"" + key + "\"");
    }
  }
}

double get_number(const json& j, const std::string& ctx) {
  if (!j.is_number()) throw ConfigError(ctx + ": expected a number");
  return j.get<double>();
}

int get_int(const json& j, const std::string& ctx) {
  if (!j.is_number_integer()) throw ConfigError(ctx + ": expected an integer");
  return j.get<int>();
}

bool get_bool(const json& j, const std::string& ctx) {
  if (!j.is_boolean()) throw ConfigError(ctx + ": expected a boolean");
  return j.get<bool>();
}

std::string get_string(const json& j, const std::string& ctx) {
  if (!j.is_string()) throw ConfigError(ctx + ": expected a string");
  return j.get<std::string>();
}

int parse_id_key(const std::string& key, const std::string& ctx) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(key, &pos);
    if (pos != key.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(ctx + ": key \"" + key + "\" is not an integer");
  }
}

}  // namespace

NoiseSpec noise_spec_from_json(const json& j, const std::string& ctx) {
  if (!j.is_array() || j.empty()) {
    throw ConfigError(ctx + ": expected a non-empty array of mixture components");
  }
  std::vector<NoiseComponent> comps;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string cctx = ctx + "[" + std::to_string(i) + "]";
    check_keys(j[i], cctx, {"weight", "kind", "mean", "variance"});
    NoiseComponent c;
    if (j[i].contains("weight")) c.weight = get_number(j[i]["weight"], cctx + ".weight");
    if (j[i].contains("mean")) c.mean = get_number(j[i]["mean"], cctx + ".mean");
    if (!j[i].contains("variance")) throw ConfigError(cctx + ": missing \"variance\"");
    c.variance = get_number(j[i]["variance"], cctx + ".variance");
    const std::string kind =
        j[i].contains("kind") ? get_string(j[i]["kind"], cctx + ".kind") : "gaussian";
    if (kind == "gaussian") {
      c.kind = NoiseComponent::Kind::Gaussian;
    } else if (kind == "laplace") {
      c.kind = NoiseComponent::Kind::Laplace;
    } else {
      throw ConfigError(cctx + ".kind: expected \"gaussian\" or \"laplace\"");
    }
    comps.push_back(c);
  }
  try {
    return NoiseSpec(std::move(comps));
  } catch (const ConfigError& e) {
    throw ConfigError(ctx + ": " + e.what());
  }
}

json noise_spec_to_json(const NoiseSpec& spec) {
  json arr = json::array();
  for (const NoiseComponent& c : spec.components()) {
    arr.push_back({{"weight", c.weight},
                   {"kind", c.kind == NoiseComponent::Kind::Gaussian ? "gaussian" : "laplace"},
                   {"mean", c.mean},
                   {"variance", c.variance}});
  }
  return arr;
}

namespace {

void parse_model(const json& j, ModelParams& m) {
  check_keys(j, "model", {"f", "process_variance", "f_override", "process_variance_override"});
  if (j.contains("f")) m.f = get_number(j["f"], "model.f");
  if (j.contains("process_variance")) {
    m.q_var = get_number(j["process_variance"], "model.process_variance");
  }
  if (j.contains("f_override")) {
    expect_object(j["f_override"], "model.f_override");
    for (const auto& [key, value] : j["f_override"].items()) {
      m.f_override[parse_id_key(key, "model.f_override")] =
          get_number(value, "model.f_override." + key);
    }
  }
  if (j.contains("process_variance_override")) {
    expect_object(j["process_variance_override"], "model.process_variance_override");
    for (const auto& [key, value] : j["process_variance_override"].items()) {
      m.q_var_override[parse_id_key(key, "model.process_variance_override")] =
          get_number(value, "model.process_variance_override." + key);
    }
  }
}

void parse_estimator(const json& j, EstimatorConfig& e) {
  check_keys(j, "estimator", {"ut", "kernel", "vb", "correction", "init_P", "init_R_nominal"});
  if (j.contains("ut")) {
    check_keys(j["ut"], "estimator.ut", {"lambda", "eta", "tau"});
    if (j["ut"].contains("lambda")) e.ut.lambda = get_number(j["ut"]["lambda"], "ut.lambda");
    if (j["ut"].contains("eta")) e.ut.eta = get_number(j["ut"]["eta"], "ut.eta");
    if (j["ut"].contains("tau")) e.ut.tau = get_number(j["ut"]["tau"], "ut.tau");
  }
  if (j.contains("kernel")) {
    check_keys(j["kernel"], "estimator.kernel", {"c", "gamma", "xi", "denominator"});
    if (j["kernel"].contains("c")) e.kernel.c = get_number(j["kernel"]["c"], "kernel.c");
    if (j["kernel"].contains("gamma")) {
      e.kernel.gamma = get_number(j["kernel"]["gamma"], "kernel.gamma");
    }
    if (j["kernel"].contains("xi")) e.kernel.xi = get_number(j["kernel"]["xi"], "kernel.xi");
    if (j["kernel"].contains("denominator")) {
      const std::string d = get_string(j["kernel"]["denominator"], "kernel.denominator");
      if (d == "gamma_sq") {
        e.kernel.denominator = KernelParams::Denominator::GammaSq;
      } else if (d == "gamma_xi") {
        e.kernel.denominator = KernelParams::Denominator::GammaXi;
      } else {
        throw ConfigError("kernel.denominator: expected \"gamma_sq\" or \"gamma_xi\"");
      }
    }
  }
  if (j.contains("vb")) {
    check_keys(j["vb"], "estimator.vb",
               {"iterations", "varsigma", "zeta", "enabled", "early_exit_tol",
                "sigma_from_posterior"});
    const json& v = j["vb"];
    if (v.contains("iterations")) e.vb.iterations = get_int(v["iterations"], "vb.iterations");
    if (v.contains("varsigma")) e.vb.varsigma = get_number(v["varsigma"], "vb.varsigma");
    if (v.contains("zeta")) e.vb.zeta = get_number(v["zeta"], "vb.zeta");
    if (v.contains("enabled")) e.vb.enabled = get_bool(v["enabled"], "vb.enabled");
    if (v.contains("early_exit_tol")) {
      e.vb.early_exit_tol = get_number(v["early_exit_tol"], "vb.early_exit_tol");
    }
    if (v.contains("sigma_from_posterior")) {
      e.vb.sigma_from_posterior = get_bool(v["sigma_from_posterior"], "vb.sigma_from_posterior");
    }
  }
  if (j.contains("correction")) {
    check_keys(j["correction"], "estimator.correction",
               {"max_iter", "tol", "weight_form", "force_uniform_weights"});
    const json& c = j["correction"];
    if (c.contains("max_iter")) {
      e.correction.max_iter = get_int(c["max_iter"], "correction.max_iter");
    }
    if (c.contains("tol")) e.correction.tol = get_number(c["tol"], "correction.tol");
    if (c.contains("weight_form")) {
      const std::string f = get_string(c["weight_form"], "correction.weight_form");
      if (f == "inverse") {
        e.correction.weight_form = CorrectionSettings::WeightForm::Inverse;
      } else if (f == "printed") {
        e.correction.weight_form = CorrectionSettings::WeightForm::Printed;
      } else {
        throw ConfigError("correction.weight_form: expected \"inverse\" or \"printed\"");
      }
    }
    if (c.contains("force_uniform_weights")) {
      e.correction.force_uniform_weights =
          get_bool(c["force_uniform_weights"], "correction.force_uniform_weights");
    }
  }
  if (j.contains("init_P")) e.init_P = get_number(j["init_P"], "estimator.init_P");
  if (j.contains("init_R_nominal")) {
    e.init_R_nominal = get_number(j["init_R_nominal"], "estimator.init_R_nominal");
  }
}

void parse_fusion(const json& j, FusionConfig& f) {
  check_keys(j, "fusion", {"enabled", "closed_loop", "reference", "edge_variance"});
  if (j.contains("enabled")) f.enabled = get_bool(j["enabled"], "fusion.enabled");
  if (j.contains("closed_loop")) f.closed_loop = get_bool(j["closed_loop"], "fusion.closed_loop");
  if (j.contains("reference")) {
    const std::string r = get_string(j["reference"], "fusion.reference");
    if (r == "reconstructed") {
      f.reference = NeighborReference::kReconstructed;
    } else if (r == "prior_mean") {
      f.reference = NeighborReference::kPriorMean;
    } else {
      throw ConfigError("fusion.reference: expected \"reconstructed\" or \"prior_mean\"");
    }
  }
  if (j.contains("edge_variance")) {
    f.edge_variance = get_number(j["edge_variance"], "fusion.edge_variance");
  }
}

}  // namespace

Scenario scenario_from_json(const json& j) {
  check_keys(j, "scenario",
             {"name", "case", "case_file", "partition", "model", "placement", "noise",
              "estimator", "fusion", "baseline", "algorithm", "steps", "runs", "seed",
              "anomaly"});
  Scenario s;
  if (j.contains("name")) s.name = get_string(j["name"], "name");
  if (j.contains("case")) s.case_name = get_string(j["case"], "case");
  if (j.contains("case_file")) s.case_file = get_string(j["case_file"], "case_file");
  if (j.contains("partition")) {
    expect_object(j["partition"], "partition");
    for (const auto& [key, value] : j["partition"].items()) {
      s.partition[parse_id_key(key, "partition")] = get_int(value, "partition." + key);
    }
  }
  if (j.contains("model")) parse_model(j["model"], s.model);
  if (j.contains("placement")) {
    expect_object(j["placement"], "placement");
    for (const auto& [key, value] : j["placement"].items()) {
      const int region = parse_id_key(key, "placement");
      if (!value.is_array()) throw ConfigError("placement." + key + ": expected an array");
      std::vector<int> buses;
      for (const auto& b : value) buses.push_back(get_int(b, "placement." + key));
      s.placement.pmu[region] = std::move(buses);
    }
  }
  if (j.contains("noise")) {
    check_keys(j["noise"], "noise", {"scada_v", "scada_pq", "pmu", "edge"});
    const json& n = j["noise"];
    if (n.contains("scada_v")) s.noise.scada_v = noise_spec_from_json(n["scada_v"], "noise.scada_v");
    if (n.contains("scada_pq")) {
      s.noise.scada_pq = noise_spec_from_json(n["scada_pq"], "noise.scada_pq");
    }
    if (n.contains("pmu")) s.noise.pmu = noise_spec_from_json(n["pmu"], "noise.pmu");
    if (n.contains("edge")) s.noise.edge = noise_spec_from_json(n["edge"], "noise.edge");
  }
  if (j.contains("estimator")) parse_estimator(j["estimator"], s.estimator);
  if (j.contains("fusion")) parse_fusion(j["fusion"], s.fusion);
  if (j.contains("baseline")) {
    check_keys(j["baseline"], "baseline", {"r_policy"});
    if (j["baseline"].contains("r_policy")) {
      const std::string p = get_string(j["baseline"]["r_policy"], "baseline.r_policy");
      if (p == "true_variance") {
        s.baseline.r_policy = BaselineConfig::RPolicy::kTrueVariance;
      } else if (p == "nominal") {
        s.baseline.r_policy = BaselineConfig::RPolicy::kNominal;
      } else {
        throw ConfigError("baseline.r_policy: expected \"true_variance\" or \"nominal\"");
      }
    }
  }
  if (j.contains("algorithm")) {
    const std::string a = get_string(j["algorithm"], "algorithm");
    if (a == "dmgst_vbukf") {
      s.algorithm = Algorithm::kProposed;
    } else if (a == "ukf") {
      s.algorithm = Algorithm::kBaseline;
    } else if (a == "both") {
      s.algorithm = Algorithm::kBoth;
    } else {
      throw ConfigError("algorithm: expected \"dmgst_vbukf\", \"ukf\", or \"both\"");
    }
  }
  if (j.contains("steps")) s.steps = get_int(j["steps"], "steps");
  if (j.contains("runs")) s.runs = get_int(j["runs"], "runs");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer() && !j["seed"].is_number_unsigned()) {
      throw ConfigError("seed: expected an integer");
    }
    s.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("anomaly")) {
    check_keys(j["anomaly"], "anomaly", {"step", "region", "factor"});
    s.anomaly.enabled = true;
    const json& a = j["anomaly"];
    if (a.contains("step")) s.anomaly.step = get_int(a["step"], "anomaly.step");
    if (a.contains("region")) s.anomaly.region = get_int(a["region"], "anomaly.region");
    if (a.contains("factor")) s.anomaly.factor = get_number(a["factor"], "anomaly.factor");
  }
  validate_scenario(s);
  return s;
}

json scenario_to_json(const Scenario& s) {
  json j;
  j["name"] = s.name;
  if (!s.case_file.empty()) {
    j["case_file"] = s.case_file;
  } else {
    j["case"] = s.case_name;
  }
  if (!s.partition.empty()) {
    json p = json::object();
    for (const auto& [bus, region] : s.partition) p[std::to_string(bus)] = region;
    j["partition"] = p;
  }
  j["model"] = {{"f", s.model.f}, {"process_variance", s.model.q_var}};
  if (!s.placement.pmu.empty()) {
    json p = json::object();
    for (const auto& [region, buses] : s.placement.pmu) p[std::to_string(region)] = buses;
    j["placement"] = p;
  }
  j["noise"] = {{"scada_v", noise_spec_to_json(s.noise.scada_v)},
                {"scada_pq", noise_spec_to_json(s.noise.scada_pq)},
                {"pmu", noise_spec_to_json(s.noise.pmu)},
                {"edge", noise_spec_to_json(s.noise.edge)}};
  j["estimator"] = {
      {"ut", {{"lambda", s.estimator.ut.lambda}, {"eta", s.estimator.ut.eta},
              {"tau", s.estimator.ut.tau}}},
      {"kernel",
       {{"c", s.estimator.kernel.c},
        {"gamma", s.estimator.kernel.gamma},
        {"xi", s.estimator.kernel.xi},
        {"denominator", s.estimator.kernel.denominator == KernelParams::Denominator::GammaSq
                            ? "gamma_sq"
                            : "gamma_xi"}}},
      {"vb",
       {{"iterations", s.estimator.vb.iterations},
        {"varsigma", s.estimator.vb.varsigma},
        {"zeta", s.estimator.vb.zeta},
        {"enabled", s.estimator.vb.enabled},
        {"early_exit_tol", s.estimator.vb.early_exit_tol},
        {"sigma_from_posterior", s.estimator.vb.sigma_from_posterior}}},
      {"correction",
       {{"max_iter", s.estimator.correction.max_iter},
        {"tol", s.estimator.correction.tol},
        {"weight_form",
         s.estimator.correction.weight_form == CorrectionSettings::WeightForm::Inverse
             ? "inverse"
             : "printed"},
        {"force_uniform_weights", s.estimator.correction.force_uniform_weights}}},
      {"init_P", s.estimator.init_P},
      {"init_R_nominal", s.estimator.init_R_nominal}};
  j["fusion"] = {{"enabled", s.fusion.enabled},
                 {"closed_loop", s.fusion.closed_loop},
                 {"reference", s.fusion.reference == NeighborReference::kReconstructed
                                   ? "reconstructed"
                                   : "prior_mean"},
                 {"edge_variance", s.fusion.edge_variance}};
  j["baseline"] = {{"r_policy", s.baseline.r_policy == BaselineConfig::RPolicy::kTrueVariance
                                    ? "true_variance"
                                    : "nominal"}};
  switch (s.algorithm) {
    case Algorithm::kProposed: j["algorithm"] = "dmgst_vbukf"; break;
    case Algorithm::kBaseline: j["algorithm"] = "ukf"; break;
    case Algorithm::kBoth: j["algorithm"] = "both"; break;
  }
  j["steps"] = s.steps;
  j["runs"] = s.runs;
  j["seed"] = s.seed;
  if (s.anomaly.enabled) {
    j["anomaly"] = {{"step", s.anomaly.step},
                    {"region", s.anomaly.region},
                    {"factor", s.anomaly.factor}};
  }
  return j;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("scenario file " + path + ": " + e.what());
  }
  return scenario_from_json(j);
}

void validate_scenario(const Scenario& s) {
  if (s.steps < 1) throw ConfigError("steps must be >= 1");
  if (s.runs < 1) throw ConfigError("runs must be >= 1");
  if (s.estimator.vb.iterations < 1) throw ConfigError("vb.iterations must be >= 1");
  if (!(s.estimator.vb.varsigma > 0.0 && s.estimator.vb.varsigma < 1.0)) {
    throw ConfigError("vb.varsigma must lie in (0, 1)");
  }
  if (!(s.estimator.vb.zeta > 0.0 && s.estimator.vb.zeta <= 1.0)) {
    throw ConfigError("vb.zeta must lie in (0, 1]");
  }
  if (s.estimator.correction.max_iter < 1) throw ConfigError("correction.max_iter must be >= 1");
  if (!(s.estimator.correction.tol > 0.0)) throw ConfigError("correction.tol must be positive");
  if (!(s.estimator.kernel.c > 0.0) || !(s.estimator.kernel.gamma > 0.0) ||
      !(s.estimator.kernel.xi > 0.0)) {
    throw ConfigError("kernel parameters c, gamma, xi must be positive");
  }
  if (!(s.estimator.init_P > 0.0) || !(s.estimator.init_R_nominal > 0.0)) {
    throw ConfigError("init_P and init_R_nominal must be positive");
  }
  if (!(s.fusion.edge_variance > 0.0)) throw ConfigError("fusion.edge_variance must be positive");
  if (!(s.model.f > 0.0 && s.model.f < 1.0)) throw ConfigError("model.f must lie in (0, 1)");
  if (!(s.model.q_var > 0.0)) throw ConfigError("model.process_variance must be positive");
  if (s.anomaly.enabled) {
    if (s.anomaly.step < 1 || s.anomaly.step > s.steps) {
      throw ConfigError("anomaly.step must lie in [1, steps]");
    }
    if (!(s.anomaly.factor > 0.0)) throw ConfigError("anomaly.factor must be positive");
  }
}

PartitionedGrid build_scenario_grid(const Scenario& s) {
  GridCase grid;
  if (!s.case_file.empty()) {
    std::ifstream in(s.case_file);
    if (!in) throw ConfigError("cannot open case file: " + s.case_file);
    std::stringstream buf;
    buf << in.rdbuf();
    grid = parse_case(buf.str());
  } else {
    grid = load_bundled(s.case_name);
  }
  const std::map<int, int>& partition =
      s.partition.empty() ? default_partition(s.case_name) : s.partition;
  if (s.partition.empty() && !s.case_file.empty()) {
    throw ConfigError("a custom case_file requires an explicit partition");
  }
  return build_partition(grid, partition, s.model, s.placement);
}

}  // namespace wasse
