#include "pdflow/cli/config.hpp"

#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

namespace pdflow::cli {

namespace {

using nlohmann::json;

std::string child(const std::string& pointer, std::string_view key) {
  std::string escaped;
  for (char c : key) {
    if (c == '~') {
      escaped += "~0";
    } else if (c == '/') {
      escaped += "~1";
    } else {
      escaped += c;
    }
  }
  return pointer + "/" + escaped;
}

std::string child(const std::string& pointer, size_t index) {
  return pointer + "/" + std::to_string(index);
}

void require_object(const json& node, const std::string& pointer) {
  if (!node.is_object()) throw ConfigError(pointer, "expected an object");
}

void reject_unknown(const json& node, const std::string& pointer,
                    std::initializer_list<std::string_view> allowed) {
  require_object(node, pointer);
  for (const auto& [key, value] : node.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw ConfigError(child(pointer, key), "unknown key");
  }
}

double number(const json& node, const std::string& pointer) {
  if (!node.is_number()) throw ConfigError(pointer, "expected a number");
  return node.get<double>();
}

std::string string(const json& node, const std::string& pointer) {
  if (!node.is_string()) throw ConfigError(pointer, "expected a string");
  return node.get<std::string>();
}

Vec vector(const json& node, const std::string& pointer) {
  if (!node.is_array()) throw ConfigError(pointer, "expected an array of numbers");
  Vec v(static_cast<Index>(node.size()));
  for (size_t i = 0; i < node.size(); ++i) v[static_cast<Index>(i)] = number(node[i], child(pointer, i));
  return v;
}

std::vector<double> std_vector(const json& node, const std::string& pointer) {
  const Vec v = vector(node, pointer);
  return {v.data(), v.data() + v.size()};
}

Mat matrix(const json& node, const std::string& pointer) {
  if (!node.is_array()) throw ConfigError(pointer, "expected an array of rows");
  if (node.empty()) return Mat(0, 0);
  const size_t cols = node[0].is_array() ? node[0].size() : 0;
  Mat m(static_cast<Index>(node.size()), static_cast<Index>(cols));
  for (size_t i = 0; i < node.size(); ++i) {
    const auto row_pointer = child(pointer, i);
    const Vec row = vector(node[i], row_pointer);
    if (static_cast<size_t>(row.size()) != cols) throw ConfigError(row_pointer, "ragged matrix row");
    m.row(static_cast<Index>(i)) = row.transpose();
  }
  return m;
}

FilterSpec parse_filter(const json& node, const std::string& pointer, FilterKind kind) {
  reject_unknown(node, pointer, {"poles", "residues", "feedthrough"});
  if (!node.contains("poles")) throw ConfigError(child(pointer, "poles"), "required");
  if (!node.contains("residues")) throw ConfigError(child(pointer, "residues"), "required");
  FilterSpec spec;
  spec.kind = kind;
  spec.poles = std_vector(node["poles"], child(pointer, "poles"));
  spec.residues = std_vector(node["residues"], child(pointer, "residues"));
  if (node.contains("feedthrough")) {
    spec.feedthrough = number(node["feedthrough"], child(pointer, "feedthrough"));
  }
  const auto violations = validate(spec);
  if (!violations.empty()) throw ConfigError(pointer, violations.front());
  return spec;
}

// A single spec object applies to every entry; an array gives one per entry.
std::vector<FilterSpec> parse_bank(const json& node, const std::string& pointer,
                                   FilterKind kind, Index expected) {
  std::vector<FilterSpec> bank;
  if (node.is_object()) {
    bank.assign(static_cast<size_t>(expected), parse_filter(node, pointer, kind));
  } else if (node.is_array()) {
    for (size_t i = 0; i < node.size(); ++i) {
      bank.push_back(parse_filter(node[i], child(pointer, i), kind));
    }
    if (static_cast<Index>(bank.size()) != expected) {
      throw ConfigError(pointer, "expected " + std::to_string(expected) + " filters, got " +
                                     std::to_string(bank.size()));
    }
  } else {
    throw ConfigError(pointer, "expected a filter object or an array of filters");
  }
  return bank;
}

struct ParsedProblem {
  std::string name;
  ConvexProblem problem;
  std::optional<LpData> lp;
  std::optional<KktPoint> reference;
};

ParsedProblem parse_problem(const json& node, const std::string& pointer) {
  require_object(node, pointer);
  if (node.contains("builtin")) {
    if (node.size() != 1) {
      throw ConfigError(pointer, "exactly one problem source: builtin or inline data");
    }
    const auto name = string(node["builtin"], child(pointer, "builtin"));
    try {
      BundledProblem bundled = bundled_problem(name);
      std::optional<LpData> lp;
      if (name == "lp_example") lp = lp_example_data();
      return {name, std::move(bundled.problem), lp, bundled.reference};
    } catch (const std::invalid_argument& e) {
      throw ConfigError(child(pointer, "builtin"), e.what());
    }
  }

  reject_unknown(node, pointer, {"Q", "theta", "Phi", "phi", "A", "b"});
  if (!node.contains("theta")) throw ConfigError(pointer, "problem requires builtin or theta");
  QuadraticData data;
  data.theta = vector(node["theta"], child(pointer, "theta"));
  if (node.contains("Q")) data.Q = matrix(node["Q"], child(pointer, "Q"));
  if (node.contains("Phi")) data.Phi = matrix(node["Phi"], child(pointer, "Phi"));
  if (node.contains("phi")) data.phi = vector(node["phi"], child(pointer, "phi"));
  if (node.contains("A")) data.A = matrix(node["A"], child(pointer, "A"));
  if (node.contains("b")) data.b = vector(node["b"], child(pointer, "b"));
  if (data.Phi.size() == 0) data.Phi.resize(0, data.theta.size());
  try {
    ConvexProblem problem = make_quadratic(data);
    std::optional<LpData> lp;
    if (data.Q.size() == 0 && data.A.size() == 0) lp = LpData{data.Phi, data.phi, data.theta};
    return {"inline", std::move(problem), lp, std::nullopt};
  } catch (const std::exception& e) {
    throw ConfigError(pointer, e.what());
  }
}

IntegratorConfig parse_integrator(const json& node, const std::string& pointer) {
  reject_unknown(node, pointer, {"method", "step", "horizon", "record_every"});
  IntegratorConfig config;
  if (node.contains("method")) {
    const auto p = child(pointer, "method");
    try {
      config.method = parse_method(string(node["method"], p));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(p, e.what());
    }
  }
  if (node.contains("step")) config.step = number(node["step"], child(pointer, "step"));
  if (node.contains("horizon")) config.horizon = number(node["horizon"], child(pointer, "horizon"));
  if (node.contains("record_every")) {
    const auto p = child(pointer, "record_every");
    if (!node["record_every"].is_number_integer()) throw ConfigError(p, "expected an integer");
    config.record_every = node["record_every"].get<int>();
  }
  try {
    validate(config);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(pointer, e.what());
  }
  return config;
}

NoiseModel parse_noise(const json& node, const std::string& pointer) {
  reject_unknown(node, pointer, {"sigma", "cutoff", "seed"});
  NoiseModel model;
  if (!node.contains("sigma")) throw ConfigError(child(pointer, "sigma"), "required");
  model.sigma = number(node["sigma"], child(pointer, "sigma"));
  if (node.contains("cutoff")) model.cutoff = number(node["cutoff"], child(pointer, "cutoff"));
  if (node.contains("seed")) {
    const auto p = child(pointer, "seed");
    if (!node["seed"].is_number_unsigned() && !node["seed"].is_number_integer()) {
      throw ConfigError(p, "expected an unsigned integer");
    }
    model.seed = node["seed"].get<std::uint64_t>();
  }
  try {
    validate(model);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(pointer, e.what());
  }
  return model;
}

OutputPaths parse_outputs(const json& node, const std::string& pointer) {
  reject_unknown(node, pointer, {"csv", "json", "svg", "report", "plot"});
  OutputPaths out;
  if (node.contains("csv")) out.csv = string(node["csv"], child(pointer, "csv"));
  if (node.contains("json")) out.json = string(node["json"], child(pointer, "json"));
  if (node.contains("svg")) out.svg = string(node["svg"], child(pointer, "svg"));
  if (node.contains("report")) out.report = string(node["report"], child(pointer, "report"));
  if (node.contains("plot")) {
    const auto p = child(pointer, "plot");
    if (!node["plot"].is_array()) throw ConfigError(p, "expected an array of column names");
    for (size_t i = 0; i < node["plot"].size(); ++i) {
      out.plot.push_back(string(node["plot"][i], child(p, i)));
    }
  }
  return out;
}

}  // namespace

std::vector<std::string> case_names() {
  return {"case1", "case2", "case3", "integrator", "aug-lagrangian", "richert-cortes"};
}

FilterBank expand_case(std::string_view name, const ConvexProblem& problem) {
  if (name == "aug-lagrangian" || name == "richert-cortes") {
    return as_generalized(parse_variant(name), problem);
  }

  FilterSpec primal = FilterSpec::integrator(FilterKind::primal);
  const FilterSpec dual_eq = FilterSpec::integrator(FilterKind::dual_eq);
  FilterSpec dual_ineq = FilterSpec::integrator(FilterKind::dual_ineq);
  if (name == "case1") {
    primal.feedthrough = 1.0;  // (s + 1) / s
  } else if (name == "case2" || name == "case3") {
    primal.poles = {0.0, 25.0};  // 1/s + 19/(s + 25)
    primal.residues = {1.0, 19.0};
    if (name == "case3") {
      dual_ineq.poles = {0.0, 0.05};  // (1/s)^+ + (4/(s + 0.05))^+
      dual_ineq.residues = {1.0, 4.0};
    }
  } else if (name != "integrator") {
    throw std::invalid_argument("unknown filter case '" + std::string(name) + "'");
  }

  FilterBank bank;
  bank.primal.assign(static_cast<size_t>(problem.dim()), primal);
  bank.dual_eq.assign(static_cast<size_t>(problem.num_eq()), dual_eq);
  bank.dual_ineq.assign(static_cast<size_t>(problem.num_ineq()), dual_ineq);
  return bank;
}

RunConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  reject_unknown(doc, "", {"problem", "filters", "engine", "integrator", "noise", "initial",
                           "outputs", "reference", "convergence_tol"});
  if (!doc.contains("problem")) throw ConfigError("/problem", "problem required");

  ParsedProblem parsed = parse_problem(doc["problem"], "/problem");
  RunConfig config(parsed.name, std::move(parsed.problem));
  config.lp = parsed.lp;
  config.reference = parsed.reference;
  const ConvexProblem& problem = config.problem;

  config.filters = expand_case("integrator", problem);
  if (doc.contains("filters")) {
    const json& node = doc["filters"];
    reject_unknown(node, "/filters", {"case", "M", "H", "G"});
    if (node.contains("case")) {
      const auto name = string(node["case"], "/filters/case");
      try {
        config.filters = expand_case(name, problem);
      } catch (const std::invalid_argument& e) {
        throw ConfigError("/filters/case", e.what());
      }
      config.filter_case = name;
      if (name == "aug-lagrangian" || name == "richert-cortes") config.variant = parse_variant(name);
    }
    if (node.contains("M")) {
      config.filters.primal = parse_bank(node["M"], "/filters/M", FilterKind::primal, problem.dim());
    }
    if (node.contains("H")) {
      config.filters.dual_eq =
          parse_bank(node["H"], "/filters/H", FilterKind::dual_eq, problem.num_eq());
    }
    if (node.contains("G")) {
      config.filters.dual_ineq =
          parse_bank(node["G"], "/filters/G", FilterKind::dual_ineq, problem.num_ineq());
    }
    if (config.variant && (node.contains("M") || node.contains("H") || node.contains("G"))) {
      config.variant.reset();  // overridden banks no longer match the variant
    }
  }

  if (doc.contains("engine")) {
    const auto name = string(doc["engine"], "/engine");
    if (name == "generalized") {
      config.engine = EngineKind::generalized;
    } else if (name == "direct") {
      config.engine = EngineKind::direct;
    } else {
      throw ConfigError("/engine", "expected \"generalized\" or \"direct\"");
    }
  }
  if (config.engine == EngineKind::direct) {
    if (!config.variant) {
      throw ConfigError("/engine",
                        "direct engine needs filters.case aug-lagrangian or richert-cortes");
    }
    if (*config.variant == Variant::richert_cortes && !config.lp) {
      throw ConfigError("/engine", "direct richert-cortes engine needs a linear program");
    }
  }

  if (doc.contains("integrator")) config.integrator = parse_integrator(doc["integrator"], "/integrator");
  if (doc.contains("noise")) {
    if (config.engine == EngineKind::direct) {
      throw ConfigError("/noise", "noise is only supported by the generalized engine");
    }
    config.noise = parse_noise(doc["noise"], "/noise");
  }
  if (doc.contains("initial")) {
    const json& node = doc["initial"];
    reject_unknown(node, "/initial", {"xi", "zeta", "rho"});
    if (node.contains("xi")) config.initial.xi = vector(node["xi"], "/initial/xi");
    if (node.contains("zeta")) config.initial.zeta = vector(node["zeta"], "/initial/zeta");
    if (node.contains("rho")) {
      config.initial.rho = vector(node["rho"], "/initial/rho");
      if (config.initial.rho->size() > 0 && config.initial.rho->minCoeff() < 0.0) {
        throw ConfigError("/initial/rho", "entries must be nonnegative");
      }
    }
  }
  if (doc.contains("reference")) {
    const json& node = doc["reference"];
    reject_unknown(node, "/reference", {"x", "mu", "lambda"});
    if (!node.contains("x")) throw ConfigError("/reference/x", "required");
    KktPoint point;
    point.x = vector(node["x"], "/reference/x");
    point.mu = node.contains("mu") ? vector(node["mu"], "/reference/mu") : Vec(0);
    point.lambda = node.contains("lambda") ? vector(node["lambda"], "/reference/lambda") : Vec(0);
    config.reference = point;
  }
  if (doc.contains("convergence_tol")) {
    config.convergence_tol = number(doc["convergence_tol"], "/convergence_tol");
    if (!(config.convergence_tol > 0.0)) throw ConfigError("/convergence_tol", "must be positive");
  }
  if (doc.contains("outputs")) config.outputs = parse_outputs(doc["outputs"], "/outputs");
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace pdflow::cli
