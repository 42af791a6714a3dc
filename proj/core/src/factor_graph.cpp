#include "qfg/factor_graph.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qfg/errors.hpp"

namespace qfg {

namespace {

using nlohmann::json;

constexpr double kPriorSumTolerance = 1e-6;
constexpr double kUnitarityTolerance = 1e-9;

void check_function_unitarity(const FunctionNode& fn) {
  if (fn.g_diag.entries.size() != fn.f_diag.entries.size()) {
    throw InvalidArgumentError("function \"" + fn.id + "\": f and g diagonal sizes differ");
  }
  for (std::size_t k = 0; k < fn.f_diag.entries.size(); ++k) {
    const Complex f = fn.f_diag.entries[k];
    const Complex g = fn.g_diag.entries[k];
    if (std::abs(std::norm(f) + std::norm(g) - 1.0) > kUnitarityTolerance ||
        std::abs(std::conj(f) * g + f * std::conj(g)) > kUnitarityTolerance) {
      throw InvalidArgumentError("function \"" + fn.id +
                                 "\": (f, g) violate the unitarity constraints at entry " +
                                 std::to_string(k));
    }
  }
}

}  // namespace

FactorGraph::FactorGraph(std::vector<VariableNode> variables,
                         std::vector<FunctionNode> functions, ScheduleSpec schedule)
    : variables_(std::move(variables)),
      functions_(std::move(functions)),
      schedule_(std::move(schedule)) {
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    const VariableNode& v = variables_[i];
    if (!variable_index_.emplace(v.id, static_cast<int>(i)).second) {
      throw InvalidArgumentError("duplicate variable id \"" + v.id + "\"");
    }
    if (std::abs(std::norm(v.alpha) + std::norm(v.beta) - 1.0) > kNormTolerance) {
      throw InvalidArgumentError("variable \"" + v.id + "\" prior is not normalized");
    }
  }
  for (std::size_t i = 0; i < functions_.size(); ++i) {
    const FunctionNode& f = functions_[i];
    if (!function_index_.emplace(f.id, static_cast<int>(i)).second) {
      throw InvalidArgumentError("duplicate function id \"" + f.id + "\"");
    }
    std::set<QubitId> seen;
    for (const QubitId& q : f.scope) {
      if (!variable_index_.count(q)) {
        throw InvalidArgumentError("function \"" + f.id +
                                   "\" references undeclared variable \"" + q + "\"");
      }
      if (!seen.insert(q).second) {
        throw InvalidArgumentError("function \"" + f.id + "\" lists variable \"" + q +
                                   "\" twice");
      }
    }
    if (f.f_diag.arity() != static_cast<int>(f.scope.size())) {
      throw InvalidArgumentError("function \"" + f.id +
                                 "\" diagonal arity does not match its scope");
    }
    check_function_unitarity(f);
  }

  if (schedule_.kind == ScheduleKind::kPhased) {
    std::set<std::string> covered;
    for (const auto& phase : schedule_.phases) {
      for (const std::string& fid : phase) {
        if (!function_index_.count(fid)) {
          throw InvalidArgumentError("schedule names unknown function \"" + fid + "\"");
        }
        if (!covered.insert(fid).second) {
          throw InvalidArgumentError("schedule lists function \"" + fid +
                                     "\" more than once");
        }
      }
    }
    if (covered.size() != functions_.size()) {
      throw InvalidArgumentError("phased schedule must cover every function exactly once");
    }
  } else if (!schedule_.phases.empty()) {
    throw InvalidArgumentError("free schedule must not declare phases");
  }
  if (schedule_.bad_qubit_timeout && *schedule_.bad_qubit_timeout <= 0) {
    throw InvalidArgumentError("bad_qubit_timeout must be positive");
  }
}

const VariableNode& FactorGraph::variable(const QubitId& id) const {
  return variables_[variable_index(id)];
}

int FactorGraph::variable_index(const QubitId& id) const {
  auto it = variable_index_.find(id);
  if (it == variable_index_.end()) {
    throw InvalidArgumentError("unknown variable \"" + id + "\"");
  }
  return it->second;
}

const FunctionNode& FactorGraph::function(const std::string& id) const {
  auto it = function_index_.find(id);
  if (it == function_index_.end()) {
    throw InvalidArgumentError("unknown function \"" + id + "\"");
  }
  return functions_[it->second];
}

std::vector<std::string> FactorGraph::activation_order() const {
  std::vector<std::string> order;
  order.reserve(functions_.size());
  if (schedule_.kind == ScheduleKind::kPhased) {
    for (const auto& phase : schedule_.phases) {
      order.insert(order.end(), phase.begin(), phase.end());
    }
  } else {
    for (const FunctionNode& f : functions_) order.push_back(f.id);
  }
  return order;
}

DiagonalOperator xor_diag(int arity) {
  if (arity < 1 || arity > kMaxBlockQubits) {
    throw InvalidArgumentError("xor_diag arity must be in [1, " +
                               std::to_string(kMaxBlockQubits) + "]");
  }
  std::vector<Complex> entries(std::size_t{1} << arity);
  for (std::uint64_t k = 0; k < entries.size(); ++k) {
    entries[k] = (std::popcount(k) % 2 == 0) ? Complex{1.0, 0.0} : Complex{0.0, 0.0};
  }
  return DiagonalOperator(std::move(entries));
}

DiagonalOperator complement_diag(const DiagonalOperator& f) {
  std::vector<Complex> g(f.entries.size());
  for (std::size_t k = 0; k < f.entries.size(); ++k) {
    const Complex fk = f.entries[k];
    const double mag = std::abs(fk);
    if (mag > 1.0 + 1e-12) {
      throw InvalidArgumentError("diagonal entry " + std::to_string(k) +
                                 " has magnitude > 1");
    }
    if (mag == 0.0) {
      g[k] = Complex{1.0, 0.0};
    } else {
      const double rest = std::sqrt(std::max(0.0, 1.0 - mag * mag));
      g[k] = Complex{0.0, 1.0} * fk * (rest / mag);
    }
  }
  return DiagonalOperator(std::move(g));
}

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ParseError(msg); }

Complex parse_complex(const json& j, const std::string& where) {
  if (j.is_number()) return Complex{j.get<double>(), 0.0};
  if (j.is_array() && (j.size() == 1 || j.size() == 2) && j[0].is_number() &&
      (j.size() == 1 || j[1].is_number())) {
    return Complex{j[0].get<double>(), j.size() == 2 ? j[1].get<double>() : 0.0};
  }
  fail(where + ": expected a number or [re, im] pair");
}

VariableNode parse_variable(const json& jv) {
  if (!jv.is_object() || !jv.contains("id") || !jv["id"].is_string()) {
    fail("variable entry without a string \"id\"");
  }
  const std::string id = jv["id"].get<std::string>();
  const bool has_prior = jv.contains("prior");
  const bool has_amps = jv.contains("amplitudes");
  if (has_prior == has_amps) {
    fail("variable \"" + id + "\": give exactly one of \"prior\" or \"amplitudes\"");
  }

  Complex alpha, beta;
  if (has_prior) {
    const json& p = jv["prior"];
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      fail("variable \"" + id + "\": \"prior\" must be [p0, p1]");
    }
    const double p0 = p[0].get<double>();
    const double p1 = p[1].get<double>();
    if (p0 < 0.0 || p1 < 0.0) {
      fail("variable \"" + id + "\": prior probabilities must be nonnegative");
    }
    if (std::abs(p0 + p1 - 1.0) > kPriorSumTolerance) {
      fail("variable \"" + id + "\": prior is not normalized");
    }
    alpha = Complex{std::sqrt(p0), 0.0};
    beta = Complex{std::sqrt(p1), 0.0};
  } else {
    const json& a = jv["amplitudes"];
    if (!a.is_array() || a.size() != 2) {
      fail("variable \"" + id + "\": \"amplitudes\" must be [[re,im],[re,im]]");
    }
    alpha = parse_complex(a[0], "variable \"" + id + "\" amplitude 0");
    beta = parse_complex(a[1], "variable \"" + id + "\" amplitude 1");
    if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > kPriorSumTolerance) {
      fail("variable \"" + id + "\": amplitudes are not normalized");
    }
  }
  // Snap to exact unit norm so downstream invariants hold at 1e-9.
  const double n = std::sqrt(std::norm(alpha) + std::norm(beta));
  return VariableNode{id, alpha / n, beta / n};
}

FunctionNode parse_function(const json& jf) {
  if (!jf.is_object() || !jf.contains("id") || !jf["id"].is_string()) {
    fail("function entry without a string \"id\"");
  }
  const std::string id = jf["id"].get<std::string>();
  if (!jf.contains("scope") || !jf["scope"].is_array() || jf["scope"].empty()) {
    fail("function \"" + id + "\": \"scope\" must be a nonempty array");
  }
  std::vector<QubitId> scope;
  for (const json& s : jf["scope"]) {
    if (!s.is_string()) fail("function \"" + id + "\": scope entries must be strings");
    scope.push_back(s.get<std::string>());
  }
  if (!jf.contains("kind") || !jf["kind"].is_string()) {
    fail("function \"" + id + "\": missing \"kind\"");
  }
  const std::string kind = jf["kind"].get<std::string>();

  DiagonalOperator f;
  if (kind == "xor") {
    f = xor_diag(static_cast<int>(scope.size()));
  } else if (kind == "diag") {
    if (!jf.contains("values") || !jf["values"].is_array()) {
      fail("function \"" + id + "\": kind \"diag\" requires \"values\"");
    }
    std::vector<Complex> entries;
    for (const json& v : jf["values"]) {
      entries.push_back(parse_complex(v, "function \"" + id + "\" diagonal value"));
    }
    if (entries.size() != (std::size_t{1} << scope.size())) {
      fail("function \"" + id + "\": expected " +
           std::to_string(std::size_t{1} << scope.size()) + " diagonal values, got " +
           std::to_string(entries.size()));
    }
    try {
      f = DiagonalOperator(std::move(entries));
    } catch (const InvalidArgumentError& e) {
      fail("function \"" + id + "\": " + e.what());
    }
  } else {
    fail("function \"" + id + "\": unknown kind \"" + kind + "\"");
  }
  DiagonalOperator g = complement_diag(f);
  return FunctionNode{id, std::move(scope), std::move(f), std::move(g)};
}

ScheduleSpec parse_schedule(const json& js) {
  ScheduleSpec spec;
  if (js.is_null()) return spec;
  if (!js.is_object() || !js.contains("kind") || !js["kind"].is_string()) {
    fail("schedule: missing \"kind\"");
  }
  const std::string kind = js["kind"].get<std::string>();
  if (kind == "free") {
    spec.kind = ScheduleKind::kFree;
  } else if (kind == "phased") {
    spec.kind = ScheduleKind::kPhased;
    if (!js.contains("phases") || !js["phases"].is_array()) {
      fail("schedule: phased kind requires \"phases\"");
    }
    for (const json& phase : js["phases"]) {
      if (!phase.is_array()) fail("schedule: each phase must be an array of function ids");
      std::vector<std::string> ids;
      for (const json& f : phase) {
        if (!f.is_string()) fail("schedule: phase entries must be function ids");
        ids.push_back(f.get<std::string>());
      }
      spec.phases.push_back(std::move(ids));
    }
  } else {
    fail("schedule: unknown kind \"" + kind + "\"");
  }
  if (js.contains("bad_qubit_timeout") && !js["bad_qubit_timeout"].is_null()) {
    if (!js["bad_qubit_timeout"].is_number_integer() ||
        js["bad_qubit_timeout"].get<long long>() <= 0) {
      fail("schedule: \"bad_qubit_timeout\" must be null or a positive integer");
    }
    spec.bad_qubit_timeout = js["bad_qubit_timeout"].get<int>();
  }
  return spec;
}

}  // namespace

FactorGraph parse_graph(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    fail(std::string("graph document is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("variables") || !doc["variables"].is_array()) {
    fail("graph document must be an object with a \"variables\" array");
  }

  std::vector<VariableNode> variables;
  for (const json& jv : doc["variables"]) variables.push_back(parse_variable(jv));

  std::vector<FunctionNode> functions;
  if (doc.contains("functions")) {
    if (!doc["functions"].is_array()) fail("\"functions\" must be an array");
    for (const json& jf : doc["functions"]) functions.push_back(parse_function(jf));
  }

  ScheduleSpec schedule =
      parse_schedule(doc.contains("schedule") ? doc["schedule"] : json());

  try {
    return FactorGraph(std::move(variables), std::move(functions), std::move(schedule));
  } catch (const InvalidArgumentError& e) {
    fail(e.what());
  }
}

FactorGraph load_graph(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw ParseError("cannot open graph document \"" + file.string() + "\"");
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_graph(text.str());
}

std::string serialize_graph(const FactorGraph& graph) {
  json doc;
  doc["variables"] = json::array();
  for (const VariableNode& v : graph.variables()) {
    doc["variables"].push_back(
        {{"id", v.id},
         {"amplitudes",
          {{v.alpha.real(), v.alpha.imag()}, {v.beta.real(), v.beta.imag()}}}});
  }
  doc["functions"] = json::array();
  for (const FunctionNode& f : graph.functions()) {
    json values = json::array();
    for (const Complex& e : f.f_diag.entries) values.push_back({e.real(), e.imag()});
    doc["functions"].push_back(
        {{"id", f.id}, {"scope", f.scope}, {"kind", "diag"}, {"values", values}});
  }
  json sched;
  const ScheduleSpec& s = graph.schedule();
  sched["kind"] = s.kind == ScheduleKind::kPhased ? "phased" : "free";
  if (s.kind == ScheduleKind::kPhased) sched["phases"] = s.phases;
  sched["bad_qubit_timeout"] =
      s.bad_qubit_timeout ? json(*s.bad_qubit_timeout) : json(nullptr);
  doc["schedule"] = sched;
  return doc.dump(2);
}

}  // namespace qfg
