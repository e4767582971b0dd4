#include "crowdsim/config.hpp"

#include <cerrno>
#include <cstdlib>
#include <initializer_list>
#include <string>

#include <json.hpp>

namespace crowdsim {
namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path.empty() ? what : path + ": " + what);
}

void reject_unknown(const Json& obj, const std::string& path,
                    std::initializer_list<const char*> known) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok)
      fail(path.empty() ? it.key() : path + "." + it.key(), "unknown key");
  }
}

const Json& require_object(const Json& v, const std::string& path) {
  if (!v.is_object()) fail(path, "expected an object");
  return v;
}

long long require_int(const Json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<long long>();
}

std::uint64_t require_uint(const Json& v, const std::string& path) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
    fail(path, "expected a non-negative integer");
  return v.get<std::uint64_t>();
}

double require_number(const Json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

std::string require_string(const Json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

std::vector<double> require_number_array(const Json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(require_number(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

void apply_default_protocol(Scenario* s) {
  s->schemes = {SchemeKind::MajorityUniform, SchemeKind::LraUniform,
                SchemeKind::LraGreedy, SchemeKind::MapGreedy};
  s->sweep = SweepVariable::Beta;
  s->sweep_values = {2, 4, 6, 8, 10, 12, 14, 16, 18, 20};
}

Scenario parse_scenario(const Json& v) {
  if (v.is_string()) {
    try {
      return scenario_preset(v.get<std::string>());
    } catch (const std::invalid_argument& e) {
      fail("scenario", e.what());
    }
  }
  require_object(v, "scenario");
  reject_unknown(v, "scenario", {"groups", "class_sizes", "load", "loads"});

  Scenario s;
  apply_default_protocol(&s);

  if (!v.contains("class_sizes")) fail("scenario.class_sizes", "missing");
  const Json& sizes = v["class_sizes"];
  if (!sizes.is_array()) fail("scenario.class_sizes", "expected an array");
  for (std::size_t k = 0; k < sizes.size(); ++k)
    s.class_sizes.push_back(static_cast<int>(
        require_int(sizes[k], "scenario.class_sizes[" + std::to_string(k) + "]")));

  if (!v.contains("groups")) fail("scenario.groups", "missing");
  const Json& groups = v["groups"];
  if (!groups.is_array()) fail("scenario.groups", "expected an array");
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const std::string path = "scenario.groups[" + std::to_string(g) + "]";
    const Json& jg = require_object(groups[g], path);
    reject_unknown(jg, path, {"tasks", "pi"});
    TaskGroup tg;
    if (!jg.contains("tasks")) fail(path + ".tasks", "missing");
    tg.count = static_cast<int>(require_int(jg["tasks"], path + ".tasks"));
    if (!jg.contains("pi")) fail(path + ".pi", "missing");
    tg.pi = require_number_array(jg["pi"], path + ".pi");
    s.groups.push_back(std::move(tg));
  }

  long long workers = 0;
  for (int w : s.class_sizes) workers += w;
  if (v.contains("load") && v.contains("loads"))
    fail("scenario", "give either load or loads, not both");
  if (v.contains("load")) {
    const int r = static_cast<int>(require_int(v["load"], "scenario.load"));
    s.loads.assign(static_cast<std::size_t>(std::max<long long>(workers, 0)), r);
  } else if (v.contains("loads")) {
    const Json& loads = v["loads"];
    if (!loads.is_array()) fail("scenario.loads", "expected an array");
    for (std::size_t w = 0; w < loads.size(); ++w)
      s.loads.push_back(static_cast<int>(
          require_int(loads[w], "scenario.loads[" + std::to_string(w) + "]")));
  } else {
    fail("scenario", "missing load (or loads)");
  }
  return s;
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("not valid JSON: ") + e.what());
  }
  require_object(j, "");
  reject_unknown(j, "", {"scenario", "schemes", "sweep", "trials", "seed",
                         "objective", "chernoff", "x", "beta", "output"});

  RunConfig c;
  if (!j.contains("scenario")) fail("scenario", "missing");
  c.scenario = parse_scenario(j["scenario"]);
  Scenario& s = c.scenario;

  if (j.contains("schemes")) {
    const Json& arr = j["schemes"];
    if (!arr.is_array()) fail("schemes", "expected an array of scheme names");
    s.schemes.clear();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string path = "schemes[" + std::to_string(i) + "]";
      const std::string token = require_string(arr[i], path);
      SchemeKind kind;
      if (!parse_scheme_token(token, &kind))
        fail(path, "unknown scheme \"" + token +
                       "\" (want majority_uniform, lra_uniform, lra_greedy or "
                       "map_greedy)");
      s.schemes.push_back(kind);
    }
  }

  if (j.contains("sweep")) {
    const Json& sw = require_object(j["sweep"], "sweep");
    reject_unknown(sw, "sweep", {"variable", "values"});
    if (!sw.contains("variable")) fail("sweep.variable", "missing");
    const std::string var = require_string(sw["variable"], "sweep.variable");
    if (var == "beta")
      s.sweep = SweepVariable::Beta;
    else if (var == "x")
      s.sweep = SweepVariable::X;
    else
      fail("sweep.variable", "must be \"beta\" or \"x\", got \"" + var + "\"");
    if (!sw.contains("values")) fail("sweep.values", "missing");
    s.sweep_values = require_number_array(sw["values"], "sweep.values");
  }

  if (j.contains("trials"))
    s.trials = static_cast<int>(require_int(j["trials"], "trials"));
  if (j.contains("seed")) {
    s.seed = require_uint(j["seed"], "seed");
  } else if (const char* env = std::getenv("CROWDSIM_SEED")) {
    errno = 0;
    char* end = nullptr;
    const unsigned long long parsed = std::strtoull(env, &end, 10);
    if (errno != 0 || end == env || *end != '\0')
      throw ConfigError(std::string("CROWDSIM_SEED: not an unsigned integer: ") + env);
    s.seed = parsed;
  }
  if (j.contains("objective")) {
    const std::string name = require_string(j["objective"], "objective");
    bool found = false;
    for (int i = 0; i < 6 && !found; ++i) {
      const auto kind = static_cast<ObjectiveKind>(i);
      if (name == objective_name(kind)) {
        s.objective = kind;
        found = true;
      }
    }
    if (!found) fail("objective", "must be one of P1..P6, got \"" + name + "\"");
  }
  if (j.contains("chernoff")) {
    const std::string v = require_string(j["chernoff"], "chernoff");
    if (v == "corrected")
      s.chernoff = ChernoffVariant::Corrected;
    else if (v == "as_printed")
      s.chernoff = ChernoffVariant::AsPrinted;
    else
      fail("chernoff", "must be \"corrected\" or \"as_printed\", got \"" + v + "\"");
  }
  if (j.contains("x")) s.fixed_x = require_number(j["x"], "x");
  if (j.contains("beta")) s.fixed_beta = require_number(j["beta"], "beta");
  if (j.contains("output")) c.output = require_string(j["output"], "output");

  const std::vector<std::string> problems = validate_scenario(s);
  if (!problems.empty()) {
    std::string msg = "invalid scenario:";
    for (const auto& m : problems) msg += "\n  - " + m;
    throw ConfigError(msg);
  }
  return c;
}

std::string render_config(const RunConfig& c) {
  const Scenario& s = c.scenario;
  Json j;

  // A preset name is only rendered while the shape still matches the preset;
  // an edited shape is rendered inline (and parses back nameless).
  bool as_preset = false;
  if (!s.name.empty()) {
    try {
      const Scenario p = scenario_preset(s.name);
      as_preset = p.groups == s.groups && p.class_sizes == s.class_sizes &&
                  p.loads == s.loads;
    } catch (const std::invalid_argument&) {
      as_preset = false;
    }
  }
  if (as_preset) {
    j["scenario"] = s.name;
  } else {
    Json groups = Json::array();
    for (const auto& g : s.groups) groups.push_back({{"tasks", g.count}, {"pi", g.pi}});
    j["scenario"] = {{"groups", std::move(groups)},
                     {"class_sizes", s.class_sizes},
                     {"loads", s.loads}};
  }

  Json schemes = Json::array();
  for (SchemeKind k : s.schemes) schemes.push_back(scheme_token(k));
  j["schemes"] = std::move(schemes);
  j["sweep"] = {{"variable", s.sweep == SweepVariable::Beta ? "beta" : "x"},
                {"values", s.sweep_values}};
  j["x"] = s.fixed_x;
  j["beta"] = s.fixed_beta;
  j["trials"] = s.trials;
  j["seed"] = s.seed;
  j["objective"] = objective_name(s.objective);
  j["chernoff"] =
      s.chernoff == ChernoffVariant::Corrected ? "corrected" : "as_printed";
  j["output"] = c.output;
  return j.dump(2) + "\n";
}

}  // namespace crowdsim
