#include "scenario_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "socdispatch/error.hpp"

namespace socdispatch::io {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& source, const std::string& path, const std::string& what) {
  throw ValidationError(source + ": " + path + ": " + what);
}

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  const json& member(const json& obj, const std::string& path, const char* key) const {
    if (!obj.is_object()) fail(source_, path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(source_, join(path, key), "missing field");
    return *it;
  }

  double number(const json& v, const std::string& path) const {
    if (!v.is_number()) fail(source_, path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(source_, path, "expected a finite number");
    return x;
  }

  double number(const json& obj, const std::string& path, const char* key) const {
    return number(member(obj, path, key), join(path, key));
  }

  std::size_t count(const json& v, const std::string& path) const {
    if (!v.is_number_integer() || v.get<long long>() < 0) fail(source_, path, "expected a nonnegative integer");
    return v.get<std::size_t>();
  }

  std::vector<double> numbers(const json& obj, const std::string& path, const char* key) const {
    const auto& v = member(obj, path, key);
    const std::string p = join(path, key);
    if (!v.is_array()) fail(source_, p, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], p + "[" + std::to_string(i) + "]"));
    return out;
  }

  std::string text(const json& v, const std::string& path) const {
    if (!v.is_string()) fail(source_, path, "expected a string");
    return v.get<std::string>();
  }

  /// 1-based segment index to 0-based.
  std::size_t segment(const json& v, const std::string& path) const {
    const std::size_t k = count(v, path);
    if (k == 0) fail(source_, path, "segments are numbered from 1");
    return k - 1;
  }

  static std::string join(const std::string& path, const char* key) {
    return path.empty() ? std::string(key) : path + "." + key;
  }

 private:
  std::string source_;
};

std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

ScenarioDocument parse_scenario(const std::string& text, const std::string& source, bool check) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(source + ": " + line_column(text, e.byte == 0 ? 0 : e.byte - 1) +
                          ": malformed JSON (" + e.what() + ")");
  }
  const Reader r(source);
  if (!root.is_object()) fail(source, "<root>", "expected an object");

  ScenarioDocument doc;
  Scenario& sc = doc.scenario;
  if (auto it = root.find("meta"); it != root.end()) {
    const json& meta = *it;
    if (!meta.is_object()) fail(source, "meta", "expected an object");
    if (meta.contains("name")) sc.name = r.text(meta["name"], "meta.name");
    if (meta.contains("description")) sc.description = r.text(meta["description"], "meta.description");
    if (meta.contains("seed")) doc.seed = r.count(meta["seed"], "meta.seed");
  }
  sc.T = r.count(r.member(root, "", "horizon"), "horizon");
  sc.demand = r.numbers(root, "", "demand");

  const json& units = r.member(root, "", "storages");
  if (!units.is_array()) fail(source, "storages", "expected an array");
  for (std::size_t i = 0; i < units.size(); ++i) {
    const std::string p = "storages[" + std::to_string(i) + "]";
    const json& u = units[i];
    StorageUnit unit;
    unit.id = r.text(r.member(u, p, "id"), p + ".id");
    const json& bid = r.member(u, p, "bid");
    const std::string bp = p + ".bid";
    unit.bid.E = r.numbers(bid, bp, "E");
    unit.bid.cC = r.numbers(bid, bp, "cC");
    unit.bid.cD = r.numbers(bid, bp, "cD");
    unit.bid.etaC = r.number(bid, bp, "etaC");
    unit.bid.etaD = r.number(bid, bp, "etaD");
    const json& spec = r.member(u, p, "spec");
    const std::string sp = p + ".spec";
    auto& s = unit.spec;
    s.gCmax = r.number(spec, sp, "gCmax");
    s.gDmax = r.number(spec, sp, "gDmax");
    s.rCup = r.number(spec, sp, "rCup");
    s.rCdown = r.number(spec, sp, "rCdown");
    s.rDup = r.number(spec, sp, "rDup");
    s.rDdown = r.number(spec, sp, "rDdown");
    s.eMin = r.number(spec, sp, "eMin");
    s.eMax = r.number(spec, sp, "eMax");
    s.s = r.number(spec, sp, "s");
    if (spec.contains("g0C")) s.g0C = r.number(spec, sp, "g0C");
    if (spec.contains("g0D")) s.g0D = r.number(spec, sp, "g0D");
    if (u.contains("gamma")) unit.gamma = r.segment(u["gamma"], p + ".gamma");
    sc.fleet.push_back(std::move(unit));
  }

  if (auto it = root.find("options"); it != root.end()) {
    const json& o = *it;
    if (!o.is_object()) fail(source, "options", "expected an object");
    if (o.contains("window")) sc.options.window = r.count(o["window"], "options.window");
    if (o.contains("gamma")) sc.options.gamma = r.segment(o["gamma"], "options.gamma");
    if (o.contains("gamma_final_window_only")) {
      if (!o["gamma_final_window_only"].is_boolean())
        fail(source, "options.gamma_final_window_only", "expected true or false");
      sc.options.gamma_final_window_only = o["gamma_final_window_only"].get<bool>();
    }
    if (o.contains("tol")) {
      const json& t = o["tol"];
      if (!t.is_object()) fail(source, "options.tol", "expected an object");
      if (t.contains("feas")) sc.options.tol.feas = r.number(t, "options.tol", "feas");
      if (t.contains("comp")) sc.options.tol.comp = r.number(t, "options.tol", "comp");
      if (t.contains("gap")) sc.options.tol.gap = r.number(t, "options.tol", "gap");
    }
  }

  if (!check) return doc;
  try {
    sc.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(source + ": " + e.what());
  }
  return doc;
}

ScenarioDocument load_scenario(const std::string& path, bool check) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path, check);
}

json to_json(const ScenarioDocument& doc) {
  const Scenario& sc = doc.scenario;
  json meta = {{"name", sc.name}, {"description", sc.description}};
  if (doc.seed) meta["seed"] = *doc.seed;
  json units = json::array();
  for (const auto& u : sc.fleet) {
    const auto& s = u.spec;
    json j = {{"id", u.id},
              {"bid", {{"E", u.bid.E}, {"cC", u.bid.cC}, {"cD", u.bid.cD}, {"etaC", u.bid.etaC}, {"etaD", u.bid.etaD}}},
              {"spec",
               {{"gCmax", s.gCmax}, {"gDmax", s.gDmax}, {"rCup", s.rCup}, {"rCdown", s.rCdown},
                {"rDup", s.rDup}, {"rDdown", s.rDdown}, {"eMin", s.eMin}, {"eMax", s.eMax},
                {"s", s.s}, {"g0C", s.g0C}, {"g0D", s.g0D}}}};
    if (u.gamma) j["gamma"] = *u.gamma + 1;
    units.push_back(std::move(j));
  }
  json options = {{"window", sc.options.window},
                  {"gamma_final_window_only", sc.options.gamma_final_window_only},
                  {"tol", {{"feas", sc.options.tol.feas}, {"comp", sc.options.tol.comp}, {"gap", sc.options.tol.gap}}}};
  if (sc.options.gamma) options["gamma"] = *sc.options.gamma + 1;
  return {{"meta", meta}, {"horizon", sc.T}, {"demand", sc.demand}, {"storages", units}, {"options", options}};
}

std::string dump_scenario(const ScenarioDocument& doc) { return to_json(doc).dump(2) + "\n"; }

}  // namespace socdispatch::io
