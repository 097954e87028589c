#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "scenario_io.hpp"
#include "socdispatch/error.hpp"
#include "socdispatch/pricing.hpp"
#include "socdispatch/rolling.hpp"

namespace socdispatch::cli {

using nlohmann::json;
namespace fs = std::filesystem;

std::string format_number(double v) {
  if (v == 0.0) return "0";  // folds -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

lp::Tolerances parse_tolerances(const std::string& text, lp::Tolerances base) {
  auto value = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || !(v > 0.0) || !std::isfinite(v))
      throw ValidationError("SOCDISPATCH_TOL: '" + s + "' is not a positive number");
    return v;
  };
  if (text.find('=') == std::string::npos) {
    const double v = value(text);
    return {v, v, v};
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ValidationError("SOCDISPATCH_TOL: expected key=value, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    const double v = value(item.substr(eq + 1));
    if (key == "feas") base.feas = v;
    else if (key == "comp") base.comp = v;
    else if (key == "gap") base.gap = v;
    else throw ValidationError("SOCDISPATCH_TOL: unknown key '" + key + "' (feas, comp, gap)");
  }
  return base;
}

namespace {

// JSON numbers carry the same 12 significant digits as the CSV files.
json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return std::stod(format_number(v));
}

json nums(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

class Csv {
 public:
  explicit Csv(std::vector<std::string> header) { row(header); }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) text_ << (i ? "," : "") << cells[i];
    text_ << "\n";
  }

  std::string str() const { return text_.str(); }

 private:
  std::ostringstream text_;
};

struct Common {
  std::string path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> gamma;  // 1-based override
  bool end_state = false;
};

struct Loaded {
  io::ScenarioDocument doc;
  CostMode mode = CostMode::epigraph;
  std::uint64_t seed = 0;
};

Loaded load(const Common& c, const Environment& env) {
  Loaded l;
  l.doc = io::load_scenario(c.path);
  auto& sc = l.doc.scenario;
  if (env.tol) sc.options.tol = parse_tolerances(*env.tol, sc.options.tol);
  if (c.gamma) {
    if (*c.gamma == 0) throw ValidationError("--gamma: segments are numbered from 1");
    sc.options.gamma = *c.gamma - 1;
    for (auto& u : sc.fleet) u.gamma.reset();
    sc.validate();
  }
  if (c.gamma || c.end_state) l.mode = CostMode::end_segment_linear;
  l.seed = c.seed ? *c.seed : l.doc.seed.value_or(0);
  return l;
}

const char* mode_name(CostMode m) { return m == CostMode::epigraph ? "epigraph" : "end-segment"; }

class Output {
 public:
  Output(std::string dir, std::ostream& out) : dir_(std::move(dir)), out_(out) {
    if (!dir_.empty()) fs::create_directories(dir_);
  }

  bool to_files() const { return !dir_.empty(); }

  /// Writes the file when an output directory was given; otherwise echoes
  /// it to stdout when `echo` is set.
  void file(const std::string& name, const std::string& content, bool echo) {
    if (to_files()) {
      std::ofstream f(fs::path(dir_) / name);
      if (!f) throw ValidationError("cannot write " + (fs::path(dir_) / name).string());
      f << content;
    } else if (echo) {
      out_ << content;
    }
  }

  void summary(const json& j) { file("summary.json", j.dump(2) + "\n", false); }

 private:
  std::string dir_;
  std::ostream& out_;
};

std::string dispatch_csv(const std::vector<StorageDispatch>& storages, std::size_t T) {
  Csv csv({"t", "id", "gC", "gD", "e"});
  for (std::size_t t = 0; t < T; ++t)
    for (const auto& d : storages)
      if (t < d.gC.size())
        csv.row({std::to_string(t + 1), d.id, format_number(d.gC[t]), format_number(d.gD[t]),
                 format_number(d.e[t + 1])});
  return csv.str();
}

std::string duals_csv(const DispatchSolution& s) {
  Csv csv({"t", "id", "lambda", "phi", "muC_lo", "muC_hi", "muD_lo", "muD_hi"});
  for (std::size_t t = 0; t < s.lambda.size(); ++t)
    for (const auto& d : s.storages)
      csv.row({std::to_string(t + 1), d.id, format_number(s.lambda[t]), format_number(d.phi[t]),
               format_number(d.muC_lo[t]), format_number(d.muC_hi[t]), format_number(d.muD_lo[t]),
               format_number(d.muD_hi[t])});
  return csv.str();
}

std::string prices_csv(const PriceSchedule& p) {
  if (p.kind == PriceSchedule::Kind::uniform) {
    Csv csv({"t", "price"});
    for (std::size_t t = 0; t < p.pi.size(); ++t) csv.row({std::to_string(t + 1), format_number(p.pi[t])});
    return csv.str();
  }
  Csv csv({"t", "id", "charge", "discharge"});
  for (std::size_t t = 0; t < p.horizon(); ++t)
    for (std::size_t i = 0; i < p.ids.size(); ++i)
      csv.row({std::to_string(t + 1), p.ids[i], format_number(p.per_storage[i].charge[t]),
               format_number(p.per_storage[i].discharge[t])});
  return csv.str();
}

std::string loc_csv(const LocReport& r) {
  Csv csv({"id", "Q", "payment", "bid_cost", "loc"});
  for (const auto& e : r.entries)
    csv.row({e.id, format_number(e.Q), format_number(e.payment), format_number(e.bid_cost), format_number(e.loc)});
  return csv.str();
}

json storages_json(const std::vector<StorageDispatch>& storages) {
  json a = json::array();
  for (const auto& d : storages) a.push_back({{"id", d.id}, {"cost", num(d.cost)}});
  return a;
}

// ---------------------------------------------------------------------------

int cmd_validate(const Common& c, std::ostream& out) {
  const auto doc = io::load_scenario(c.path, false);
  const auto& sc = doc.scenario;
  bool ok = true;
  try {
    sc.validate();
  } catch (const ValidationError&) {
    ok = false;
  }
  out << "scenario " << (sc.name.empty() ? c.path : sc.name) << ": horizon " << sc.T << ", "
      << sc.fleet.size() << " storages\n";
  for (const auto& u : sc.fleet) {
    out << "storage " << u.id << ":";
    try {
      const auto bid = validate_bid(u.bid);
      const auto spec = validate_spec(u.spec, u.bid);
      out << " bid: " << (bid.ok ? "ok" : "violated") << "; limits: " << (spec.ok ? "ok" : "violated");
      const auto edcr = is_edcr(u.bid);
      out << "; EDCR: " << (edcr.edcr ? "yes" : "no");
      if (!edcr.edcr) {
        out << " (ratios";
        for (double r : edcr.ratios) out << " " << format_number(r);
        out << ", expected " << format_number(u.bid.etaC * u.bid.etaD) << ")";
      }
      out << "\n";
      for (const auto& m : bid.violations) out << "  " << m << "\n";
      for (const auto& m : spec.violations) out << "  " << m << "\n";
    } catch (const ValidationError& e) {
      out << " malformed: " << e.what() << "\n";
    }
  }
  if (!ok) {
    try {
      sc.validate();
    } catch (const ValidationError& e) {
      out << e.what() << "\n";
    }
  }
  out << (ok ? "valid" : "invalid") << "\n";
  return ok ? kOk : kInvalid;
}

int cmd_clear(const Common& c, const std::string& how, std::ostream& out, const Environment& env) {
  const auto l = load(c, env);
  const auto& sc = l.doc.scenario;
  DispatchSolution s;
  if (how == "oracle") {
    s = oracle_enumerate(sc);
  } else {
    try {
      s = solve_one_shot(sc, l.mode);
    } catch (const PreconditionError& e) {
      throw PreconditionError(std::string("EDCR required; use --mode oracle (") + e.what() + ")");
    }
  }
  Output o(c.out_dir, out);
  json j = {{"command", "clear"},
            {"scenario", sc.name},
            {"mode", how},
            {"cost", mode_name(l.mode)},
            {"objective", num(s.objective)},
            {"storages", storages_json(s.storages)},
            {"lemma1_ok", s.lemma1_ok}};
  if (s.has_duals) {
    j["lambda"] = nums(s.lambda);
    j["nonneg_lmp"] = s.nonneg_lmp;
    j["iterations"] = s.iterations;
  }
  o.summary(j);
  o.file("dispatch.csv", dispatch_csv(s.storages, sc.T), false);
  if (s.has_duals) {
    o.file("duals.csv", duals_csv(s), false);
    o.file("prices.csv", prices_csv(extract_lmp(s)), false);
  }
  out << "objective " << format_number(s.objective) << "\n";
  if (s.has_duals) {
    out << "lmp";
    for (double v : s.lambda) out << " " << format_number(v);
    out << "\n";
  }
  if (!s.lemma1_ok) out << "note: simultaneous charge and discharge in the optimal dispatch\n";
  return kOk;
}

ForecastError parse_forecast(const std::string& spec, double sigma) {
  ForecastError e;
  e.sigma = sigma;
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  if (kind == "none") e.kind = ForecastError::Kind::none;
  else if (kind == "additive") e.kind = ForecastError::Kind::additive;
  else if (kind == "multiplicative") e.kind = ForecastError::Kind::multiplicative;
  else throw ValidationError("--forecast: unknown error model '" + kind + "'");
  if (colon != std::string::npos) {
    std::stringstream ss(spec.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        e.offsets.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw ValidationError("--forecast: '" + item + "' is not a number");
      }
    }
  }
  if (e.kind == ForecastError::Kind::none && (sigma > 0.0 || !e.offsets.empty()))
    throw ValidationError("--forecast none takes no offsets or noise");
  return e;
}

struct RollArgs {
  std::size_t window = 0;
  std::string forecast = "none";
  double sigma = 0.0;
};

ForecastSet forecasts_for(const Loaded& l, const RollArgs& r) {
  const auto& sc = l.doc.scenario;
  std::size_t W = r.window ? r.window : sc.options.window;
  if (W == 0) W = sc.T;
  return make_forecasts(sc, W, parse_forecast(r.forecast, r.sigma), l.seed);
}

RollingResult checked_roll(const Scenario& sc, const ForecastSet& f, CostMode mode) {
  auto run = rolling_dispatch(sc, f, mode);
  if (!run.complete())
    throw InfeasibleError("rolling window " + std::to_string(run.failure->window + 1) + " failed: " +
                              run.failure->message,
                          run.failure->details);
  return run;
}

int cmd_roll(const Common& c, const RollArgs& r, std::ostream& out, const Environment& env) {
  const auto l = load(c, env);
  const auto& sc = l.doc.scenario;
  const auto f = forecasts_for(l, r);
  const auto run = rolling_dispatch(sc, f, l.mode);
  Output o(c.out_dir, out);
  json j = {{"command", "roll"},
            {"scenario", sc.name},
            {"window", f.W},
            {"cost", mode_name(l.mode)},
            {"seed", l.seed},
            {"complete", run.complete()},
            {"r_lmp", nums(run.lambda)}};
  if (run.complete()) j["objective"] = num(run.objective);
  if (run.failure)
    j["failure"] = {{"window", run.failure->window + 1}, {"message", run.failure->message},
                    {"details", run.failure->details}};
  o.summary(j);
  o.file("dispatch.csv", dispatch_csv(run.binding, sc.T), false);
  if (run.complete()) {
    o.file("prices.csv", prices_csv(r_lmp(run)), false);
    o.file("tlmp.csv", prices_csv(r_tlmp(run)), false);
  }
  if (!run.complete()) {
    out << "window " << run.failure->window + 1 << " failed: " << run.failure->message << "\n";
    return kSolver;
  }
  out << "objective " << format_number(run.objective) << "\nr-lmp";
  for (double v : run.lambda) out << " " << format_number(v);
  out << "\n";
  return kOk;
}

PriceSchedule scheme_prices(const std::string& scheme, const Loaded& l, const RollArgs& r,
                            DispatchSolution& realized) {
  const auto& sc = l.doc.scenario;
  if (scheme == "lmp" || scheme == "tlmp") {
    realized = solve_one_shot(sc, l.mode);
    return scheme == "lmp" ? extract_lmp(realized) : tlmp_schedule(realized);
  }
  const auto run = checked_roll(sc, forecasts_for(l, r), l.mode);
  realized = DispatchSolution{};
  realized.mode = l.mode;
  realized.demand = sc.demand;
  realized.lambda = run.lambda;
  realized.storages = run.binding;
  realized.has_duals = true;
  return scheme == "r-lmp" ? r_lmp(run) : r_tlmp(run);
}

int cmd_price(const Common& c, const std::string& scheme, const RollArgs& r, std::ostream& out,
              const Environment& env) {
  const auto l = load(c, env);
  DispatchSolution realized;
  const auto p = scheme_prices(scheme, l, r, realized);
  Output o(c.out_dir, out);
  o.summary({{"command", "price"}, {"scenario", l.doc.scenario.name}, {"scheme", scheme}, {"cost", mode_name(l.mode)}});
  o.file("prices.csv", prices_csv(p), true);
  return kOk;
}

int cmd_loc(const Common& c, const std::string& scheme, const RollArgs& r, std::ostream& out,
            const Environment& env) {
  const auto l = load(c, env);
  DispatchSolution realized;
  const auto p = scheme_prices(scheme, l, r, realized);
  const auto report = loc_audit(l.doc.scenario, realized, p);
  Output o(c.out_dir, out);
  json entries = json::array();
  for (const auto& e : report.entries)
    entries.push_back({{"id", e.id}, {"Q", num(e.Q)}, {"payment", num(e.payment)},
                       {"bid_cost", num(e.bid_cost)}, {"loc", num(e.loc)}});
  o.summary({{"command", "loc"},
             {"scenario", l.doc.scenario.name},
             {"scheme", scheme},
             {"cost", mode_name(l.mode)},
             {"max_loc", num(report.max_loc)},
             {"negative_prices", report.negative_prices},
             {"storages", entries}});
  o.file("prices.csv", prices_csv(p), false);
  o.file("loc.csv", loc_csv(report), true);
  if (report.negative_prices) out << "note: some prices are negative\n";
  return kOk;
}

int cmd_demo_affine(const std::string& path, const std::string& id, std::size_t points,
                    const std::string& out_file, std::ostream& out) {
  const auto doc = io::load_scenario(path);
  const StorageUnit* unit = nullptr;
  for (const auto& u : doc.scenario.fleet)
    if (id.empty() || u.id == id) {
      unit = &u;
      break;
    }
  if (!unit) throw ValidationError("--storage: no storage '" + id + "'");
  if (points < 2) throw ValidationError("--points must be at least 2");
  const auto& E = unit->bid.E;
  const double s = unit->spec.s;
  std::vector<double> grid;
  const double lo = E.front() - s, hi = E.back() - s;
  for (std::size_t i = 0; i < points; ++i)
    grid.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1));
  const auto p = affine_composition_profile(unit->bid, s, grid);

  Csv csv({"g", "cost", "second_difference", "violation"});
  for (std::size_t i = 0; i < p.g.size(); ++i) {
    const bool interior = i > 0 && i + 1 < p.g.size();
    std::string sd, flag;
    if (interior) {
      sd = format_number(p.second_difference[i - 1]);
      flag = std::find(p.violations.begin(), p.violations.end(), i) != p.violations.end() ? "1" : "0";
    }
    csv.row({format_number(p.g[i]), p.feasible[i] ? format_number(p.cost[i]) : "", sd, flag});
  }
  if (out_file.empty()) {
    out << csv.str();
  } else {
    std::ofstream f(out_file);
    if (!f) throw ValidationError("cannot write " + out_file);
    f << csv.str();
    out << "storage " << unit->id << ": " << p.violations.size() << " convexity violations\n";
  }
  return kOk;
}

int cmd_compare_oracle(const Common& c, std::ostream& out, const Environment& env) {
  const auto l = load(c, env);
  const auto& sc = l.doc.scenario;
  const auto orc = oracle_enumerate(sc);
  Output o(c.out_dir, out);
  json j = {{"command", "compare-oracle"}, {"scenario", sc.name}, {"oracle_objective", num(orc.objective)}};
  std::vector<std::string> non_edcr;
  for (const auto& u : sc.fleet)
    if (!is_edcr(u.bid).edcr) non_edcr.push_back(u.id);
  if (!non_edcr.empty()) {
    out << "oracle objective " << format_number(orc.objective) << "\n";
    out << "oracle only: not EDCR:";
    for (const auto& id : non_edcr) out << " " << id;
    out << "\n";
    j["oracle_only"] = true;
    o.summary(j);
    return kOk;
  }
  const auto lp = solve_one_shot(sc);
  const double gap = std::abs(lp.objective - orc.objective);
  const double rel = gap / (1.0 + std::abs(orc.objective));
  const bool equal = rel <= 1e-7;
  out << "lp objective " << format_number(lp.objective) << "\n"
      << "oracle objective " << format_number(orc.objective) << "\n"
      << "gap " << format_number(gap) << "\n"
      << "equivalent " << (equal ? "yes" : "no") << "\n";
  j["lp_objective"] = num(lp.objective);
  j["gap"] = num(gap);
  j["equivalent"] = equal;
  o.summary(j);
  return equal ? kOk : kSolver;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const Environment& env) {
  CLI::App app{"Market clearing and pricing for storage with SoC-dependent bids", "socdispatch"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every command");

  Common c;
  RollArgs r;
  std::string how = "oneshot", scheme = "lmp", storage, out_file;
  std::size_t points = 101;

  auto scenario_args = [&](CLI::App* cmd, bool with_out) {
    cmd->add_option("scenario", c.path, "Scenario JSON file")->required();
    if (with_out) cmd->add_option("--out", c.out_dir, "Directory for summary.json and CSV files");
  };
  auto market_args = [&](CLI::App* cmd) {
    cmd->add_option("--gamma", c.gamma, "End segment (1-based) for every multi-segment storage; enables end-state control");
    cmd->add_flag("--end-state", c.end_state, "End-state control with the end segments given in the file");
    cmd->add_option("--seed", c.seed, "Seed for forecast noise (default: meta.seed, else 0)");
  };
  auto rolling_args = [&](CLI::App* cmd) {
    cmd->add_option("--window", r.window, "Window length (default: options.window, else the horizon)");
    cmd->add_option("--forecast", r.forecast, "none | additive[:o1,o2,...] | multiplicative[:f1,f2,...]");
    cmd->add_option("--sigma", r.sigma, "Width of seeded Gaussian forecast noise")->check(CLI::NonNegativeNumber);
  };
  const std::vector<std::string> schemes{"lmp", "tlmp", "r-lmp", "r-tlmp"};

  auto* validate = app.add_subcommand("validate", "Check bid validity, physical limits and EDCR");
  scenario_args(validate, false);

  auto* clear = app.add_subcommand("clear", "One-shot market clearing");
  scenario_args(clear, true);
  market_args(clear);
  clear->add_option("--mode", how, "oneshot | oracle")->check(CLI::IsMember({"oneshot", "oracle"}));

  auto* roll = app.add_subcommand("roll", "Rolling-window dispatch");
  scenario_args(roll, true);
  market_args(roll);
  rolling_args(roll);

  auto* price = app.add_subcommand("price", "Price schedule");
  scenario_args(price, true);
  market_args(price);
  rolling_args(price);
  price->add_option("--scheme", scheme, "lmp | tlmp | r-lmp | r-tlmp")->check(CLI::IsMember(schemes));

  auto* locc = app.add_subcommand("loc", "Lost opportunity cost per storage");
  scenario_args(locc, true);
  market_args(locc);
  rolling_args(locc);
  locc->add_option("--scheme", scheme, "lmp | tlmp | r-lmp | r-tlmp")->check(CLI::IsMember(schemes));

  auto* affine = app.add_subcommand("demo-affine", "Two-interval loop-back cost profile");
  affine->add_option("scenario", c.path, "Scenario JSON file")->required();
  affine->add_option("--storage", storage, "Storage id (default: first)");
  affine->add_option("--points", points, "Grid points");
  affine->add_option("--out", out_file, "CSV file (default: stdout)");

  auto* compare = app.add_subcommand("compare-oracle", "LP clearing against segment enumeration");
  scenario_args(compare, true);

  std::vector<std::string> argv_store{"socdispatch"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kInvalid;
  }

  try {
    if (*validate) return cmd_validate(c, out);
    if (*clear) return cmd_clear(c, how, out, env);
    if (*roll) return cmd_roll(c, r, out, env);
    if (*price) return cmd_price(c, scheme, r, out, env);
    if (*locc) return cmd_loc(c, scheme, r, out, env);
    if (*affine) return cmd_demo_affine(c.path, storage, points, out_file, out);
    if (*compare) return cmd_compare_oracle(c, out, env);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << "\n";
    return kPrecondition;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kPrecondition;
  } catch (const GuardRailError& e) {
    err << "error: " << e.what() << "\n";
    return kGuardRail;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kSolver;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kInvalid;
  }
  return kInvalid;
}

}  // namespace socdispatch::cli
