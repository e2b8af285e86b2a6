// Copyright 2026 The fermicert Authors
// SPDX-License-Identifier: Apache-2.0

#include "fermicert/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "fermicert/cond_exp.hpp"
#include "fermicert/dynamics.hpp"
#include "fermicert/error.hpp"
#include "fermicert/gap.hpp"
#include "fermicert/lr_cert.hpp"
#include "fermicert/models.hpp"

namespace fermicert {

using nlohmann::json;

namespace {

const std::set<std::string> kTasks = {"lr-certify", "condexp-check", "gap-certify", "flow-check",
                                      "model-info"};

// Parameter names accepted by each model.
const std::map<std::string, std::set<std::string>> kModels = {
    {"hopping_chain", {"J", "mu"}},
    {"ramped_hopping_chain", {"J0", "J1", "t0", "t1", "mu"}},
    {"kitaev_chain", {"hopping", "pairing", "mu", "bond_weights"}},
    {"flat_band", {"theta", "phi"}},
    {"number_chain", {}},
    {"random_even", {"range", "strength"}},
    {"flat_band_rotation", {}},
    {"flat_band_closing", {}},
};

const std::set<std::string> kFamilies = {"flat_band_rotation", "flat_band_closing"};
const std::set<std::string> kSlabModels = {"random_even"};

constexpr double kCondExpTolerance = 1e-12;
constexpr double kSoundnessTolerance = 1e-8;
constexpr double kAssumptionTolerance = 1e-10;
constexpr double kFlowTolerance = 1e-6;

class Checker {
 public:
  std::vector<Diagnostic> diags;

  void add(const std::string& field, const std::string& message) {
    diags.push_back({field, message});
  }

  const json* field(const json& obj, const std::string& key, const std::string& path,
                    bool required) {
    if (!obj.is_object() || !obj.contains(key)) {
      if (required) add(path, "missing required field");
      return nullptr;
    }
    return &obj.at(key);
  }

  std::optional<double> number(const json& obj, const std::string& key, const std::string& path,
                               bool required) {
    const json* v = field(obj, key, path, required);
    if (!v) return std::nullopt;
    if (!v->is_number()) {
      add(path, "must be a number");
      return std::nullopt;
    }
    const double d = v->get<double>();
    if (!std::isfinite(d)) {
      add(path, "must be finite");
      return std::nullopt;
    }
    return d;
  }

  std::optional<std::int64_t> integer(const json& obj, const std::string& key,
                                      const std::string& path, bool required) {
    const json* v = field(obj, key, path, required);
    if (!v) return std::nullopt;
    if (!v->is_number_integer()) {
      add(path, "must be an integer");
      return std::nullopt;
    }
    return v->get<std::int64_t>();
  }

  const json* object(const json& obj, const std::string& key, const std::string& path,
                     bool required) {
    const json* v = field(obj, key, path, required);
    if (v && !v->is_object()) {
      add(path, "must be an object");
      return nullptr;
    }
    return v;
  }
};

std::size_t site_count(const std::vector<int>& lengths) {
  std::size_t n = 1;
  for (int l : lengths) n *= static_cast<std::size_t>(std::max(l, 0));
  return n;
}

bool valid_observable(const std::string& desc, std::size_t sites, std::string& why) {
  if (desc.size() == sites &&
      std::all_of(desc.begin(), desc.end(), [](char c) { return std::string("Iacn").find(c) != std::string::npos; })) {
    return true;
  }
  const auto colon = desc.find(':');
  if (colon == std::string::npos) {
    why = "expected a monomial label of length " + std::to_string(sites) +
          " over {I,a,c,n} or kind:index";
    return false;
  }
  const std::string kind = desc.substr(0, colon);
  static const std::set<std::string> kinds = {"a", "c", "n", "annihilator", "creator", "number"};
  if (!kinds.count(kind)) {
    why = "unknown observable kind '" + kind + "'";
    return false;
  }
  const std::string idx = desc.substr(colon + 1);
  if (idx.empty() || !std::all_of(idx.begin(), idx.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    why = "site index must be a non-negative integer";
    return false;
  }
  if (std::stoul(idx) >= sites) {
    why = "site index " + idx + " is not in the lattice";
    return false;
  }
  return true;
}

std::optional<std::vector<std::size_t>> site_list(Checker& c, const json& obj,
                                                  const std::string& key, const std::string& path,
                                                  std::size_t sites, bool required) {
  const json* v = c.field(obj, key, path, required);
  if (!v) return std::nullopt;
  if (!v->is_array()) {
    c.add(path, "must be an array of site indices");
    return std::nullopt;
  }
  std::vector<std::size_t> out;
  for (const auto& e : *v) {
    if (!e.is_number_integer() || e.get<std::int64_t>() < 0 ||
        static_cast<std::size_t>(e.get<std::int64_t>()) >= sites) {
      c.add(path, "entries must be site indices in [0, " + std::to_string(sites) + ")");
      return std::nullopt;
    }
    out.push_back(static_cast<std::size_t>(e.get<std::int64_t>()));
  }
  std::set<std::size_t> unique(out.begin(), out.end());
  if (unique.size() != out.size()) {
    c.add(path, "site indices must be distinct");
    return std::nullopt;
  }
  return out;
}

void validate_model(Checker& c, const json& model, int dimension, const std::string& task) {
  const json* name = c.field(model, "name", "model.name", true);
  if (!name) return;
  if (!name->is_string() || !kModels.count(name->get<std::string>())) {
    std::string known;
    for (const auto& [k, v] : kModels) known += (known.empty() ? "" : ", ") + k;
    c.add("model.name", "unknown model; expected one of: " + known);
    return;
  }
  const std::string n = name->get<std::string>();
  if (dimension != 1 && !kSlabModels.count(n)) {
    c.add("model.name", "model '" + n + "' requires lattice.dimension = 1");
  }
  const bool family = kFamilies.count(n) > 0;
  if (task == "flow-check" && !family) {
    c.add("model.name", "flow-check requires a model family (flat_band_rotation or flat_band_closing)");
  }
  if (task != "flow-check" && family) {
    c.add("model.name", "model families are only valid for flow-check");
  }
  if ((task == "gap-certify" || task == "flow-check") && n == "ramped_hopping_chain") {
    c.add("model.name", "task requires a time-independent model");
  }
  const json* params = c.object(model, "params", "model.params", false);
  if (!params) return;
  const auto& allowed = kModels.at(n);
  for (const auto& [key, value] : params->items()) {
    const std::string path = "model.params." + key;
    if (!allowed.count(key)) {
      c.add(path, "unknown parameter for model '" + n + "'");
      continue;
    }
    if (key == "bond_weights") {
      if (!value.is_array() ||
          !std::all_of(value.begin(), value.end(), [](const json& e) { return e.is_number(); })) {
        c.add(path, "must be an array of numbers");
      }
    } else if (key == "range") {
      if (!value.is_number_integer() || value.get<std::int64_t>() < 0) {
        c.add(path, "must be a non-negative integer");
      }
    } else if (!value.is_number() || !std::isfinite(value.get<double>())) {
      c.add(path, "must be a finite number");
    }
  }
  if (n == "kitaev_chain" && !params->contains("mu")) {
    const double t = params->value("hopping", 1.0);
    const double d = params->value("pairing", 0.8);
    if (std::abs(d) > std::abs(t)) {
      c.add("model.params.pairing", "frustration-free point needs |pairing| <= |hopping|");
    }
  }
}

}  // namespace

std::vector<Diagnostic> validate_config(const json& config) {
  Checker c;
  if (!config.is_object()) {
    c.add("", "config must be a JSON object");
    return c.diags;
  }
  std::string task;
  if (const json* t = c.field(config, "task", "task", true)) {
    if (!t->is_string() || !kTasks.count(t->get<std::string>())) {
      c.add("task", "must be one of lr-certify, condexp-check, gap-certify, flow-check, model-info");
    } else {
      task = t->get<std::string>();
    }
  }
  if (const json* n = c.field(config, "name", "name", false)) {
    const std::string name = n->is_string() ? n->get<std::string>() : std::string();
    const bool ok = !name.empty() && std::all_of(name.begin(), name.end(), [](char ch) {
      return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.';
    });
    if (!ok) c.add("name", "must be a non-empty string of [A-Za-z0-9_.-]");
  }
  if (const json* s = c.field(config, "seed", "seed", false)) {
    if (!s->is_number_unsigned() && !(s->is_number_integer() && s->get<std::int64_t>() >= 0)) {
      c.add("seed", "must be a non-negative integer");
    }
  }
  if (auto tol = c.number(config, "tolerance", "tolerance", false)) {
    if (*tol <= 0.0) c.add("tolerance", "must be positive");
  }

  // Lattice.
  std::size_t sites = 0;
  int dimension = 1;
  if (const json* lat = c.object(config, "lattice", "lattice", true)) {
    const auto dim = c.integer(*lat, "dimension", "lattice.dimension", false);
    if (dim && (*dim < 1 || *dim > 3)) c.add("lattice.dimension", "must be 1, 2 or 3");
    if (dim) dimension = static_cast<int>(*dim);
    std::size_t cap = kDefaultSiteCap;
    if (const auto m = c.integer(*lat, "max_sites", "lattice.max_sites", false)) {
      if (*m < 1 || static_cast<std::size_t>(*m) > kMaxSites) {
        c.add("lattice.max_sites", "must lie in [1, " + std::to_string(kMaxSites) + "]");
      } else {
        cap = static_cast<std::size_t>(*m);
      }
    }
    if (const json* b = c.field(*lat, "boundary", "lattice.boundary", false)) {
      if (!b->is_string() || (*b != "open" && *b != "periodic")) {
        c.add("lattice.boundary", "must be \"open\" or \"periodic\"");
      }
    }
    if (const json* l = c.field(*lat, "lengths", "lattice.lengths", true)) {
      std::vector<int> lengths;
      bool ok = l->is_array() && !l->empty();
      if (ok) {
        for (const auto& e : *l) {
          if (!e.is_number_integer() || e.get<std::int64_t>() < 1 || e.get<std::int64_t>() > 64) {
            ok = false;
            break;
          }
          lengths.push_back(e.get<int>());
        }
      }
      if (!ok) {
        c.add("lattice.lengths", "must be a non-empty array of positive integers");
      } else {
        if (static_cast<int>(lengths.size()) != dimension) {
          c.add("lattice.lengths", "expected " + std::to_string(dimension) + " side lengths");
        }
        sites = site_count(lengths);
        if (sites > cap) {
          c.add("lattice.lengths", "|Lambda| = " + std::to_string(sites) + " exceeds the site cap " +
                                       std::to_string(cap));
          sites = 0;
        } else if (sites < 2) {
          c.add("lattice.lengths", "lattice needs at least 2 sites");
          sites = 0;
        }
      }
    }
  }

  if (const json* d = c.object(config, "decay", "decay", false)) {
    if (auto nu = c.number(*d, "nu", "decay.nu", false); nu && *nu <= 0.0) c.add("decay.nu", "must be positive");
    if (auto e = c.number(*d, "epsilon", "decay.epsilon", false); e && *e <= 0.0) c.add("decay.epsilon", "must be positive");
    if (auto a = c.number(*d, "a", "decay.a", false); a && *a < 0.0) c.add("decay.a", "must be non-negative");
  }

  if (task.empty()) return c.diags;

  const bool needs_model = task != "condexp-check";
  if (needs_model) {
    if (const json* m = c.object(config, "model", "model", true)) validate_model(c, *m, dimension, task);
  }

  if (task == "lr-certify") {
    if (const json* obs = c.object(config, "observables", "observables", true)) {
      for (const char* key : {"A", "B"}) {
        const std::string path = std::string("observables.") + key;
        if (const json* o = c.field(*obs, key, path, true)) {
          std::string why;
          if (!o->is_string()) {
            c.add(path, "must be a string");
          } else if (sites > 0 && !valid_observable(o->get<std::string>(), sites, why)) {
            c.add(path, why);
          }
        }
      }
    }
    if (const json* mode = c.field(config, "mode", "mode", false)) {
      if (!mode->is_string() || (*mode != "commutator" && *mode != "anticommutator")) {
        c.add("mode", "must be \"commutator\" or \"anticommutator\"");
      }
    }
    if (const json* time = c.object(config, "time", "time", true)) {
      const auto start = c.number(*time, "start", "time.start", false);
      const auto end = c.number(*time, "end", "time.end", true);
      if (end && *end <= start.value_or(0.0)) c.add("time.end", "must exceed time.start");
      if (auto p = c.integer(*time, "points", "time.points", false); p && (*p < 2 || *p > 100000)) {
        c.add("time.points", "must lie in [2, 100000]");
      }
      if (auto s = c.number(*time, "step", "time.step", false); s && *s <= 0.0) {
        c.add("time.step", "must be positive");
      }
    }
  }

  if (task == "condexp-check") {
    if (const json* ce = c.object(config, "condexp", "condexp", true)) {
      const auto x = site_list(c, *ce, "region", "condexp.region", std::max<std::size_t>(sites, 1), true);
      site_list(c, *ce, "y_region", "condexp.y_region", std::max<std::size_t>(sites, 1), false);
      if (x && sites > 0 && sites - x->size() > kMaxKraussSites) {
        c.add("condexp.region", "|Lambda \\ X| must not exceed " + std::to_string(kMaxKraussSites));
      }
      if (auto s = c.integer(*ce, "samples", "condexp.samples", false); s && (*s < 1 || *s > 10000)) {
        c.add("condexp.samples", "must lie in [1, 10000]");
      }
    }
  }

  if (task == "gap-certify") {
    if (const json* g = c.object(config, "gap", "gap", false)) {
      if (const json* target = c.object(*g, "sandwich_target", "gap.sandwich_target", false)) {
        Checker inner;
        validate_model(inner, *target, dimension, task);
        for (auto& d : inner.diags) {
          c.add("gap.sandwich_target" + d.field.substr(std::string("model").size()), d.message);
        }
      }
    }
  }

  if (task == "flow-check") {
    if (const json* f = c.object(config, "flow", "flow", true)) {
      const auto start = c.number(*f, "start", "flow.start", false);
      const auto end = c.number(*f, "end", "flow.end", false);
      if (end.value_or(1.0) <= start.value_or(0.0)) c.add("flow.end", "must exceed flow.start");
      if (auto g = c.number(*f, "gamma_min", "flow.gamma_min", true); g && *g <= 0.0) {
        c.add("flow.gamma_min", "must be positive");
      }
      if (auto p = c.integer(*f, "points", "flow.points", false); p && (*p < 2 || *p > 10000)) {
        c.add("flow.points", "must lie in [2, 10000]");
      }
      if (auto s = c.integer(*f, "substeps", "flow.substeps", false); s && (*s < 1 || *s > 4096)) {
        c.add("flow.substeps", "must lie in [1, 4096]");
      }
      if (auto r = c.integer(*f, "rank", "flow.rank", false); r && *r < 0) {
        c.add("flow.rank", "must be non-negative");
      }
    }
  }
  return c.diags;
}

std::vector<Diagnostic> validate_config_text(const std::string& text) {
  json config;
  try {
    config = json::parse(text);
  } catch (const json::parse_error& e) {
    return {{"", std::string("invalid JSON: ") + e.what()}};
  }
  return validate_config(config);
}

json apply_overrides(json config, const Overrides& overrides) {
  if (!config.is_object()) return config;
  if (overrides.seed) config["seed"] = *overrides.seed;
  if (overrides.tol) config["tolerance"] = *overrides.tol;
  if (overrides.grid) {
    const std::string task = config.value("task", "");
    if (task == "lr-certify" && config.contains("time") && config["time"].is_object()) {
      config["time"]["points"] = *overrides.grid;
    } else if (task == "flow-check" && config.contains("flow") && config["flow"].is_object()) {
      config["flow"]["points"] = *overrides.grid;
    }
  }
  return config;
}

json error_object(const std::string& code, const std::string& message,
                  const std::vector<Diagnostic>& diagnostics) {
  json diags = json::array();
  for (const auto& d : diagnostics) diags.push_back({{"field", d.field}, {"message", d.message}});
  return {{"status", "error"},
          {"exit_code", kExitUsage},
          {"error", {{"code", code}, {"message", message}, {"diagnostics", diags}}}};
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content,
                std::vector<std::filesystem::path>& files) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::config, "cannot write " + path.string());
  out << content;
  files.push_back(path);
}

struct Context {
  json config;
  std::string task;
  std::string name;
  std::uint64_t seed = 0;
  std::optional<double> tolerance;
  std::vector<int> lengths;
  Boundary boundary = Boundary::open;
  MetricGraph graph = MetricGraph::chain(1);
  SiteSetPtr lambda;
};

double param(const json& model, const char* key, double fallback) {
  if (!model.contains("params")) return fallback;
  const json& p = model.at("params");
  return p.contains(key) ? p.at(key).get<double>() : fallback;
}

Interaction build_model(const Context& ctx, const json& model) {
  const std::string n = model.at("name").get<std::string>();
  const std::size_t length = ctx.lambda->size();
  if (n == "hopping_chain") {
    return hopping_chain(length, param(model, "J", 1.0), param(model, "mu", 0.0), ctx.boundary);
  }
  if (n == "ramped_hopping_chain") {
    return ramped_hopping_chain(length, param(model, "J0", 0.5), param(model, "J1", 1.5),
                                param(model, "t0", 0.0), param(model, "t1", 2.0),
                                param(model, "mu", 0.0));
  }
  if (n == "kitaev_chain") {
    KitaevParams k;
    k.hopping = param(model, "hopping", 1.0);
    k.pairing = param(model, "pairing", 0.8);
    if (model.contains("params") && model["params"].contains("mu")) k.mu = model["params"]["mu"].get<double>();
    if (model.contains("params") && model["params"].contains("bond_weights")) {
      k.bond_weights = model["params"]["bond_weights"].get<std::vector<double>>();
    }
    return kitaev_chain(length, k);
  }
  if (n == "flat_band") {
    return flat_band_model(
        brick_wall_orbitals(length, param(model, "theta", 0.3), param(model, "phi", 0.2)));
  }
  if (n == "number_chain") return number_chain(length);
  if (n == "random_even") {
    const auto range = model.contains("params") && model["params"].contains("range")
                           ? model["params"]["range"].get<std::size_t>()
                           : std::size_t{1};
    return random_even_interaction(ctx.lambda, range, param(model, "strength", 1.0), ctx.seed);
  }
  if (n == "flat_band_rotation") return rotated_flat_band(length, 0.0);
  if (n == "flat_band_closing") return closing_flat_band(length, 0.0);
  throw Error(ErrorCode::config, "unknown model " + n);
}

FockOperator parse_observable(const SiteSetPtr& lambda, const std::string& desc) {
  if (desc.size() == lambda->size() && desc.find(':') == std::string::npos) {
    MonomialLabel label;
    for (char c : desc) {
      switch (c) {
        case 'I': label.symbols.push_back(MonomialSymbol::identity); break;
        case 'a': label.symbols.push_back(MonomialSymbol::annihilate); break;
        case 'c': label.symbols.push_back(MonomialSymbol::create); break;
        default: label.symbols.push_back(MonomialSymbol::number); break;
      }
    }
    return monomial(lambda, label);
  }
  const auto colon = desc.find(':');
  const std::string kind = desc.substr(0, colon);
  const std::size_t index = std::stoul(desc.substr(colon + 1));
  if (kind == "a" || kind == "annihilator") return build_annihilator(lambda, index);
  if (kind == "c" || kind == "creator") return build_creator(lambda, index);
  return number_operator(lambda, site_bit(index));
}

SiteMask mask_from(const json& arr) {
  SiteMask m = 0;
  for (const auto& e : arr) m |= site_bit(e.get<std::size_t>());
  return m;
}

json sites_json(const SiteSet& lambda, SiteMask mask) {
  json out = json::array();
  for (auto i : lambda.indices(mask)) out.push_back(i);
  return out;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

struct TaskOutput {
  bool certified = true;
  json result;
  std::string csv;
  std::string plot;
};

// --- lr-certify -------------------------------------------------------------

TaskOutput run_lr(const Context& ctx) {
  const json& cfg = ctx.config;
  const Interaction phi = build_model(ctx, cfg.at("model"));
  const FockOperator a = parse_observable(ctx.lambda, cfg["observables"]["A"].get<std::string>());
  const FockOperator b = parse_observable(ctx.lambda, cfg["observables"]["B"].get<std::string>());
  DecayFunction f;
  if (cfg.contains("decay")) {
    f.nu = cfg["decay"].value("nu", 1.0);
    f.epsilon = cfg["decay"].value("epsilon", 1.0);
    f.a = cfg["decay"].value("a", 0.0);
  }
  const GFunction g = g_from_f(f, ctx.graph);
  const json& time = cfg.at("time");
  const double start = time.value("start", 0.0);
  const double end = time.at("end").get<double>();
  const int points = time.value("points", 41);
  const std::vector<double> times = uniform_grid(start, end, points - 1);
  const BracketMode mode = cfg.value("mode", "commutator") == "anticommutator"
                               ? BracketMode::anticommutator
                               : BracketMode::commutator;
  CertifyOptions options;
  options.step = time.value("step", kDefaultStep);
  if (ctx.tolerance) options.relative_slack = *ctx.tolerance;

  TaskOutput out;
  out.result["mode"] = bracket_mode_name(mode);
  out.result["A"] = cfg["observables"]["A"];
  out.result["B"] = cfg["observables"]["B"];
  out.result["decay"] = {{"nu", f.nu}, {"epsilon", f.epsilon}, {"a", f.a}};
  try {
    const LRBoundReport report = certify(a, b, phi, g, start, times, mode, options);
    out.result["support_a"] = sites_json(*ctx.lambda, report.support_a);
    out.result["support_b"] = sites_json(*ctx.lambda, report.support_b);
    out.result["norm_a"] = report.norm_a;
    out.result["norm_b"] = report.norm_b;
    out.result["phi_boundary"] = sites_json(*ctx.lambda, report.boundary);
    out.result["geometry"] = report.geometry;
    out.result["g_norm"] = report.g_norm;
    out.result["max_ratio"] = report.max_ratio();
    out.result["max_unitarity_defect"] = report.max_unitarity_defect;
    json pts = json::array();
    std::ostringstream plot;
    plot << "# t measured bound\n";
    for (const auto& p : report.points) {
      pts.push_back({{"t", p.t}, {"measured", p.measured}, {"bound", p.bound}, {"ratio", p.ratio},
                     {"phi_integral", p.phi_integral}});
      plot << num(p.t) << ' ' << num(p.measured) << ' ' << num(p.bound) << '\n';
    }
    out.result["points"] = pts;
    out.csv = report_csv(report);
    out.plot = plot.str();
  } catch (const CertificationFailed& e) {
    out.certified = false;
    out.result["failure"] = {{"t", e.time}, {"measured", e.measured}, {"bound", e.bound},
                             {"message", e.what()}};
    out.csv = "t,measured,bound,ratio,mode\n" + num(e.time) + "," + num(e.measured) + "," +
              num(e.bound) + "," + num(e.bound > 0 ? e.measured / e.bound : 0.0) + "," +
              bracket_mode_name(mode) + "\n";
    out.plot = "# t measured bound\n" + num(e.time) + ' ' + num(e.measured) + ' ' + num(e.bound) + '\n';
  }
  return out;
}

// --- condexp-check -----------------------------------------------------------

TaskOutput run_condexp(const Context& ctx) {
  const json& ce = ctx.config.at("condexp");
  const SiteMask x = mask_from(ce.at("region"));
  const SiteMask all = ctx.lambda->all();
  const SiteMask y = ce.contains("y_region") ? mask_from(ce.at("y_region")) : (all & ~x);
  const int samples = ce.value("samples", 100);
  const double tol = ctx.tolerance.value_or(kCondExpTolerance);
  const std::size_t outside = static_cast<std::size_t>(popcount(all & ~x));
  std::mt19937_64 rng(ctx.seed);

  double projection = 0.0, norm_one = 0.0, tracial = 0.0, sweep = 0.0, e_vs_f = 0.0, approx = 0.0;
  const FockOperator one = FockOperator::identity(ctx.lambda);
  norm_one = spectral_norm(cond_exp_E(one, x).matrix() - one.matrix());
  std::ostringstream plot;
  plot << "# sample projection norm_one sweep_vs_krauss e_vs_f\n";
  const bool do_sweep = outside <= kExhaustiveKraussSites;
  const int approx_samples = std::min(samples, 20);
  for (int k = 0; k < samples; ++k) {
    const FockOperator a = random_local_operator(ctx.lambda, all, Parity::mixed, rng);
    const FockOperator ea = cond_exp_E(a, x);
    const double p = spectral_norm(cond_exp_E(ea, x).matrix() - ea.matrix());
    const double n = std::max(0.0, spectral_norm(ea.matrix()) - spectral_norm(a.matrix()));
    tracial = std::max(tracial, std::abs(tracial_state(ea) - tracial_state(a)));
    double s = 0.0;
    if (do_sweep) s = spectral_norm(ea.matrix() - cond_exp_E_krauss_sum(a, x).matrix());
    const FockOperator even = random_local_operator(ctx.lambda, all, Parity::even, rng);
    const double f = spectral_norm(cond_exp_E(even, x).matrix() - cond_exp_F(even, x).matrix());
    if (k < approx_samples) {
      const LocalApproximation la = local_approximation(even, x);
      approx = std::max(approx, la.error - la.commutator_bound);
    }
    projection = std::max(projection, p);
    norm_one = std::max(norm_one, n);
    sweep = std::max(sweep, s);
    e_vs_f = std::max(e_vs_f, f);
    plot << k << ' ' << num(p) << ' ' << num(n) << ' ' << num(s) << ' ' << num(f) << '\n';
  }
  const FamilyDefects fam = verify_expectation_family(ctx.lambda, x, y, samples, rng);

  TaskOutput out;
  json checks = json::array();
  std::ostringstream csv;
  csv << "check,defect,tolerance,pass\n";
  const auto add = [&](const std::string& name, double defect, bool skipped = false) {
    const bool pass = skipped || defect <= tol;
    out.certified = out.certified && pass;
    checks.push_back({{"check", name}, {"defect", defect}, {"tolerance", tol}, {"pass", pass},
                      {"skipped", skipped}});
    csv << name << ',' << num(defect) << ',' << num(tol) << ',' << (skipped ? "skipped" : pass ? "true" : "false") << '\n';
  };
  add("projection", projection);
  add("norm_one", norm_one);
  add("tracial_invariance", tracial);
  add("sweep_vs_krauss_sum", sweep, !do_sweep);
  add("e_equals_f_on_even", e_vs_f);
  add("composition", fam.composition);
  add("product", fam.product);
  add("volume_independence", fam.volume);
  add("local_approximation_violation", std::max(0.0, approx));
  out.result["region"] = sites_json(*ctx.lambda, x);
  out.result["y_region"] = sites_json(*ctx.lambda, y);
  out.result["samples"] = samples;
  out.result["local_approximation_bound"] =
      outside <= kExhaustiveKraussSites ? "exhaustive" : "site-wise triangle estimate";
  out.result["checks"] = checks;
  out.csv = csv.str();
  out.plot = plot.str();
  return out;
}

// --- gap-certify --------------------------------------------------------------

TaskOutput run_gap(const Context& ctx) {
  const Interaction phi = build_model(ctx, ctx.config.at("model"));
  const double tol = ctx.tolerance.value_or(kSoundnessTolerance);
  TaskOutput out;
  const FrustrationFreeResult ff = frustration_free_check(phi);
  out.result["frustration_free"] = {{"frustration_free", ff.frustration_free},
                                    {"residual", ff.residual},
                                    {"annihilation_residual", ff.annihilation_residual},
                                    {"ground_energy", ff.ground_energy},
                                    {"termwise_sum", ff.termwise_sum},
                                    {"ground_degeneracy", ff.ground_degeneracy}};
  const HamiltonianSequence seq = left_to_right_sequence(phi);
  const GapCertificate cert = martingale_certificate(seq, true);
  out.result["sequence_length"] = seq.length();
  out.result["gamma"] = cert.gamma;
  out.result["ell"] = cert.ell ? json(*cert.ell) : json(nullptr);
  out.result["epsilon"] = cert.epsilon;
  out.result["bound"] = optional_number(cert.bound);
  out.result["exact_gap"] = optional_number(cert.exact_gap);
  out.result["ground_degeneracy"] = cert.ground_degeneracy;
  out.result["defects"] = {{"assumption_i", cert.defect_i},
                           {"assumption_ii", cert.defect_ii},
                           {"assumption_iii", cert.defect_iii},
                           {"resolution_self_adjoint", cert.resolution.self_adjoint},
                           {"resolution_orthogonality", cert.resolution.orthogonality},
                           {"resolution_completeness", cert.resolution.completeness},
                           {"monotonicity", seq.monotonicity_defect()}};
  json steps = json::array();
  std::ostringstream csv;
  std::ostringstream plot;
  csv << "n,gamma_n,epsilon_squared,reach,kernel_rank\n";
  plot << "# n gamma_n epsilon_squared reach kernel_rank\n";
  for (const auto& s : cert.steps) {
    steps.push_back({{"n", s.n}, {"gamma_n", std::isfinite(s.gamma) ? json(s.gamma) : json(nullptr)},
                     {"epsilon_squared", s.epsilon_squared}, {"reach", s.reach},
                     {"kernel_rank", s.kernel_rank}});
    const std::string g = std::isfinite(s.gamma) ? num(s.gamma) : "inf";
    csv << s.n << ',' << g << ',' << num(s.epsilon_squared) << ',' << s.reach << ',' << s.kernel_rank << '\n';
    plot << s.n << ' ' << g << ' ' << num(s.epsilon_squared) << ' ' << s.reach << ' ' << s.kernel_rank << '\n';
  }
  out.result["steps"] = steps;
  out.csv = csv.str();
  out.plot = plot.str();

  const double assumption = std::max({cert.defect_i, cert.defect_ii, cert.defect_iii,
                                      cert.resolution.self_adjoint, cert.resolution.orthogonality,
                                      cert.resolution.completeness});
  bool sound = cert.bound.has_value();
  if (sound && cert.exact_gap) sound = *cert.bound <= *cert.exact_gap + tol;
  out.certified = sound && assumption <= kAssumptionTolerance;
  out.result["sound"] = sound;

  if (ctx.config.contains("gap") && ctx.config["gap"].contains("sandwich_target")) {
    const Interaction target = build_model(ctx, ctx.config["gap"]["sandwich_target"]);
    const SandwichResult sw =
        sandwich_check(local_hamiltonian(target, 0.0), seq.partial_sums().back());
    json j = {{"ok", sw.ok}, {"c", sw.c}, {"C", sw.big_c}, {"ground_energy", sw.ground_energy}};
    if (!sw.ok) j["witness_residual"] = sw.witness_residual;
    out.result["sandwich"] = j;
  }
  return out;
}

// --- flow-check ---------------------------------------------------------------

TaskOutput run_flow(const Context& ctx) {
  const json& fl = ctx.config.at("flow");
  const std::string family = ctx.config["model"]["name"].get<std::string>();
  const std::size_t length = ctx.lambda->size();
  const double start = fl.value("start", 0.0);
  const double end = fl.value("end", 1.0);
  const int points = fl.value("points", 21);
  const double gamma_min = fl.at("gamma_min").get<double>();
  const int substeps = fl.value("substeps", kDefaultFlowSubsteps);
  const auto rank = static_cast<std::size_t>(fl.value("rank", 0));
  const double tol = ctx.tolerance.value_or(kFlowTolerance);
  const std::function<Interaction(double)> fam = [&](double s) {
    return family == "flat_band_closing" ? closing_flat_band(length, s) : rotated_flat_band(length, s);
  };
  TaskOutput out;
  out.result["family"] = family;
  out.result["gamma_min"] = gamma_min;
  out.result["tolerance"] = tol;
  try {
    const FlowReport report =
        projection_flow(fam, uniform_grid(start, end, points - 1), gamma_min, rank, substeps);
    json pts = json::array();
    std::ostringstream csv;
    std::ostringstream plot;
    csv << "s,gap,trace,rank,defect\n";
    plot << "# s gap defect\n";
    for (const auto& p : report.points) {
      pts.push_back({{"s", p.s}, {"gap", p.gap}, {"trace", p.trace}, {"rank", p.rank},
                     {"defect", p.defect}});
      csv << num(p.s) << ',' << num(p.gap) << ',' << num(p.trace) << ',' << p.rank << ',' << num(p.defect) << '\n';
      plot << num(p.s) << ' ' << num(p.gap) << ' ' << num(p.defect) << '\n';
    }
    out.result["points"] = pts;
    out.result["rank_constant"] = report.rank_constant;
    out.result["max_defect"] = report.max_defect;
    out.result["substeps"] = report.substeps;
    out.result["max_step_change"] = report.max_step_change;
    out.result["max_unitarity_defect"] = report.max_unitarity_defect;
    out.certified = report.rank_constant && report.max_defect <= tol;
    out.csv = csv.str();
    out.plot = plot.str();
  } catch (const GapClosure& e) {
    out.certified = false;
    out.result["gap_closure"] = {{"location", e.location}, {"gap", e.gap},
                                 {"grid_point", e.grid_point}, {"message", e.what()}};
    out.csv = "s,gap,trace,rank,defect\n" + num(e.grid_point) + "," + num(e.gap) + ",,,\n";
    out.plot = "# s gap defect\n" + num(e.grid_point) + ' ' + num(e.gap) + " nan\n";
  }
  return out;
}

// --- model-info ---------------------------------------------------------------

TaskOutput run_model_info(const Context& ctx) {
  const Interaction phi = build_model(ctx, ctx.config.at("model"));
  TaskOutput out;
  json terms = json::array();
  std::ostringstream csv;
  csv << "label,support,norm\n";
  for (const auto& t : phi.terms()) {
    terms.push_back({{"label", t.label}, {"support", sites_json(*ctx.lambda, t.support)},
                     {"norm", t.op_norm()}, {"parity", parity_name(t.op.parity())},
                     {"time_independent", t.profile.is_constant()}});
    csv << '"' << t.label << "\"," << '"' << ctx.lambda->describe(t.support) << "\"," << num(t.op_norm()) << '\n';
  }
  out.result["model"] = ctx.config["model"];
  out.result["sites"] = ctx.lambda->size();
  out.result["terms"] = terms;
  out.result["even"] = phi.is_even();
  out.result["time_independent"] = phi.is_time_independent();
  DecayFunction f;
  if (ctx.config.contains("decay")) {
    f.nu = ctx.config["decay"].value("nu", 1.0);
    f.epsilon = ctx.config["decay"].value("epsilon", 1.0);
    f.a = ctx.config["decay"].value("a", 0.0);
  }
  out.result["g_norm_phi"] = interaction_g_norm(phi, g_from_f(f, ctx.graph), 0.0);
  std::ostringstream plot;
  plot << "# index eigenvalue\n";
  if (phi.is_time_independent() && phi.is_even()) {
    const FrustrationFreeResult ff = frustration_free_check(phi);
    out.result["frustration_free"] = {{"frustration_free", ff.frustration_free},
                                      {"residual", ff.residual},
                                      {"ground_energy", ff.ground_energy},
                                      {"termwise_sum", ff.termwise_sum},
                                      {"ground_degeneracy", ff.ground_degeneracy}};
    const RealVector ev = spectrum(local_hamiltonian(phi, 0.0));
    json low = json::array();
    for (Eigen::Index i = 0; i < std::min<Eigen::Index>(ev.size(), 16); ++i) {
      low.push_back(ev[i]);
      plot << i << ' ' << num(ev[i]) << '\n';
    }
    out.result["low_spectrum"] = low;
    out.result["gap"] = optional_number(spectral_gap(ev, default_kernel_tolerance(ev)));
  }
  out.csv = csv.str();
  out.plot = plot.str();
  return out;
}

}  // namespace

RunResult run_config(const json& raw, const std::filesystem::path& out_dir,
                     const Overrides& overrides) {
  RunResult rr;
  const json config = apply_overrides(raw, overrides);
  const auto diags = validate_config(config);
  if (!diags.empty()) {
    rr.exit_code = kExitUsage;
    rr.summary = error_object("config", "configuration is invalid", diags);
    return rr;
  }
  Context ctx;
  ctx.config = config;
  ctx.task = config.at("task").get<std::string>();
  ctx.name = config.value("name", ctx.task);
  ctx.seed = config.value("seed", std::uint64_t{0});
  if (config.contains("tolerance")) ctx.tolerance = config.at("tolerance").get<double>();
  const json& lat = config.at("lattice");
  ctx.lengths = lat.at("lengths").get<std::vector<int>>();
  ctx.boundary = lat.value("boundary", "open") == "periodic" ? Boundary::periodic : Boundary::open;
  try {
    ctx.graph = MetricGraph::slab(ctx.lengths, ctx.boundary);
    ctx.lambda = ctx.graph.sites();
    TaskOutput out;
    if (ctx.task == "lr-certify") {
      out = run_lr(ctx);
    } else if (ctx.task == "condexp-check") {
      out = run_condexp(ctx);
    } else if (ctx.task == "gap-certify") {
      out = run_gap(ctx);
    } else if (ctx.task == "flow-check") {
      out = run_flow(ctx);
    } else {
      out = run_model_info(ctx);
    }
    const bool is_check = ctx.task != "model-info";
    rr.exit_code = out.certified ? kExitSuccess : kExitCertificationFailed;
    rr.summary = {{"fermicert_version", kVersion},
                  {"task", ctx.task},
                  {"name", ctx.name},
                  {"seed", ctx.seed},
                  {"status", out.certified ? (is_check ? "certified" : "ok") : "failed"},
                  {"exit_code", rr.exit_code},
                  {"timestamp", timestamp()},
                  {"config", config},
                  {"result", out.result}};
    std::filesystem::create_directories(out_dir);
    write_file(out_dir / (ctx.name + ".json"), dump_json(rr.summary), rr.files);
    write_file(out_dir / (ctx.name + ".csv"), out.csv, rr.files);
    write_file(out_dir / (ctx.name + ".plot.dat"), out.plot, rr.files);
  } catch (const Error& e) {
    rr.exit_code = kExitUsage;
    rr.summary = error_object(error_code_name(e.code()), e.what());
    rr.files.clear();
  } catch (const std::exception& e) {
    rr.exit_code = kExitUsage;
    rr.summary = error_object("internal", e.what());
    rr.files.clear();
  }
  return rr;
}

RunResult run_config_text(const std::string& text, const std::filesystem::path& out_dir,
                          const Overrides& overrides) {
  json config;
  try {
    config = json::parse(text);
  } catch (const json::parse_error& e) {
    RunResult rr;
    rr.exit_code = kExitUsage;
    rr.summary = error_object("config", "configuration is invalid",
                              {{"", std::string("invalid JSON: ") + e.what()}});
    return rr;
  }
  return run_config(config, out_dir, overrides);
}

}  // namespace fermicert
