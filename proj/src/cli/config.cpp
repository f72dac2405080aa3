#include "pompif/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include "pompif/errors.hpp"

namespace pompif::cli {

namespace {

using nlohmann::json;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class T>
T read(const json& obj, const std::string& key, const std::string& where, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("field '" + where + key + "' has the wrong type");
  }
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError("field '" + where + "' must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) throw ConfigError("unknown field '" + where + key + "'");
  }
}

mif::Mif2Settings read_mif2(const json& obj, const std::string& where, mif::Mif2Settings s) {
  s.iterations = read<std::size_t>(obj, "iterations", where, s.iterations);
  s.particles = read<std::size_t>(obj, "particles", where, s.particles);
  s.cooling_fraction = read<double>(obj, "cooling_fraction", where, s.cooling_fraction);
  s.cooling_horizon = read<double>(obj, "cooling_horizon", where, s.cooling_horizon);
  s.tolerance = read<double>(obj, "tolerance", where, s.tolerance);
  if (obj.contains("resampling"))
    s.resampling = pf::resampling_from_string(read<std::string>(obj, "resampling", where, ""));
  return s;
}

}  // namespace

std::uint64_t RunConfig::master_seed() const {
  if (!seed) throw ConfigError("field 'seed' is required (or pass --seed)");
  return *seed;
}

std::filesystem::path RunConfig::ledger_path() const {
  return ledger.empty() ? output / "ledger.csv" : ledger;
}

RunConfig parse_config(const json& doc) {
  check_keys(doc,
             {"model", "process", "step_size", "t0", "seed", "workers", "parallel_filter", "data",
              "output", "ledger", "parameters", "simulate", "pfilter", "mif2", "profile",
              "description"},
             "");
  RunConfig cfg;
  cfg.model_name = read<std::string>(doc, "model", "", cfg.model_name);
  cfg.process = models::process_from_string(read<std::string>(doc, "process", "", "tauleap"));
  cfg.step_size = read<double>(doc, "step_size", "", cfg.step_size);
  if (!(cfg.step_size > 0.0)) throw ConfigError("field 'step_size' must be positive");
  cfg.t0 = read<double>(doc, "t0", "", cfg.t0);
  cfg.model = models::make_model(cfg.model_name, cfg.process, cfg.step_size);
  if (doc.contains("seed")) cfg.seed = read<std::uint64_t>(doc, "seed", "", 0);
  cfg.workers = read<std::size_t>(doc, "workers", "", cfg.workers);
  if (cfg.workers == 0) throw ConfigError("field 'workers' must be at least 1");
  cfg.parallel_filter = read<bool>(doc, "parallel_filter", "", false);
  cfg.data = read<std::string>(doc, "data", "", "");
  cfg.output = read<std::string>(doc, "output", "", "out");
  cfg.ledger = read<std::string>(doc, "ledger", "", "");

  // parameters
  auto specs = cfg.model->parameter_specs();
  const std::size_t P = specs.size();
  cfg.lower.assign(P, kNaN);
  cfg.upper.assign(P, kNaN);
  std::vector<double> rw_sd(P, 0.0);
  if (doc.contains("parameters")) {
    const json& params = doc.at("parameters");
    if (!params.is_object()) throw ConfigError("field 'parameters' must be an object");
    for (const auto& [name, entry] : params.items()) {
      std::size_t i = P;
      for (std::size_t k = 0; k < P; ++k) {
        if (specs[k].name == name) i = k;
      }
      if (i == P)
        throw ConfigError("field 'parameters." + name + "': model '" + cfg.model_name +
                          "' has no such parameter");
      const std::string where = "parameters." + name + ".";
      if (entry.is_number()) {
        specs[i].value = entry.get<double>();
        continue;
      }
      check_keys(entry, {"value", "estimate", "lower", "upper", "rw_sd", "scale", "interval"},
                 where);
      specs[i].value = read<double>(entry, "value", where, specs[i].value);
      specs[i].estimated = read<bool>(entry, "estimate", where, false);
      if (entry.contains("scale"))
        specs[i].scale = scale_from_string(read<std::string>(entry, "scale", where, ""));
      if (entry.contains("interval")) {
        const auto iv = read<std::vector<double>>(entry, "interval", where, {});
        if (iv.size() != 2) throw ConfigError("field '" + where + "interval' needs two numbers");
        specs[i].lower = iv[0];
        specs[i].upper = iv[1];
      }
      cfg.lower[i] = read<double>(entry, "lower", where, kNaN);
      cfg.upper[i] = read<double>(entry, "upper", where, kNaN);
      rw_sd[i] = read<double>(entry, "rw_sd", where, specs[i].estimated ? 0.02 : 0.0);
      if (specs[i].estimated && !(cfg.lower[i] <= cfg.upper[i]))
        throw ConfigError("field '" + where + "lower/upper': estimated parameters need a start box");
    }
  }
  for (std::size_t i = 0; i < P; ++i) {
    if (!specs[i].estimated) rw_sd[i] = 0.0;
  }
  cfg.params = ParamVector(std::make_shared<const ParamLayout>(std::move(specs)));
  cfg.params.validate();

  if (doc.contains("simulate")) {
    const json& s = doc.at("simulate");
    check_keys(s, {"observations", "interval", "method"}, "simulate.");
    cfg.simulate.observations = read<std::size_t>(s, "observations", "simulate.", 50);
    cfg.simulate.interval = read<double>(s, "interval", "simulate.", 1.0);
    if (!(cfg.simulate.interval > 0.0)) throw ConfigError("field 'simulate.interval' must be positive");
    const auto method = read<std::string>(s, "method", "simulate.", "tauleap");
    if (method == "gillespie")
      cfg.simulate.method = sim::Method::gillespie;
    else if (method == "tauleap" || method == "tau_leap")
      cfg.simulate.method = sim::Method::tau_leap;
    else
      throw ConfigError("field 'simulate.method' must be 'tauleap' or 'gillespie'");
  }

  if (doc.contains("pfilter")) {
    const json& s = doc.at("pfilter");
    check_keys(s, {"particles", "replicates", "tolerance", "resampling"}, "pfilter.");
    cfg.pfilter.particles = read<std::size_t>(s, "particles", "pfilter.", cfg.pfilter.particles);
    cfg.pfilter.replicates = read<std::size_t>(s, "replicates", "pfilter.", cfg.pfilter.replicates);
    cfg.pfilter.tolerance = read<double>(s, "tolerance", "pfilter.", cfg.pfilter.tolerance);
    if (s.contains("resampling"))
      cfg.pfilter.resampling =
          pf::resampling_from_string(read<std::string>(s, "resampling", "pfilter.", ""));
  }
  if (cfg.pfilter.particles < 1) throw ConfigError("field 'pfilter.particles' must be at least 1");
  if (!(cfg.pfilter.tolerance > 0.0)) throw ConfigError("field 'pfilter.tolerance' must be positive");

  cfg.mif2.rw_sd = rw_sd;
  cfg.mif2.tolerance = cfg.pfilter.tolerance;
  if (doc.contains("mif2")) {
    const json& s = doc.at("mif2");
    check_keys(s,
               {"iterations", "particles", "starts", "cooling_fraction", "cooling_horizon",
                "tolerance", "resampling"},
               "mif2.");
    cfg.mif2 = read_mif2(s, "mif2.", cfg.mif2);
    cfg.starts = read<std::size_t>(s, "starts", "mif2.", cfg.starts);
  }
  cfg.mif2.validate(cfg.params.layout());

  cfg.profile.mif2 = cfg.mif2;
  cfg.profile.lower = cfg.lower;
  cfg.profile.upper = cfg.upper;
  cfg.profile.eval_particles = cfg.pfilter.particles;
  if (doc.contains("profile")) {
    const json& s = doc.at("profile");
    const std::string w = "profile.";
    check_keys(s,
               {"target", "grid", "grid_sd", "points", "refine", "starts", "start_at_mle", "level", "span",
                "bootstrap", "mle_from", "mif2", "eval_replicates", "eval_particles", "box"},
               w);
    auto& pc = cfg.profile;
    pc.target = read<std::string>(s, "target", w, "");
    pc.grid = read<std::vector<double>>(s, "grid", w, {});
    if (s.contains("grid_sd")) pc.grid_sd = read<double>(s, "grid_sd", w, 0.0);
    pc.points = read<std::size_t>(s, "points", w, pc.points);
    pc.refine = read<bool>(s, "refine", w, pc.refine);
    pc.starts = read<std::size_t>(s, "starts", w, pc.starts);
    pc.start_at_mle = read<bool>(s, "start_at_mle", w, pc.start_at_mle);
    pc.level = read<double>(s, "level", w, pc.level);
    pc.span = read<double>(s, "span", w, pc.span);
    pc.bootstrap = read<std::size_t>(s, "bootstrap", w, pc.bootstrap);
    pc.mle_from = read<std::string>(s, "mle_from", w, "");
    if (s.contains("mif2")) {
      check_keys(s.at("mif2"),
                 {"iterations", "particles", "cooling_fraction", "cooling_horizon", "tolerance",
                  "resampling"},
                 "profile.mif2.");
      pc.mif2 = read_mif2(s.at("mif2"), "profile.mif2.", pc.mif2);
    }
    pc.eval_replicates = read<std::size_t>(s, "eval_replicates", w, pc.eval_replicates);
    pc.eval_particles = read<std::size_t>(s, "eval_particles", w, pc.eval_particles);
    if (s.contains("box")) {
      const json& box = s.at("box");
      if (!box.is_object()) throw ConfigError("field 'profile.box' must be an object");
      for (const auto& [name, range] : box.items()) {
        const std::size_t i = cfg.params.layout().index_of(name);
        const auto r = read<std::vector<double>>(box, name, "profile.box.", {});
        if (r.size() != 2 || !(r[0] <= r[1]))
          throw ConfigError("field 'profile.box." + name + "' needs [lower, upper]");
        pc.lower[i] = r[0];
        pc.upper[i] = r[1];
      }
    }
    if (!(pc.level > 0.0 && pc.level < 1.0)) throw ConfigError("field 'profile.level' must lie in (0, 1)");
    if (!(pc.span > 0.0)) throw ConfigError("field 'profile.span' must be positive");
    pc.mif2.validate(cfg.params.layout());
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

}  // namespace pompif::cli
