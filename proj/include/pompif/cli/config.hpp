#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pompif/mif2.hpp"
#include "pompif/model.hpp"
#include "pompif/models/process.hpp"
#include "pompif/params.hpp"
#include "pompif/pfilter.hpp"
#include "pompif/simulators.hpp"

namespace pompif::cli {

struct SimulateConfig {
  std::size_t observations = 50;
  double interval = 1.0;
  sim::Method method = sim::Method::tau_leap;
};

struct PfilterConfig {
  std::size_t particles = 1000;
  std::size_t replicates = 10;
  double tolerance = 1e-17;
  pf::Resampling resampling = pf::Resampling::multinomial;
};

struct ProfileConfig {
  std::string target;
  std::vector<double> grid;       // explicit grid; empty -> built around the MLE
  std::optional<double> grid_sd;  // half-width of the default grid is 4 * grid_sd
  std::size_t points = 20;
  bool refine = true;
  std::size_t starts = 2;
  bool start_at_mle = true;  // first search per point starts from the MLE's nuisance values
  double level = 0.95;
  double span = 0.75;
  std::size_t bootstrap = 200;
  std::filesystem::path mle_from;  // candidates.csv whose top row is the MLE
  mif::Mif2Settings mif2;          // nuisance maximization settings
  std::size_t eval_replicates = 5;
  std::size_t eval_particles = 1000;
  /// Start box for nuisance parameters, layout-indexed; defaults to the main box.
  std::vector<double> lower;
  std::vector<double> upper;
};

/// One experiment, fully specified by a single JSON file plus the seed.
struct RunConfig {
  std::string model_name = "sir";
  models::ProcessKind process = models::ProcessKind::tau_leap;
  double step_size = 0.01;
  double t0 = 0.0;
  std::shared_ptr<const PompModel> model;

  ParamVector params;
  /// Start hypercube on the natural scale, layout-indexed (NaN for fixed parameters).
  std::vector<double> lower;
  std::vector<double> upper;

  SimulateConfig simulate;
  PfilterConfig pfilter;
  mif::Mif2Settings mif2;
  std::size_t starts = 10;
  ProfileConfig profile;

  std::filesystem::path data;
  std::filesystem::path output = "out";
  std::filesystem::path ledger;  // defaults to <output>/ledger.csv
  std::optional<std::uint64_t> seed;
  std::size_t workers = 1;
  bool parallel_filter = false;  // threads inside a single filter instead of across jobs

  [[nodiscard]] std::uint64_t master_seed() const;
  [[nodiscard]] std::filesystem::path ledger_path() const;
};

/// Parses a config document; ConfigError names the offending field.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace pompif::cli
