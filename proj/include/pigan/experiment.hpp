#pragma once

// Experiment orchestration: one config drives split -> partition -> train
// -> attack suite -> fidelity suite -> record. Sweeps run the cross product
// of lambda x N x seed and aggregate per cell. Everything is deterministic
// given the config and seed; per-stage failures are captured as explicit
// nulls with a reason instead of aborting the sweep.

#include <functional>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "pigan/attacks.hpp"
#include "pigan/dataset.hpp"
#include "pigan/fidelity.hpp"
#include "pigan/training.hpp"

namespace pigan {

struct DatasetSpec {
  std::string type = "gaussian_mixture";  // or "tensor_file"
  // gaussian_mixture
  std::size_t n_modes = 8;
  double radius = 0.7;
  double stddev = 0.05;
  std::size_t n_samples = 2000;
  std::uint64_t seed = 1;
  // tensor_file
  std::string path;

  double train_fraction = 0.1;

  Dataset build() const;
};

struct AttackConfig {
  std::size_t mc_m = 100;
  std::size_t mc_repeats = 20;
  std::size_t generated_samples = 2000;
  std::size_t pca_components = 40;  // clamped to the feasible maximum
  double pca_fit_fraction = 0.1;    // of the holdout, excluded from MC eval
  std::size_t tvd_bins = 100;
};

struct FidelityConfig {
  std::size_t samples = 2000;
  std::size_t is_splits = 1;
  OracleConfig oracle;
  DownstreamConfig downstream;
};

struct ExperimentConfig {
  std::string model = "pigan";  // "pigan" or "gan"
  DatasetSpec dataset;
  TrainConfig train;
  AttackConfig attack;
  FidelityConfig fidelity;
  bool measure_wall_time = true;
  std::uint64_t seed = 0;  // drives the split/partition/train/attack streams
};

struct MetricValue {
  std::optional<double> value;
  std::string reason;  // set when value is null

  static MetricValue of(double v) { return MetricValue{v, {}}; }
  static MetricValue null(std::string why) {
    return MetricValue{std::nullopt, std::move(why)};
  }
};

struct ExperimentRecord {
  std::string model_name;
  std::uint64_t seed = 0;
  double lambda = 0.0;
  std::size_t n_subsets = 2;
  MetricValue wb_accuracy, tvd, mc_set_accuracy, mc_single_accuracy;
  MetricValue inception_score, fid, intra_fid, downstream_accuracy;
  MetricValue wall_time_seconds;
  std::string failure_reason;  // empty when every stage succeeded
  std::string config_json;     // canonical config snapshot
};

// Names of the plottable metric fields, in schema order.
const std::vector<std::string>& metric_names();
const MetricValue* record_metric(const ExperimentRecord& rec,
                                 const std::string& name);
MetricValue* record_metric(ExperimentRecord& rec, const std::string& name);

// Trained models plus enough metadata to reload them without the dataset.
struct ModelBundle {
  Generator g;
  Discriminator d;
  std::optional<Classifier> q;
};

// trained_out, when non-null, receives the trained models (for checkpoint
// persistence by the CLI).
ExperimentRecord run_experiment(const ExperimentConfig& cfg,
                                std::optional<ModelBundle>* trained_out = nullptr);

struct SweepConfig {
  ExperimentConfig base;
  std::vector<double> lambda_values;
  std::vector<std::size_t> n_values;
  std::vector<std::uint64_t> seeds;

  void validate() const;
};

// on_cell, when set, is invoked after each cell with the cell config, its
// record and the trained models (used by the CLI to persist checkpoints).
using SweepCellHook =
    std::function<void(const ExperimentConfig&, const ExperimentRecord&,
                       const std::optional<ModelBundle>&)>;
std::vector<ExperimentRecord> run_sweep(const SweepConfig& cfg,
                                        const SweepCellHook& on_cell = {});

void save_model_bundle(const std::string& dir, const ModelBundle& bundle);
ModelBundle load_model_bundle(const std::string& dir);

// Shared by run_experiment and the CLI `train` subcommand.
struct TrainStageResult {
  ModelBundle models;
  TrainHistory history;
};
TrainStageResult train_stage(const ExperimentConfig& cfg,
                             const PartitionedDataset& data);

// Deterministic reconstruction of the experiment's dataset views.
struct ExperimentData {
  Dataset full;
  PartitionedDataset train;
  Dataset holdout;
};
ExperimentData prepare_data(const ExperimentConfig& cfg);

// JSON (de)serialization for configs; unknown keys are rejected.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg);
SweepConfig sweep_config_from_json(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::string& path);
SweepConfig load_sweep_config(const std::string& path);

}  // namespace pigan
