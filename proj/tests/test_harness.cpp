#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pigan/experiment.hpp"
#include "pigan/report.hpp"

using namespace pigan;

namespace {

// Small enough to run in seconds, big enough that every stage functions.
ExperimentConfig tiny_config() {
  ExperimentConfig cfg;
  cfg.model = "pigan";
  cfg.seed = 5;
  cfg.dataset.n_modes = 4;
  cfg.dataset.radius = 0.6;
  cfg.dataset.stddev = 0.08;
  cfg.dataset.n_samples = 300;
  cfg.dataset.seed = 2;
  cfg.dataset.train_fraction = 0.1;
  cfg.train.n_subsets = 2;
  cfg.train.lambda = 1.0;
  cfg.train.epochs = 3;
  cfg.train.warmup_epochs = 2;
  cfg.train.batch_size = 10;
  cfg.train.pretrain_epochs = 2;
  cfg.train.arch.z_dim = 3;
  cfg.train.arch.code_dim = 2;
  cfg.train.arch.label_dim = 2;
  cfg.train.arch.g_hidden = {8};
  cfg.train.arch.d_hidden = {8};
  cfg.train.arch.q_hidden = {8};
  cfg.train.arch.conditional_on_labels = true;
  cfg.attack.mc_m = 10;
  cfg.attack.mc_repeats = 3;
  cfg.attack.generated_samples = 80;
  cfg.attack.pca_components = 2;
  cfg.fidelity.samples = 150;
  cfg.fidelity.oracle.hidden = {8, 4};
  cfg.fidelity.oracle.epochs = 20;
  cfg.fidelity.downstream.hidden = {8};
  cfg.fidelity.downstream.epochs = 20;
  cfg.measure_wall_time = false;
  return cfg;
}

ExperimentRecord fake_record(double lambda, std::uint64_t seed, double wb,
                             double downstream) {
  ExperimentRecord r;
  r.model_name = "pigan";
  r.seed = seed;
  r.lambda = lambda;
  r.n_subsets = 2;
  r.wb_accuracy = MetricValue::of(wb);
  r.tvd = MetricValue::of(wb + 0.05);
  r.mc_set_accuracy = MetricValue::of(0.5);
  r.mc_single_accuracy = MetricValue::of(0.5);
  r.inception_score = MetricValue::of(3.0);
  r.fid = MetricValue::of(1.0);
  r.intra_fid = MetricValue::of(2.0);
  r.downstream_accuracy = MetricValue::of(downstream);
  r.wall_time_seconds = MetricValue::null("timing disabled by config");
  r.config_json = "{\"model\":\"pigan\"}";
  return r;
}

}  // namespace

TEST_CASE("experiment config JSON round trip") {
  ExperimentConfig cfg = tiny_config();
  cfg.train.fool_mode = FoolMode::minimize_true_logprob;
  cfg.train.label_smoothing = 0.1;
  const auto j = experiment_config_to_json(cfg);
  const ExperimentConfig back = experiment_config_from_json(j);
  CHECK(experiment_config_to_json(back).dump() == j.dump());
  CHECK(back.train.fool_mode == FoolMode::minimize_true_logprob);
  CHECK(back.train.warmup_epochs.has_value());
  CHECK(*back.train.warmup_epochs == 2);
}

TEST_CASE("config parsing rejects unknown keys and bad values") {
  nlohmann::json j = experiment_config_to_json(tiny_config());
  j["surprise"] = 1;
  CHECK_THROWS_AS(experiment_config_from_json(j), std::invalid_argument);

  nlohmann::json bad_mode = experiment_config_to_json(tiny_config());
  bad_mode["train"]["fool_mode"] = "nonsense";
  CHECK_THROWS_AS(experiment_config_from_json(bad_mode), std::invalid_argument);

  nlohmann::json bad_dataset = experiment_config_to_json(tiny_config());
  bad_dataset["dataset"]["type"] = "cifar10";
  const ExperimentConfig cfg = experiment_config_from_json(bad_dataset);
  CHECK_THROWS_AS(cfg.dataset.build(), std::invalid_argument);
}

TEST_CASE("records CSV round trip is lossless") {
  std::vector<ExperimentRecord> records = {fake_record(0.0, 1, 0.4, 0.9),
                                           fake_record(10.0, 2, 0.2, 0.8)};
  records[1].fid = MetricValue::null("fidelity: boom");
  records[1].failure_reason = "fidelity: boom";

  std::ostringstream os;
  write_records_csv(os, records);
  std::istringstream is(os.str());
  const auto back = read_records_csv(is);

  REQUIRE(back.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back[i].model_name == records[i].model_name);
    CHECK(back[i].seed == records[i].seed);
    CHECK(back[i].lambda == records[i].lambda);
    for (const auto& name : metric_names()) {
      const auto* a = record_metric(records[i], name);
      const auto* b = record_metric(back[i], name);
      CHECK(a->value.has_value() == b->value.has_value());
      if (a->value) CHECK(*a->value == *b->value);
    }
    CHECK(back[i].failure_reason == records[i].failure_reason);
    CHECK(back[i].config_json == records[i].config_json);
  }

  // a second serialization of the parsed records is byte-identical
  std::ostringstream os2;
  write_records_csv(os2, back);
  CHECK(os2.str() == os.str());
}

TEST_CASE("records JSON round trip keeps null reasons") {
  std::vector<ExperimentRecord> records = {fake_record(1.0, 3, 0.3, 0.7)};
  records[0].mc_set_accuracy = MetricValue::null("attack: nope");
  std::ostringstream os;
  write_records_json(os, records);
  std::istringstream is(os.str());
  const auto back = read_records_json(is);
  REQUIRE(back.size() == 1);
  CHECK(!back[0].mc_set_accuracy.value.has_value());
  CHECK(back[0].mc_set_accuracy.reason == "attack: nope");
  CHECK(back[0].wb_accuracy.value.has_value());
}

TEST_CASE("aggregation: mean and n-1 standard deviation") {
  std::vector<ExperimentRecord> records = {fake_record(1.0, 1, 0.6, 0.9),
                                           fake_record(1.0, 2, 0.7, 0.9),
                                           fake_record(1.0, 3, 0.8, 0.9)};
  const auto cells = aggregate_records(records);
  REQUIRE(cells.size() == 1);
  const auto& wb = cells[0].stats[0];  // wb_accuracy is first in metric_names
  CHECK(wb.count == 3);
  CHECK(wb.mean == doctest::Approx(0.7));
  CHECK(wb.stddev == doctest::Approx(0.1));
}

TEST_CASE("emit_tradeoff_plot writes sorted CSV and validates inputs") {
  std::vector<ExperimentRecord> records;
  for (double lambda : {10.0, 0.0, 1.0})
    for (std::uint64_t seed : {1ull, 2ull})
      records.push_back(
          fake_record(lambda, seed, 0.5 - 0.02 * lambda, 0.9 - 0.01 * lambda));

  const std::string base = "test_tradeoff_plot";
  emit_tradeoff_plot(records, "wb_accuracy", "downstream_accuracy", base);

  std::ifstream csv(base + ".csv");
  REQUIRE(csv.good());
  std::string header, r1, r2, r3;
  std::getline(csv, header);
  std::getline(csv, r1);
  std::getline(csv, r2);
  std::getline(csv, r3);
  CHECK(header ==
        "lambda,n_subsets,wb_accuracy_mean,wb_accuracy_std,"
        "downstream_accuracy_mean,downstream_accuracy_std");
  CHECK(r1.substr(0, 2) == "0,");
  CHECK(r2.substr(0, 2) == "1,");
  CHECK(r3.substr(0, 3) == "10,");
  CHECK(std::filesystem::exists(base + ".svg"));
  std::remove((base + ".csv").c_str());
  std::remove((base + ".svg").c_str());

  // single aggregated point: insufficient
  std::vector<ExperimentRecord> one = {fake_record(1.0, 1, 0.5, 0.9)};
  CHECK_THROWS_AS(emit_tradeoff_plot(one, "wb_accuracy", "fid", base),
                  std::invalid_argument);

  // unknown metric name lists the valid ones
  try {
    emit_tradeoff_plot(records, "wb_acc", "fid", base);
    FAIL("expected an exception");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("wb_accuracy") != std::string::npos);
    CHECK(std::string(e.what()).find("downstream_accuracy") !=
          std::string::npos);
  }
}

TEST_CASE("run_experiment: all-defined record, determinism, epochs = 0") {
  ExperimentConfig cfg = tiny_config();
  const ExperimentRecord rec = run_experiment(cfg);
  CHECK(rec.failure_reason.empty());
  for (const auto& name : metric_names()) {
    if (name == "wall_time_seconds") continue;  // disabled in tiny_config
    const auto* m = record_metric(rec, name);
    CAPTURE(name);
    CHECK(m->value.has_value());
  }
  CHECK(*rec.wb_accuracy.value >= 0.0);
  CHECK(*rec.wb_accuracy.value <= 1.0);

  // byte-identical records.csv on a re-run
  const ExperimentRecord rec2 = run_experiment(cfg);
  std::ostringstream a, b;
  write_records_csv(a, {rec});
  write_records_csv(b, {rec2});
  CHECK(a.str() == b.str());

  // untrained models still produce a full record
  ExperimentConfig zero = tiny_config();
  zero.train.epochs = 0;
  zero.train.warmup_epochs = 0;
  const ExperimentRecord rec0 = run_experiment(zero);
  CHECK(rec0.failure_reason.empty());
  CHECK(rec0.wb_accuracy.value.has_value());
}

TEST_CASE("run_experiment records stage failures as nulls with reasons") {
  ExperimentConfig cfg = tiny_config();
  cfg.train.n_subsets = 0;  // invalid: training fails
  const ExperimentRecord rec = run_experiment(cfg);
  CHECK(!rec.failure_reason.empty());
  CHECK(!rec.wb_accuracy.value.has_value());
  CHECK(!rec.wb_accuracy.reason.empty());
  CHECK(!rec.fid.value.has_value());
}

TEST_CASE("run_sweep: cardinality and cell independence") {
  SweepConfig sweep;
  sweep.base = tiny_config();
  sweep.base.train.epochs = 1;
  sweep.base.train.warmup_epochs = 1;
  sweep.lambda_values = {0.0, 1.0};
  sweep.n_values = {2};
  sweep.seeds = {1, 2, 3};
  const auto records = run_sweep(sweep);
  CHECK(records.size() == 6);

  // cells are independent of execution order: re-running one configuration
  // alone reproduces its sweep record
  ExperimentConfig cell = sweep.base;
  cell.train.lambda = 1.0;
  cell.train.n_subsets = 2;
  cell.seed = 3;
  const ExperimentRecord lone = run_experiment(cell);
  const ExperimentRecord* from_sweep = nullptr;
  for (const auto& r : records)
    if (r.lambda == 1.0 && r.seed == 3) from_sweep = &r;
  REQUIRE(from_sweep != nullptr);
  std::ostringstream a, b;
  write_records_csv(a, {lone});
  write_records_csv(b, {*from_sweep});
  CHECK(a.str() == b.str());

  SweepConfig empty = sweep;
  empty.lambda_values.clear();
  CHECK_THROWS_AS(run_sweep(empty), std::invalid_argument);
}

TEST_CASE("model bundle save/load round trip") {
  ExperimentConfig cfg = tiny_config();
  const ExperimentData data = prepare_data(cfg);
  const TrainStageResult trained = train_stage(cfg, data.train);

  const std::string dir = "test_bundle_dir";
  save_model_bundle(dir, trained.models);
  const ModelBundle loaded = load_model_bundle(dir);

  // float32 storage: forward passes agree to float precision
  Rng rng(1);
  std::vector<double> z(cfg.train.arch.z_dim);
  for (double& v : z) v = rng.normal();
  const auto a = trained.models.g.forward(z, 1, 0);
  const auto b = loaded.g.forward(z, 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-5));
  CHECK(loaded.q.has_value());

  std::filesystem::remove_all(dir);
}

TEST_CASE("score histogram: identical inputs and count bookkeeping") {
  ExperimentConfig cfg = tiny_config();
  cfg.train.epochs = 1;
  cfg.train.warmup_epochs = 1;
  const ExperimentData data = prepare_data(cfg);
  const TrainStageResult trained = train_stage(cfg, data.train);

  const std::string base = "test_histogram";
  emit_score_histogram(trained.models.d, data.train.samples, data.holdout, 2,
                       20, base);
  std::ifstream csv(base + ".csv");
  REQUIRE(csv.good());
  std::string line;
  std::getline(csv, line);
  CHECK(line == "bin_lo,bin_hi,train_count,holdout_count");
  std::size_t train_total = 0, holdout_total = 0, rows = 0;
  while (std::getline(csv, line)) {
    const auto c1 = line.rfind(',');
    const auto c0 = line.rfind(',', c1 - 1);
    train_total += std::stoull(line.substr(c0 + 1, c1 - c0 - 1));
    holdout_total += std::stoull(line.substr(c1 + 1));
    ++rows;
  }
  CHECK(rows == 20);
  CHECK(train_total == data.train.samples.size());
  CHECK(holdout_total == data.holdout.size());
  std::remove((base + ".csv").c_str());
  std::remove((base + ".svg").c_str());

  // identical train/holdout inputs give identical histograms
  emit_score_histogram(trained.models.d, data.train.samples,
                       data.train.samples, 2, 10, base);
  std::ifstream csv2(base + ".csv");
  std::getline(csv2, line);
  while (std::getline(csv2, line)) {
    const auto c1 = line.rfind(',');
    const auto c0 = line.rfind(',', c1 - 1);
    CHECK(line.substr(c0 + 1, c1 - c0 - 1) == line.substr(c1 + 1));
  }
  std::remove((base + ".csv").c_str());
  std::remove((base + ".svg").c_str());
}
