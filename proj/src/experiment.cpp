#include "pigan/experiment.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "pigan/checkpoint.hpp"
#include "pigan/pca.hpp"

namespace pigan {

namespace {

using nlohmann::json;

void check_keys(const json& j, const char* where,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object())
    throw std::invalid_argument(std::string(where) + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) {
        ok = true;
        break;
      }
    if (!ok)
      throw std::invalid_argument(std::string(where) + ": unknown key '" + key +
                                  "'");
  }
}

template <typename T>
void get_if_present(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

// ---------------------------------------------------------------------------
// Dataset construction
// ---------------------------------------------------------------------------

Dataset DatasetSpec::build() const {
  if (type == "gaussian_mixture") {
    if (n_modes == 0 || n_samples == 0)
      throw std::invalid_argument("dataset: n_modes and n_samples must be positive");
    return make_gaussian_mixture(circle_modes(n_modes, radius), stddev,
                                 n_samples, seed);
  }
  if (type == "tensor_file") {
    if (path.empty())
      throw std::invalid_argument("dataset: tensor_file requires a path");
    return load_tensor_dataset(path);
  }
  throw std::invalid_argument("dataset: unknown type '" + type + "'");
}

ExperimentData prepare_data(const ExperimentConfig& cfg) {
  Dataset full = cfg.dataset.build();
  SplitSpec split;
  split.train_fraction = cfg.dataset.train_fraction;
  split.seed = derive_seed(cfg.seed, "split");
  auto [train, holdout] = split_train_holdout(full, split);
  PartitionedDataset part = partition_uniform(
      std::move(train), cfg.train.n_subsets, derive_seed(cfg.seed, "partition"));
  return ExperimentData{std::move(full), std::move(part), std::move(holdout)};
}

// ---------------------------------------------------------------------------
// Training stage
// ---------------------------------------------------------------------------

TrainStageResult train_stage(const ExperimentConfig& cfg,
                             const PartitionedDataset& data) {
  TrainConfig tc = cfg.train;
  tc.seed = derive_seed(cfg.seed, "train");
  if (cfg.model == "pigan") {
    PiganModel m = train_pigan(tc, data);
    return TrainStageResult{
        ModelBundle{std::move(m.g), std::move(m.d), std::move(m.q)},
        std::move(m.history)};
  }
  if (cfg.model == "gan") {
    GanModel m = train_gan_baseline(tc, data);
    return TrainStageResult{
        ModelBundle{std::move(m.g), std::move(m.d), std::nullopt},
        std::move(m.history)};
  }
  throw std::invalid_argument("model must be 'pigan' or 'gan', got '" +
                              cfg.model + "'");
}

// ---------------------------------------------------------------------------
// run_experiment
// ---------------------------------------------------------------------------

namespace {

struct AttackStage {
  double wb = 0.0;
  double tvd = 0.0;
  double mc_single = 0.0;
  double mc_set = 0.0;
};

AttackStage run_attacks(const ExperimentConfig& cfg, const ExperimentData& data,
                        const ModelBundle& models) {
  const std::size_t n_codes = cfg.train.n_subsets;
  const bool conditional = models.d.config().n_labels > 0;

  // White-box: all train members plus the whole holdout as suspects.
  AdversaryDataset adv;
  adv.train_size_m = data.train.samples.size();
  adv.suspects.reserve(data.train.samples.size() + data.holdout.size());
  for (const auto& s : data.train.samples)
    adv.suspects.push_back(Suspect{s.x, s.label, true});
  for (const auto& s : data.holdout)
    adv.suspects.push_back(Suspect{s.x, s.label, false});

  AttackStage out;
  const auto score = [&](const Suspect& s) {
    return wb_score(models.d, s.x, conditional ? s.label : -1, n_codes);
  };
  out.wb = wb_attack(score, adv, derive_seed(cfg.seed, "wb")).accuracy;
  out.tvd = tvd_attack(models.d, data.train.samples, data.holdout, n_codes,
                       cfg.attack.tvd_bins);

  // Monte-Carlo: PCA fitted on a random fraction of the holdout which is
  // then excluded from the evaluation pool.
  Rng rng_pca(derive_seed(cfg.seed, "pca_split"));
  std::vector<std::size_t> order(data.holdout.size());
  std::iota(order.begin(), order.end(), 0);
  rng_pca.shuffle(order);
  std::size_t n_fit = static_cast<std::size_t>(
      cfg.attack.pca_fit_fraction * static_cast<double>(data.holdout.size()));
  if (n_fit < 2) n_fit = std::min<std::size_t>(2, data.holdout.size());

  std::vector<std::vector<double>> pca_fit_set;
  McPools pools;
  pca_fit_set.reserve(n_fit);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& x = data.holdout[order[i]].x;
    if (i < n_fit)
      pca_fit_set.push_back(x);
    else
      pools.nonmember_pool.push_back(x);
  }
  for (const auto& s : data.train.samples) pools.member_pool.push_back(s.x);

  const std::size_t dim = pca_fit_set.front().size();
  const std::size_t k = std::min({cfg.attack.pca_components, dim,
                                  pca_fit_set.size() - 1});
  const PcaModel pca = pca_fit(pca_fit_set, k);

  std::vector<double> label_freq;
  if (models.g.config().n_labels > 0) {
    label_freq.assign(models.g.config().n_labels, 0.0);
    for (const auto& s : data.train.samples)
      label_freq[static_cast<std::size_t>(s.label)] += 1.0;
  }
  const Dataset generated =
      sample_generator(models.g, data.train.weights, label_freq,
                       cfg.attack.generated_samples, derive_seed(cfg.seed, "gen"));
  std::vector<std::vector<double>> gen_pts;
  gen_pts.reserve(generated.size());
  for (const auto& s : generated) gen_pts.push_back(s.x);

  McOptions mc;
  mc.M = cfg.attack.mc_m;
  mc.repeats = cfg.attack.mc_repeats;
  mc.pca = &pca;
  out.mc_single =
      mc_single_attack(pools, gen_pts, mc, derive_seed(cfg.seed, "mc_single"))
          .accuracy;
  out.mc_set =
      mc_set_attack(pools, gen_pts, mc, derive_seed(cfg.seed, "mc_set"))
          .accuracy;
  return out;
}

FidelityReport run_fidelity(const ExperimentConfig& cfg,
                            const ExperimentData& data,
                            const ModelBundle& models,
                            const EvaluationOracle& oracle) {
  std::vector<double> label_freq;
  if (models.g.config().n_labels > 0) {
    label_freq.assign(models.g.config().n_labels, 0.0);
    for (const auto& s : data.train.samples)
      label_freq[static_cast<std::size_t>(s.label)] += 1.0;
  }
  const Dataset generated =
      sample_generator(models.g, data.train.weights, label_freq,
                       cfg.fidelity.samples, derive_seed(cfg.seed, "gen_fid"));

  std::vector<std::vector<double>> gen_xs, real_xs;
  gen_xs.reserve(generated.size());
  for (const auto& s : generated) gen_xs.push_back(s.x);
  real_xs.reserve(data.holdout.size());
  for (const auto& s : data.holdout) real_xs.push_back(s.x);

  FidelityReport report;
  report.inception_score =
      inception_score(gen_xs, oracle, cfg.fidelity.is_splits);
  report.fid = fid(real_xs, gen_xs, oracle);
  report.intra_fid = intra_fid(data.holdout, generated, oracle);
  report.downstream_accuracy =
      downstream_accuracy(generated, data.holdout, cfg.fidelity.downstream);
  return report;
}

}  // namespace

ExperimentRecord run_experiment(const ExperimentConfig& cfg,
                                std::optional<ModelBundle>* trained_out) {
  const auto t0 = std::chrono::steady_clock::now();

  ExperimentRecord rec;
  rec.model_name = cfg.model;
  rec.seed = cfg.seed;
  rec.lambda = cfg.train.lambda;
  rec.n_subsets = cfg.train.n_subsets;
  rec.config_json = experiment_config_to_json(cfg).dump();

  auto fail_from = [&rec](const std::string& stage, const std::string& why,
                          std::initializer_list<MetricValue*> fields) {
    if (rec.failure_reason.empty()) rec.failure_reason = stage + ": " + why;
    for (MetricValue* f : fields) *f = MetricValue::null(stage + ": " + why);
  };

  std::optional<ExperimentData> data;
  std::optional<TrainStageResult> trained;
  try {
    data = prepare_data(cfg);
    trained = train_stage(cfg, data->train);
  } catch (const std::exception& e) {
    fail_from("train", e.what(),
              {&rec.wb_accuracy, &rec.tvd, &rec.mc_set_accuracy,
               &rec.mc_single_accuracy, &rec.inception_score, &rec.fid,
               &rec.intra_fid, &rec.downstream_accuracy});
  }

  if (trained) {
    try {
      const AttackStage a = run_attacks(cfg, *data, trained->models);
      rec.wb_accuracy = MetricValue::of(a.wb);
      rec.tvd = MetricValue::of(a.tvd);
      rec.mc_single_accuracy = MetricValue::of(a.mc_single);
      rec.mc_set_accuracy = MetricValue::of(a.mc_set);
    } catch (const std::exception& e) {
      fail_from("attack", e.what(),
                {&rec.wb_accuracy, &rec.tvd, &rec.mc_set_accuracy,
                 &rec.mc_single_accuracy});
    }
    try {
      const EvaluationOracle oracle =
          fit_evaluation_oracle(data->full, cfg.fidelity.oracle);
      const FidelityReport f = run_fidelity(cfg, *data, trained->models, oracle);
      rec.inception_score = MetricValue::of(f.inception_score);
      rec.fid = MetricValue::of(f.fid);
      rec.intra_fid = MetricValue::of(f.intra_fid);
      rec.downstream_accuracy = MetricValue::of(f.downstream_accuracy);
    } catch (const std::exception& e) {
      fail_from("fidelity", e.what(),
                {&rec.inception_score, &rec.fid, &rec.intra_fid,
                 &rec.downstream_accuracy});
    }
  }

  if (cfg.measure_wall_time) {
    const auto t1 = std::chrono::steady_clock::now();
    rec.wall_time_seconds =
        MetricValue::of(std::chrono::duration<double>(t1 - t0).count());
  } else {
    rec.wall_time_seconds = MetricValue::null("timing disabled by config");
  }
  if (trained_out && trained) *trained_out = std::move(trained->models);
  return rec;
}

void SweepConfig::validate() const {
  if (lambda_values.empty() || n_values.empty() || seeds.empty())
    throw std::invalid_argument(
        "sweep: lambda_values, n_values and seeds must be non-empty");
}

std::vector<ExperimentRecord> run_sweep(const SweepConfig& cfg,
                                        const SweepCellHook& on_cell) {
  cfg.validate();
  std::vector<ExperimentRecord> records;
  records.reserve(cfg.lambda_values.size() * cfg.n_values.size() *
                  cfg.seeds.size());
  for (double lambda : cfg.lambda_values) {
    for (std::size_t n : cfg.n_values) {
      for (std::uint64_t seed : cfg.seeds) {
        ExperimentConfig cell = cfg.base;
        cell.train.lambda = lambda;
        cell.train.n_subsets = n;
        cell.seed = seed;
        std::optional<ModelBundle> trained;
        records.push_back(run_experiment(cell, on_cell ? &trained : nullptr));
        if (on_cell) on_cell(cell, records.back(), trained);
      }
    }
  }
  return records;
}

// ---------------------------------------------------------------------------
// Metric access
// ---------------------------------------------------------------------------

const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names = {
      "wb_accuracy",     "tvd",      "mc_set_accuracy", "mc_single_accuracy",
      "inception_score", "fid",      "intra_fid",       "downstream_accuracy",
      "wall_time_seconds"};
  return names;
}

MetricValue* record_metric(ExperimentRecord& rec, const std::string& name) {
  if (name == "wb_accuracy") return &rec.wb_accuracy;
  if (name == "tvd") return &rec.tvd;
  if (name == "mc_set_accuracy") return &rec.mc_set_accuracy;
  if (name == "mc_single_accuracy") return &rec.mc_single_accuracy;
  if (name == "inception_score") return &rec.inception_score;
  if (name == "fid") return &rec.fid;
  if (name == "intra_fid") return &rec.intra_fid;
  if (name == "downstream_accuracy") return &rec.downstream_accuracy;
  if (name == "wall_time_seconds") return &rec.wall_time_seconds;
  return nullptr;
}

const MetricValue* record_metric(const ExperimentRecord& rec,
                                 const std::string& name) {
  return record_metric(const_cast<ExperimentRecord&>(rec), name);
}

// ---------------------------------------------------------------------------
// Model bundle persistence
// ---------------------------------------------------------------------------

namespace {

json generator_config_to_json(const GeneratorConfig& c) {
  return json{{"z_dim", c.z_dim},       {"x_dim", c.x_dim},
              {"n_codes", c.n_codes},   {"code_dim", c.code_dim},
              {"n_labels", c.n_labels}, {"label_dim", c.label_dim},
              {"hidden", c.hidden},     {"lrelu_slope", c.lrelu_slope}};
}

GeneratorConfig generator_config_from_json(const json& j) {
  GeneratorConfig c;
  c.z_dim = j.at("z_dim");
  c.x_dim = j.at("x_dim");
  c.n_codes = j.at("n_codes");
  c.code_dim = j.at("code_dim");
  c.n_labels = j.at("n_labels");
  c.label_dim = j.at("label_dim");
  c.hidden = j.at("hidden").get<std::vector<std::size_t>>();
  c.lrelu_slope = j.at("lrelu_slope");
  return c;
}

json discriminator_config_to_json(const DiscriminatorConfig& c) {
  return json{{"x_dim", c.x_dim},       {"n_codes", c.n_codes},
              {"code_dim", c.code_dim}, {"n_labels", c.n_labels},
              {"label_dim", c.label_dim}, {"hidden", c.hidden},
              {"lrelu_slope", c.lrelu_slope}};
}

DiscriminatorConfig discriminator_config_from_json(const json& j) {
  DiscriminatorConfig c;
  c.x_dim = j.at("x_dim");
  c.n_codes = j.at("n_codes");
  c.code_dim = j.at("code_dim");
  c.n_labels = j.at("n_labels");
  c.label_dim = j.at("label_dim");
  c.hidden = j.at("hidden").get<std::vector<std::size_t>>();
  c.lrelu_slope = j.at("lrelu_slope");
  return c;
}

json classifier_config_to_json(const ClassifierConfig& c) {
  return json{{"x_dim", c.x_dim},
              {"n_classes", c.n_classes},
              {"hidden", c.hidden},
              {"lrelu_slope", c.lrelu_slope}};
}

ClassifierConfig classifier_config_from_json(const json& j) {
  ClassifierConfig c;
  c.x_dim = j.at("x_dim");
  c.n_classes = j.at("n_classes");
  c.hidden = j.at("hidden").get<std::vector<std::size_t>>();
  c.lrelu_slope = j.at("lrelu_slope");
  return c;
}

}  // namespace

void save_model_bundle(const std::string& dir, const ModelBundle& bundle) {
  std::filesystem::create_directories(dir);
  json meta;
  meta["version"] = 1;
  meta["generator"] = generator_config_to_json(bundle.g.config());
  meta["discriminator"] = discriminator_config_to_json(bundle.d.config());
  meta["classifier"] =
      bundle.q ? classifier_config_to_json(bundle.q->config()) : json(nullptr);
  std::ofstream meta_os(dir + "/model.json");
  if (!meta_os) throw std::runtime_error("save_model_bundle: cannot write meta");
  meta_os << meta.dump(2) << '\n';

  std::vector<NamedTensor> tensors = bundle.g.net().export_tensors("g.");
  for (auto& t : bundle.d.net().export_tensors("d.")) tensors.push_back(std::move(t));
  if (bundle.q)
    for (auto& t : bundle.q->net().export_tensors("q."))
      tensors.push_back(std::move(t));
  save_checkpoint(dir + "/params.bin", tensors);
}

ModelBundle load_model_bundle(const std::string& dir) {
  std::ifstream meta_is(dir + "/model.json");
  if (!meta_is)
    throw std::runtime_error("load_model_bundle: cannot open " + dir +
                             "/model.json");
  json meta = json::parse(meta_is);
  if (meta.at("version") != 1)
    throw std::runtime_error("load_model_bundle: unsupported version");

  Generator g(generator_config_from_json(meta.at("generator")), 0);
  Discriminator d(discriminator_config_from_json(meta.at("discriminator")), 0);
  std::optional<Classifier> q;
  if (!meta.at("classifier").is_null())
    q.emplace(classifier_config_from_json(meta.at("classifier")), 0);

  const auto tensors = load_checkpoint(dir + "/params.bin");
  g.net().import_tensors("g.", tensors);
  d.net().import_tensors("d.", tensors);
  if (q) q->net().import_tensors("q.", tensors);
  return ModelBundle{std::move(g), std::move(d), std::move(q)};
}

// ---------------------------------------------------------------------------
// Config JSON
// ---------------------------------------------------------------------------

namespace {

AdamConfig adam_from_json(const json& j, const char* where) {
  check_keys(j, where, {"learning_rate", "beta1", "beta2", "epsilon"});
  AdamConfig c;
  get_if_present(j, "learning_rate", c.learning_rate);
  get_if_present(j, "beta1", c.beta1);
  get_if_present(j, "beta2", c.beta2);
  get_if_present(j, "epsilon", c.epsilon);
  return c;
}

json adam_to_json(const AdamConfig& c) {
  return json{{"learning_rate", c.learning_rate},
              {"beta1", c.beta1},
              {"beta2", c.beta2},
              {"epsilon", c.epsilon}};
}

}  // namespace

ExperimentConfig experiment_config_from_json(const json& j) {
  check_keys(j, "config",
             {"model", "dataset", "train", "attack", "fidelity",
              "measure_wall_time", "seed", "sweep"});
  ExperimentConfig cfg;
  get_if_present(j, "model", cfg.model);
  get_if_present(j, "measure_wall_time", cfg.measure_wall_time);
  get_if_present(j, "seed", cfg.seed);

  if (j.contains("dataset")) {
    const json& d = j.at("dataset");
    check_keys(d, "dataset",
               {"type", "n_modes", "radius", "stddev", "n_samples", "seed",
                "path", "train_fraction"});
    get_if_present(d, "type", cfg.dataset.type);
    get_if_present(d, "n_modes", cfg.dataset.n_modes);
    get_if_present(d, "radius", cfg.dataset.radius);
    get_if_present(d, "stddev", cfg.dataset.stddev);
    get_if_present(d, "n_samples", cfg.dataset.n_samples);
    get_if_present(d, "seed", cfg.dataset.seed);
    get_if_present(d, "path", cfg.dataset.path);
    get_if_present(d, "train_fraction", cfg.dataset.train_fraction);
  }

  if (j.contains("train")) {
    const json& t = j.at("train");
    check_keys(t, "train",
               {"n_subsets", "lambda", "warmup_epochs", "epochs", "batch_size",
                "pretrain_epochs", "fool_mode", "label_smoothing", "optimizer",
                "arch"});
    get_if_present(t, "n_subsets", cfg.train.n_subsets);
    get_if_present(t, "lambda", cfg.train.lambda);
    if (t.contains("warmup_epochs") && !t.at("warmup_epochs").is_null())
      cfg.train.warmup_epochs = t.at("warmup_epochs").get<std::size_t>();
    get_if_present(t, "epochs", cfg.train.epochs);
    get_if_present(t, "batch_size", cfg.train.batch_size);
    get_if_present(t, "pretrain_epochs", cfg.train.pretrain_epochs);
    if (t.contains("fool_mode")) {
      const std::string mode = t.at("fool_mode");
      if (mode == "random_wrong_label")
        cfg.train.fool_mode = FoolMode::random_wrong_label;
      else if (mode == "minimize_true_logprob")
        cfg.train.fool_mode = FoolMode::minimize_true_logprob;
      else
        throw std::invalid_argument(
            "train.fool_mode must be 'random_wrong_label' or "
            "'minimize_true_logprob'");
    }
    get_if_present(t, "label_smoothing", cfg.train.label_smoothing);
    if (t.contains("optimizer"))
      cfg.train.optimizer = adam_from_json(t.at("optimizer"), "train.optimizer");
    if (t.contains("arch")) {
      const json& a = t.at("arch");
      check_keys(a, "train.arch",
                 {"z_dim", "code_dim", "label_dim", "g_hidden", "d_hidden",
                  "q_hidden", "conditional_on_labels", "lrelu_slope"});
      get_if_present(a, "z_dim", cfg.train.arch.z_dim);
      get_if_present(a, "code_dim", cfg.train.arch.code_dim);
      get_if_present(a, "label_dim", cfg.train.arch.label_dim);
      get_if_present(a, "g_hidden", cfg.train.arch.g_hidden);
      get_if_present(a, "d_hidden", cfg.train.arch.d_hidden);
      get_if_present(a, "q_hidden", cfg.train.arch.q_hidden);
      get_if_present(a, "conditional_on_labels",
                     cfg.train.arch.conditional_on_labels);
      get_if_present(a, "lrelu_slope", cfg.train.arch.lrelu_slope);
    }
  }

  if (j.contains("attack")) {
    const json& a = j.at("attack");
    check_keys(a, "attack",
               {"mc_m", "mc_repeats", "generated_samples", "pca_components",
                "pca_fit_fraction", "tvd_bins"});
    get_if_present(a, "mc_m", cfg.attack.mc_m);
    get_if_present(a, "mc_repeats", cfg.attack.mc_repeats);
    get_if_present(a, "generated_samples", cfg.attack.generated_samples);
    get_if_present(a, "pca_components", cfg.attack.pca_components);
    get_if_present(a, "pca_fit_fraction", cfg.attack.pca_fit_fraction);
    get_if_present(a, "tvd_bins", cfg.attack.tvd_bins);
  }

  if (j.contains("fidelity")) {
    const json& f = j.at("fidelity");
    check_keys(f, "fidelity", {"samples", "is_splits", "oracle", "downstream"});
    get_if_present(f, "samples", cfg.fidelity.samples);
    get_if_present(f, "is_splits", cfg.fidelity.is_splits);
    if (f.contains("oracle")) {
      const json& o = f.at("oracle");
      check_keys(o, "fidelity.oracle",
                 {"hidden", "epochs", "batch_size", "optimizer", "seed"});
      get_if_present(o, "hidden", cfg.fidelity.oracle.hidden);
      get_if_present(o, "epochs", cfg.fidelity.oracle.epochs);
      get_if_present(o, "batch_size", cfg.fidelity.oracle.batch_size);
      if (o.contains("optimizer"))
        cfg.fidelity.oracle.optimizer =
            adam_from_json(o.at("optimizer"), "fidelity.oracle.optimizer");
      get_if_present(o, "seed", cfg.fidelity.oracle.seed);
    }
    if (f.contains("downstream")) {
      const json& d = f.at("downstream");
      check_keys(d, "fidelity.downstream",
                 {"hidden", "epochs", "batch_size", "optimizer", "seed"});
      get_if_present(d, "hidden", cfg.fidelity.downstream.hidden);
      get_if_present(d, "epochs", cfg.fidelity.downstream.epochs);
      get_if_present(d, "batch_size", cfg.fidelity.downstream.batch_size);
      if (d.contains("optimizer"))
        cfg.fidelity.downstream.optimizer =
            adam_from_json(d.at("optimizer"), "fidelity.downstream.optimizer");
      get_if_present(d, "seed", cfg.fidelity.downstream.seed);
    }
  }

  return cfg;
}

nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["model"] = cfg.model;
  j["seed"] = cfg.seed;
  j["measure_wall_time"] = cfg.measure_wall_time;
  j["dataset"] = json{{"type", cfg.dataset.type},
                      {"n_modes", cfg.dataset.n_modes},
                      {"radius", cfg.dataset.radius},
                      {"stddev", cfg.dataset.stddev},
                      {"n_samples", cfg.dataset.n_samples},
                      {"seed", cfg.dataset.seed},
                      {"path", cfg.dataset.path},
                      {"train_fraction", cfg.dataset.train_fraction}};
  json warmup = nullptr;
  if (cfg.train.warmup_epochs) warmup = *cfg.train.warmup_epochs;
  j["train"] = json{
      {"n_subsets", cfg.train.n_subsets},
      {"lambda", cfg.train.lambda},
      {"warmup_epochs", warmup},
      {"epochs", cfg.train.epochs},
      {"batch_size", cfg.train.batch_size},
      {"pretrain_epochs", cfg.train.pretrain_epochs},
      {"fool_mode", cfg.train.fool_mode == FoolMode::random_wrong_label
                        ? "random_wrong_label"
                        : "minimize_true_logprob"},
      {"label_smoothing", cfg.train.label_smoothing},
      {"optimizer", adam_to_json(cfg.train.optimizer)},
      {"arch", json{{"z_dim", cfg.train.arch.z_dim},
                    {"code_dim", cfg.train.arch.code_dim},
                    {"label_dim", cfg.train.arch.label_dim},
                    {"g_hidden", cfg.train.arch.g_hidden},
                    {"d_hidden", cfg.train.arch.d_hidden},
                    {"q_hidden", cfg.train.arch.q_hidden},
                    {"conditional_on_labels",
                     cfg.train.arch.conditional_on_labels},
                    {"lrelu_slope", cfg.train.arch.lrelu_slope}}}};
  j["attack"] = json{{"mc_m", cfg.attack.mc_m},
                     {"mc_repeats", cfg.attack.mc_repeats},
                     {"generated_samples", cfg.attack.generated_samples},
                     {"pca_components", cfg.attack.pca_components},
                     {"pca_fit_fraction", cfg.attack.pca_fit_fraction},
                     {"tvd_bins", cfg.attack.tvd_bins}};
  j["fidelity"] =
      json{{"samples", cfg.fidelity.samples},
           {"is_splits", cfg.fidelity.is_splits},
           {"oracle", json{{"hidden", cfg.fidelity.oracle.hidden},
                           {"epochs", cfg.fidelity.oracle.epochs},
                           {"batch_size", cfg.fidelity.oracle.batch_size},
                           {"optimizer", adam_to_json(cfg.fidelity.oracle.optimizer)},
                           {"seed", cfg.fidelity.oracle.seed}}},
           {"downstream",
            json{{"hidden", cfg.fidelity.downstream.hidden},
                 {"epochs", cfg.fidelity.downstream.epochs},
                 {"batch_size", cfg.fidelity.downstream.batch_size},
                 {"optimizer", adam_to_json(cfg.fidelity.downstream.optimizer)},
                 {"seed", cfg.fidelity.downstream.seed}}}};
  return j;
}

SweepConfig sweep_config_from_json(const json& j) {
  SweepConfig cfg;
  cfg.base = experiment_config_from_json(j);
  if (!j.contains("sweep"))
    throw std::invalid_argument("sweep: missing 'sweep' section");
  const json& s = j.at("sweep");
  check_keys(s, "sweep", {"lambda_values", "n_values", "seeds"});
  cfg.lambda_values = s.at("lambda_values").get<std::vector<double>>();
  cfg.n_values = s.at("n_values").get<std::vector<std::size_t>>();
  cfg.seeds = s.at("seeds").get<std::vector<std::uint64_t>>();
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot open config file " + path);
  return experiment_config_from_json(json::parse(is));
}

SweepConfig load_sweep_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot open config file " + path);
  return sweep_config_from_json(json::parse(is));
}

}  // namespace pigan
