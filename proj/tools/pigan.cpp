// Command-line front end: train / attack / evaluate / sweep / plot /
// histogram. Exit codes: 0 on success, 1 on validation errors (bad config,
// bad flags), 2 on runtime failures.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "pigan/experiment.hpp"
#include "pigan/report.hpp"
#include "pigan/text.hpp"

namespace {

using namespace pigan;

namespace fs = std::filesystem;

struct CommonArgs {
  std::string config_path;
  std::string out;
  std::optional<std::uint64_t> seed;
};

ExperimentConfig load_config(const CommonArgs& args) {
  ExperimentConfig cfg = load_experiment_config(args.config_path);
  if (args.seed) cfg.seed = *args.seed;
  return cfg;
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << contents;
}

int cmd_train(const CommonArgs& args) {
  const ExperimentConfig cfg = load_config(args);
  const ExperimentData data = prepare_data(cfg);
  const TrainStageResult result = train_stage(cfg, data.train);

  fs::create_directories(args.out);
  save_model_bundle(args.out + "/checkpoints", result.models);
  std::ofstream hist(args.out + "/history.csv");
  if (!hist) throw std::runtime_error("cannot write history.csv");
  result.history.write_csv(hist);
  write_file(args.out + "/config.json",
             experiment_config_to_json(cfg).dump(2) + "\n");

  std::cout << "trained " << cfg.model << " for " << cfg.train.epochs
            << " epochs on " << data.train.samples.size()
            << " train samples; checkpoints in " << args.out
            << "/checkpoints\n";
  return 0;
}

int cmd_attack(const CommonArgs& args, const std::string& checkpoint) {
  const ExperimentConfig cfg = load_config(args);
  const ExperimentData data = prepare_data(cfg);
  const ModelBundle models = load_model_bundle(checkpoint);

  // Reuse the experiment pipeline by scoring only the attack stage.
  ExperimentConfig attack_cfg = cfg;
  std::optional<ModelBundle> trained;
  (void)trained;

  // Run attacks directly against the loaded models.
  const std::size_t n_codes = cfg.train.n_subsets;
  const bool conditional = models.d.config().n_labels > 0;

  AdversaryDataset adv;
  adv.train_size_m = data.train.samples.size();
  for (const auto& s : data.train.samples)
    adv.suspects.push_back(Suspect{s.x, s.label, true});
  for (const auto& s : data.holdout)
    adv.suspects.push_back(Suspect{s.x, s.label, false});
  const auto score = [&](const Suspect& s) {
    return wb_score(models.d, s.x, conditional ? s.label : -1, n_codes);
  };
  const AttackResult wb = wb_attack(score, adv, derive_seed(cfg.seed, "wb"));
  const double tvd = tvd_attack(models.d, data.train.samples, data.holdout,
                                n_codes, cfg.attack.tvd_bins);

  fs::create_directories(args.out);
  nlohmann::json out;
  out["wb_accuracy"] = wb.accuracy;
  out["tvd"] = tvd;
  write_file(args.out + "/attacks.json", out.dump(2) + "\n");
  std::ofstream csv(args.out + "/attacks.csv");
  csv << "attack,value\nwb_accuracy," << format_double(wb.accuracy)
      << "\ntvd," << format_double(tvd) << '\n';

  std::cout << "wb_accuracy=" << wb.accuracy << " tvd=" << tvd << '\n';
  return 0;
}

int cmd_evaluate(const CommonArgs& args, const std::string& checkpoint) {
  const ExperimentConfig cfg = load_config(args);
  const ExperimentData data = prepare_data(cfg);
  const ModelBundle models = load_model_bundle(checkpoint);
  const EvaluationOracle oracle =
      fit_evaluation_oracle(data.full, cfg.fidelity.oracle);

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
  for (const auto& s : generated) gen_xs.push_back(s.x);
  for (const auto& s : data.holdout) real_xs.push_back(s.x);

  FidelityReport report;
  report.inception_score =
      inception_score(gen_xs, oracle, cfg.fidelity.is_splits);
  report.fid = fid(real_xs, gen_xs, oracle);
  report.intra_fid = intra_fid(data.holdout, generated, oracle);
  report.downstream_accuracy =
      downstream_accuracy(generated, data.holdout, cfg.fidelity.downstream);

  fs::create_directories(args.out);
  nlohmann::json out;
  out["inception_score"] = report.inception_score;
  out["fid"] = report.fid;
  out["intra_fid"] = report.intra_fid;
  out["downstream_accuracy"] = report.downstream_accuracy;
  write_file(args.out + "/fidelity.json", out.dump(2) + "\n");
  std::ofstream csv(args.out + "/fidelity.csv");
  csv << "metric,value\ninception_score," << format_double(report.inception_score)
      << "\nfid," << format_double(report.fid) << "\nintra_fid,"
      << format_double(report.intra_fid) << "\ndownstream_accuracy,"
      << format_double(report.downstream_accuracy) << '\n';

  std::cout << "inception_score=" << report.inception_score
            << " fid=" << report.fid << " intra_fid=" << report.intra_fid
            << " downstream_accuracy=" << report.downstream_accuracy << '\n';
  return 0;
}

int cmd_sweep(const CommonArgs& args, bool save_checkpoints) {
  SweepConfig sweep = load_sweep_config(args.config_path);
  if (args.seed) sweep.base.seed = *args.seed;

  fs::create_directories(args.out);
  fs::create_directories(args.out + "/checkpoints");
  fs::create_directories(args.out + "/plots");

  SweepCellHook hook;
  if (save_checkpoints) {
    hook = [&](const ExperimentConfig& cell, const ExperimentRecord& rec,
               const std::optional<ModelBundle>& models) {
      if (!models) return;
      const std::string dir = args.out + "/checkpoints/" + cell.model +
                              "_lambda" + format_double(rec.lambda) + "_N" +
                              std::to_string(rec.n_subsets) + "_seed" +
                              std::to_string(rec.seed);
      save_model_bundle(dir, *models);
    };
  }

  const auto records = run_sweep(sweep, hook);

  std::ofstream csv(args.out + "/records.csv");
  write_records_csv(csv, records);
  std::ofstream jsonl(args.out + "/records.json");
  write_records_json(jsonl, records);
  std::ofstream agg(args.out + "/aggregates.csv");
  write_aggregates_csv(agg, aggregate_records(records));

  try {
    emit_tradeoff_plot(records, "wb_accuracy", "downstream_accuracy",
                       args.out + "/plots/wb_vs_downstream");
    emit_tradeoff_plot(records, "wb_accuracy", "intra_fid",
                       args.out + "/plots/wb_vs_intra_fid");
  } catch (const std::exception& e) {
    std::cerr << "plot skipped: " << e.what() << '\n';
  }

  std::size_t failures = 0;
  for (const auto& r : records)
    if (!r.failure_reason.empty()) ++failures;
  std::cout << records.size() << " records written to " << args.out
            << "/records.csv (" << failures << " with failures)\n";
  return 0;
}

int cmd_plot(const std::string& records_path, const std::string& x,
             const std::string& y, const std::string& out) {
  std::ifstream is(records_path);
  if (!is) throw std::invalid_argument("cannot open " + records_path);
  const auto records = read_records_csv(is);
  emit_tradeoff_plot(records, x, y, out);
  std::cout << "wrote " << out << ".csv and " << out << ".svg\n";
  return 0;
}

int cmd_histogram(const CommonArgs& args, const std::string& checkpoint,
                  std::size_t bins) {
  const ExperimentConfig cfg = load_config(args);
  const ExperimentData data = prepare_data(cfg);
  const ModelBundle models = load_model_bundle(checkpoint);
  emit_score_histogram(models.d, data.train.samples, data.holdout,
                       cfg.train.n_subsets, bins, args.out);
  std::cout << "wrote " << args.out << ".csv and " << args.out << ".svg\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"privacy-regularized GAN laboratory"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string checkpoint;
  std::string records_path, x_metric, y_metric;
  std::size_t bins = 50;
  bool no_checkpoints = false;

  auto add_common = [&](CLI::App* sub, bool needs_config = true) {
    if (needs_config)
      sub->add_option("--config", args.config_path, "JSON config file")
          ->required();
    sub->add_option("--out", args.out, "output directory or path base")
        ->required();
    sub->add_option("--seed", args.seed, "override the experiment seed");
  };

  CLI::App* train = app.add_subcommand("train", "train one model");
  add_common(train);

  CLI::App* attack = app.add_subcommand("attack", "attack a trained model");
  add_common(attack);
  attack->add_option("--checkpoint", checkpoint, "checkpoint directory")
      ->required();

  CLI::App* evaluate =
      app.add_subcommand("evaluate", "fidelity metrics for a trained model");
  add_common(evaluate);
  evaluate->add_option("--checkpoint", checkpoint, "checkpoint directory")
      ->required();

  CLI::App* sweep = app.add_subcommand("sweep", "run a lambda/N/seed sweep");
  add_common(sweep);
  sweep->add_flag("--no-checkpoints", no_checkpoints,
                  "skip writing per-cell checkpoints");

  CLI::App* plot = app.add_subcommand("plot", "tradeoff plot from records.csv");
  plot->add_option("--records", records_path, "records.csv path")->required();
  plot->add_option("--x", x_metric, "x-axis metric")->required();
  plot->add_option("--y", y_metric, "y-axis metric")->required();
  plot->add_option("--out", args.out, "output path base")->required();

  CLI::App* histogram =
      app.add_subcommand("histogram", "train/holdout score histograms");
  add_common(histogram);
  histogram->add_option("--checkpoint", checkpoint, "checkpoint directory")
      ->required();
  histogram->add_option("--bins", bins, "histogram bin count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (train->parsed()) return cmd_train(args);
    if (attack->parsed()) return cmd_attack(args, checkpoint);
    if (evaluate->parsed()) return cmd_evaluate(args, checkpoint);
    if (sweep->parsed()) return cmd_sweep(args, !no_checkpoints);
    if (plot->parsed()) return cmd_plot(records_path, x_metric, y_metric, args.out);
    if (histogram->parsed()) return cmd_histogram(args, checkpoint, bins);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
