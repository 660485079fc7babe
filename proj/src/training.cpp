#include "pigan/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "pigan/text.hpp"

namespace pigan {

std::size_t TrainConfig::resolved_warmup() const {
  if (warmup_epochs) return *warmup_epochs;
  return (2 * epochs + 2) / 3;  // ceil(2/3 * epochs)
}

void TrainConfig::validate() const {
  if (n_subsets < 2) throw std::invalid_argument("TrainConfig: N < 2");
  if (lambda < 0.0) throw std::invalid_argument("TrainConfig: lambda < 0");
  if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size < 1");
  if (resolved_warmup() > epochs)
    throw std::invalid_argument("TrainConfig: warmup K exceeds epochs");
  if (!(label_smoothing >= 0.0 && label_smoothing < 1.0))
    throw std::invalid_argument("TrainConfig: label_smoothing outside [0,1)");
}

void TrainHistory::write_csv(std::ostream& os) const {
  os << "epoch,d_loss,g_loss,q_loss,q_accuracy\n";
  for (const auto& e : epochs) {
    os << e.epoch << ',' << format_double(e.d_loss) << ','
       << format_double(e.g_loss) << ',' << format_double(e.q_loss) << ','
       << format_double(e.q_accuracy) << '\n';
  }
}

namespace {

struct DataView {
  const PartitionedDataset* data = nullptr;
  std::size_t x_dim = 0;
  std::size_t n_labels = 0;              // 0 when unconditional
  std::vector<double> label_frequencies; // empirical, for fake label draws
};

DataView make_view(const PartitionedDataset& data, const TrainConfig& cfg) {
  if (data.samples.empty())
    throw std::invalid_argument("train: empty dataset");
  if (data.n_subsets != cfg.n_subsets)
    throw std::invalid_argument("train: dataset N does not match config N");
  DataView v;
  v.data = &data;
  v.x_dim = data.samples.front().x.size();
  int max_label = 0;
  for (const auto& s : data.samples) {
    if (s.x.size() != v.x_dim)
      throw std::invalid_argument("train: ragged samples");
    if (s.code < 1 || static_cast<std::size_t>(s.code) > data.n_subsets)
      throw std::invalid_argument("train: sample with unassigned code");
    max_label = std::max(max_label, s.label);
  }
  if (cfg.arch.conditional_on_labels) {
    v.n_labels = static_cast<std::size_t>(max_label) + 1;
    v.label_frequencies.assign(v.n_labels, 0.0);
    for (const auto& s : data.samples)
      v.label_frequencies[static_cast<std::size_t>(s.label)] += 1.0;
  }
  return v;
}

Generator build_generator(const TrainConfig& cfg, const DataView& v) {
  GeneratorConfig gc;
  gc.z_dim = cfg.arch.z_dim;
  gc.x_dim = v.x_dim;
  gc.n_codes = cfg.n_subsets;
  gc.code_dim = cfg.arch.code_dim;
  gc.n_labels = v.n_labels;
  gc.label_dim = v.n_labels > 0 ? cfg.arch.label_dim : 0;
  gc.hidden = cfg.arch.g_hidden;
  gc.lrelu_slope = cfg.arch.lrelu_slope;
  return Generator(gc, derive_seed(cfg.seed, "init_g"));
}

Discriminator build_discriminator(const TrainConfig& cfg, const DataView& v) {
  DiscriminatorConfig dc;
  dc.x_dim = v.x_dim;
  dc.n_codes = cfg.n_subsets;
  dc.code_dim = cfg.arch.code_dim;
  dc.n_labels = v.n_labels;
  dc.label_dim = v.n_labels > 0 ? cfg.arch.label_dim : 0;
  dc.hidden = cfg.arch.d_hidden;
  dc.lrelu_slope = cfg.arch.lrelu_slope;
  return Discriminator(dc, derive_seed(cfg.seed, "init_d"));
}

Classifier build_classifier(const TrainConfig& cfg, const DataView& v) {
  ClassifierConfig qc;
  qc.x_dim = v.x_dim;
  qc.n_classes = cfg.n_subsets;
  qc.hidden = cfg.arch.q_hidden;
  qc.lrelu_slope = cfg.arch.lrelu_slope;
  return Classifier(qc, derive_seed(cfg.seed, "init_q"));
}

// One fresh (z, c[, y]) minibatch. Draw order is per sample so the baseline
// and PIGAN trainers consume the noise stream identically.
NoiseBatch sample_noise_batch(Rng& rng, std::size_t m, const TrainConfig& cfg,
                              const DataView& v) {
  NoiseBatch nb;
  nb.z.resize(m);
  nb.code.resize(m);
  if (v.n_labels > 0) nb.label.resize(m);
  const auto& weights = v.data->weights.pi();
  for (std::size_t i = 0; i < m; ++i) {
    nb.z[i].resize(cfg.arch.z_dim);
    rng.fill_normal(nb.z[i].data(), cfg.arch.z_dim);
    nb.code[i] = static_cast<int>(rng.categorical(weights)) + 1;
    if (v.n_labels > 0)
      nb.label[i] = static_cast<int>(rng.categorical(v.label_frequencies));
  }
  return nb;
}

// Uniform over the N-1 incorrect codes, resampled per example.
void sample_wrong_codes(Rng& rng, NoiseBatch& nb, std::size_t n_codes) {
  nb.wrong_code.resize(nb.size());
  for (std::size_t i = 0; i < nb.size(); ++i) {
    const std::size_t r = rng.uniform_index(n_codes - 1);
    const int candidate = static_cast<int>(r) + 1;
    nb.wrong_code[i] = candidate >= nb.code[i] ? candidate + 1 : candidate;
  }
}

SampleBatch generate_fakes(const Generator& g, const NoiseBatch& nb) {
  SampleBatch fake;
  fake.x.resize(nb.size());
  fake.code = nb.code;
  fake.label = nb.label;
  for (std::size_t i = 0; i < nb.size(); ++i)
    fake.x[i] = g.forward(nb.z[i], nb.code[i], nb.label_at(i));
  return fake;
}

void check_finite(double value, const char* what, std::size_t epoch) {
  if (!std::isfinite(value))
    throw std::runtime_error(std::string("train: non-finite ") + what +
                             " at epoch " + std::to_string(epoch));
}

double batch_code_accuracy(const Classifier& q, const SampleBatch& fake) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < fake.size(); ++i) {
    const auto probs = q.forward(fake.x[i]);
    const std::size_t pred = static_cast<std::size_t>(
        std::max_element(probs.begin(), probs.end()) - probs.begin());
    if (static_cast<int>(pred) + 1 == fake.code[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(fake.size());
}

// Shared epoch loop. `q` is null for the baseline; `update_q_after` is the
// warmup bound K (updates happen for epoch > K).
TrainHistory run_training(const TrainConfig& cfg, const DataView& v,
                          Generator& g, Discriminator& d, Classifier* q,
                          std::size_t update_q_after) {
  Rng rng_batch(derive_seed(cfg.seed, "batch"));
  Rng rng_noise(derive_seed(cfg.seed, "noise"));

  Adam opt_g(g.net().param_count(), cfg.optimizer);
  Adam opt_d(d.net().param_count(), cfg.optimizer);
  Adam opt_q(q ? q->net().param_count() : 1, cfg.optimizer);

  std::vector<double> grad_g(g.net().param_count());
  std::vector<double> grad_d(d.net().param_count());
  std::vector<double> grad_q(q ? q->net().param_count() : 0);

  const std::size_t n = v.data->samples.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  TrainHistory history;
  history.epochs.reserve(cfg.epochs);

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng_batch.shuffle(order);
    double d_sum = 0.0, g_sum = 0.0, q_sum = 0.0, q_acc_sum = 0.0;
    std::size_t steps = 0;

    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t m = std::min(cfg.batch_size, n - start);

      SampleBatch real;
      real.x.resize(m);
      real.code.resize(m);
      if (v.n_labels > 0) real.label.resize(m);
      for (std::size_t i = 0; i < m; ++i) {
        const auto& s = v.data->samples[order[start + i]];
        real.x[i] = s.x;
        real.code[i] = s.code;
        if (v.n_labels > 0) real.label[i] = s.label;
      }

      // Discriminator step (ascent).
      NoiseBatch nb_d = sample_noise_batch(rng_noise, m, cfg, v);
      SampleBatch fake = generate_fakes(g, nb_d);
      std::fill(grad_d.begin(), grad_d.end(), 0.0);
      const double d_loss =
          loss_discriminator(d, real, fake, cfg.label_smoothing, grad_d);
      check_finite(d_loss, "discriminator loss", epoch);
      for (double& x : grad_d) x = -x;
      opt_d.step(d.net().params(), grad_d);
      d_sum += d_loss;

      // Classifier step (ascent) on the same fake batch, after warmup.
      if (q) {
        std::fill(grad_q.begin(), grad_q.end(), 0.0);
        const double q_loss = loss_classifier(*q, fake, grad_q);
        check_finite(q_loss, "classifier loss", epoch);
        q_sum += q_loss;
        q_acc_sum += batch_code_accuracy(*q, fake);
        if (epoch > update_q_after) {
          for (double& x : grad_q) x = -x;
          opt_q.step(q->net().params(), grad_q);
        }
      }

      // Generator step (descent) on a fresh noise batch.
      NoiseBatch nb_g = sample_noise_batch(rng_noise, m, cfg, v);
      if (cfg.lambda > 0.0 && cfg.fool_mode == FoolMode::random_wrong_label)
        sample_wrong_codes(rng_noise, nb_g, cfg.n_subsets);
      std::fill(grad_g.begin(), grad_g.end(), 0.0);
      const double g_loss = loss_generator(
          g, d, q, nb_g, q ? cfg.lambda : 0.0, cfg.fool_mode, grad_g);
      check_finite(g_loss, "generator loss", epoch);
      opt_g.step(g.net().params(), grad_g);
      g_sum += g_loss;

      ++steps;
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.d_loss = d_sum / static_cast<double>(steps);
    stats.g_loss = g_sum / static_cast<double>(steps);
    stats.q_loss = q ? q_sum / static_cast<double>(steps) : 0.0;
    stats.q_accuracy = q ? q_acc_sum / static_cast<double>(steps) : 0.0;
    history.epochs.push_back(stats);
  }
  return history;
}

}  // namespace

void pretrain_classifier(Classifier& q, const PartitionedDataset& data,
                         std::size_t pretrain_epochs, std::size_t batch_size,
                         const AdamConfig& opt, std::uint64_t seed) {
  std::vector<std::vector<double>> xs;
  std::vector<int> targets;
  xs.reserve(data.samples.size());
  targets.reserve(data.samples.size());
  for (const auto& s : data.samples) {
    if (s.code < 1 || static_cast<std::size_t>(s.code) > data.n_subsets)
      throw std::invalid_argument("pretrain_classifier: unassigned code");
    xs.push_back(s.x);
    targets.push_back(s.code - 1);
  }
  fit_classifier(q, xs, targets, pretrain_epochs, batch_size, opt, seed);
}

PiganModel train_pigan(const TrainConfig& cfg, const PartitionedDataset& data) {
  cfg.validate();
  const DataView v = make_view(data, cfg);
  Generator g = build_generator(cfg, v);
  Discriminator d = build_discriminator(cfg, v);
  Classifier q = build_classifier(cfg, v);

  pretrain_classifier(q, data, cfg.pretrain_epochs, cfg.batch_size,
                      cfg.optimizer, derive_seed(cfg.seed, "pretrain"));

  TrainHistory history =
      run_training(cfg, v, g, d, &q, cfg.resolved_warmup());
  return PiganModel{std::move(g), std::move(d), std::move(q),
                    std::move(history)};
}

GanModel train_gan_baseline(const TrainConfig& cfg,
                            const PartitionedDataset& data) {
  cfg.validate();
  const DataView v = make_view(data, cfg);
  Generator g = build_generator(cfg, v);
  Discriminator d = build_discriminator(cfg, v);
  TrainHistory history = run_training(cfg, v, g, d, nullptr, cfg.epochs);
  return GanModel{std::move(g), std::move(d), std::move(history)};
}

double fit_classifier(Classifier& q, const std::vector<std::vector<double>>& xs,
                      const std::vector<int>& targets, std::size_t epochs,
                      std::size_t batch_size, const AdamConfig& opt,
                      std::uint64_t seed) {
  if (xs.size() != targets.size())
    throw std::invalid_argument("fit_classifier: size mismatch");
  if (xs.empty()) throw std::invalid_argument("fit_classifier: empty data");
  if (batch_size < 1) throw std::invalid_argument("fit_classifier: batch_size");
  const std::size_t n_classes = q.config().n_classes;
  for (int t : targets)
    if (t < 0 || static_cast<std::size_t>(t) >= n_classes)
      throw std::invalid_argument("fit_classifier: target out of range");

  Rng rng(seed);
  Adam optimizer(q.net().param_count(), opt);
  std::vector<double> grad(q.net().param_count());
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < xs.size(); start += batch_size) {
      const std::size_t m = std::min(batch_size, xs.size() - start);
      SampleBatch batch;
      batch.x.resize(m);
      batch.code.resize(m);
      for (std::size_t i = 0; i < m; ++i) {
        batch.x[i] = xs[order[start + i]];
        batch.code[i] = targets[order[start + i]] + 1;
      }
      std::fill(grad.begin(), grad.end(), 0.0);
      const double value = loss_classifier(q, batch, grad);
      if (!std::isfinite(value))
        throw std::runtime_error("fit_classifier: non-finite loss");
      for (double& x : grad) x = -x;  // ascend the log-likelihood
      optimizer.step(q.net().params(), grad);
    }
  }
  return classifier_accuracy(q, xs, targets);
}

double classifier_accuracy(const Classifier& q,
                           const std::vector<std::vector<double>>& xs,
                           const std::vector<int>& targets) {
  if (xs.empty()) throw std::invalid_argument("classifier_accuracy: empty data");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto probs = q.forward(xs[i]);
    const std::size_t pred = static_cast<std::size_t>(
        std::max_element(probs.begin(), probs.end()) - probs.begin());
    if (static_cast<int>(pred) == targets[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(xs.size());
}

Dataset sample_generator(const Generator& g, const MixtureWeights& weights,
                         const std::vector<double>& label_frequencies,
                         std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  const bool conditional = g.config().n_labels > 0;
  if (conditional && label_frequencies.empty())
    throw std::invalid_argument("sample_generator: label frequencies required");
  Dataset out;
  out.reserve(n);
  std::vector<double> z(g.config().z_dim);
  for (std::size_t i = 0; i < n; ++i) {
    rng.fill_normal(z.data(), z.size());
    const int code = static_cast<int>(rng.categorical(weights.pi())) + 1;
    int label = -1;
    if (conditional)
      label = static_cast<int>(rng.categorical(label_frequencies));
    LabeledSample s;
    s.x = g.forward(z, code, label);
    s.label = conditional ? label : 0;
    s.code = code;
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace pigan
