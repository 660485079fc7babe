#pragma once

// Alternating D/Q/G stochastic-gradient training with classifier
// pre-training and a K-epoch warmup during which the classifier is frozen,
// plus the unregularized baseline trainer. Both trainers derive all of
// their randomness from named substreams of the config seed and consume
// the shared streams in exactly the same order, so the lambda = 0 / frozen-Q
// configuration reproduces the baseline parameter trajectories bit for bit.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "pigan/dataset.hpp"
#include "pigan/losses.hpp"
#include "pigan/models.hpp"
#include "pigan/optimizer.hpp"

namespace pigan {

struct ModelArch {
  std::size_t z_dim = 8;
  std::size_t code_dim = 4;
  std::size_t label_dim = 4;
  std::vector<std::size_t> g_hidden = {64, 64};
  std::vector<std::size_t> d_hidden = {64, 64};
  std::vector<std::size_t> q_hidden = {64, 64};
  bool conditional_on_labels = false;
  double lrelu_slope = 0.2;
};

struct TrainConfig {
  std::size_t n_subsets = 2;  // N
  double lambda = 0.0;
  // K; when unset, ceil(2/3 * epochs).
  std::optional<std::size_t> warmup_epochs;
  std::size_t epochs = 300;
  std::size_t batch_size = 128;
  AdamConfig optimizer;
  std::size_t pretrain_epochs = 50;
  FoolMode fool_mode = FoolMode::random_wrong_label;
  double label_smoothing = 0.0;  // one-sided; 0 disables
  std::uint64_t seed = 0;
  ModelArch arch;

  std::size_t resolved_warmup() const;
  void validate() const;
};

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double d_loss = 0.0;
  double g_loss = 0.0;
  double q_loss = 0.0;
  double q_accuracy = 0.0;
};

struct TrainHistory {
  std::vector<EpochStats> epochs;
  void write_csv(std::ostream& os) const;
};

struct PiganModel {
  Generator g;
  Discriminator d;
  Classifier q;
  TrainHistory history;
};

struct GanModel {
  Generator g;
  Discriminator d;
  TrainHistory history;
};

// Supervised multinomial-logistic fit of Q on (x, code) pairs from the
// partitioned train set. Throws if any sample is unassigned.
void pretrain_classifier(Classifier& q, const PartitionedDataset& data,
                         std::size_t pretrain_epochs, std::size_t batch_size,
                         const AdamConfig& opt, std::uint64_t seed);

PiganModel train_pigan(const TrainConfig& cfg, const PartitionedDataset& data);
GanModel train_gan_baseline(const TrainConfig& cfg,
                            const PartitionedDataset& data);

// Generic supervised cross-entropy fit used by pretraining, the fidelity
// oracle and the downstream classifier. Returns final training accuracy.
double fit_classifier(Classifier& q, const std::vector<std::vector<double>>& xs,
                      const std::vector<int>& targets, std::size_t epochs,
                      std::size_t batch_size, const AdamConfig& opt,
                      std::uint64_t seed);

double classifier_accuracy(const Classifier& q,
                           const std::vector<std::vector<double>>& xs,
                           const std::vector<int>& targets);

// Draws a labeled sample set from a trained generator: z from the noise
// prior, codes from the partition weights, labels (when conditional) from
// the empirical label distribution.
Dataset sample_generator(const Generator& g, const MixtureWeights& weights,
                         const std::vector<double>& label_frequencies,
                         std::size_t n, std::uint64_t seed);

}  // namespace pigan
