#pragma once

// Training loop specialised to the enumerable tabular generator. On a
// finite support every expectation in the objective can be evaluated in
// closed form, so the updates are exact full-distribution gradients and the
// learned table can be scored with the exact divergence primitives -- no
// sampling noise anywhere in the measurement.

#include <cstdint>
#include <vector>

#include "pigan/losses.hpp"
#include "pigan/models.hpp"
#include "pigan/optimizer.hpp"

namespace pigan {

// D(x, c) = sigmoid(logit[c][x]).
class TabularDiscriminator {
 public:
  TabularDiscriminator(std::size_t n_codes, std::size_t alphabet,
                       std::uint64_t seed);
  double score(std::size_t x, int code) const;  // code 1..N
  std::span<double> logits() { return logits_; }
  std::size_t n_codes() const { return n_codes_; }
  std::size_t alphabet() const { return alphabet_; }

 private:
  std::size_t n_codes_, alphabet_;
  std::vector<double> logits_;  // row-major n_codes x alphabet
};

// Q(x) = softmax over codes of logit[x][:].
class TabularClassifier {
 public:
  TabularClassifier(std::size_t alphabet, std::size_t n_codes,
                    std::uint64_t seed);
  std::vector<double> posterior(std::size_t x) const;
  std::span<double> logits() { return logits_; }
  std::size_t n_codes() const { return n_codes_; }
  std::size_t alphabet() const { return alphabet_; }

 private:
  std::size_t alphabet_, n_codes_;
  std::vector<double> logits_;  // row-major alphabet x n_codes
};

struct TabularTrainConfig {
  double lambda = 0.0;
  std::size_t steps = 3000;
  std::size_t warmup_steps = 0;  // Q frozen before this many steps
  AdamConfig optimizer{.learning_rate = 5e-3,
                       .beta1 = 0.5,
                       .beta2 = 0.999,
                       .epsilon = 1e-8};
  FoolMode fool_mode = FoolMode::minimize_true_logprob;
  std::uint64_t seed = 0;
};

struct TabularStepStats {
  double d_value = 0.0;      // ascended discriminator objective
  double g_loss = 0.0;       // descended generator loss
  double q_value = 0.0;      // ascended classifier objective
  double exact_mi = 0.0;     // I(G;c) of the current table
};

struct TabularPiganResult {
  TabularGenerator generator;
  TabularDiscriminator discriminator;
  TabularClassifier classifier;
  std::vector<TabularStepStats> history;

  double exact_mutual_information(const MixtureWeights& w) const;
};

TabularPiganResult train_tabular_pigan(
    const TabularTrainConfig& cfg,
    const std::vector<ProbVector>& data_per_code, const MixtureWeights& w);

// Exact value of the regularizer estimate E[ln Q_c(x)] under the current
// generator, and a minibatch Monte-Carlo estimate of the same quantity.
double exact_tabular_regularizer(const TabularGenerator& g,
                                 const TabularClassifier& q,
                                 const MixtureWeights& w);
double estimate_tabular_regularizer(const TabularGenerator& g,
                                    const TabularClassifier& q,
                                    const MixtureWeights& w, std::size_t m,
                                    std::uint64_t seed);

}  // namespace pigan
