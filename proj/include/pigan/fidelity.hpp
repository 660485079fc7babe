#pragma once

// Sample-quality metrics scored against a fixed surrogate oracle: a small
// classifier trained once on the full real dataset whose penultimate-layer
// activations serve as the embedding. The oracle is frozen, so every model
// compared within an experiment is measured with the same instrument.

#include <cstdint>
#include <vector>

#include "pigan/dataset.hpp"
#include "pigan/models.hpp"
#include "pigan/optimizer.hpp"

namespace pigan {

struct OracleConfig {
  std::vector<std::size_t> hidden = {32, 16};
  std::size_t epochs = 200;
  std::size_t batch_size = 64;
  AdamConfig optimizer;
  std::uint64_t seed = 11;
};

class EvaluationOracle {
 public:
  EvaluationOracle(Classifier net, std::size_t n_classes);

  ProbVector class_posterior(std::span<const double> x) const;
  std::vector<double> embed(std::span<const double> x) const;
  std::size_t n_classes() const { return n_classes_; }
  std::size_t embedding_dim() const { return embedding_dim_; }
  const Classifier& net() const { return net_; }

 private:
  Classifier net_;
  std::size_t n_classes_;
  std::size_t embedding_dim_;
};

// Trains the oracle on all real samples (train + holdout together).
EvaluationOracle fit_evaluation_oracle(const Dataset& all_real,
                                       const OracleConfig& cfg);

// exp( mean_x KL(p(y|x) || mean posterior) ), in [1, n_classes].
// split_count > 1 averages the score over equal chunks.
double inception_score(const std::vector<std::vector<double>>& samples,
                       const EvaluationOracle& oracle,
                       std::size_t split_count = 1);

// Frechet distance between Gaussian fits of real and generated embeddings.
// Each side needs at least embedding_dim + 1 samples.
double fid(const std::vector<std::vector<double>>& real,
           const std::vector<std::vector<double>>& generated,
           const EvaluationOracle& oracle);

// Unweighted mean of the per-class FID; throws naming the first class
// missing from either side.
double intra_fid(const Dataset& real, const Dataset& generated,
                 const EvaluationOracle& oracle);

struct DownstreamConfig {
  std::vector<std::size_t> hidden = {32, 16};
  std::size_t epochs = 200;
  std::size_t batch_size = 64;
  AdamConfig optimizer;
  std::uint64_t seed = 12;
};

// Trains a fresh classifier on the generated labeled samples and reports
// its accuracy on the real test set.
double downstream_accuracy(const Dataset& generated, const Dataset& real_test,
                           const DownstreamConfig& cfg);

struct FidelityReport {
  double inception_score = 0.0;
  double fid = 0.0;
  double intra_fid = 0.0;
  double downstream_accuracy = 0.0;
};

}  // namespace pigan
