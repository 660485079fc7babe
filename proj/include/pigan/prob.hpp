#pragma once

// Validated value types shared by the divergence primitives, the tabular
// generator oracle and the fidelity metrics.

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

namespace pigan {

// Finite discrete distribution: nonnegative mass per support point,
// summing to one within 1e-12.
class ProbVector {
 public:
  explicit ProbVector(std::vector<double> probs);
  static ProbVector uniform(std::size_t n);
  static ProbVector delta(std::size_t n, std::size_t index);

  const std::vector<double>& probs() const { return probs_; }
  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }

  bool operator==(const ProbVector& other) const = default;

 private:
  std::vector<double> probs_;
};

// Mixture weights pi over N >= 2 components; all entries strictly positive.
class MixtureWeights {
 public:
  explicit MixtureWeights(std::vector<double> pi);
  static MixtureWeights uniform(std::size_t n);

  const std::vector<double>& pi() const { return pi_; }
  std::size_t size() const { return pi_.size(); }
  double operator[](std::size_t i) const { return pi_[i]; }

 private:
  std::vector<double> pi_;
};

// Gaussian moments of an embedding cloud. Covariance must be symmetric
// within 1e-9 and PSD up to -1e-9 eigenvalue slack.
struct GaussianStats {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;

  GaussianStats(Eigen::VectorXd mean, Eigen::MatrixXd cov);

  // Sample moments with unbiased (n-1) covariance normalization.
  static GaussianStats from_samples(const std::vector<std::vector<double>>& xs);

  std::size_t dim() const { return static_cast<std::size_t>(mean.size()); }
};

// Empirical sample of discriminator confidences, each in [0, 1].
class ScoreSample {
 public:
  explicit ScoreSample(std::vector<double> scores);

  const std::vector<double>& scores() const { return scores_; }
  std::size_t size() const { return scores_.size(); }

 private:
  std::vector<double> scores_;
};

}  // namespace pigan
