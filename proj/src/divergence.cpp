#include "pigan/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace pigan {

namespace {

constexpr double kSumTolerance = 1e-12;

void check_same_support(const std::vector<ProbVector>& dists) {
  if (dists.empty()) throw std::invalid_argument("no distributions given");
  const std::size_t s = dists.front().size();
  for (const auto& d : dists)
    if (d.size() != s)
      throw std::invalid_argument("distributions have mismatched support sizes");
}

void check_weight_count(const std::vector<ProbVector>& dists,
                        const MixtureWeights& w) {
  if (dists.size() != w.size())
    throw std::invalid_argument("weight count does not match distribution count");
}

}  // namespace

// ---------------------------------------------------------------------------
// Value types
// ---------------------------------------------------------------------------

ProbVector::ProbVector(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw std::invalid_argument("ProbVector: empty support");
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0))
      throw std::invalid_argument("ProbVector: negative or NaN entry");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSumTolerance)
    throw std::invalid_argument("ProbVector: entries sum to " +
                                std::to_string(sum) + ", expected 1");
}

ProbVector ProbVector::uniform(std::size_t n) {
  return ProbVector(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

ProbVector ProbVector::delta(std::size_t n, std::size_t index) {
  if (index >= n) throw std::invalid_argument("ProbVector::delta: index out of range");
  std::vector<double> p(n, 0.0);
  p[index] = 1.0;
  return ProbVector(std::move(p));
}

MixtureWeights::MixtureWeights(std::vector<double> pi) : pi_(std::move(pi)) {
  if (pi_.size() < 2)
    throw std::invalid_argument("MixtureWeights: need at least 2 components");
  double sum = 0.0;
  for (double w : pi_) {
    if (!(w > 0.0))
      throw std::invalid_argument("MixtureWeights: entries must be positive");
    sum += w;
  }
  if (std::abs(sum - 1.0) > kSumTolerance)
    throw std::invalid_argument("MixtureWeights: entries sum to " +
                                std::to_string(sum) + ", expected 1");
}

MixtureWeights MixtureWeights::uniform(std::size_t n) {
  return MixtureWeights(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

GaussianStats::GaussianStats(Eigen::VectorXd mean_in, Eigen::MatrixXd cov_in)
    : mean(std::move(mean_in)), cov(std::move(cov_in)) {
  if (cov.rows() != cov.cols() || cov.rows() != mean.size())
    throw std::invalid_argument("GaussianStats: dimension mismatch");
  const double asym = (cov - cov.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-9)
    throw std::invalid_argument("GaussianStats: covariance not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      0.5 * (cov + cov.transpose()), Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-9)
    throw std::invalid_argument("GaussianStats: covariance not PSD");
}

GaussianStats GaussianStats::from_samples(
    const std::vector<std::vector<double>>& xs) {
  if (xs.size() < 2)
    throw std::invalid_argument("GaussianStats: need at least 2 samples");
  const Eigen::Index n = static_cast<Eigen::Index>(xs.size());
  const Eigen::Index d = static_cast<Eigen::Index>(xs.front().size());
  Eigen::MatrixXd m(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(xs[i].size()) != d)
      throw std::invalid_argument("GaussianStats: ragged samples");
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = xs[i][j];
  }
  Eigen::VectorXd mean = m.colwise().mean();
  Eigen::MatrixXd centered = m.rowwise() - mean.transpose();
  Eigen::MatrixXd cov =
      (centered.transpose() * centered) / static_cast<double>(n - 1);
  cov = 0.5 * (cov + cov.transpose());
  return GaussianStats(std::move(mean), std::move(cov));
}

ScoreSample::ScoreSample(std::vector<double> scores)
    : scores_(std::move(scores)) {
  for (double s : scores_)
    if (!(s >= 0.0 && s <= 1.0))
      throw std::invalid_argument("ScoreSample: score outside [0, 1]");
}

// ---------------------------------------------------------------------------
// Divergences
// ---------------------------------------------------------------------------

double entropy(const ProbVector& p) {
  double h = 0.0;
  for (double pi : p.probs())
    if (pi > 0.0) h -= pi * std::log(pi);
  return h;
}

double kl(const ProbVector& p, const ProbVector& q) {
  if (p.size() != q.size())
    throw std::invalid_argument("kl: support size mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) return std::numeric_limits<double>::infinity();
    d += p[i] * std::log(p[i] / q[i]);
  }
  return d;
}

double jsd_weighted(const std::vector<ProbVector>& dists,
                    const MixtureWeights& w) {
  check_same_support(dists);
  check_weight_count(dists, w);
  const std::size_t support = dists.front().size();
  std::vector<double> mix(support, 0.0);
  for (std::size_t c = 0; c < dists.size(); ++c)
    for (std::size_t x = 0; x < support; ++x) mix[x] += w[c] * dists[c][x];

  double jsd = 0.0;
  for (std::size_t c = 0; c < dists.size(); ++c) {
    double d = 0.0;
    for (std::size_t x = 0; x < support; ++x) {
      const double p = dists[c][x];
      if (p > 0.0) d += p * std::log(p / mix[x]);
    }
    jsd += w[c] * d;
  }
  return std::max(0.0, jsd);  // clamp roundoff on (near-)equal components
}

double mutual_information(const std::vector<ProbVector>& conditionals,
                          const MixtureWeights& w) {
  check_same_support(conditionals);
  check_weight_count(conditionals, w);
  const std::size_t support = conditionals.front().size();
  std::vector<double> marginal(support, 0.0);
  for (std::size_t c = 0; c < conditionals.size(); ++c)
    for (std::size_t x = 0; x < support; ++x)
      marginal[x] += w[c] * conditionals[c][x];

  // I = sum_{c,x} p(c,x) ln( p(c,x) / (p(c) p(x)) )
  double mi = 0.0;
  for (std::size_t c = 0; c < conditionals.size(); ++c) {
    for (std::size_t x = 0; x < support; ++x) {
      const double joint = w[c] * conditionals[c][x];
      if (joint > 0.0) mi += joint * std::log(joint / (w[c] * marginal[x]));
    }
  }
  return std::max(0.0, mi);
}

ProbVector membership_posterior(const std::vector<ProbVector>& conditionals,
                                const MixtureWeights& w, std::size_t x_index) {
  check_same_support(conditionals);
  check_weight_count(conditionals, w);
  if (x_index >= conditionals.front().size())
    throw std::invalid_argument("membership_posterior: index out of range");
  std::vector<double> post(conditionals.size());
  double mass = 0.0;
  for (std::size_t c = 0; c < conditionals.size(); ++c) {
    post[c] = w[c] * conditionals[c][x_index];
    mass += post[c];
  }
  if (mass <= 0.0)
    throw std::invalid_argument(
        "membership_posterior: mixture has no mass at this point");
  for (double& p : post) p /= mass;
  return ProbVector(std::move(post));
}

double cross_entropy_regularizer(const std::vector<ProbVector>& conditionals,
                                 const MixtureWeights& w) {
  check_same_support(conditionals);
  check_weight_count(conditionals, w);
  const std::size_t support = conditionals.front().size();
  std::vector<double> mix(support, 0.0);
  for (std::size_t c = 0; c < conditionals.size(); ++c)
    for (std::size_t x = 0; x < support; ++x) mix[x] += w[c] * conditionals[c][x];

  double value = 0.0;
  for (std::size_t c = 0; c < conditionals.size(); ++c) {
    for (std::size_t x = 0; x < support; ++x) {
      const double p = conditionals[c][x];
      if (p == 0.0) continue;
      // posterior that x came from component c
      const double post = w[c] * p / mix[x];
      value += w[c] * p * std::log(post);
    }
  }
  return value;
}

double tvd_empirical(const ScoreSample& a, const ScoreSample& b,
                     std::size_t n_bins) {
  if (a.size() == 0 || b.size() == 0)
    throw std::invalid_argument("tvd_empirical: empty sample");
  if (n_bins == 0) throw std::invalid_argument("tvd_empirical: n_bins == 0");

  auto histogram = [n_bins](const ScoreSample& s) {
    std::vector<double> h(n_bins, 0.0);
    for (double v : s.scores()) {
      std::size_t bin =
          static_cast<std::size_t>(v * static_cast<double>(n_bins));
      if (bin >= n_bins) bin = n_bins - 1;  // score == 1.0 lands in last bin
      h[bin] += 1.0;
    }
    for (double& c : h) c /= static_cast<double>(s.size());
    return h;
  };

  const auto ha = histogram(a);
  const auto hb = histogram(b);
  double tvd = 0.0;
  for (std::size_t i = 0; i < n_bins; ++i) tvd += std::abs(ha[i] - hb[i]);
  return 0.5 * tvd;
}

double frechet_distance(const GaussianStats& s1, const GaussianStats& s2) {
  if (s1.dim() != s2.dim())
    throw std::invalid_argument("frechet_distance: dimension mismatch");

  const double mean_term = (s1.mean - s2.mean).squaredNorm();

  // sqrt of S1 via eigendecomposition, with the same clamp rule as below
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es1(s1.cov);
  Eigen::VectorXd ev1 = es1.eigenvalues();
  for (Eigen::Index i = 0; i < ev1.size(); ++i) {
    if (ev1[i] < 0.0) {
      if (ev1[i] < -1e-10)
        throw std::runtime_error("frechet_distance: covariance not PSD");
      ev1[i] = 0.0;
    }
  }
  const Eigen::MatrixXd s1_half = es1.eigenvectors() *
                                  ev1.cwiseSqrt().asDiagonal() *
                                  es1.eigenvectors().transpose();

  // Tr((S1 S2)^{1/2}) = Tr((S1^{1/2} S2 S1^{1/2})^{1/2}); the inner product
  // is symmetric PSD up to roundoff, so symmetrize and eigendecompose.
  Eigen::MatrixXd prod = s1_half * s2.cov * s1_half;
  prod = 0.5 * (prod + prod.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esp(prod, Eigen::EigenvaluesOnly);
  double tr_sqrt = 0.0;
  const double scale = std::max(1.0, prod.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < esp.eigenvalues().size(); ++i) {
    double ev = esp.eigenvalues()[i];
    if (ev < 0.0) {
      if (ev < -1e-10 * scale)
        throw std::runtime_error(
            "frechet_distance: product matrix has a significantly negative "
            "eigenvalue");
      ev = 0.0;
    }
    tr_sqrt += std::sqrt(ev);
  }

  return mean_term + s1.cov.trace() + s2.cov.trace() - 2.0 * tr_sqrt;
}

double regularized_objective(const std::vector<ProbVector>& data_dists,
                             const std::vector<ProbVector>& gen_dists,
                             const std::vector<std::vector<double>>& d_scores,
                             const MixtureWeights& w, double lambda) {
  check_same_support(data_dists);
  check_same_support(gen_dists);
  check_weight_count(data_dists, w);
  check_weight_count(gen_dists, w);
  if (d_scores.size() != w.size())
    throw std::invalid_argument("regularized_objective: score table size");
  if (data_dists.front().size() != gen_dists.front().size())
    throw std::invalid_argument("regularized_objective: support mismatch");
  if (lambda < 0.0)
    throw std::invalid_argument("regularized_objective: lambda < 0");

  const std::size_t support = data_dists.front().size();
  double value = 0.0;
  for (std::size_t c = 0; c < w.size(); ++c) {
    if (d_scores[c].size() != support)
      throw std::invalid_argument("regularized_objective: score row size");
    for (std::size_t x = 0; x < support; ++x) {
      const double d = d_scores[c][x];
      if (data_dists[c][x] > 0.0) value += w[c] * data_dists[c][x] * std::log(d);
      if (gen_dists[c][x] > 0.0)
        value += w[c] * gen_dists[c][x] * std::log(1.0 - d);
    }
  }
  return value + lambda * jsd_weighted(gen_dists, w);
}

std::vector<std::vector<double>> optimal_discriminator_scores(
    const std::vector<ProbVector>& data_dists,
    const std::vector<ProbVector>& gen_dists) {
  check_same_support(data_dists);
  check_same_support(gen_dists);
  if (data_dists.size() != gen_dists.size())
    throw std::invalid_argument("optimal_discriminator_scores: code count");
  const std::size_t support = data_dists.front().size();
  std::vector<std::vector<double>> scores(data_dists.size(),
                                          std::vector<double>(support, 0.5));
  for (std::size_t c = 0; c < data_dists.size(); ++c) {
    for (std::size_t x = 0; x < support; ++x) {
      const double total = data_dists[c][x] + gen_dists[c][x];
      if (total > 0.0) scores[c][x] = data_dists[c][x] / total;
    }
  }
  return scores;
}

}  // namespace pigan
