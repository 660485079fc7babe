#include "pigan/fidelity.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "pigan/divergence.hpp"
#include "pigan/training.hpp"

namespace pigan {

EvaluationOracle::EvaluationOracle(Classifier net, std::size_t n_classes)
    : net_(std::move(net)), n_classes_(n_classes) {
  const auto& hidden = net_.config().hidden;
  embedding_dim_ = hidden.empty() ? net_.config().x_dim : hidden.back();
}

ProbVector EvaluationOracle::class_posterior(std::span<const double> x) const {
  return net_.posterior(x);
}

std::vector<double> EvaluationOracle::embed(std::span<const double> x) const {
  return net_.embed(x);
}

EvaluationOracle fit_evaluation_oracle(const Dataset& all_real,
                                       const OracleConfig& cfg) {
  if (all_real.empty())
    throw std::invalid_argument("fit_evaluation_oracle: empty dataset");
  int max_label = 0;
  for (const auto& s : all_real) max_label = std::max(max_label, s.label);
  const std::size_t n_classes = static_cast<std::size_t>(max_label) + 1;

  ClassifierConfig qc;
  qc.x_dim = all_real.front().x.size();
  qc.n_classes = n_classes;
  qc.hidden = cfg.hidden;
  Classifier net(qc, cfg.seed);

  std::vector<std::vector<double>> xs;
  std::vector<int> ys;
  xs.reserve(all_real.size());
  ys.reserve(all_real.size());
  for (const auto& s : all_real) {
    xs.push_back(s.x);
    ys.push_back(s.label);
  }
  fit_classifier(net, xs, ys, cfg.epochs, cfg.batch_size, cfg.optimizer,
                 cfg.seed);
  return EvaluationOracle(std::move(net), n_classes);
}

namespace {

double inception_score_chunk(
    const std::vector<std::vector<double>>& posteriors, std::size_t begin,
    std::size_t end) {
  const std::size_t n_classes = posteriors.front().size();
  const double n = static_cast<double>(end - begin);
  std::vector<double> marginal(n_classes, 0.0);
  for (std::size_t i = begin; i < end; ++i)
    for (std::size_t c = 0; c < n_classes; ++c)
      marginal[c] += posteriors[i][c] / n;

  double mean_kl = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    double kl_term = 0.0;
    for (std::size_t c = 0; c < n_classes; ++c) {
      const double p = posteriors[i][c];
      if (p > 0.0) kl_term += p * std::log(p / marginal[c]);
    }
    mean_kl += kl_term / n;
  }
  return std::exp(mean_kl);
}

}  // namespace

double inception_score(const std::vector<std::vector<double>>& samples,
                       const EvaluationOracle& oracle,
                       std::size_t split_count) {
  if (samples.empty()) throw std::invalid_argument("inception_score: no samples");
  if (split_count == 0 || split_count > samples.size())
    throw std::invalid_argument("inception_score: bad split count");

  std::vector<std::vector<double>> posteriors;
  posteriors.reserve(samples.size());
  for (const auto& x : samples)
    posteriors.push_back(oracle.class_posterior(x).probs());

  double total = 0.0;
  const std::size_t chunk = samples.size() / split_count;
  for (std::size_t s = 0; s < split_count; ++s) {
    const std::size_t begin = s * chunk;
    const std::size_t end = (s + 1 == split_count) ? samples.size()
                                                   : begin + chunk;
    total += inception_score_chunk(posteriors, begin, end);
  }
  return total / static_cast<double>(split_count);
}

double fid(const std::vector<std::vector<double>>& real,
           const std::vector<std::vector<double>>& generated,
           const EvaluationOracle& oracle) {
  const std::size_t need = oracle.embedding_dim() + 1;
  if (real.size() < need || generated.size() < need)
    throw std::invalid_argument(
        "fid: each side needs at least embedding_dim + 1 samples");

  auto embed_all = [&](const std::vector<std::vector<double>>& xs) {
    std::vector<std::vector<double>> out;
    out.reserve(xs.size());
    for (const auto& x : xs) out.push_back(oracle.embed(x));
    return out;
  };
  const auto stats_real = GaussianStats::from_samples(embed_all(real));
  const auto stats_gen = GaussianStats::from_samples(embed_all(generated));
  return frechet_distance(stats_real, stats_gen);
}

double intra_fid(const Dataset& real, const Dataset& generated,
                 const EvaluationOracle& oracle) {
  std::set<int> classes;
  for (const auto& s : real) classes.insert(s.label);
  for (const auto& s : generated) classes.insert(s.label);

  double total = 0.0;
  for (int cls : classes) {
    std::vector<std::vector<double>> r, g;
    for (const auto& s : real)
      if (s.label == cls) r.push_back(s.x);
    for (const auto& s : generated)
      if (s.label == cls) g.push_back(s.x);
    if (r.empty())
      throw std::invalid_argument("intra_fid: class " + std::to_string(cls) +
                                  " missing from real samples");
    if (g.empty())
      throw std::invalid_argument("intra_fid: class " + std::to_string(cls) +
                                  " missing from generated samples");
    total += fid(r, g, oracle);
  }
  return total / static_cast<double>(classes.size());
}

double downstream_accuracy(const Dataset& generated, const Dataset& real_test,
                           const DownstreamConfig& cfg) {
  if (generated.empty())
    throw std::invalid_argument("downstream_accuracy: no generated samples");
  if (real_test.empty())
    throw std::invalid_argument("downstream_accuracy: empty test set");

  int max_label = 0;
  for (const auto& s : real_test) max_label = std::max(max_label, s.label);
  const std::size_t n_classes = static_cast<std::size_t>(max_label) + 1;

  std::vector<bool> present(n_classes, false);
  std::vector<std::vector<double>> xs;
  std::vector<int> ys;
  xs.reserve(generated.size());
  ys.reserve(generated.size());
  for (const auto& s : generated) {
    if (s.label >= 0 && static_cast<std::size_t>(s.label) < n_classes)
      present[static_cast<std::size_t>(s.label)] = true;
    xs.push_back(s.x);
    ys.push_back(s.label);
  }
  for (std::size_t c = 0; c < n_classes; ++c)
    if (!present[c])
      throw std::invalid_argument("downstream_accuracy: class " +
                                  std::to_string(c) +
                                  " absent from generated training data");

  ClassifierConfig qc;
  qc.x_dim = generated.front().x.size();
  qc.n_classes = n_classes;
  qc.hidden = cfg.hidden;
  Classifier net(qc, cfg.seed);
  fit_classifier(net, xs, ys, cfg.epochs, cfg.batch_size, cfg.optimizer,
                 cfg.seed);

  std::vector<std::vector<double>> test_xs;
  std::vector<int> test_ys;
  test_xs.reserve(real_test.size());
  test_ys.reserve(real_test.size());
  for (const auto& s : real_test) {
    test_xs.push_back(s.x);
    test_ys.push_back(s.label);
  }
  return classifier_accuracy(net, test_xs, test_ys);
}

}  // namespace pigan
