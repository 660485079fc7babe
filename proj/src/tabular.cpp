#include "pigan/tabular.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pigan/divergence.hpp"
#include "pigan/rng.hpp"

namespace pigan {

namespace {

double tab_sigmoid(double x) {
  double s;
  if (x >= 0.0) {
    s = 1.0 / (1.0 + std::exp(-x));
  } else {
    const double e = std::exp(x);
    s = e / (1.0 + e);
  }
  return std::clamp(s, 1e-15, 1.0 - 1e-15);
}

}  // namespace

TabularDiscriminator::TabularDiscriminator(std::size_t n_codes,
                                           std::size_t alphabet,
                                           std::uint64_t seed)
    : n_codes_(n_codes), alphabet_(alphabet), logits_(n_codes * alphabet) {
  Rng rng(seed);
  for (double& v : logits_) v = rng.uniform(-0.1, 0.1);
}

double TabularDiscriminator::score(std::size_t x, int code) const {
  if (code < 1 || static_cast<std::size_t>(code) > n_codes_ || x >= alphabet_)
    throw std::invalid_argument("TabularDiscriminator: index out of range");
  return tab_sigmoid(logits_[static_cast<std::size_t>(code - 1) * alphabet_ + x]);
}

TabularClassifier::TabularClassifier(std::size_t alphabet, std::size_t n_codes,
                                     std::uint64_t seed)
    : alphabet_(alphabet), n_codes_(n_codes), logits_(alphabet * n_codes) {
  Rng rng(seed);
  for (double& v : logits_) v = rng.uniform(-0.1, 0.1);
}

std::vector<double> TabularClassifier::posterior(std::size_t x) const {
  if (x >= alphabet_)
    throw std::invalid_argument("TabularClassifier: symbol out of range");
  std::vector<double> row(logits_.begin() + static_cast<std::ptrdiff_t>(x * n_codes_),
                          logits_.begin() + static_cast<std::ptrdiff_t>((x + 1) * n_codes_));
  softmax_inplace(row);
  return row;
}

double TabularPiganResult::exact_mutual_information(
    const MixtureWeights& w) const {
  return mutual_information(generator.distributions(), w);
}

TabularPiganResult train_tabular_pigan(
    const TabularTrainConfig& cfg,
    const std::vector<ProbVector>& data_per_code, const MixtureWeights& w) {
  if (data_per_code.size() != w.size())
    throw std::invalid_argument("train_tabular_pigan: code count mismatch");
  const std::size_t n_codes = data_per_code.size();
  const std::size_t alphabet = data_per_code.front().size();
  for (const auto& d : data_per_code)
    if (d.size() != alphabet)
      throw std::invalid_argument("train_tabular_pigan: ragged data tables");
  if (cfg.lambda < 0.0)
    throw std::invalid_argument("train_tabular_pigan: lambda < 0");
  if (cfg.lambda > 0.0 && cfg.fool_mode == FoolMode::random_wrong_label &&
      n_codes < 2)
    throw std::invalid_argument("train_tabular_pigan: no incorrect code with N=1");

  TabularPiganResult r{
      TabularGenerator(n_codes, alphabet, derive_seed(cfg.seed, "init_g")),
      TabularDiscriminator(n_codes, alphabet, derive_seed(cfg.seed, "init_d")),
      TabularClassifier(alphabet, n_codes, derive_seed(cfg.seed, "init_q")),
      {}};

  Adam opt_g(r.generator.logits().size(), cfg.optimizer);
  Adam opt_d(r.discriminator.logits().size(), cfg.optimizer);
  Adam opt_q(r.classifier.logits().size(), cfg.optimizer);

  std::vector<double> grad_g(r.generator.logits().size());
  std::vector<double> grad_d(r.discriminator.logits().size());
  std::vector<double> grad_q(r.classifier.logits().size());

  r.history.reserve(cfg.steps);

  for (std::size_t step = 0; step < cfg.steps; ++step) {
    const auto gen = r.generator.distributions();

    // Discriminator ascent on the exact value
    //   sum_c w_c sum_x [ p_data ln D + p_gen ln(1-D) ].
    double d_value = 0.0;
    std::fill(grad_d.begin(), grad_d.end(), 0.0);
    for (std::size_t c = 0; c < n_codes; ++c) {
      for (std::size_t x = 0; x < alphabet; ++x) {
        const double s = r.discriminator.score(x, static_cast<int>(c) + 1);
        const double pd = data_per_code[c][x];
        const double pg = gen[c][x];
        if (pd > 0.0) d_value += w[c] * pd * std::log(s);
        if (pg > 0.0) d_value += w[c] * pg * std::log(1.0 - s);
        grad_d[c * alphabet + x] = w[c] * (pd * (1.0 - s) - pg * s);
      }
    }
    for (double& v : grad_d) v = -v;
    opt_d.step(r.discriminator.logits(), grad_d);

    // Classifier ascent on sum_c w_c sum_x p_gen ln Q_c(x), frozen during
    // the warmup steps.
    double q_value = 0.0;
    std::fill(grad_q.begin(), grad_q.end(), 0.0);
    for (std::size_t x = 0; x < alphabet; ++x) {
      const auto post = r.classifier.posterior(x);
      for (std::size_t c = 0; c < n_codes; ++c) {
        const double pg = w[c] * gen[c][x];
        double dlog = 0.0;
        q_value += pg * clamped_log(post[c], &dlog);
        if (pg == 0.0 || dlog == 0.0) continue;
        // d/d logit_j of ln Q_c = [j==c] - Q_j
        for (std::size_t j = 0; j < n_codes; ++j)
          grad_q[x * n_codes + j] +=
              pg * ((j == c ? 1.0 : 0.0) - post[j]);
      }
    }
    if (step >= cfg.warmup_steps) {
      for (double& v : grad_q) v = -v;
      opt_q.step(r.classifier.logits(), grad_q);
    }

    // Generator descent on the exact expectation of
    //   f(x,c) = -ln D(x,c) + lambda * r(x,c).
    double g_loss = 0.0;
    std::fill(grad_g.begin(), grad_g.end(), 0.0);
    for (std::size_t c = 0; c < n_codes; ++c) {
      std::vector<double> f(alphabet, 0.0);
      double mean_f = 0.0;
      for (std::size_t x = 0; x < alphabet; ++x) {
        const double s = r.discriminator.score(x, static_cast<int>(c) + 1);
        double fx = -std::log(s);
        if (cfg.lambda > 0.0) {
          const auto post = r.classifier.posterior(x);
          if (cfg.fool_mode == FoolMode::minimize_true_logprob) {
            fx += cfg.lambda * clamped_log(post[c], nullptr);
          } else {
            // exact expectation of the cross-entropy against a uniformly
            // chosen incorrect code
            double ce = 0.0;
            for (std::size_t j = 0; j < n_codes; ++j)
              if (j != c) ce -= clamped_log(post[j], nullptr);
            fx += cfg.lambda * ce / static_cast<double>(n_codes - 1);
          }
        }
        f[x] = fx;
        mean_f += gen[c][x] * fx;
      }
      g_loss += w[c] * mean_f;
      // d/d theta_{c,k} E_{x~softmax(theta_c)}[f] = p_k (f_k - E[f])
      for (std::size_t k = 0; k < alphabet; ++k)
        grad_g[c * alphabet + k] = w[c] * gen[c][k] * (f[k] - mean_f);
    }
    opt_g.step(r.generator.logits(), grad_g);

    TabularStepStats stats;
    stats.d_value = d_value;
    stats.g_loss = g_loss;
    stats.q_value = q_value;
    stats.exact_mi = mutual_information(r.generator.distributions(), w);
    r.history.push_back(stats);
  }
  return r;
}

double exact_tabular_regularizer(const TabularGenerator& g,
                                 const TabularClassifier& q,
                                 const MixtureWeights& w) {
  const auto gen = g.distributions();
  double value = 0.0;
  for (std::size_t c = 0; c < gen.size(); ++c) {
    for (std::size_t x = 0; x < gen[c].size(); ++x) {
      if (gen[c][x] == 0.0) continue;
      value += w[c] * gen[c][x] * clamped_log(q.posterior(x)[c], nullptr);
    }
  }
  return value;
}

double estimate_tabular_regularizer(const TabularGenerator& g,
                                    const TabularClassifier& q,
                                    const MixtureWeights& w, std::size_t m,
                                    std::uint64_t seed) {
  if (m == 0) throw std::invalid_argument("estimate_tabular_regularizer: m == 0");
  Rng rng(seed);
  const auto gen = g.distributions();
  double value = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t c = rng.categorical(w.pi());
    const std::size_t x = rng.categorical(gen[c].probs());
    value += clamped_log(q.posterior(x)[c], nullptr);
  }
  return value / static_cast<double>(m);
}

}  // namespace pigan
