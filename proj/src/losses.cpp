#include "pigan/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace pigan {

double clamped_log(double p, double* dvalue_dp) {
  constexpr double lo = 1e-7;
  constexpr double hi = 1.0 - 1e-7;
  if (p < lo) {
    if (dvalue_dp) *dvalue_dp = 0.0;
    return std::log(lo);
  }
  if (p > hi) {
    if (dvalue_dp) *dvalue_dp = 0.0;
    return std::log(hi);
  }
  if (dvalue_dp) *dvalue_dp = 1.0 / p;
  return std::log(p);
}

double loss_discriminator(const Discriminator& d, const SampleBatch& real,
                          const SampleBatch& fake, double label_smoothing,
                          std::span<double> dgrad) {
  if (real.size() == 0 || fake.size() == 0)
    throw std::invalid_argument("loss_discriminator: empty batch");
  if (real.size() != fake.size())
    throw std::invalid_argument("loss_discriminator: batch size mismatch");
  if (!(label_smoothing >= 0.0 && label_smoothing < 1.0))
    throw std::invalid_argument("loss_discriminator: bad label smoothing");

  const double m = static_cast<double>(real.size());
  const double t = 1.0 - label_smoothing;
  double value = 0.0;
  CondNet::Cache cache;
  std::vector<double> dout(1);

  for (std::size_t i = 0; i < real.size(); ++i) {
    d.net().forward(real.x[i], real.code[i], real.label_at(i), cache);
    const double s = cache.post.back()[0];
    double g_pos = 0.0, g_neg = 0.0;
    value += t * clamped_log(s, &g_pos) / m;
    if (label_smoothing > 0.0) value += (1.0 - t) * clamped_log(1.0 - s, &g_neg) / m;
    dout[0] = (t * g_pos - (1.0 - t) * g_neg) / m;
    d.net().backward(cache, dout, dgrad, {});
  }
  for (std::size_t i = 0; i < fake.size(); ++i) {
    d.net().forward(fake.x[i], fake.code[i], fake.label_at(i), cache);
    const double s = cache.post.back()[0];
    double g = 0.0;
    value += clamped_log(1.0 - s, &g) / m;
    dout[0] = -g / m;
    d.net().backward(cache, dout, dgrad, {});
  }
  return value;
}

double loss_classifier(const Classifier& q, const SampleBatch& fake,
                       std::span<double> qgrad) {
  if (fake.size() == 0)
    throw std::invalid_argument("loss_classifier: empty batch");
  const std::size_t n = q.config().n_classes;
  const double m = static_cast<double>(fake.size());
  double value = 0.0;
  CondNet::Cache cache;
  std::vector<double> dout(n);

  for (std::size_t i = 0; i < fake.size(); ++i) {
    const int code = fake.code[i];
    if (code < 1 || static_cast<std::size_t>(code) > n)
      throw std::invalid_argument("loss_classifier: code out of range");
    q.net().forward(fake.x[i], 0, -1, cache);
    const double p = cache.post.back()[static_cast<std::size_t>(code - 1)];
    double g = 0.0;
    value += clamped_log(p, &g) / m;
    std::fill(dout.begin(), dout.end(), 0.0);
    dout[static_cast<std::size_t>(code - 1)] = g / m;
    q.net().backward(cache, dout, qgrad, {});
  }
  return value;
}

double loss_generator(const Generator& g, const Discriminator& d,
                      const Classifier* q, const NoiseBatch& batch,
                      double lambda, FoolMode mode, std::span<double> ggrad) {
  if (batch.size() == 0)
    throw std::invalid_argument("loss_generator: empty batch");
  if (lambda < 0.0) throw std::invalid_argument("loss_generator: lambda < 0");
  if (lambda > 0.0 && q == nullptr)
    throw std::invalid_argument("loss_generator: classifier required for lambda > 0");
  if (lambda > 0.0 && mode == FoolMode::random_wrong_label) {
    if (g.config().n_codes < 2)
      throw std::invalid_argument(
          "loss_generator: no incorrect label exists with N = 1");
    if (batch.wrong_code.size() != batch.size())
      throw std::invalid_argument("loss_generator: wrong_code batch missing");
  }

  const double m = static_cast<double>(batch.size());
  double value = 0.0;

  CondNet::Cache gcache, dcache, qcache;
  std::vector<double> d_scratch(d.net().param_count(), 0.0);
  std::vector<double> q_scratch(q ? q->net().param_count() : 0, 0.0);
  std::vector<double> dx(g.config().x_dim);
  std::vector<double> dout1(1);
  std::vector<double> doutq(q ? q->config().n_classes : 0);

  for (std::size_t i = 0; i < batch.size(); ++i) {
    const int code = batch.code[i];
    const int label = batch.label_at(i);
    g.net().forward(batch.z[i], code, label, gcache);
    const auto& x_fake = gcache.post.back();
    std::fill(dx.begin(), dx.end(), 0.0);

    // Non-saturating adversarial term, descending -ln D.
    d.net().forward(x_fake, code, label, dcache);
    const double s = dcache.post.back()[0];
    double gs = 0.0;
    value += -clamped_log(s, &gs) / m;
    dout1[0] = -gs / m;
    d.net().backward(dcache, dout1, d_scratch, dx);

    if (lambda > 0.0) {
      q->net().forward(x_fake, 0, -1, qcache);
      const auto& probs = qcache.post.back();
      std::fill(doutq.begin(), doutq.end(), 0.0);
      if (mode == FoolMode::minimize_true_logprob) {
        // Descend lambda * ln Q_c directly.
        const double p = probs[static_cast<std::size_t>(code - 1)];
        double gq = 0.0;
        value += lambda * clamped_log(p, &gq) / m;
        doutq[static_cast<std::size_t>(code - 1)] = lambda * gq / m;
      } else {
        // Descend the cross-entropy against a random incorrect code,
        // i.e. push Q's mass toward c' != c.
        const int wrong = batch.wrong_code[i];
        if (wrong < 1 ||
            static_cast<std::size_t>(wrong) > g.config().n_codes ||
            wrong == code)
          throw std::invalid_argument("loss_generator: invalid wrong code");
        const double p = probs[static_cast<std::size_t>(wrong - 1)];
        double gq = 0.0;
        value += -lambda * clamped_log(p, &gq) / m;
        doutq[static_cast<std::size_t>(wrong - 1)] = -lambda * gq / m;
      }
      q->net().backward(qcache, doutq, q_scratch, dx);
    }

    g.net().backward(gcache, dx, ggrad, {});
  }
  return value;
}

}  // namespace pigan
