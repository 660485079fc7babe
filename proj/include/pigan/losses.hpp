#pragma once

// Minibatch losses with hand-derived gradients. Sign conventions follow
// the training procedure: discriminator and classifier losses are values
// to ASCEND, the generator loss is a value to DESCEND; each function
// returns the value and accumulates the gradient of that value w.r.t. its
// own model's parameters. D and Q outputs are clamped to
// [1e-7, 1 - 1e-7] inside every logarithm.

#include <span>
#include <vector>

#include "pigan/models.hpp"

namespace pigan {

enum class FoolMode { random_wrong_label, minimize_true_logprob };

struct SampleBatch {
  std::vector<std::vector<double>> x;
  std::vector<int> code;   // 1..N
  std::vector<int> label;  // 0-based; empty means unconditional

  std::size_t size() const { return x.size(); }
  int label_at(std::size_t i) const {
    return label.empty() ? -1 : label[i];
  }
};

struct NoiseBatch {
  std::vector<std::vector<double>> z;
  std::vector<int> code;        // 1..N
  std::vector<int> label;       // empty means unconditional
  std::vector<int> wrong_code;  // c' != c; only for random_wrong_label

  std::size_t size() const { return z.size(); }
  int label_at(std::size_t i) const {
    return label.empty() ? -1 : label[i];
  }
};

// (1/m) sum [ t ln D(x,c) + (1-t) ln(1-D(x,c)) + ln(1-D(x~,c~)) ] with
// t = 1 - label_smoothing (one-sided smoothing of the real target).
// Always <= 0 when t = 1. Gradient accumulates into dgrad.
double loss_discriminator(const Discriminator& d, const SampleBatch& real,
                          const SampleBatch& fake, double label_smoothing,
                          std::span<double> dgrad);

// (1/m) sum ln Q_c(x~) over generated samples with their true codes.
double loss_classifier(const Classifier& q, const SampleBatch& fake,
                       std::span<double> qgrad);

// Non-saturating adversarial term -(1/m) sum ln D(G(z,c),c) plus the
// lambda-weighted fooling term selected by `mode`. Gradients flow through
// D (and Q) into the generator parameters only; `q` may be null when
// lambda == 0.
double loss_generator(const Generator& g, const Discriminator& d,
                      const Classifier* q, const NoiseBatch& batch,
                      double lambda, FoolMode mode, std::span<double> ggrad);

// ln of the clamped argument plus the derivative of that expression;
// the derivative is zero in the clamped regions.
double clamped_log(double p, double* dvalue_dp);

}  // namespace pigan
