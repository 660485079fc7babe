#pragma once

// Adam with bias correction. step() minimizes; callers maximizing an
// objective pass the negated gradient.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "pigan/simd.hpp"

namespace pigan {

struct AdamConfig {
  double learning_rate = 2e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Adam {
 public:
  Adam(std::size_t n, AdamConfig cfg)
      : cfg_(cfg), m_(n, 0.0), v_(n, 0.0) {}

  void step(std::span<double> params, std::span<const double> grad) {
    if (params.size() != m_.size() || grad.size() != m_.size())
      throw std::invalid_argument("Adam::step: size mismatch");
    b1_pow_ *= cfg_.beta1;
    b2_pow_ *= cfg_.beta2;
    const double bc1 = 1.0 / (1.0 - b1_pow_);
    const double bc2 = 1.0 / (1.0 - b2_pow_);
    simd::active().adam_step(params.data(), m_.data(), v_.data(), grad.data(),
                             m_.size(), cfg_.learning_rate, cfg_.beta1,
                             cfg_.beta2, bc1, bc2, cfg_.epsilon);
  }

  void reset() {
    std::fill(m_.begin(), m_.end(), 0.0);
    std::fill(v_.begin(), v_.end(), 0.0);
    b1_pow_ = 1.0;
    b2_pow_ = 1.0;
  }

 private:
  AdamConfig cfg_;
  std::vector<double> m_, v_;
  double b1_pow_ = 1.0, b2_pow_ = 1.0;
};

}  // namespace pigan
