#pragma once

// Parametric generator / discriminator / classifier built from one shared
// core: learned code (and optional class) embeddings concatenated with the
// main input and fed through a leaky-ReLU MLP. Forward and backward passes
// are hand-written on top of the simd kernels; everything is double
// precision so the finite-difference gradient checks are meaningful.
//
// Membership codes are 1-based ({1..N}) at this interface, matching the
// dataset convention; class labels are 0-based.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pigan/prob.hpp"

namespace pigan {

enum class Activation { identity, tanh_squash, sigmoid, softmax };

struct ParamBlock {
  std::string name;
  std::vector<std::size_t> shape;
  std::size_t offset = 0;
  std::size_t size = 0;
};

struct NamedTensor {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<double> values;
};

class CondNet {
 public:
  struct Config {
    std::size_t main_dim = 0;
    std::size_t n_codes = 0;   // 0 disables the code embedding
    std::size_t code_dim = 0;
    std::size_t n_labels = 0;  // 0 disables the label embedding
    std::size_t label_dim = 0;
    std::vector<std::size_t> hidden;
    std::size_t out_dim = 1;
    Activation output = Activation::identity;
    double lrelu_slope = 0.2;
  };

  CondNet(Config cfg, std::uint64_t init_seed);

  const Config& config() const { return cfg_; }
  std::size_t param_count() const { return params_.size(); }
  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }
  const std::vector<ParamBlock>& blocks() const { return blocks_; }

  struct Cache {
    std::vector<double> input;               // concatenated net input
    std::vector<std::vector<double>> pre;    // pre-activations per layer
    std::vector<std::vector<double>> post;   // activations per layer
    int code = 0;                            // 1-based, 0 if unused
    int label = -1;
  };

  // code: 1..n_codes (ignored when n_codes == 0); label: 0..n_labels-1
  // (ignored when n_labels == 0).
  void forward(std::span<const double> main, int code, int label,
               Cache& cache) const;
  std::vector<double> forward(std::span<const double> main, int code = 0,
                              int label = -1) const;

  // dout is dL/d(network output, post-activation). Parameter gradients are
  // accumulated into dparams (size param_count); dmain, when non-empty,
  // receives the gradient w.r.t. the main input (accumulated as well).
  void backward(const Cache& cache, std::span<const double> dout,
                std::span<double> dparams, std::span<double> dmain) const;

  std::vector<NamedTensor> export_tensors(const std::string& prefix) const;
  void import_tensors(const std::string& prefix,
                      const std::vector<NamedTensor>& tensors);

 private:
  std::size_t input_dim() const;
  void check_inputs(std::span<const double> main, int code, int label) const;

  Config cfg_;
  std::vector<ParamBlock> blocks_;
  std::vector<double> params_;
  std::size_t emb_code_off_ = 0, emb_label_off_ = 0, layers_off_ = 0;
  std::vector<std::size_t> widths_;  // input_dim, hidden..., out_dim
};

// --------------------------------------------------------------------------
// Role wrappers
// --------------------------------------------------------------------------

struct GeneratorConfig {
  std::size_t z_dim = 8;
  std::size_t x_dim = 2;
  std::size_t n_codes = 2;
  std::size_t code_dim = 4;
  std::size_t n_labels = 0;  // 0 = unconditional on class labels
  std::size_t label_dim = 0;
  std::vector<std::size_t> hidden = {64, 64};
  double lrelu_slope = 0.2;
};

class Generator {
 public:
  Generator(GeneratorConfig cfg, std::uint64_t seed);
  // Deterministic in (params, z, c, y); output in [-1, 1] per feature.
  std::vector<double> forward(std::span<const double> z, int code,
                              int label = -1) const;
  CondNet& net() { return net_; }
  const CondNet& net() const { return net_; }
  const GeneratorConfig& config() const { return cfg_; }

 private:
  GeneratorConfig cfg_;
  CondNet net_;
};

struct DiscriminatorConfig {
  std::size_t x_dim = 2;
  std::size_t n_codes = 2;
  std::size_t code_dim = 4;
  std::size_t n_labels = 0;
  std::size_t label_dim = 0;
  std::vector<std::size_t> hidden = {64, 64};
  double lrelu_slope = 0.2;
};

class Discriminator {
 public:
  Discriminator(DiscriminatorConfig cfg, std::uint64_t seed);
  // Confidence strictly inside (0, 1).
  double forward(std::span<const double> x, int code, int label = -1) const;
  CondNet& net() { return net_; }
  const CondNet& net() const { return net_; }
  const DiscriminatorConfig& config() const { return cfg_; }

 private:
  DiscriminatorConfig cfg_;
  CondNet net_;
};

struct ClassifierConfig {
  std::size_t x_dim = 2;
  std::size_t n_classes = 2;  // N membership codes, or C class labels
  std::vector<std::size_t> hidden = {64, 64};
  double lrelu_slope = 0.2;
};

class Classifier {
 public:
  Classifier(ClassifierConfig cfg, std::uint64_t seed);
  // Softmax posterior over the n_classes outputs.
  std::vector<double> forward(std::span<const double> x) const;
  ProbVector posterior(std::span<const double> x) const;
  // Activations of the last hidden layer; the embedding used by the
  // fidelity oracle.
  std::vector<double> embed(std::span<const double> x) const;
  CondNet& net() { return net_; }
  const CondNet& net() const { return net_; }
  const ClassifierConfig& config() const { return cfg_; }

 private:
  ClassifierConfig cfg_;
  CondNet net_;
};

// --------------------------------------------------------------------------
// Enumerable tabular generator (exact-measurement oracle)
// --------------------------------------------------------------------------

struct TabularGeneratorParams {
  std::vector<ProbVector> table;  // one row per code
};

// Exact conditional output distribution for code c in {1..N}; no sampling.
ProbVector tabular_generator_distribution(const TabularGeneratorParams& params,
                                          int code);

// Softmax-parametrized version used when the table itself is trained.
class TabularGenerator {
 public:
  TabularGenerator(std::size_t n_codes, std::size_t alphabet,
                   std::uint64_t seed);
  static TabularGenerator from_distributions(const std::vector<ProbVector>& rows);

  std::size_t n_codes() const { return n_codes_; }
  std::size_t alphabet() const { return alphabet_; }
  std::span<double> logits() { return logits_; }
  std::span<const double> logits() const { return logits_; }

  ProbVector distribution(int code) const;  // code 1..N
  std::vector<ProbVector> distributions() const;
  TabularGeneratorParams params() const;

 private:
  std::size_t n_codes_, alphabet_;
  std::vector<double> logits_;  // row-major n_codes x alphabet
};

// Stable softmax helper shared by the tabular models and the classifier
// oracle code.
void softmax_inplace(std::span<double> v);

}  // namespace pigan
