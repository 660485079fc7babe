#include "pigan/models.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pigan/rng.hpp"
#include "pigan/simd.hpp"

namespace pigan {

namespace {

// Forward outputs are kept strictly inside the open interval so the score
// range contract holds even for saturated nets.
constexpr double kSigmoidFloor = 1e-15;

double stable_sigmoid(double x) {
  double s;
  if (x >= 0.0) {
    s = 1.0 / (1.0 + std::exp(-x));
  } else {
    const double e = std::exp(x);
    s = e / (1.0 + e);
  }
  return std::clamp(s, kSigmoidFloor, 1.0 - kSigmoidFloor);
}

}  // namespace

void softmax_inplace(std::span<double> v) {
  if (v.empty()) return;
  double mx = v[0];
  for (double x : v) mx = std::max(mx, x);
  double sum = 0.0;
  for (double& x : v) {
    x = std::exp(x - mx);
    sum += x;
  }
  for (double& x : v) x /= sum;
}

// ---------------------------------------------------------------------------
// CondNet
// ---------------------------------------------------------------------------

CondNet::CondNet(Config cfg, std::uint64_t init_seed) : cfg_(std::move(cfg)) {
  if (cfg_.main_dim == 0) throw std::invalid_argument("CondNet: main_dim == 0");
  if (cfg_.out_dim == 0) throw std::invalid_argument("CondNet: out_dim == 0");
  if ((cfg_.n_codes == 0) != (cfg_.code_dim == 0))
    throw std::invalid_argument("CondNet: code embedding half-configured");
  if ((cfg_.n_labels == 0) != (cfg_.label_dim == 0))
    throw std::invalid_argument("CondNet: label embedding half-configured");

  widths_.push_back(input_dim());
  for (std::size_t h : cfg_.hidden) {
    if (h == 0) throw std::invalid_argument("CondNet: zero-width hidden layer");
    widths_.push_back(h);
  }
  widths_.push_back(cfg_.out_dim);

  std::size_t offset = 0;
  auto add_block = [&](const std::string& name, std::vector<std::size_t> shape) {
    std::size_t size = 1;
    for (std::size_t s : shape) size *= s;
    blocks_.push_back(ParamBlock{name, std::move(shape), offset, size});
    offset += size;
  };

  if (cfg_.n_codes > 0) {
    emb_code_off_ = offset;
    add_block("code_emb", {cfg_.n_codes, cfg_.code_dim});
  }
  if (cfg_.n_labels > 0) {
    emb_label_off_ = offset;
    add_block("label_emb", {cfg_.n_labels, cfg_.label_dim});
  }
  layers_off_ = offset;
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    add_block("L" + std::to_string(l) + ".W", {widths_[l + 1], widths_[l]});
    add_block("L" + std::to_string(l) + ".b", {widths_[l + 1]});
  }
  params_.assign(offset = blocks_.back().offset + blocks_.back().size, 0.0);

  // Small centered uniform scaled by fan-in; biases start at zero.
  Rng rng(init_seed);
  for (const auto& b : blocks_) {
    if (b.name == "code_emb" || b.name == "label_emb") {
      for (std::size_t i = 0; i < b.size; ++i)
        params_[b.offset + i] = rng.uniform(-0.1, 0.1);
    } else if (b.shape.size() == 2) {
      const double s = 1.0 / std::sqrt(static_cast<double>(b.shape[1]));
      for (std::size_t i = 0; i < b.size; ++i)
        params_[b.offset + i] = rng.uniform(-s, s);
    }
  }
}

std::size_t CondNet::input_dim() const {
  return cfg_.main_dim + cfg_.code_dim + cfg_.label_dim;
}

void CondNet::check_inputs(std::span<const double> main, int code,
                           int label) const {
  if (main.size() != cfg_.main_dim)
    throw std::invalid_argument("CondNet: main input has wrong size");
  if (cfg_.n_codes > 0 &&
      (code < 1 || static_cast<std::size_t>(code) > cfg_.n_codes))
    throw std::invalid_argument("CondNet: code out of range");
  if (cfg_.n_labels > 0 &&
      (label < 0 || static_cast<std::size_t>(label) >= cfg_.n_labels))
    throw std::invalid_argument("CondNet: label out of range");
}

void CondNet::forward(std::span<const double> main, int code, int label,
                      Cache& cache) const {
  check_inputs(main, code, label);
  const auto& k = simd::active();

  cache.code = code;
  cache.label = label;
  cache.input.resize(input_dim());
  std::copy(main.begin(), main.end(), cache.input.begin());
  std::size_t at = cfg_.main_dim;
  if (cfg_.n_codes > 0) {
    const double* row = params_.data() + emb_code_off_ +
                        static_cast<std::size_t>(code - 1) * cfg_.code_dim;
    std::copy(row, row + cfg_.code_dim, cache.input.begin() + at);
    at += cfg_.code_dim;
  }
  if (cfg_.n_labels > 0) {
    const double* row = params_.data() + emb_label_off_ +
                        static_cast<std::size_t>(label) * cfg_.label_dim;
    std::copy(row, row + cfg_.label_dim, cache.input.begin() + at);
  }

  const std::size_t n_layers = widths_.size() - 1;
  cache.pre.resize(n_layers);
  cache.post.resize(n_layers);

  const double* w = params_.data() + layers_off_;
  const double* act = cache.input.data();
  for (std::size_t l = 0; l < n_layers; ++l) {
    const std::size_t in = widths_[l], out = widths_[l + 1];
    const double* weights = w;
    const double* bias = w + in * out;
    w = bias + out;

    auto& pre = cache.pre[l];
    pre.resize(out);
    for (std::size_t i = 0; i < out; ++i)
      pre[i] = k.dot(weights + i * in, act, in) + bias[i];

    auto& post = cache.post[l];
    post.resize(out);
    if (l + 1 < n_layers) {
      k.leaky_relu(pre.data(), post.data(), out, cfg_.lrelu_slope);
    } else {
      switch (cfg_.output) {
        case Activation::identity:
          post = pre;
          break;
        case Activation::tanh_squash:
          for (std::size_t i = 0; i < out; ++i) post[i] = std::tanh(pre[i]);
          break;
        case Activation::sigmoid:
          for (std::size_t i = 0; i < out; ++i) post[i] = stable_sigmoid(pre[i]);
          break;
        case Activation::softmax:
          post = pre;
          softmax_inplace(post);
          break;
      }
    }
    act = post.data();
  }
}

std::vector<double> CondNet::forward(std::span<const double> main, int code,
                                     int label) const {
  Cache cache;
  forward(main, code, label, cache);
  return cache.post.back();
}

void CondNet::backward(const Cache& cache, std::span<const double> dout,
                       std::span<double> dparams,
                       std::span<double> dmain) const {
  if (dparams.size() != params_.size())
    throw std::invalid_argument("CondNet::backward: dparams size mismatch");
  if (dout.size() != cfg_.out_dim)
    throw std::invalid_argument("CondNet::backward: dout size mismatch");
  const auto& k = simd::active();
  const std::size_t n_layers = widths_.size() - 1;

  // Output activation jacobian -> gradient at the last pre-activation.
  std::vector<double> dpre(cfg_.out_dim);
  const auto& out_post = cache.post.back();
  switch (cfg_.output) {
    case Activation::identity:
      std::copy(dout.begin(), dout.end(), dpre.begin());
      break;
    case Activation::tanh_squash:
      for (std::size_t i = 0; i < dpre.size(); ++i)
        dpre[i] = dout[i] * (1.0 - out_post[i] * out_post[i]);
      break;
    case Activation::sigmoid:
      for (std::size_t i = 0; i < dpre.size(); ++i)
        dpre[i] = dout[i] * out_post[i] * (1.0 - out_post[i]);
      break;
    case Activation::softmax: {
      double inner = 0.0;
      for (std::size_t i = 0; i < dpre.size(); ++i) inner += dout[i] * out_post[i];
      for (std::size_t i = 0; i < dpre.size(); ++i)
        dpre[i] = out_post[i] * (dout[i] - inner);
      break;
    }
  }

  // Walk layers backwards accumulating gradients.
  std::vector<double> dact;
  for (std::size_t l = n_layers; l-- > 0;) {
    const std::size_t in = widths_[l], out = widths_[l + 1];
    std::size_t layer_off = layers_off_;
    for (std::size_t j = 0; j < l; ++j)
      layer_off += widths_[j] * widths_[j + 1] + widths_[j + 1];
    const double* weights = params_.data() + layer_off;
    double* dweights = dparams.data() + layer_off;
    double* dbias = dweights + in * out;

    const double* act_prev =
        (l == 0) ? cache.input.data() : cache.post[l - 1].data();

    dact.assign(in, 0.0);
    for (std::size_t i = 0; i < out; ++i) {
      const double g = dpre[i];
      if (g != 0.0) {
        k.axpy(g, act_prev, dweights + i * in, in);
        k.axpy(g, weights + i * in, dact.data(), in);
      }
      dbias[i] += g;
    }

    if (l == 0) {
      // Split the input gradient between the main input and the embeddings.
      if (!dmain.empty()) {
        if (dmain.size() != cfg_.main_dim)
          throw std::invalid_argument("CondNet::backward: dmain size mismatch");
        for (std::size_t i = 0; i < cfg_.main_dim; ++i) dmain[i] += dact[i];
      }
      std::size_t at = cfg_.main_dim;
      if (cfg_.n_codes > 0) {
        double* drow = dparams.data() + emb_code_off_ +
                       static_cast<std::size_t>(cache.code - 1) * cfg_.code_dim;
        for (std::size_t i = 0; i < cfg_.code_dim; ++i) drow[i] += dact[at + i];
        at += cfg_.code_dim;
      }
      if (cfg_.n_labels > 0) {
        double* drow = dparams.data() + emb_label_off_ +
                       static_cast<std::size_t>(cache.label) * cfg_.label_dim;
        for (std::size_t i = 0; i < cfg_.label_dim; ++i) drow[i] += dact[at + i];
      }
    } else {
      dpre.resize(in);
      k.leaky_relu_grad(cache.pre[l - 1].data(), dact.data(), dpre.data(), in,
                        cfg_.lrelu_slope);
    }
  }
}

std::vector<NamedTensor> CondNet::export_tensors(
    const std::string& prefix) const {
  std::vector<NamedTensor> out;
  out.reserve(blocks_.size());
  for (const auto& b : blocks_) {
    NamedTensor t;
    t.name = prefix + b.name;
    t.shape = b.shape;
    t.values.assign(params_.begin() + static_cast<std::ptrdiff_t>(b.offset),
                    params_.begin() + static_cast<std::ptrdiff_t>(b.offset + b.size));
    out.push_back(std::move(t));
  }
  return out;
}

void CondNet::import_tensors(const std::string& prefix,
                             const std::vector<NamedTensor>& tensors) {
  for (const auto& b : blocks_) {
    const std::string want = prefix + b.name;
    const NamedTensor* found = nullptr;
    for (const auto& t : tensors)
      if (t.name == want) {
        found = &t;
        break;
      }
    if (!found)
      throw std::runtime_error("CondNet::import_tensors: missing " + want);
    if (found->shape != b.shape || found->values.size() != b.size)
      throw std::runtime_error("CondNet::import_tensors: shape mismatch for " +
                               want);
    std::copy(found->values.begin(), found->values.end(),
              params_.begin() + static_cast<std::ptrdiff_t>(b.offset));
  }
}

// ---------------------------------------------------------------------------
// Role wrappers
// ---------------------------------------------------------------------------

namespace {

CondNet::Config generator_net_config(const GeneratorConfig& cfg) {
  CondNet::Config c;
  c.main_dim = cfg.z_dim;
  c.n_codes = cfg.n_codes;
  c.code_dim = cfg.code_dim;
  c.n_labels = cfg.n_labels;
  c.label_dim = cfg.label_dim;
  c.hidden = cfg.hidden;
  c.out_dim = cfg.x_dim;
  c.output = Activation::tanh_squash;
  c.lrelu_slope = cfg.lrelu_slope;
  return c;
}

CondNet::Config discriminator_net_config(const DiscriminatorConfig& cfg) {
  CondNet::Config c;
  c.main_dim = cfg.x_dim;
  c.n_codes = cfg.n_codes;
  c.code_dim = cfg.code_dim;
  c.n_labels = cfg.n_labels;
  c.label_dim = cfg.label_dim;
  c.hidden = cfg.hidden;
  c.out_dim = 1;
  c.output = Activation::sigmoid;
  c.lrelu_slope = cfg.lrelu_slope;
  return c;
}

CondNet::Config classifier_net_config(const ClassifierConfig& cfg) {
  CondNet::Config c;
  c.main_dim = cfg.x_dim;
  c.hidden = cfg.hidden;
  c.out_dim = cfg.n_classes;
  c.output = Activation::softmax;
  c.lrelu_slope = cfg.lrelu_slope;
  return c;
}

}  // namespace

Generator::Generator(GeneratorConfig cfg, std::uint64_t seed)
    : cfg_(std::move(cfg)), net_(generator_net_config(cfg_), seed) {}

std::vector<double> Generator::forward(std::span<const double> z, int code,
                                       int label) const {
  return net_.forward(z, code, label);
}

Discriminator::Discriminator(DiscriminatorConfig cfg, std::uint64_t seed)
    : cfg_(std::move(cfg)), net_(discriminator_net_config(cfg_), seed) {}

double Discriminator::forward(std::span<const double> x, int code,
                              int label) const {
  return net_.forward(x, code, label)[0];
}

Classifier::Classifier(ClassifierConfig cfg, std::uint64_t seed)
    : cfg_(std::move(cfg)), net_(classifier_net_config(cfg_), seed) {}

std::vector<double> Classifier::forward(std::span<const double> x) const {
  return net_.forward(x);
}

ProbVector Classifier::posterior(std::span<const double> x) const {
  return ProbVector(forward(x));
}

std::vector<double> Classifier::embed(std::span<const double> x) const {
  CondNet::Cache cache;
  net_.forward(x, 0, -1, cache);
  if (cache.post.size() < 2)
    return cache.input;  // no hidden layers: the input is the embedding
  return cache.post[cache.post.size() - 2];
}

// ---------------------------------------------------------------------------
// Tabular generator
// ---------------------------------------------------------------------------

ProbVector tabular_generator_distribution(const TabularGeneratorParams& params,
                                          int code) {
  if (code < 1 || static_cast<std::size_t>(code) > params.table.size())
    throw std::invalid_argument("tabular_generator_distribution: code out of range");
  return params.table[static_cast<std::size_t>(code - 1)];
}

TabularGenerator::TabularGenerator(std::size_t n_codes, std::size_t alphabet,
                                   std::uint64_t seed)
    : n_codes_(n_codes), alphabet_(alphabet), logits_(n_codes * alphabet) {
  if (n_codes_ == 0 || alphabet_ == 0)
    throw std::invalid_argument("TabularGenerator: empty table");
  Rng rng(seed);
  for (double& v : logits_) v = rng.uniform(-0.1, 0.1);
}

TabularGenerator TabularGenerator::from_distributions(
    const std::vector<ProbVector>& rows) {
  if (rows.empty())
    throw std::invalid_argument("TabularGenerator: no rows");
  TabularGenerator g(rows.size(), rows.front().size(), 0);
  for (std::size_t c = 0; c < rows.size(); ++c) {
    if (rows[c].size() != g.alphabet_)
      throw std::invalid_argument("TabularGenerator: ragged rows");
    for (std::size_t x = 0; x < g.alphabet_; ++x)
      g.logits_[c * g.alphabet_ + x] = std::log(rows[c][x]);
  }
  return g;
}

ProbVector TabularGenerator::distribution(int code) const {
  if (code < 1 || static_cast<std::size_t>(code) > n_codes_)
    throw std::invalid_argument("TabularGenerator: code out of range");
  std::vector<double> row(
      logits_.begin() + static_cast<std::ptrdiff_t>((code - 1) * alphabet_),
      logits_.begin() + static_cast<std::ptrdiff_t>(code * alphabet_));
  softmax_inplace(row);
  return ProbVector(std::move(row));
}

std::vector<ProbVector> TabularGenerator::distributions() const {
  std::vector<ProbVector> rows;
  rows.reserve(n_codes_);
  for (std::size_t c = 1; c <= n_codes_; ++c)
    rows.push_back(distribution(static_cast<int>(c)));
  return rows;
}

TabularGeneratorParams TabularGenerator::params() const {
  return TabularGeneratorParams{distributions()};
}

}  // namespace pigan
