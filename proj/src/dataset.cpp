#include "pigan/dataset.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace pigan {

std::size_t PartitionedDataset::subset_size(std::size_t code) const {
  std::size_t n = 0;
  for (const auto& s : samples)
    if (static_cast<std::size_t>(s.code) == code) ++n;
  return n;
}

std::pair<Dataset, Dataset> split_train_holdout(const Dataset& samples,
                                                const SplitSpec& spec) {
  if (samples.size() < 2)
    throw std::invalid_argument("split_train_holdout: need at least 2 samples");
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
    throw std::invalid_argument("split_train_holdout: fraction outside (0,1)");

  const std::size_t n = samples.size();
  std::size_t n_train = static_cast<std::size_t>(
      std::llround(spec.train_fraction * static_cast<double>(n)));
  if (n_train == 0) n_train = 1;
  if (n_train >= n) n_train = n - 1;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(spec.seed);
  rng.shuffle(order);

  Dataset train, holdout;
  train.reserve(n_train);
  holdout.reserve(n - n_train);
  for (std::size_t i = 0; i < n; ++i) {
    if (i < n_train)
      train.push_back(samples[order[i]]);
    else
      holdout.push_back(samples[order[i]]);
  }
  return {std::move(train), std::move(holdout)};
}

PartitionedDataset partition_uniform(Dataset train, std::size_t n_subsets,
                                     std::uint64_t seed) {
  if (n_subsets < 2)
    throw std::invalid_argument("partition_uniform: need N >= 2");
  if (train.size() < n_subsets)
    throw std::invalid_argument("partition_uniform: fewer samples than subsets");

  const std::size_t n = train.size();
  // Near-equal code multiset 1,2,...,N,1,2,... then shuffled over samples.
  std::vector<int> codes(n);
  for (std::size_t i = 0; i < n; ++i)
    codes[i] = static_cast<int>(i % n_subsets) + 1;
  Rng rng(seed);
  rng.shuffle(codes);
  for (std::size_t i = 0; i < n; ++i) train[i].code = codes[i];

  std::vector<double> weights(n_subsets, 0.0);
  for (const auto& s : train) weights[static_cast<std::size_t>(s.code) - 1] += 1.0;
  for (double& w : weights) w /= static_cast<double>(n);

  return PartitionedDataset{std::move(train), n_subsets,
                            MixtureWeights(std::move(weights))};
}

Dataset make_gaussian_mixture(const std::vector<std::vector<double>>& mode_means,
                              double mode_std, std::size_t n_samples,
                              std::uint64_t seed) {
  if (mode_means.empty())
    throw std::invalid_argument("make_gaussian_mixture: no modes");
  if (!(mode_std >= 0.0))
    throw std::invalid_argument("make_gaussian_mixture: negative std");
  const std::size_t dim = mode_means.front().size();
  for (const auto& m : mode_means)
    if (m.size() != dim)
      throw std::invalid_argument("make_gaussian_mixture: ragged mode means");

  Rng rng(seed);
  Dataset out;
  out.reserve(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const std::size_t mode = rng.uniform_index(mode_means.size());
    LabeledSample s;
    s.label = static_cast<int>(mode);
    s.x.resize(dim);
    for (std::size_t j = 0; j < dim; ++j)
      s.x[j] = mode_means[mode][j] + mode_std * rng.normal();
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::vector<double>> circle_modes(std::size_t n_modes,
                                              double radius) {
  if (n_modes == 0) throw std::invalid_argument("circle_modes: n_modes == 0");
  std::vector<std::vector<double>> modes(n_modes);
  for (std::size_t i = 0; i < n_modes; ++i) {
    const double a = 2.0 * M_PI * static_cast<double>(i) /
                     static_cast<double>(n_modes);
    modes[i] = {radius * std::cos(a), radius * std::sin(a)};
  }
  return modes;
}

// ---------------------------------------------------------------------------
// Tensor file adapter
// ---------------------------------------------------------------------------

namespace {

constexpr char kTensorMagic[4] = {'P', 'G', 'T', '1'};

void write_u32(std::ostream& os, std::uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t read_u32(std::istream& is) {
  std::uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!is) throw std::runtime_error("tensor file: truncated header");
  return v;
}

}  // namespace

Dataset load_tensor_dataset(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("tensor file: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kTensorMagic, 4) != 0)
    throw std::runtime_error("tensor file: bad magic in " + path);
  const std::uint32_t version = read_u32(is);
  if (version != 1)
    throw std::runtime_error("tensor file: unsupported version");
  const std::uint32_t n = read_u32(is);
  const std::uint32_t dim = read_u32(is);
  const std::uint32_t has_labels = read_u32(is);

  Dataset out(n);
  std::vector<float> row(dim);
  for (std::uint32_t i = 0; i < n; ++i) {
    is.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(sizeof(float) * dim));
    if (!is) throw std::runtime_error("tensor file: truncated features");
    out[i].x.assign(row.begin(), row.end());
  }
  if (has_labels) {
    std::vector<std::int32_t> labels(n);
    is.read(reinterpret_cast<char*>(labels.data()),
            static_cast<std::streamsize>(sizeof(std::int32_t) * n));
    if (!is) throw std::runtime_error("tensor file: truncated labels");
    for (std::uint32_t i = 0; i < n; ++i) out[i].label = labels[i];
  }
  return out;
}

void save_tensor_dataset(const std::string& path, const Dataset& samples,
                         bool with_labels) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("tensor file: cannot write " + path);
  const std::uint32_t n = static_cast<std::uint32_t>(samples.size());
  const std::uint32_t dim =
      samples.empty() ? 0 : static_cast<std::uint32_t>(samples.front().x.size());
  os.write(kTensorMagic, 4);
  write_u32(os, 1);
  write_u32(os, n);
  write_u32(os, dim);
  write_u32(os, with_labels ? 1 : 0);
  std::vector<float> row(dim);
  for (const auto& s : samples) {
    if (s.x.size() != dim)
      throw std::invalid_argument("tensor file: ragged samples");
    for (std::size_t j = 0; j < dim; ++j) row[j] = static_cast<float>(s.x[j]);
    os.write(reinterpret_cast<const char*>(row.data()),
             static_cast<std::streamsize>(sizeof(float) * dim));
  }
  if (with_labels) {
    for (const auto& s : samples) {
      const std::int32_t label = s.label;
      os.write(reinterpret_cast<const char*>(&label), sizeof label);
    }
  }
  if (!os) throw std::runtime_error("tensor file: write failed");
}

}  // namespace pigan
