#pragma once

// Dataset construction and bookkeeping: train/holdout splitting, the N-way
// membership partition, toy mixture generators and the raw tensor-file
// adapter. Membership codes follow the c in {1..N} convention with 0
// meaning "unassigned"; class labels are 0-based.

#include <cstdint>
#include <string>
#include <vector>

#include "pigan/prob.hpp"
#include "pigan/rng.hpp"

namespace pigan {

struct LabeledSample {
  std::vector<double> x;
  int label = 0;  // class y, 0-based
  int code = 0;   // membership code c in {1..N}; 0 = unassigned
};

using Dataset = std::vector<LabeledSample>;

struct SplitSpec {
  double train_fraction = 0.1;
  std::uint64_t seed = 0;
};

struct PartitionedDataset {
  Dataset samples;        // every sample has code in {1..n_subsets}
  std::size_t n_subsets;  // N
  MixtureWeights weights; // empirical code frequencies

  std::size_t subset_size(std::size_t code) const;  // code in {1..N}
};

// Deterministic split into round(f*n) train and the remaining holdout
// samples. Throws on fewer than 2 samples or a fraction that would leave
// either side empty.
std::pair<Dataset, Dataset> split_train_holdout(const Dataset& samples,
                                                const SplitSpec& spec);

// Assigns codes 1..N uniformly at random with subset sizes differing by at
// most one, and records the empirical weights.
PartitionedDataset partition_uniform(Dataset train, std::size_t n_subsets,
                                     std::uint64_t seed);

// Equal-weight isotropic Gaussian mixture; label = mode index.
Dataset make_gaussian_mixture(const std::vector<std::vector<double>>& mode_means,
                              double mode_std, std::size_t n_samples,
                              std::uint64_t seed);

// n_modes mode centers evenly spaced on a circle of the given radius.
std::vector<std::vector<double>> circle_modes(std::size_t n_modes,
                                              double radius);

// Raw little-endian tensor file: "PGT1" magic, u32 version, u32 n_samples,
// u32 feature_dim, u32 has_labels, then float32 features (row-major) and,
// when present, int32 labels.
Dataset load_tensor_dataset(const std::string& path);
void save_tensor_dataset(const std::string& path, const Dataset& samples,
                         bool with_labels = true);

}  // namespace pigan
