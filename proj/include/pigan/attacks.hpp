#pragma once

// Membership-inference suite: white-box discriminator ranking with
// max-over-codes scoring, the total-variation upper bound, and the
// Monte-Carlo single/set attacks with the median-epsilon heuristic.
// Ties are always broken by a seeded random permutation applied before a
// stable sort.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pigan/dataset.hpp"
#include "pigan/models.hpp"
#include "pigan/pca.hpp"
#include "pigan/prob.hpp"

namespace pigan {

struct Suspect {
  std::vector<double> x;
  int label = -1;
  bool is_member = false;
};

struct AdversaryDataset {
  std::vector<Suspect> suspects;
  std::size_t train_size_m = 0;  // known size of the training set
};

struct AttackResult {
  std::string attack_name;
  double accuracy = 0.0;  // mean of per_repeat
  std::size_t repeats = 1;
  std::vector<double> per_repeat;
};

using SuspectScoreFn = std::function<double(const Suspect&)>;
using DistanceFn =
    std::function<double(std::span<const double>, std::span<const double>)>;

double euclidean_distance(std::span<const double> a, std::span<const double> b);

// max over codes 1..n_codes of D(x, c); for n_codes == 1 this is the plain
// single-discriminator score.
double wb_score(const Discriminator& d, std::span<const double> x, int label,
                std::size_t n_codes);

// Flags the train_size_m highest-scoring suspects as members; accuracy is
// the fraction of flagged suspects that really are members.
AttackResult wb_attack(const SuspectScoreFn& score,
                       const AdversaryDataset& adversary, std::uint64_t seed);

// max over codes of the empirical TVD between train and holdout score
// samples at that code.
double tvd_attack(const std::vector<ScoreSample>& train_scores_per_code,
                  const std::vector<ScoreSample>& holdout_scores_per_code,
                  std::size_t n_bins = 100);

// Convenience wrapper scoring two datasets with the discriminator.
double tvd_attack(const Discriminator& d, const Dataset& train,
                  const Dataset& holdout, std::size_t n_codes,
                  std::size_t n_bins = 100);

// epsilon = median over suspects of the distance to the nearest generated
// point (even count: midpoint of the two central order statistics).
double mc_epsilon(const std::vector<std::vector<double>>& suspect_points,
                  const std::vector<std::vector<double>>& generated,
                  const DistanceFn& dist = euclidean_distance);

// Fraction of generated points within the closed epsilon-ball around x.
double mc_score(std::span<const double> x,
                const std::vector<std::vector<double>>& generated, double eps,
                const DistanceFn& dist = euclidean_distance);

// Member / non-member pools the repeated MC attacks draw from. Each repeat
// uses a fresh draw of M suspects per side (the pools may be exactly M).
struct McPools {
  std::vector<std::vector<double>> member_pool;
  std::vector<std::vector<double>> nonmember_pool;
};

struct McOptions {
  std::size_t M = 100;
  std::size_t repeats = 20;
  const PcaModel* pca = nullptr;  // Euclidean on projections when set
};

AttackResult mc_single_attack(const McPools& pools,
                              const std::vector<std::vector<double>>& generated,
                              const McOptions& opt, std::uint64_t seed);

AttackResult mc_set_attack(const McPools& pools,
                           const std::vector<std::vector<double>>& generated,
                           const McOptions& opt, std::uint64_t seed);

}  // namespace pigan
