#include "pigan/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "pigan/divergence.hpp"
#include "pigan/rng.hpp"
#include "pigan/simd.hpp"

namespace pigan {

double euclidean_distance(std::span<const double> a,
                          std::span<const double> b) {
  if (a.size() != b.size())
    throw std::invalid_argument("euclidean_distance: dimension mismatch");
  return std::sqrt(simd::active().squared_distance(a.data(), b.data(), a.size()));
}

double wb_score(const Discriminator& d, std::span<const double> x, int label,
                std::size_t n_codes) {
  if (n_codes < 1) throw std::invalid_argument("wb_score: n_codes < 1");
  double best = 0.0;
  for (std::size_t c = 1; c <= n_codes; ++c)
    best = std::max(best, d.forward(x, static_cast<int>(c), label));
  return best;
}

namespace {

// Seeded permutation followed by a stable sort on descending score; returns
// suspect indices in rank order.
std::vector<std::size_t> rank_descending(const std::vector<double>& scores,
                                         std::uint64_t seed) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  rng.shuffle(idx);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  return idx;
}

}  // namespace

AttackResult wb_attack(const SuspectScoreFn& score,
                       const AdversaryDataset& adversary, std::uint64_t seed) {
  const std::size_t m = adversary.train_size_m;
  if (m == 0 || m > adversary.suspects.size())
    throw std::invalid_argument("wb_attack: train size m out of range");

  std::vector<double> scores(adversary.suspects.size());
  for (std::size_t i = 0; i < adversary.suspects.size(); ++i)
    scores[i] = score(adversary.suspects[i]);

  const auto ranked = rank_descending(scores, seed);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < m; ++i)
    if (adversary.suspects[ranked[i]].is_member) ++hits;

  AttackResult r;
  r.attack_name = "wb";
  r.accuracy = static_cast<double>(hits) / static_cast<double>(m);
  r.repeats = 1;
  r.per_repeat = {r.accuracy};
  return r;
}

double tvd_attack(const std::vector<ScoreSample>& train_scores_per_code,
                  const std::vector<ScoreSample>& holdout_scores_per_code,
                  std::size_t n_bins) {
  if (train_scores_per_code.empty() ||
      train_scores_per_code.size() != holdout_scores_per_code.size())
    throw std::invalid_argument("tvd_attack: per-code sample count mismatch");
  double best = 0.0;
  for (std::size_t c = 0; c < train_scores_per_code.size(); ++c)
    best = std::max(best, tvd_empirical(train_scores_per_code[c],
                                        holdout_scores_per_code[c], n_bins));
  return best;
}

double tvd_attack(const Discriminator& d, const Dataset& train,
                  const Dataset& holdout, std::size_t n_codes,
                  std::size_t n_bins) {
  if (train.empty() || holdout.empty())
    throw std::invalid_argument("tvd_attack: empty dataset");
  std::vector<ScoreSample> ts, hs;
  ts.reserve(n_codes);
  hs.reserve(n_codes);
  for (std::size_t c = 1; c <= n_codes; ++c) {
    std::vector<double> t, h;
    t.reserve(train.size());
    h.reserve(holdout.size());
    for (const auto& s : train)
      t.push_back(d.forward(s.x, static_cast<int>(c),
                            d.config().n_labels > 0 ? s.label : -1));
    for (const auto& s : holdout)
      h.push_back(d.forward(s.x, static_cast<int>(c),
                            d.config().n_labels > 0 ? s.label : -1));
    ts.emplace_back(std::move(t));
    hs.emplace_back(std::move(h));
  }
  return tvd_attack(ts, hs, n_bins);
}

double mc_epsilon(const std::vector<std::vector<double>>& suspect_points,
                  const std::vector<std::vector<double>>& generated,
                  const DistanceFn& dist) {
  if (suspect_points.empty() || generated.empty())
    throw std::invalid_argument("mc_epsilon: empty point set");
  std::vector<double> nearest(suspect_points.size());
  for (std::size_t i = 0; i < suspect_points.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& g : generated)
      best = std::min(best, dist(suspect_points[i], g));
    nearest[i] = best;
  }
  std::sort(nearest.begin(), nearest.end());
  const std::size_t n = nearest.size();
  if (n % 2 == 1) return nearest[n / 2];
  return 0.5 * (nearest[n / 2 - 1] + nearest[n / 2]);
}

double mc_score(std::span<const double> x,
                const std::vector<std::vector<double>>& generated, double eps,
                const DistanceFn& dist) {
  if (generated.empty()) throw std::invalid_argument("mc_score: empty point set");
  if (eps < 0.0) throw std::invalid_argument("mc_score: negative epsilon");
  std::size_t inside = 0;
  for (const auto& g : generated)
    if (dist(x, g) <= eps) ++inside;
  return static_cast<double>(inside) / static_cast<double>(generated.size());
}

namespace {

std::vector<std::vector<double>> project_all(
    const std::vector<std::vector<double>>& pts, const PcaModel* pca) {
  if (!pca) return pts;
  std::vector<std::vector<double>> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back(pca_project(*pca, p));
  return out;
}

// Draw k distinct indices from [0, n) via a partial Fisher-Yates pass.
std::vector<std::size_t> draw_without_replacement(Rng& rng, std::size_t n,
                                                  std::size_t k) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.uniform_index(n - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

struct McRepeat {
  std::size_t members_in_top_m = 0;  // member count among the top M
};

McRepeat run_mc_repeat(const std::vector<std::vector<double>>& members,
                       const std::vector<std::vector<double>>& nonmembers,
                       const std::vector<std::vector<double>>& generated,
                       std::size_t M, Rng& rng) {
  const auto midx = draw_without_replacement(rng, members.size(), M);
  const auto nidx = draw_without_replacement(rng, nonmembers.size(), M);

  // Suspect layout: members first, then non-members.
  std::vector<std::vector<double>> suspects;
  suspects.reserve(2 * M);
  for (std::size_t i : midx) suspects.push_back(members[i]);
  for (std::size_t i : nidx) suspects.push_back(nonmembers[i]);

  const double eps = mc_epsilon(suspects, generated);
  std::vector<double> scores(2 * M);
  for (std::size_t i = 0; i < suspects.size(); ++i)
    scores[i] = mc_score(suspects[i], generated, eps);

  const auto ranked = rank_descending(scores, rng.next_u64());
  McRepeat rep;
  for (std::size_t i = 0; i < M; ++i)
    if (ranked[i] < M) ++rep.members_in_top_m;
  return rep;
}

}  // namespace

AttackResult mc_single_attack(const McPools& pools,
                              const std::vector<std::vector<double>>& generated,
                              const McOptions& opt, std::uint64_t seed) {
  if (opt.M == 0 || opt.repeats == 0)
    throw std::invalid_argument("mc_single_attack: M and repeats must be positive");
  if (pools.member_pool.size() < opt.M || pools.nonmember_pool.size() < opt.M)
    throw std::invalid_argument(
        "mc_single_attack: pools must hold at least M points per side");
  if (generated.empty())
    throw std::invalid_argument("mc_single_attack: no generated samples");

  const auto members = project_all(pools.member_pool, opt.pca);
  const auto nonmembers = project_all(pools.nonmember_pool, opt.pca);
  const auto gen = project_all(generated, opt.pca);

  Rng rng(seed);
  AttackResult r;
  r.attack_name = "mc_single";
  r.repeats = opt.repeats;
  r.per_repeat.reserve(opt.repeats);
  for (std::size_t rep = 0; rep < opt.repeats; ++rep) {
    const auto one = run_mc_repeat(members, nonmembers, gen, opt.M, rng);
    r.per_repeat.push_back(static_cast<double>(one.members_in_top_m) /
                           static_cast<double>(opt.M));
  }
  r.accuracy = std::accumulate(r.per_repeat.begin(), r.per_repeat.end(), 0.0) /
               static_cast<double>(opt.repeats);
  return r;
}

AttackResult mc_set_attack(const McPools& pools,
                           const std::vector<std::vector<double>>& generated,
                           const McOptions& opt, std::uint64_t seed) {
  if (opt.M == 0 || opt.repeats == 0)
    throw std::invalid_argument("mc_set_attack: M and repeats must be positive");
  if (pools.member_pool.size() < opt.M || pools.nonmember_pool.size() < opt.M)
    throw std::invalid_argument(
        "mc_set_attack: pools must hold at least M points per side");
  if (generated.empty())
    throw std::invalid_argument("mc_set_attack: no generated samples");

  const auto members = project_all(pools.member_pool, opt.pca);
  const auto nonmembers = project_all(pools.nonmember_pool, opt.pca);
  const auto gen = project_all(generated, opt.pca);

  Rng rng(seed);
  AttackResult r;
  r.attack_name = "mc_set";
  r.repeats = opt.repeats;
  r.per_repeat.reserve(opt.repeats);
  for (std::size_t rep = 0; rep < opt.repeats; ++rep) {
    const auto one = run_mc_repeat(members, nonmembers, gen, opt.M, rng);
    const std::size_t hits = one.members_in_top_m;
    double outcome;
    if (2 * hits > opt.M) {
      outcome = 1.0;  // member set holds a strict majority of the top M
    } else if (2 * hits < opt.M) {
      outcome = 0.0;
    } else {
      outcome = rng.uniform() < 0.5 ? 1.0 : 0.0;  // exact tie: seeded coin
    }
    r.per_repeat.push_back(outcome);
  }
  r.accuracy = std::accumulate(r.per_repeat.begin(), r.per_repeat.end(), 0.0) /
               static_cast<double>(opt.repeats);
  return r;
}

}  // namespace pigan
