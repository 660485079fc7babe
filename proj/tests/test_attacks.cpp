#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pigan/attacks.hpp"
#include "pigan/divergence.hpp"
#include "pigan/rng.hpp"

using namespace pigan;

namespace {

// Worked 1-D case: generated {0, 1}, suspects {0.1, 0.9} members and
// {2.0, 3.0} non-members. Nearest-generated distances are
// {0.1, 0.1, 1.0, 2.0}, so epsilon = (0.1 + 1.0) / 2 = 0.55 and the two
// member scores are 0.5 while both non-member scores are 0.
const std::vector<std::vector<double>> kGen1d = {{0.0}, {1.0}};
const std::vector<std::vector<double>> kMembers1d = {{0.1}, {0.9}};
const std::vector<std::vector<double>> kNonMembers1d = {{2.0}, {3.0}};

Discriminator make_discriminator(std::uint64_t seed, std::size_t n_codes) {
  DiscriminatorConfig cfg;
  cfg.x_dim = 2;
  cfg.n_codes = n_codes;
  cfg.code_dim = 2;
  cfg.hidden = {6};
  return Discriminator(cfg, seed);
}

}  // namespace

TEST_CASE("wb_score: max over codes, N = 1 reduction") {
  auto d1 = make_discriminator(3, 1);
  const std::vector<double> x = {0.2, -0.4};
  CHECK(wb_score(d1, x, -1, 1) == d1.forward(x, 1));

  auto d3 = make_discriminator(4, 3);
  double best = 0.0;
  for (int c = 1; c <= 3; ++c) best = std::max(best, d3.forward(x, c));
  CHECK(wb_score(d3, x, -1, 3) == best);
}

TEST_CASE("wb_attack: perfect separation and hand-ranked ties") {
  AdversaryDataset adv;
  adv.train_size_m = 2;
  adv.suspects = {
      Suspect{{0.0}, -1, true},  Suspect{{1.0}, -1, true},
      Suspect{{2.0}, -1, false}, Suspect{{3.0}, -1, false}};

  // members scored strictly above non-members
  auto separating = [](const Suspect& s) { return s.is_member ? 1.0 : 0.0; };
  CHECK(wb_attack(separating, adv, 1).accuracy == doctest::Approx(1.0));

  // member scores {0.9, 0.6}, non-member {0.8, 0.7}: top-2 = {0.9, 0.8}
  auto mixed = [](const Suspect& s) {
    if (s.x[0] == 0.0) return 0.9;
    if (s.x[0] == 1.0) return 0.6;
    if (s.x[0] == 2.0) return 0.8;
    return 0.7;
  };
  CHECK(wb_attack(mixed, adv, 1).accuracy == doctest::Approx(0.5));

  adv.train_size_m = 5;
  CHECK_THROWS_AS(wb_attack(mixed, adv, 1), std::invalid_argument);
}

TEST_CASE("wb_attack: invariant under strictly increasing score transforms") {
  Rng rng(8);
  AdversaryDataset adv;
  adv.train_size_m = 10;
  for (int i = 0; i < 100; ++i)
    adv.suspects.push_back(
        Suspect{{rng.uniform(), rng.uniform()}, -1, i < 10});

  auto raw = [](const Suspect& s) { return s.x[0] - 0.5 * s.x[1]; };
  auto warped = [&](const Suspect& s) {
    return std::atan(3.0 * raw(s)) + 10.0;
  };
  CHECK(wb_attack(raw, adv, 7).accuracy ==
        wb_attack(warped, adv, 7).accuracy);
}

TEST_CASE("wb_attack: membership-independent scores hit the member fraction") {
  Rng rng(9);
  double total = 0.0;
  const int trials = 300;
  for (int t = 0; t < trials; ++t) {
    AdversaryDataset adv;
    adv.train_size_m = 20;
    for (int i = 0; i < 200; ++i)
      adv.suspects.push_back(Suspect{{rng.uniform()}, -1, i < 20});
    auto noise = [&rng](const Suspect&) { return rng.uniform(); };
    total += wb_attack(noise, adv, 1000 + t).accuracy;
  }
  CHECK(std::abs(total / trials - 0.10) < 0.03);
}

TEST_CASE("tvd_attack: max over per-code samples") {
  const ScoreSample same({0.2, 0.4, 0.6});
  CHECK(tvd_attack({same, same}, {same, same}, 10) == doctest::Approx(0.0));

  // per-code TVDs {0.2, 0.5} over two 2-bin histograms -> max 0.5
  const ScoreSample a1({0.25, 0.25, 0.25, 0.25, 0.75});  // (0.8, 0.2)
  const ScoreSample b1({0.25, 0.25, 0.25, 0.75, 0.75});  // (0.6, 0.4)
  const ScoreSample a2({0.25, 0.75});                    // (0.5, 0.5)
  const ScoreSample b2({0.75, 0.75});                    // (0.0, 1.0)
  CHECK(tvd_empirical(a1, b1, 2) == doctest::Approx(0.2));
  CHECK(tvd_empirical(a2, b2, 2) == doctest::Approx(0.5));
  CHECK(tvd_attack({a1, a2}, {b1, b2}, 2) == doctest::Approx(0.5));

  const ScoreSample lo({0.05}), hi({0.95});
  CHECK(tvd_attack({lo}, {hi}, 10) == doctest::Approx(1.0));
}

TEST_CASE("mc_epsilon: worked example, zero case and homogeneity") {
  CHECK(mc_epsilon({{0.0}, {1.0}}, kGen1d) == doctest::Approx(0.0));

  const std::vector<std::vector<double>> suspects = {
      {0.1}, {0.9}, {2.0}, {3.0}};
  CHECK(mc_epsilon(suspects, kGen1d) == doctest::Approx(0.55));

  // scaling every coordinate by t scales epsilon by t
  const double t = 3.7;
  std::vector<std::vector<double>> s_scaled, g_scaled;
  for (const auto& s : suspects) s_scaled.push_back({s[0] * t});
  for (const auto& g : kGen1d) g_scaled.push_back({g[0] * t});
  CHECK(mc_epsilon(s_scaled, g_scaled) == doctest::Approx(0.55 * t));

  CHECK_THROWS_AS(mc_epsilon({}, kGen1d), std::invalid_argument);
}

TEST_CASE("mc_score: worked example and edge cases") {
  CHECK(mc_score(std::vector<double>{0.1}, kGen1d, 0.55) ==
        doctest::Approx(0.5));
  CHECK(mc_score(std::vector<double>{0.5}, kGen1d, 0.0) == doctest::Approx(0.0));
  CHECK(mc_score(std::vector<double>{0.5}, kGen1d, 10.0) ==
        doctest::Approx(1.0));
}

TEST_CASE("mc attacks on the worked example") {
  McPools pools{kMembers1d, kNonMembers1d};
  McOptions opt;
  opt.M = 2;
  opt.repeats = 1;

  const auto single = mc_single_attack(pools, kGen1d, opt, 5);
  CHECK(single.accuracy == doctest::Approx(1.0));

  const auto set = mc_set_attack(pools, kGen1d, opt, 5);
  CHECK(set.accuracy == doctest::Approx(1.0));

  // member scores all high, non-member all low stays perfect over repeats
  opt.repeats = 7;
  CHECK(mc_set_attack(pools, kGen1d, opt, 6).accuracy == doctest::Approx(1.0));
}

TEST_CASE("mc attacks at chance level when scores carry no signal") {
  // Members and non-members drawn from the same distribution. Pools are
  // redrawn per trial: a fixed finite pool pair carries its sampling luck
  // into every repeat, so chance level only emerges across fresh pools.
  Rng rng(12);
  std::vector<std::vector<double>> generated;
  for (int i = 0; i < 200; ++i)
    generated.push_back({rng.normal() * 1.1, rng.normal() * 1.1});

  McOptions opt;
  opt.M = 20;
  opt.repeats = 1;
  double set_total = 0.0, single_total = 0.0;
  const int trials = 120;
  for (int t = 0; t < trials; ++t) {
    McPools pools;
    for (int i = 0; i < 20; ++i) {
      pools.member_pool.push_back({rng.normal(), rng.normal()});
      pools.nonmember_pool.push_back({rng.normal(), rng.normal()});
    }
    set_total += mc_set_attack(pools, generated, opt, 1000 + t).accuracy;
    single_total += mc_single_attack(pools, generated, opt, 2000 + t).accuracy;
  }
  // set outcomes are fair coins: mean of 120 within ~4.4 sigma
  CHECK(set_total / trials > 0.30);
  CHECK(set_total / trials < 0.70);
  CHECK(single_total / trials > 0.40);
  CHECK(single_total / trials < 0.60);

  // identical suspects: random tie-breaking keeps expectation at 1/2
  McPools tied;
  for (int i = 0; i < 10; ++i) {
    tied.member_pool.push_back({0.0});
    tied.nonmember_pool.push_back({0.0});
  }
  McOptions topt;
  topt.M = 10;
  topt.repeats = 400;
  const auto tied_single = mc_single_attack(tied, kGen1d, topt, 79);
  CHECK(tied_single.accuracy > 0.40);
  CHECK(tied_single.accuracy < 0.60);
}

TEST_CASE("mc attacks are isometry invariant for the euclidean distance") {
  Rng rng(13);
  McPools pools;
  for (int i = 0; i < 12; ++i) {
    pools.member_pool.push_back({rng.uniform(), rng.uniform()});
    pools.nonmember_pool.push_back({rng.uniform() + 0.4, rng.uniform()});
  }
  std::vector<std::vector<double>> generated;
  for (int i = 0; i < 60; ++i)
    generated.push_back({rng.uniform(), rng.uniform()});

  // rotation by 0.7 rad plus a translation
  const double c = std::cos(0.7), s = std::sin(0.7);
  auto iso = [&](const std::vector<double>& p) {
    return std::vector<double>{c * p[0] - s * p[1] + 2.0,
                               s * p[0] + c * p[1] - 1.0};
  };
  McPools pools_t;
  for (const auto& p : pools.member_pool) pools_t.member_pool.push_back(iso(p));
  for (const auto& p : pools.nonmember_pool)
    pools_t.nonmember_pool.push_back(iso(p));
  std::vector<std::vector<double>> generated_t;
  for (const auto& p : generated) generated_t.push_back(iso(p));

  McOptions opt;
  opt.M = 12;
  opt.repeats = 5;
  CHECK(mc_single_attack(pools, generated, opt, 99).accuracy ==
        doctest::Approx(
            mc_single_attack(pools_t, generated_t, opt, 99).accuracy));

  // epsilon itself is isometry invariant
  std::vector<std::vector<double>> suspects = pools.member_pool;
  std::vector<std::vector<double>> suspects_t = pools_t.member_pool;
  CHECK(mc_epsilon(suspects, generated) ==
        doctest::Approx(mc_epsilon(suspects_t, generated_t)).epsilon(1e-12));
}

TEST_CASE("mc attack input validation") {
  McPools pools{kMembers1d, kNonMembers1d};
  McOptions opt;
  opt.M = 5;  // pools only hold 2 per side
  CHECK_THROWS_AS(mc_single_attack(pools, kGen1d, opt, 0),
                  std::invalid_argument);
  opt.M = 2;
  CHECK_THROWS_AS(mc_single_attack(pools, {}, opt, 0), std::invalid_argument);
}

TEST_CASE("pca projection feeds the distance when supplied") {
  // points vary along y only; a 1-component PCA keeps that axis
  Rng rng(14);
  std::vector<std::vector<double>> cloud;
  for (int i = 0; i < 50; ++i) cloud.push_back({0.0, rng.uniform(-1.0, 1.0)});
  const PcaModel pca = pca_fit(cloud, 1);

  McPools pools;
  for (int i = 0; i < 4; ++i) {
    pools.member_pool.push_back({100.0, 0.01 * i});  // x offset is discarded
    pools.nonmember_pool.push_back({-100.0, 2.0 + 0.01 * i});
  }
  std::vector<std::vector<double>> generated;
  for (int i = 0; i < 20; ++i) generated.push_back({0.0, 0.005 * i});

  McOptions opt;
  opt.M = 4;
  opt.repeats = 3;
  opt.pca = &pca;
  // members sit on top of the generated cloud along y
  CHECK(mc_single_attack(pools, generated, opt, 21).accuracy ==
        doctest::Approx(1.0));
}
