#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "pigan/dataset.hpp"
#include "pigan/pca.hpp"
#include "pigan/rng.hpp"

using namespace pigan;

namespace {

Dataset numbered_samples(std::size_t n) {
  Dataset d(n);
  for (std::size_t i = 0; i < n; ++i) {
    d[i].x = {static_cast<double>(i), 0.0};
    d[i].label = static_cast<int>(i % 3);
  }
  return d;
}

std::multiset<double> ids(const Dataset& d) {
  std::multiset<double> s;
  for (const auto& sample : d) s.insert(sample.x[0]);
  return s;
}

}  // namespace

TEST_CASE("rng streams are deterministic and tag-separated") {
  Rng a(123), b(123);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng c(123);
  CHECK(c.child("noise").next_u64() != c.child("batch").next_u64());
  // normal() has zero-ish mean on a large sample
  Rng n(7);
  double mean = 0.0;
  for (int i = 0; i < 20000; ++i) mean += n.normal();
  mean /= 20000.0;
  CHECK(std::abs(mean) < 0.05);
}

TEST_CASE("split_train_holdout sizes and determinism") {
  const Dataset data = numbered_samples(100);
  SplitSpec spec{0.1, 42};
  auto [train, holdout] = split_train_holdout(data, spec);
  CHECK(train.size() == 10);
  CHECK(holdout.size() == 90);

  auto [train2, holdout2] = split_train_holdout(data, spec);
  CHECK(ids(train) == ids(train2));
  CHECK(ids(holdout) == ids(holdout2));

  // disjoint and covering
  std::multiset<double> all = ids(train);
  for (double v : ids(holdout)) all.insert(v);
  CHECK(all == ids(data));

  // different seeds: same sizes, usually different members
  SplitSpec other{0.5, 43};
  auto [t3, h3] = split_train_holdout(numbered_samples(10), other);
  CHECK(t3.size() == 5);
  CHECK(h3.size() == 5);

  CHECK_THROWS_AS(split_train_holdout(Dataset{}, spec), std::invalid_argument);
  CHECK_THROWS_AS(split_train_holdout(data, SplitSpec{1.5, 0}),
                  std::invalid_argument);
}

TEST_CASE("partition_uniform: near-equal subsets and weight bookkeeping") {
  auto part = partition_uniform(numbered_samples(10), 3, 7);
  std::vector<std::size_t> sizes = {part.subset_size(1), part.subset_size(2),
                                    part.subset_size(3)};
  std::sort(sizes.begin(), sizes.end());
  CHECK(sizes == std::vector<std::size_t>{3, 3, 4});

  auto even = partition_uniform(numbered_samples(128), 2, 7);
  CHECK(even.subset_size(1) == 64);
  CHECK(even.subset_size(2) == 64);
  CHECK(even.weights[0] == doctest::Approx(0.5));

  // partition law: every sample gets exactly one code in range
  for (const auto& s : part.samples) {
    CHECK(s.code >= 1);
    CHECK(s.code <= 3);
  }
  CHECK(part.samples.size() == 10);

  CHECK_THROWS_AS(partition_uniform(numbered_samples(10), 1, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(partition_uniform(numbered_samples(2), 3, 0),
                  std::invalid_argument);
}

TEST_CASE("make_gaussian_mixture determinism and concentration") {
  // degenerate: single mode, zero std
  auto degenerate = make_gaussian_mixture({{1.0, 2.0}}, 0.0, 50, 3);
  for (const auto& s : degenerate) {
    CHECK(s.x[0] == doctest::Approx(1.0));
    CHECK(s.x[1] == doctest::Approx(2.0));
    CHECK(s.label == 0);
  }

  const auto modes = circle_modes(8, 1.0);
  auto a = make_gaussian_mixture(modes, 0.1, 1000, 11);
  auto b = make_gaussian_mixture(modes, 0.1, 1000, 11);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].x == b[i].x);
    CHECK(a[i].label == b[i].label);
  }

  // per-mode counts within 4 sigma of n/8 under the multinomial
  // (sigma = sqrt(1000 * 1/8 * 7/8) ~ 10.46, so 125 +/- 41.9)
  std::vector<int> counts(8, 0);
  for (const auto& s : a) counts[static_cast<std::size_t>(s.label)]++;
  for (int c : counts) {
    CHECK(c > 125 - 42);
    CHECK(c < 125 + 42);
  }

  CHECK_THROWS_AS(make_gaussian_mixture({}, 1.0, 10, 0), std::invalid_argument);
  CHECK_THROWS_AS(make_gaussian_mixture({{0.0}}, -1.0, 10, 0),
                  std::invalid_argument);
}

TEST_CASE("pca: exact subspace recovery and isometry with full basis") {
  // points on the line y = 2x in 2-D
  std::vector<std::vector<double>> line;
  Rng rng(9);
  for (int i = 0; i < 40; ++i) {
    const double t = rng.uniform(-2.0, 2.0);
    line.push_back({t, 2.0 * t});
  }
  const auto model = pca_fit(line, 1);
  CHECK(model.k() == 1);
  // projections preserve pairwise distances for data in the subspace
  for (int i = 0; i < 10; ++i) {
    const auto pi = pca_project(model, line[i]);
    const auto pj = pca_project(model, line[i + 10]);
    const double dproj = std::abs(pi[0] - pj[0]);
    const double dorig = std::hypot(line[i][0] - line[i + 10][0],
                                    line[i][1] - line[i + 10][1]);
    CHECK(dproj == doctest::Approx(dorig).epsilon(1e-8));
  }

  // full basis: centered isometry on generic data
  std::vector<std::vector<double>> cloud;
  for (int i = 0; i < 60; ++i)
    cloud.push_back({rng.normal(), rng.normal(), rng.normal()});
  const auto full = pca_fit(cloud, 3);
  for (int i = 0; i < 20; ++i) {
    const auto pi = pca_project(full, cloud[i]);
    const auto pj = pca_project(full, cloud[i + 20]);
    double dproj = 0.0, dorig = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
      dproj += (pi[k] - pj[k]) * (pi[k] - pj[k]);
      dorig += (cloud[i][k] - cloud[i + 20][k]) * (cloud[i][k] - cloud[i + 20][k]);
    }
    CHECK(std::sqrt(dproj) == doctest::Approx(std::sqrt(dorig)).epsilon(1e-8));
  }

  // orthonormal components, non-increasing explained variance
  for (Eigen::Index r = 0; r < full.components.rows(); ++r) {
    for (Eigen::Index s = 0; s < full.components.rows(); ++s) {
      const double dot = full.components.row(r).dot(full.components.row(s));
      CHECK(std::abs(dot - (r == s ? 1.0 : 0.0)) < 1e-8);
    }
  }
  for (Eigen::Index i = 0; i + 1 < full.explained.size(); ++i)
    CHECK(full.explained[i] >= full.explained[i + 1] - 1e-12);

  CHECK_THROWS_AS(pca_fit(line, 3), std::invalid_argument);
  CHECK_THROWS_AS(pca_fit({{1.0, 2.0}}, 1), std::invalid_argument);
}

TEST_CASE("projected variance never exceeds input variance") {
  Rng rng(21);
  std::vector<std::vector<double>> cloud;
  for (int i = 0; i < 80; ++i)
    cloud.push_back({rng.normal() * 2.0, rng.normal(), rng.normal() * 0.3,
                     rng.normal() * 0.1});
  const auto model = pca_fit(cloud, 2);

  auto total_variance = [](const std::vector<std::vector<double>>& pts) {
    const std::size_t d = pts.front().size();
    std::vector<double> mean(d, 0.0);
    for (const auto& p : pts)
      for (std::size_t k = 0; k < d; ++k) mean[k] += p[k] / pts.size();
    double var = 0.0;
    for (const auto& p : pts)
      for (std::size_t k = 0; k < d; ++k)
        var += (p[k] - mean[k]) * (p[k] - mean[k]);
    return var / (pts.size() - 1);
  };

  std::vector<std::vector<double>> projected;
  for (const auto& p : cloud) projected.push_back(pca_project(model, p));
  CHECK(total_variance(projected) <= total_variance(cloud) + 1e-9);
}

TEST_CASE("tensor file round trip") {
  Dataset d = numbered_samples(13);
  const std::string path = "test_tensor_roundtrip.bin";
  save_tensor_dataset(path, d, true);
  const Dataset loaded = load_tensor_dataset(path);
  REQUIRE(loaded.size() == d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(loaded[i].label == d[i].label);
    REQUIRE(loaded[i].x.size() == d[i].x.size());
    for (std::size_t k = 0; k < d[i].x.size(); ++k)
      CHECK(loaded[i].x[k] ==
            doctest::Approx(d[i].x[k]).epsilon(1e-6));  // float32 storage
  }
  std::remove(path.c_str());
  CHECK_THROWS(load_tensor_dataset("does_not_exist.bin"));
}
