#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pigan/fidelity.hpp"
#include "pigan/rng.hpp"
#include "pigan/training.hpp"

using namespace pigan;

namespace {

// Flat classifier (no hidden layers) whose logits are W x + b. With large
// diagonal weights and one-hot inputs it acts as a hard class indicator,
// and its embedding is the identity on the input.
Classifier flat_classifier(std::size_t dim, std::size_t classes, double w_diag) {
  ClassifierConfig cfg;
  cfg.x_dim = dim;
  cfg.n_classes = classes;
  cfg.hidden = {};
  Classifier q(cfg, 0);
  for (const auto& b : q.net().blocks()) {
    auto params = q.net().params();
    if (b.name == "L0.W") {
      for (std::size_t i = 0; i < b.size; ++i) params[b.offset + i] = 0.0;
      for (std::size_t c = 0; c < classes && c < dim; ++c)
        params[b.offset + c * dim + c] = w_diag;
    } else if (b.name == "L0.b") {
      for (std::size_t i = 0; i < b.size; ++i) params[b.offset + i] = 0.0;
    }
  }
  return q;
}

std::vector<std::vector<double>> onehots(std::size_t dim,
                                         std::size_t upto,
                                         std::size_t copies) {
  std::vector<std::vector<double>> out;
  for (std::size_t c = 0; c < upto; ++c) {
    std::vector<double> v(dim, 0.0);
    v[c] = 1.0;
    for (std::size_t k = 0; k < copies; ++k) out.push_back(v);
  }
  return out;
}

Dataset gaussian_blob(Rng& rng, std::size_t n, double cx, double cy,
                      double std_, int label) {
  Dataset d;
  for (std::size_t i = 0; i < n; ++i) {
    LabeledSample s;
    s.x = {cx + std_ * rng.normal(), cy + std_ * rng.normal()};
    s.label = label;
    d.push_back(std::move(s));
  }
  return d;
}

}  // namespace

TEST_CASE("inception_score closed forms") {
  // one-hot conditionals, class-balanced over C = 4: score = 4
  EvaluationOracle sharp(flat_classifier(4, 4, 60.0), 4);
  CHECK(inception_score(onehots(4, 4, 5), sharp) ==
        doctest::Approx(4.0).epsilon(1e-4));

  // identical conditionals: score = 1
  EvaluationOracle flat(flat_classifier(4, 4, 0.0), 4);
  CHECK(inception_score(onehots(4, 4, 5), flat) ==
        doctest::Approx(1.0).epsilon(1e-12));

  // two perfectly separated classes at equal frequency: score = 2
  EvaluationOracle two(flat_classifier(2, 2, 60.0), 2);
  CHECK(inception_score(onehots(2, 2, 10), two) ==
        doctest::Approx(2.0).epsilon(1e-4));

  CHECK_THROWS_AS(inception_score({}, sharp), std::invalid_argument);
  // range property on mixed posteriors
  Rng rng(3);
  std::vector<std::vector<double>> mixed;
  for (int i = 0; i < 40; ++i)
    mixed.push_back({rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform()});
  const double is = inception_score(mixed, sharp);
  CHECK(is >= 1.0 - 1e-9);
  CHECK(is <= 4.0 + 1e-9);
  // split averaging stays in range too
  CHECK(inception_score(mixed, sharp, 4) >= 1.0 - 1e-9);
}

TEST_CASE("fid with identity embedding: zero, shift, symmetry") {
  EvaluationOracle identity(flat_classifier(2, 2, 1.0), 2);
  REQUIRE(identity.embedding_dim() == 2);

  Rng rng(4);
  std::vector<std::vector<double>> real;
  for (int i = 0; i < 4000; ++i) real.push_back({rng.normal(), rng.normal()});

  CHECK(fid(real, real, identity) == doctest::Approx(0.0).epsilon(1e-9));

  std::vector<std::vector<double>> shifted;
  for (const auto& p : real) shifted.push_back({p[0] + 3.0, p[1] + 4.0});
  // analytic value 25 for N(0,I) vs N((3,4),I); same-sample shift is exact
  CHECK(fid(real, shifted, identity) == doctest::Approx(25.0).epsilon(1e-6));

  std::vector<std::vector<double>> gen;
  for (int i = 0; i < 3000; ++i)
    gen.push_back({0.5 * rng.normal() + 1.0, 2.0 * rng.normal()});
  const double ab = fid(real, gen, identity);
  const double ba = fid(gen, real, identity);
  CHECK(std::abs(ab - ba) < 1e-9 * (1.0 + ab));
  CHECK(ab >= 0.0);

  const std::vector<std::vector<double>> tiny = {{0.0, 0.0}, {1.0, 1.0}};
  CHECK_THROWS_AS(fid(tiny, real, identity), std::invalid_argument);
}

TEST_CASE("intra_fid: per-class mean, permutation invariance, missing class") {
  EvaluationOracle identity(flat_classifier(2, 2, 1.0), 2);
  Rng rng(5);
  Dataset real = gaussian_blob(rng, 100, 0.0, 0.0, 1.0, 0);
  {
    Dataset more = gaussian_blob(rng, 100, 3.0, 0.0, 1.0, 1);
    real.insert(real.end(), more.begin(), more.end());
  }
  Dataset gen = gaussian_blob(rng, 100, 0.5, 0.0, 1.0, 0);
  {
    Dataset more = gaussian_blob(rng, 100, 3.0, 1.0, 1.2, 1);
    gen.insert(gen.end(), more.begin(), more.end());
  }

  // equals the plain mean of per-class FIDs
  auto class_points = [](const Dataset& d, int label) {
    std::vector<std::vector<double>> out;
    for (const auto& s : d)
      if (s.label == label) out.push_back(s.x);
    return out;
  };
  const double f0 = fid(class_points(real, 0), class_points(gen, 0), identity);
  const double f1 = fid(class_points(real, 1), class_points(gen, 1), identity);
  const double intra = intra_fid(real, gen, identity);
  CHECK(intra == doctest::Approx(0.5 * (f0 + f1)).epsilon(1e-12));

  // identical per-class samples give zero
  CHECK(intra_fid(real, real, identity) == doctest::Approx(0.0).epsilon(1e-9));

  // permuting sample order changes nothing
  Dataset shuffled = gen;
  std::reverse(shuffled.begin(), shuffled.end());
  CHECK(intra_fid(real, shuffled, identity) ==
        doctest::Approx(intra).epsilon(1e-12));

  // a class missing from the generated side is named in the error
  Dataset missing = class_points(gen, 0).empty() ? gen : gen;
  missing.erase(std::remove_if(missing.begin(), missing.end(),
                               [](const LabeledSample& s) { return s.label == 1; }),
                missing.end());
  try {
    intra_fid(real, missing, identity);
    FAIL("expected an exception");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("1") != std::string::npos);
  }
}

TEST_CASE("downstream_accuracy: real-equivalent training data and label noise") {
  Rng rng(6);
  // two separable blobs
  Dataset train = gaussian_blob(rng, 60, -1.0, 0.0, 0.15, 0);
  {
    Dataset more = gaussian_blob(rng, 60, 1.0, 0.0, 0.15, 1);
    train.insert(train.end(), more.begin(), more.end());
  }
  Dataset test = gaussian_blob(rng, 80, -1.0, 0.0, 0.15, 0);
  {
    Dataset more = gaussian_blob(rng, 80, 1.0, 0.0, 0.15, 1);
    test.insert(test.end(), more.begin(), more.end());
  }

  DownstreamConfig cfg;
  cfg.hidden = {8};
  cfg.epochs = 120;
  cfg.optimizer.learning_rate = 2e-3;

  const double on_real = downstream_accuracy(train, test, cfg);
  CHECK(on_real > 0.95);

  // label permutation oracle: random labels land near chance
  Dataset permuted = train;
  Rng prng(7);
  for (auto& s : permuted) s.label = static_cast<int>(prng.uniform_index(2));
  const double on_noise = downstream_accuracy(permuted, test, cfg);
  CHECK(std::abs(on_noise - 0.5) < 0.1 + 0.05);

  CHECK_THROWS_AS(downstream_accuracy(train, Dataset{}, cfg),
                  std::invalid_argument);
  Dataset single_class = gaussian_blob(rng, 30, 0.0, 0.0, 0.1, 0);
  CHECK_THROWS_AS(downstream_accuracy(single_class, test, cfg),
                  std::invalid_argument);
}

TEST_CASE("oracle fit on labeled blobs produces a usable instrument") {
  Rng rng(8);
  Dataset all = gaussian_blob(rng, 80, -1.0, 0.0, 0.15, 0);
  {
    Dataset more = gaussian_blob(rng, 80, 1.0, 0.0, 0.15, 1);
    all.insert(all.end(), more.begin(), more.end());
  }
  OracleConfig cfg;
  cfg.hidden = {8, 4};
  cfg.epochs = 120;
  cfg.optimizer.learning_rate = 2e-3;
  const EvaluationOracle oracle = fit_evaluation_oracle(all, cfg);
  CHECK(oracle.n_classes() == 2);
  CHECK(oracle.embedding_dim() == 4);

  // the trained oracle assigns the right argmax to cluster centers
  const auto p0 = oracle.class_posterior(std::vector<double>{-1.0, 0.0});
  const auto p1 = oracle.class_posterior(std::vector<double>{1.0, 0.0});
  CHECK(p0[0] > 0.9);
  CHECK(p1[1] > 0.9);
  CHECK(oracle.embed(std::vector<double>{0.3, 0.1}).size() == 4);
}
