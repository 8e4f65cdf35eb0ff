#include <cmath>
#include <random>

#include "doctest.h"
#include "pcgan/metrics.hpp"
#include "test_util.hpp"

using namespace pcgan;
using pcgan::testing::random_image;

TEST_CASE("uniform predictions give an inception score of 1") {
  const int n = 12, c = 8;
  std::vector<double> probs(n * c, 1.0 / c);
  for (int splits : {1, 2, 3}) {
    const auto [mean, stddev] = inception_score(probs, c, splits);
    CHECK(mean == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(stddev == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("uniformly covered one-hot predictions give IS = C") {
  const int c = 6;
  std::vector<double> probs(c * c, 0.0);
  for (int i = 0; i < c; ++i) probs[i * c + i] = 1.0;
  const auto [mean, stddev] = inception_score(probs, c, 1);
  CHECK(mean == doctest::Approx(static_cast<double>(c)).epsilon(1e-9));
}

TEST_CASE("identical one-hot predictions give IS = 1") {
  const int n = 10, c = 5;
  std::vector<double> probs(n * c, 0.0);
  for (int i = 0; i < n; ++i) probs[i * c + 2] = 1.0;
  CHECK(inception_score(probs, c, 2).first == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("inception score validates its inputs") {
  std::vector<double> bad = {0.5, 0.4};  // does not sum to 1
  CHECK_THROWS_AS((void)inception_score(bad, 2, 1), std::invalid_argument);
  std::vector<double> neg = {1.5, -0.5};
  CHECK_THROWS_AS((void)inception_score(neg, 2, 1), std::invalid_argument);
  std::vector<double> ok = {0.5, 0.5};
  CHECK_THROWS_AS((void)inception_score(ok, 2, 2), std::invalid_argument);  // splits > N
}

TEST_CASE("concatenating identical batches keeps the splits=1 score") {
  const int c = 4;
  std::vector<double> probs = {0.7, 0.1, 0.1, 0.1, 0.25, 0.25, 0.25, 0.25};
  std::vector<double> doubled = probs;
  doubled.insert(doubled.end(), probs.begin(), probs.end());
  CHECK(inception_score(doubled, c, 1).first ==
        doctest::Approx(inception_score(probs, c, 1).first).epsilon(1e-12));
}

TEST_CASE("all-one masks make mask-IS equal plain IS exactly") {
  std::mt19937_64 rng(1);
  const ColorStatBackend backend;
  std::vector<Image> images;
  std::vector<Grid> ones;
  for (int i = 0; i < 6; ++i) {
    images.push_back(random_image(12, 10, rng));
    ones.emplace_back(12, 10, 1.0);
  }
  const auto direct = inception_score(backend.predict(images), backend.num_classes(), 2);
  const auto masked = mask_inception_score(images, ones, backend, 2);
  CHECK(masked.first == direct.first);
  CHECK(masked.second == direct.second);
}

TEST_CASE("all-zero masks still produce a finite score") {
  std::mt19937_64 rng(2);
  const ColorStatBackend backend;
  std::vector<Image> images;
  std::vector<Grid> zeros;
  for (int i = 0; i < 4; ++i) {
    images.push_back(random_image(12, 10, rng));
    zeros.emplace_back(12, 10, 0.0);
  }
  const auto [mean, stddev] = mask_inception_score(images, zeros, backend, 1);
  CHECK(std::isfinite(mean));
  CHECK(mean >= 1.0 - 1e-9);
}

TEST_CASE("checkerboard mask-IS equals the two-path pre-masked computation") {
  std::mt19937_64 rng(3);
  const ColorStatBackend backend;
  std::vector<Image> images;
  std::vector<Grid> masks;
  std::vector<Image> premasked;
  for (int i = 0; i < 5; ++i) {
    const Image img = random_image(12, 10, rng);
    Grid m(12, 10, 0.0);
    for (int r = 0; r < 12; ++r)
      for (int c = 0; c < 10; ++c) m.at(r, c) = (r + c + i) % 2;
    Image pm(12, 10);
    for (int ch = 0; ch < 3; ++ch)
      for (int r = 0; r < 12; ++r)
        for (int c = 0; c < 10; ++c) pm.at(ch, r, c) = img.at(ch, r, c) * m.at(r, c);
    images.push_back(img);
    masks.push_back(m);
    premasked.push_back(pm);
  }
  const auto via_masks = mask_inception_score(images, masks, backend, 1);
  const auto via_images = inception_score(backend.predict(premasked), backend.num_classes(), 1);
  CHECK(via_masks.first == doctest::Approx(via_images.first).epsilon(1e-12));
}

TEST_CASE("frechet distance of a distribution with itself is 0") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-2, 2);
  const int n = 10, d = 4;
  std::vector<double> feats(n * d);
  for (double& v : feats) v = u(rng);
  CHECK(frechet_distance(feats, n, feats, n, d) == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("1-D distributions with injected moments give FID = 9") {
  const double s = std::sqrt(0.5);
  const std::vector<double> a = {-s, s};         // mean 0, unbiased var 1
  const std::vector<double> b = {3 - s, 3 + s};  // mean 3, unbiased var 1
  CHECK(frechet_distance(a, 2, b, 2, 1) == doctest::Approx(9.0).epsilon(1e-9));
}

TEST_CASE("2-D identity covariances with mean offset (3,4) give FID = 25") {
  const double k = std::sqrt(1.5);  // scales the 4-point cross to unit covariance
  const std::vector<double> a = {k, 0, -k, 0, 0, k, 0, -k};
  std::vector<double> b = a;
  for (size_t i = 0; i < b.size(); i += 2) {
    b[i] += 3;
    b[i + 1] += 4;
  }
  CHECK(frechet_distance(a, 4, b, 4, 2) == doctest::Approx(25.0).epsilon(1e-9));
}

TEST_CASE("frechet distance is symmetric and non-negative") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  const int n = 8, m = 6, d = 3;
  std::vector<double> a(n * d), b(m * d);
  for (double& v : a) v = u(rng);
  for (double& v : b) v = 2 * u(rng) + 0.3;
  const double ab = frechet_distance(a, n, b, m, d);
  const double ba = frechet_distance(b, m, a, n, d);
  CHECK(ab == doctest::Approx(ba).epsilon(1e-6));
  CHECK(ab >= 0.0);
}

TEST_CASE("frechet distance validates its inputs") {
  std::vector<double> one = {1.0};
  std::vector<double> two = {1.0, 2.0};
  CHECK_THROWS_AS((void)frechet_distance(one, 1, two, 2, 1), std::invalid_argument);
  std::vector<double> with_nan = {1.0, std::nan("")};
  CHECK_THROWS_AS((void)frechet_distance(with_nan, 2, two, 2, 1), std::invalid_argument);
}

TEST_CASE("the color-stat backend emits valid probability rows") {
  std::mt19937_64 rng(6);
  const ColorStatBackend backend;
  std::vector<Image> images;
  for (int i = 0; i < 3; ++i) images.push_back(random_image(16, 8, rng));
  const std::vector<double> probs = backend.predict(images);
  REQUIRE(probs.size() == images.size() * backend.num_classes());
  for (size_t i = 0; i < images.size(); ++i) {
    double sum = 0;
    for (int k = 0; k < backend.num_classes(); ++k) {
      const double p = probs[i * backend.num_classes() + k];
      CHECK(p >= 0.0);
      sum += p;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK(backend.features(images).size() == images.size() * backend.feature_dim());
  // Distinct images produce distinct predictions (the backend is not constant).
  CHECK(probs[0] != probs[backend.num_classes()]);
}
