#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "ssync/depth.hpp"
#include "ssync/error.hpp"
#include "ssync/whitening.hpp"

using namespace ssync;

TEST_CASE("depth labels") {
  const Vector edges = linear_depth_bins(0, 25);
  CHECK(edges.size() == 26);
  CHECK(make_depth_label(Vector{10, 20, 30}, edges) == 21);
  CHECK(make_depth_label(Vector{0, 20, 0, 0}, edges) == 21);
  for (std::size_t k = 0; k < 25; ++k) CHECK(bin_label(edges[k], edges) == int(k) + 1);
  CHECK(bin_label(25.0, edges) == 25);
  CHECK(bin_label(1e9, edges) == 25);
  CHECK(bin_label(-3.0, edges) == 1);
  CHECK_THROWS_AS(make_depth_label(Vector{0, 0, 0}, edges), Error);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-50, 80);
  for (int i = 0; i < 1000; ++i) {
    const int l = bin_label(u(rng), edges);
    CHECK(l >= 1);
    CHECK(l <= 25);
  }
}

TEST_CASE("quantile bins") {
  Vector means(100);
  for (std::size_t i = 0; i < 100; ++i) means[i] = double(i + 1);
  std::shuffle(means.begin(), means.end(), std::mt19937_64(4));
  const Vector edges = fit_depth_bins(means);
  REQUIRE(edges.size() == 26);
  std::vector<int> counts(25, 0);
  for (double m : means) ++counts[std::size_t(bin_label(m, edges) - 1)];
  for (int c : counts) CHECK(std::abs(c - 4) <= 1);

  CHECK_THROWS_AS(fit_depth_bins(Vector(100, 3.0)), Error);

  std::mt19937_64 rng(9);
  std::exponential_distribution<double> skew(0.3);
  Vector skewed(5000);
  for (auto& v : skewed) v = skew(rng);
  const Vector e2 = fit_depth_bins(skewed);
  for (std::size_t k = 1; k < e2.size(); ++k) CHECK(e2[k] > e2[k - 1]);
}

TEST_CASE("calibrator") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0, 0.3);
  const std::size_t n = 400;
  Matrix codes(n, 3);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = 1 + int(i % 2);
    codes(i, 0) = (labels[i] == 1 ? -1.0 : 1.0) + g(rng);
    codes(i, 1) = g(rng);
    codes(i, 2) = 0.5;
  }
  CalibratorConfig cfg;
  cfg.bins = 2;
  cfg.epochs = 30;
  cfg.batch_size = 32;
  const auto fit = fit_calibrator(codes, labels, cfg);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < n; ++i) {
    correct += predict_depth_label(fit.calibrator, codes.row(i)) == labels[i];
    const auto p = calibrator_confidences(fit.calibrator, codes.row(i));
    double sum = 0;
    for (double v : p) sum += v;
    CHECK(std::abs(sum - 1.0) < 1e-9);
  }
  CHECK(double(correct) / double(n) >= 0.99);
  const double lead = fit.loss_trace.front(), trail = fit.loss_trace.back();
  CHECK(trail < lead);

  const auto again = fit_calibrator(codes, labels, cfg);
  CHECK(again.calibrator.weights == fit.calibrator.weights);

  cfg.learning_rate = 0.0;
  const auto frozen = fit_calibrator(codes, labels, cfg);
  for (double w : frozen.calibrator.weights.data()) CHECK(w == 0.0);

  labels[7] = 3;
  CHECK_THROWS_AS(fit_calibrator(codes, labels, cfg), Error);
}

TEST_CASE("calibrator on uniform random labels stays near chance") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g;
  const std::size_t n = 2000, bins = 5;
  Matrix codes(n, 4);
  std::vector<int> labels(n);
  for (auto& v : codes.data()) v = g(rng);
  for (auto& l : labels) l = 1 + int(rng() % bins);
  CalibratorConfig cfg;
  cfg.bins = bins;
  cfg.epochs = 10;
  const auto fit = fit_calibrator(codes, labels, cfg);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Vector fresh(4);
    for (auto& v : fresh) v = g(rng);
    correct += predict_depth_label(fit.calibrator, fresh) == 1 + int(rng() % bins);
  }
  // Binomial(2000, 0.2): five standard deviations is about 0.045.
  CHECK(std::abs(double(correct) / double(n) - 0.2) < 0.045);
}

TEST_CASE("grid arithmetic") {
  CHECK(grid_count(300, 16, 1) == 285);
  CHECK(grid_count(100, 16, 1) == 85);
  CHECK(grid_count(16, 16, 3) == 1);
  CHECK_THROWS_AS(grid_count(15, 16, 1), Error);
  for (std::size_t dim = 1; dim <= 40; ++dim)
    for (std::size_t patch = 1; patch <= dim; ++patch)
      for (std::size_t stride = 1; stride <= 6; ++stride) {
        std::size_t n = 0;
        for (std::size_t p = 0; p + patch <= dim; p += stride) ++n;
        CHECK(grid_count(dim, patch, stride) == n);
      }
}

TEST_CASE("dense depth map") {
  std::mt19937_64 rng(5);
  const std::size_t patch = 4;
  const FilterBank bank(oracle::random_matrix(6, 16, rng), oracle::random_matrix(6, 16, rng));
  const auto white = WhiteningTransform::identity(16);
  Matrix codes(30, 6);
  for (auto& v : codes.data()) v = std::uniform_real_distribution<double>(0, 1)(rng);
  std::vector<int> labels(30);
  for (std::size_t i = 0; i < 30; ++i) labels[i] = 1 + int(i % 25);
  CalibratorConfig cfg;
  cfg.epochs = 3;
  const auto cal = fit_calibrator(codes, labels, cfg).calibrator;

  ImageFrame left(30, 10), right(30, 10);
  for (auto& v : left.pixels) v = std::uniform_real_distribution<double>(0, 1)(rng);
  right = left;
  const auto map = predict_depth_map(bank, white, cal, left, right, patch, 1);
  CHECK(map.width == 27);
  CHECK(map.height == 7);
  CHECK(map.labels.size() == 27 * 7);
  for (int l : map.labels) {
    CHECK(l >= 1);
    CHECK(l <= 25);
  }
  CHECK(predict_depth_map(bank, white, cal, left, right, patch, 1, Backend::Serial) == map);

  const ImageFrame flat(30, 10, 0.4);
  const auto uniform = predict_depth_map(bank, white, cal, flat, flat, patch, 3);
  CHECK(uniform.width == 9);
  for (int l : uniform.labels) CHECK(l == uniform.labels.front());

  CHECK(mask_depth_map(map, std::vector<bool>(map.labels.size(), true)) == map);
  const auto none = mask_depth_map(map, std::vector<bool>(map.labels.size(), false));
  for (int l : none.labels) CHECK(l == 0);
  CHECK_THROWS_AS(mask_depth_map(map, std::vector<bool>(3, true)), Error);

  const auto levels = depth_map_levels(map);
  for (std::size_t i = 0; i < levels.size(); ++i) CHECK(levels[i] == map.labels[i] * 10);
  CHECK(depth_map_levels(none)[0] == 0);
}
