#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "ssync/kernels.hpp"
#include "ssync/recognition.hpp"
#include "ssync/trainer.hpp"

using namespace ssync;

namespace {

PatchBatch random_batch(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  PatchBatch b;
  b.x = oracle::random_matrix(n, d, rng);
  b.y = oracle::random_matrix(n, d, rng);
  return b;
}

void check_close(const Matrix& a, const Matrix& b, double tol) {
  REQUIRE(a.rows() == b.rows());
  REQUIRE(a.cols() == b.cols());
  for (std::size_t k = 0; k < a.data().size(); ++k)
    CHECK(std::abs(a.data()[k] - b.data()[k]) <= tol * std::max(1.0, std::abs(a.data()[k])));
}

struct ThreadGuard {
  int saved = thread_count();
  ~ThreadGuard() { set_thread_count(saved); }
};

}  // namespace

TEST_CASE("serial and parallel kernels agree") {
  const auto batch = random_batch(257, 20, 1);
  std::mt19937_64 rng(2);
  const FilterBank untied(oracle::random_matrix(7, 20, rng), oracle::random_matrix(7, 20, rng));
  const auto tied = FilterBank::make_tied(oracle::random_matrix(7, 20, rng));

  for (const auto* bank : {&untied, &tied}) {
    const ObjectiveOptions opts{0.3};
    CHECK(std::abs(serial::objective(*bank, batch, opts) - parallel::objective(*bank, batch, opts)) <
          1e-12);
    const auto s = serial::objective_and_gradient(*bank, batch, opts);
    const auto p = parallel::objective_and_gradient(*bank, batch, opts);
    CHECK(std::abs(s.objective - p.objective) < 1e-12);
    check_close(s.gradient.wx, p.gradient.wx, 1e-10);
    if (!bank->tied()) check_close(s.gradient.wy, p.gradient.wy, 1e-10);
  }
  for (auto mode : {EncodingMode::Depth, EncodingMode::Joint})
    check_close(serial::encode_batch(untied, batch, mode), parallel::encode_batch(untied, batch, mode),
                0.0);
  check_close(serial::encode_batch(tied, batch, EncodingMode::Motion),
              parallel::encode_batch(tied, batch, EncodingMode::Motion), 0.0);

  Vector mean(20, 0.1);
  check_close(serial::covariance(batch.x, mean), parallel::covariance(batch.x, mean), 1e-12);

  const Matrix centroids = oracle::random_matrix(9, 20, rng);
  const auto a = serial::assign_nearest(batch.x, centroids);
  const auto b = parallel::assign_nearest(batch.x, centroids);
  CHECK(a.index == b.index);
  for (std::size_t i = 0; i < a.index.size(); ++i)
    CHECK(std::abs(a.squared_distance[i] - b.squared_distance[i]) < 1e-12);
}

TEST_CASE("assignment ties go to the lowest index") {
  Matrix c(3, 1);
  c(0, 0) = -1;
  c(1, 0) = 1;
  c(2, 0) = 1;
  Matrix p(2, 1);
  p(0, 0) = 0;
  p(1, 0) = 2;
  CHECK(serial::assign_nearest(p, c).index == std::vector<std::size_t>{0, 1});
  CHECK(parallel::assign_nearest(p, c).index == std::vector<std::size_t>{0, 1});
}

TEST_CASE("parallel results do not depend on the thread count") {
  ThreadGuard guard;
  const auto batch = random_batch(301, 16, 5);
  std::mt19937_64 rng(6);
  const FilterBank bank(oracle::random_matrix(5, 16, rng), oracle::random_matrix(5, 16, rng));

  set_thread_count(1);
  const auto ref = parallel::objective_and_gradient(bank, batch, {0.5});
  const auto cov = parallel::covariance(batch.x, Vector(16, 0.0));
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.batch_size = 50;
  cfg.learning_rate = 0.01;
  const auto trained = train(cfg, batch, EncodingMode::Depth, 5);
  const auto cb = build_codebook(batch.x, 6, 20, 3);

  for (int threads : {2, 3, 4}) {
    set_thread_count(threads);
    const auto got = parallel::objective_and_gradient(bank, batch, {0.5});
    CHECK(got.objective == ref.objective);
    CHECK(got.gradient.wx == ref.gradient.wx);
    CHECK(got.gradient.wy == ref.gradient.wy);
    CHECK(parallel::covariance(batch.x, Vector(16, 0.0)) == cov);
    CHECK(train(cfg, batch, EncodingMode::Depth, 5).bank == trained.bank);
    CHECK(build_codebook(batch.x, 6, 20, 3).centroids == cb.centroids);
  }
}

TEST_CASE("backend dispatch") {
  const auto batch = random_batch(40, 8, 9);
  std::mt19937_64 rng(10);
  const FilterBank bank(oracle::random_matrix(3, 8, rng), oracle::random_matrix(3, 8, rng));
  const double s = objective(bank, batch, {0.5}, Backend::Serial);
  const double p = objective(bank, batch, {0.5}, Backend::OpenMP);
  CHECK(std::abs(s - p) < 1e-12);
  CHECK(encode_batch(bank, batch, EncodingMode::Depth, Backend::Serial) ==
        encode_batch(bank, batch, EncodingMode::Depth, Backend::OpenMP));
}
