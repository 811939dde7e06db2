// Serial reference vs OpenMP kernels.

#include <benchmark/benchmark.h>

#include <random>

#include "ssync/kernels.hpp"

namespace {

using namespace ssync;

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  Matrix m(rows, cols);
  for (auto& v : m.data()) v = dist(rng);
  return m;
}

PatchBatch random_batch(std::size_t count, std::size_t dim) {
  PatchBatch b;
  b.x = random_matrix(count, dim, 1);
  b.y = random_matrix(count, dim, 2);
  return b;
}

// args: samples, input dim, hidden units
template <auto Fn>
void BM_Gradient(benchmark::State& state) {
  const auto n = std::size_t(state.range(0)), dim = std::size_t(state.range(1));
  const auto q = std::size_t(state.range(2));
  const auto bank = FilterBank::random(q, dim, false, EncodingMode::Depth, 0.0, 7);
  const auto batch = random_batch(n, dim);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(bank, batch, ObjectiveOptions{}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Fn>
void BM_Encode(benchmark::State& state) {
  const auto n = std::size_t(state.range(0)), dim = std::size_t(state.range(1));
  const auto q = std::size_t(state.range(2));
  const auto bank = FilterBank::random(q, dim, false, EncodingMode::Depth, 0.0, 7);
  const auto batch = random_batch(n, dim);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(bank, batch, EncodingMode::Depth));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

// args: samples, dim
template <auto Fn>
void BM_Covariance(benchmark::State& state) {
  const auto m = random_matrix(std::size_t(state.range(0)), std::size_t(state.range(1)), 3);
  const Vector mean(m.cols(), 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(m, mean));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

// args: points, centroids, dim
template <auto Fn>
void BM_Assign(benchmark::State& state) {
  const auto dim = std::size_t(state.range(2));
  const auto points = random_matrix(std::size_t(state.range(0)), dim, 4);
  const auto centroids = random_matrix(std::size_t(state.range(1)), dim, 5);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(points, centroids));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_Gradient<serial::objective_and_gradient>)->Name("gradient/serial")->Args({1000, 256, 64});
BENCHMARK(BM_Gradient<parallel::objective_and_gradient>)->Name("gradient/parallel")->Args({1000, 256, 64});
BENCHMARK(BM_Encode<serial::encode_batch>)->Name("encode/serial")->Args({5000, 256, 300});
BENCHMARK(BM_Encode<parallel::encode_batch>)->Name("encode/parallel")->Args({5000, 256, 300});
BENCHMARK(BM_Covariance<serial::covariance>)->Name("covariance/serial")->Args({5000, 256});
BENCHMARK(BM_Covariance<parallel::covariance>)->Name("covariance/parallel")->Args({5000, 256});
BENCHMARK(BM_Assign<serial::assign_nearest>)->Name("assign/serial")->Args({5000, 300, 64});
BENCHMARK(BM_Assign<parallel::assign_nearest>)->Name("assign/parallel")->Args({5000, 300, 64});

BENCHMARK_MAIN();
