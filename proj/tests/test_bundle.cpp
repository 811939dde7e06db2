#include <doctest.h>

#include <filesystem>
#include <random>

#include "oracles.hpp"
#include "ssync/bundle.hpp"
#include "ssync/config.hpp"
#include "ssync/digest.hpp"
#include "ssync/error.hpp"

using namespace ssync;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "ssync_test_bundle" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Values exactly representable in float survive the float32 payload.
Matrix float_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng) {
  Matrix m = oracle::random_matrix(r, c, rng);
  for (auto& v : m.data()) v = double(float(v));
  return m;
}

}  // namespace

TEST_CASE("sha256") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("bank bundle") {
  std::mt19937_64 rng(1);
  const auto dir = scratch("bank");
  const FilterBank d(float_matrix(3, 5, rng), float_matrix(3, 5, rng));
  save_bank(dir / "d", d, {2, 9, "white"});
  BankMetadata meta;
  CHECK(load_bank(dir / "d", &meta) == d);
  CHECK(meta.frames == 2);
  CHECK(meta.frame_pixels == 9);
  CHECK(meta.whitening == "white");
  const auto j = read_json(dir / "d" / "bank.json");
  CHECK(j["mode"] == "D");
  CHECK(j["Q"] == 3);
  CHECK(j["N"] == 5);

  const auto m = FilterBank::make_tied(float_matrix(2, 4, rng));
  save_bank(dir / "m", m, {});
  const auto back = load_bank(dir / "m");
  CHECK(back.tied());
  CHECK(back == m);
}

TEST_CASE("transform, calibrator, codebook, classifier and depth map bundles") {
  std::mt19937_64 rng(2);
  const auto dir = scratch("misc");

  WhiteningTransform t;
  t.mean = {0.5, -0.25};
  t.projection = float_matrix(2, 2, rng);
  t.eigenvalues = {2.0, 0.5};
  t.epsilon = 1e-8;
  save_transform(dir, "white", t);
  const auto tb = load_transform(dir, "white");
  CHECK(tb.mean == t.mean);
  CHECK(tb.projection == t.projection);
  CHECK(tb.epsilon == t.epsilon);
  CHECK(tb.rescaled);

  DepthCalibrator cal;
  cal.weights = float_matrix(3, 2, rng);
  cal.bias = {0.5, 0.25, -1};
  cal.bin_edges = {0, 1, 2, 4};
  cal.feature_mean = {0.125, 0.5};
  cal.feature_scale = {1, 2};
  save_calibrator(dir / "cal", cal);
  const auto cb = load_calibrator(dir / "cal");
  CHECK(cb.weights == cal.weights);
  CHECK(cb.bin_edges == cal.bin_edges);
  CHECK(cb.feature_scale == cal.feature_scale);

  Codebook book;
  book.centroids = float_matrix(4, 3, rng);
  save_codebook(dir / "cb.sstf", book);
  CHECK(load_codebook(dir / "cb.sstf").centroids == book.centroids);

  ActionClassifier clf{{3, 9}, float_matrix(2, 4, rng), {0.5, -0.5}};
  save_classifier(dir / "clf", clf);
  const auto cl = load_classifier(dir / "clf");
  CHECK(cl.classes == clf.classes);
  CHECK(cl.weights == clf.weights);
  CHECK(cl.bias == clf.bias);

  DepthMap map{3, 2, 4, 16, {1, 2, 25, 0, 7, 13}};
  save_depth_map(dir / "map.sstf", map);
  const auto mb = load_depth_map(dir / "map.sstf");
  CHECK(mb.labels == map.labels);
  CHECK(mb.width == 3);
  CHECK(mb.height == 2);
}

TEST_CASE("run config") {
  const RunConfig def;
  const auto parsed = parse_run_config(def.to_json());
  CHECK(parsed.to_json() == def.to_json());
  CHECK(parsed.digest() == def.digest());
  CHECK(def.digest().size() == 64);

  auto j = def.to_json();
  j["hidden_units"] = 64;
  j["train"]["epochs"] = 3;
  const auto c = parse_run_config(j);
  CHECK(c.hidden_units == 64);
  CHECK(c.train.epochs == 3);
  CHECK(c.digest() != def.digest());

  auto code_of = [](const nlohmann::json& bad) {
    try {
      parse_run_config(bad);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  CHECK(code_of({{"bogus", 1}}) == ErrorCode::Config);
  CHECK(code_of({{"train", {{"epochz", 1}}}}) == ErrorCode::Config);
  CHECK(code_of({{"hidden_units", "many"}}) == ErrorCode::Config);
  CHECK(code_of({{"mode", "X"}}) == ErrorCode::Config);
  CHECK(code_of({{"train", {{"lambda", -1.0}}}}) == ErrorCode::Config);
  CHECK(code_of({{"blocks", {{"sub_t", 99}}}}) == ErrorCode::Config);
  CHECK(parse_run_config(nlohmann::json::object()).hidden_units == 300);
}
