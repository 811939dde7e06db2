#include "ssync/bundle.hpp"

#include <fstream>

#include "ssync/error.hpp"
#include "ssync/tensor_file.hpp"

namespace ssync {

using nlohmann::json;

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorCode::Io, "cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
  require(static_cast<bool>(out), ErrorCode::Io, "write failed: " + path.string());
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::Io, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedHeader, path.string() + ": " + e.what());
  }
}

namespace {

template <typename T>
T field(const json& j, const char* key, const std::filesystem::path& src) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::MalformedHeader, src.string() + ": missing or invalid '" + key + "'");
  }
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  require(!ec, ErrorCode::Io, "cannot create directory " + dir.string());
}

}  // namespace

void save_bank(const std::filesystem::path& dir, const FilterBank& bank, const BankMetadata& meta) {
  ensure_dir(dir);
  save_tensor(dir / "wx.sstf", to_tensor(bank.wx()));
  if (!bank.tied()) save_tensor(dir / "wy.sstf", to_tensor(bank.wy()));
  write_json(dir / "bank.json", json{{"mode", to_string(bank.mode())},
                                     {"tied", bank.tied()},
                                     {"Q", bank.hidden_units()},
                                     {"N", bank.input_dim()},
                                     {"T", meta.frames},
                                     {"M", meta.frame_pixels},
                                     {"whitening", meta.whitening}});
}

FilterBank load_bank(const std::filesystem::path& dir, BankMetadata* meta) {
  const auto src = dir / "bank.json";
  const json j = read_json(src);
  const auto mode = parse_encoding_mode(field<std::string>(j, "mode", src));
  const bool tied = field<bool>(j, "tied", src);
  Matrix wx = tensor_to_matrix(load_tensor(dir / "wx.sstf"));
  require(wx.rows() == field<std::size_t>(j, "Q", src) && wx.cols() == field<std::size_t>(j, "N", src),
          ErrorCode::MalformedHeader, "bank metadata does not match wx.sstf");
  if (meta) {
    meta->frames = field<std::size_t>(j, "T", src);
    meta->frame_pixels = field<std::size_t>(j, "M", src);
    meta->whitening = field<std::string>(j, "whitening", src);
  }
  if (tied) return FilterBank::make_tied(std::move(wx), mode);
  return FilterBank(std::move(wx), tensor_to_matrix(load_tensor(dir / "wy.sstf")), mode);
}

void save_transform(const std::filesystem::path& dir, const std::string& stem,
                    const WhiteningTransform& t) {
  ensure_dir(dir);
  save_tensor(dir / (stem + "_mean.sstf"), to_tensor(t.mean));
  save_tensor(dir / (stem + "_projection.sstf"), to_tensor(t.projection));
  save_tensor(dir / (stem + "_eigenvalues.sstf"), to_tensor(t.eigenvalues));
  write_json(dir / (stem + ".json"), json{{"epsilon", t.epsilon},
                                          {"rescaled", t.rescaled},
                                          {"input_dim", t.input_dim()},
                                          {"output_dim", t.output_dim()}});
}

WhiteningTransform load_transform(const std::filesystem::path& dir, const std::string& stem) {
  const auto src = dir / (stem + ".json");
  const json j = read_json(src);
  WhiteningTransform t;
  t.mean = tensor_to_vector(load_tensor(dir / (stem + "_mean.sstf")));
  t.projection = tensor_to_matrix(load_tensor(dir / (stem + "_projection.sstf")));
  t.eigenvalues = tensor_to_vector(load_tensor(dir / (stem + "_eigenvalues.sstf")));
  t.epsilon = field<double>(j, "epsilon", src);
  t.rescaled = field<bool>(j, "rescaled", src);
  require(t.projection.cols() == t.mean.size() && t.projection.rows() == t.eigenvalues.size(),
          ErrorCode::MalformedHeader, "inconsistent transform bundle " + stem);
  return t;
}

void save_calibrator(const std::filesystem::path& dir, const DepthCalibrator& cal) {
  ensure_dir(dir);
  save_tensor(dir / "calibrator_weights.sstf", to_tensor(cal.weights));
  save_tensor(dir / "calibrator_bias.sstf", to_tensor(cal.bias));
  save_tensor(dir / "calibrator_feature_mean.sstf", to_tensor(cal.feature_mean));
  save_tensor(dir / "calibrator_feature_scale.sstf", to_tensor(cal.feature_scale));
  if (!cal.bin_edges.empty()) save_tensor(dir / "calibrator_edges.sstf", to_tensor(cal.bin_edges));
  write_json(dir / "calibrator.json",
             json{{"bins", cal.bins()}, {"Q", cal.code_dim()}, {"edges", cal.bin_edges}});
}

DepthCalibrator load_calibrator(const std::filesystem::path& dir) {
  const auto src = dir / "calibrator.json";
  const json j = read_json(src);
  DepthCalibrator cal;
  cal.weights = tensor_to_matrix(load_tensor(dir / "calibrator_weights.sstf"));
  cal.bias = tensor_to_vector(load_tensor(dir / "calibrator_bias.sstf"));
  cal.feature_mean = tensor_to_vector(load_tensor(dir / "calibrator_feature_mean.sstf"));
  cal.feature_scale = tensor_to_vector(load_tensor(dir / "calibrator_feature_scale.sstf"));
  if (std::filesystem::exists(dir / "calibrator_edges.sstf"))
    cal.bin_edges = tensor_to_vector(load_tensor(dir / "calibrator_edges.sstf"));
  require(cal.bins() == field<std::size_t>(j, "bins", src) && cal.bias.size() == cal.bins() &&
              cal.feature_mean.size() == cal.code_dim() &&
              cal.feature_scale.size() == cal.code_dim(),
          ErrorCode::MalformedHeader, "inconsistent calibrator bundle");
  return cal;
}

void save_codebook(const std::filesystem::path& path, const Codebook& cb) {
  save_tensor(path, to_tensor(cb.centroids));
  auto side = path;
  side.replace_extension(".json");
  write_json(side, json{{"K", cb.words()},
                        {"dim", cb.centroids.cols()},
                        {"iterations", cb.iterations},
                        {"objective", cb.objective}});
}

Codebook load_codebook(const std::filesystem::path& path) {
  Codebook cb;
  cb.centroids = tensor_to_matrix(load_tensor(path));
  auto side = path;
  side.replace_extension(".json");
  if (std::filesystem::exists(side)) {
    const json j = read_json(side);
    cb.iterations = field<std::size_t>(j, "iterations", side);
    cb.objective = field<std::vector<double>>(j, "objective", side);
  }
  return cb;
}

void save_classifier(const std::filesystem::path& dir, const ActionClassifier& clf) {
  ensure_dir(dir);
  save_tensor(dir / "classifier_weights.sstf", to_tensor(clf.weights));
  save_tensor(dir / "classifier_bias.sstf", to_tensor(clf.bias));
  write_json(dir / "classifier.json", json{{"classes", clf.classes}, {"dim", clf.weights.cols()}});
}

ActionClassifier load_classifier(const std::filesystem::path& dir) {
  const auto src = dir / "classifier.json";
  const json j = read_json(src);
  ActionClassifier clf;
  clf.classes = field<std::vector<int>>(j, "classes", src);
  clf.weights = tensor_to_matrix(load_tensor(dir / "classifier_weights.sstf"));
  clf.bias = tensor_to_vector(load_tensor(dir / "classifier_bias.sstf"));
  require(clf.weights.rows() == clf.classes.size() && clf.bias.size() == clf.classes.size(),
          ErrorCode::MalformedHeader, "inconsistent classifier bundle");
  return clf;
}

void save_depth_map(const std::filesystem::path& path, const DepthMap& map) {
  Tensor t{{static_cast<std::uint32_t>(map.height), static_cast<std::uint32_t>(map.width)}, {}};
  t.values.assign(map.labels.begin(), map.labels.end());
  save_tensor(path, t);
}

DepthMap load_depth_map(const std::filesystem::path& path) {
  const Tensor t = load_tensor(path);
  require(t.dims.size() == 2, ErrorCode::MalformedHeader, "depth map must be rank 2");
  DepthMap map;
  map.height = t.dims[0];
  map.width = t.dims[1];
  for (float v : t.values) map.labels.push_back(static_cast<int>(v));
  return map;
}

}  // namespace ssync
