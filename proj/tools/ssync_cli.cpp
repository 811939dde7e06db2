// ssync: command-line front end for the synchrony autoencoder pipeline.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ssync/bundle.hpp"
#include "ssync/classifier.hpp"
#include "ssync/config.hpp"
#include "ssync/corpus.hpp"
#include "ssync/depth.hpp"
#include "ssync/digest.hpp"
#include "ssync/error.hpp"
#include "ssync/interest.hpp"
#include "ssync/kernels.hpp"
#include "ssync/metrics.hpp"
#include "ssync/recognition.hpp"
#include "ssync/synth.hpp"
#include "ssync/tensor_file.hpp"
#include "ssync/trainer.hpp"
#include "ssync/whitening.hpp"

#ifndef SSYNC_VERSION
#define SSYNC_VERSION "dev"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ssync;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

const char* const kWhiteningStem = "whitening";
const char* const kReducerStem = "reducer";

// Shared state filled from the global options.
struct Globals {
  std::string config_path;
  int threads = -1;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

RunConfig load_config(const Globals& g) {
  RunConfig c = g.config_path.empty() ? parse_run_config(json::object())
                                      : load_run_config(g.config_path);
  if (g.seed_set) {
    c.seed = g.seed;
    c.train.seed = c.depth.calibrator.seed = c.classifier.seed = g.seed;
  }
  return c;
}

void apply_threads(const Globals& g, const RunConfig& c) {
  int threads = g.threads;
  if (threads < 0) {
    if (const char* env = std::getenv("SSYNC_THREADS")) {
      try {
        threads = std::stoi(env);
      } catch (const std::logic_error&) {
        throw Error(ErrorCode::Config, std::string("SSYNC_THREADS is not an integer: ") + env);
      }
    }
  }
  if (threads < 0) threads = c.threads;
  if (threads > 0) set_thread_count(threads);
}

json describe_inputs(const std::vector<fs::path>& inputs) {
  json out = json::array();
  for (const auto& p : inputs) {
    if (fs::is_directory(p)) {
      std::vector<fs::path> files;
      for (const auto& e : fs::directory_iterator(p))
        if (e.is_regular_file() && e.path().filename() != "provenance.json") files.push_back(e.path());
      std::sort(files.begin(), files.end());
      for (const auto& f : files) out.push_back({{"path", f.string()}, {"sha256", file_sha256_hex(f)}});
    } else {
      out.push_back({{"path", p.string()}, {"sha256", file_sha256_hex(p)}});
    }
  }
  return out;
}

void write_provenance(const fs::path& path, const std::string& command, const RunConfig& c,
                      const std::vector<fs::path>& inputs, json extra = json::object()) {
  json j{{"command", command},
         {"version", SSYNC_VERSION},
         {"config_digest", c.digest()},
         {"seed", c.seed},
         {"config", c.to_json()},
         {"inputs", describe_inputs(inputs)}};
  for (auto& [k, v] : extra.items()) j[k] = v;
  write_json(path, j);
}

void log(const std::string& msg) { std::cerr << msg << '\n'; }

// ---------------------------------------------------------------- gen

struct GenOptions {
  std::string kind;
  std::string out;
  std::size_t count = 10;
  std::size_t width = 64, height = 48, frames = 8;
  int disparity = -1;  // < 0 draws one per item
  int max_disparity = 6;
  int velocity_x = 1, velocity_y = 0;
  double density = 0.5;
  bool with_depth = false;
};

// Ground truth for a stereogram: the shifted region carries a level that
// grows with disparity, everything else is 0 (missing).
ImageFrame stereogram_depth(const Stereogram& s, int max_disparity) {
  ImageFrame depth(s.pair.width(), s.pair.height());
  const auto reg = stereogram_region(depth.width, depth.height);
  const double level = double(s.disparity + 1) / double(max_disparity + 2);
  for (std::size_t r = reg.row0; r < reg.row1; ++r)
    for (std::size_t c = reg.col0; c < reg.col1; ++c) depth.at(r, c) = level;
  return depth;
}

int cmd_gen(const Globals& g, const GenOptions& o) {
  const RunConfig c = load_config(g);
  const fs::path out(o.out);
  fs::create_directories(out);
  std::mt19937_64 rng(c.seed);
  std::vector<ManifestRecord> records;
  char name[64];
  for (std::size_t i = 0; i < o.count; ++i) {
    std::snprintf(name, sizeof name, "%04zu", i);
    const std::string left = std::string("left_") + name + ".pgm";
    const std::string right = std::string("right_") + name + ".pgm";
    ManifestRecord rec{left, right, std::nullopt, std::nullopt};
    const std::uint64_t item_seed = rng();
    StereoSequence seq;
    if (o.kind == "stereogram") {
      const int d = o.disparity >= 0 ? o.disparity : int(item_seed % std::uint64_t(o.max_disparity + 1));
      const auto s = gen_random_dot_stereogram(o.width, o.height, d, o.density, item_seed);
      seq = s.pair;
      rec.label = d;
      if (o.with_depth) {
        rec.depth = std::string("depth_") + name + ".pgm";
        write_pgm(out / *rec.depth, stereogram_depth(s, std::max(o.max_disparity, d)));
      }
    } else if (o.kind == "moving") {
      seq = gen_moving_pattern(o.width, o.height, o.frames, o.velocity_x, o.velocity_y, item_seed);
    } else {
      const int label = 1 + int(i % 2);
      seq = gen_action_clip(label, o.width, o.height, o.frames, item_seed);
      rec.label = label;
    }
    write_pgm(out / left, seq.left);
    write_pgm(out / right, seq.right);
    records.push_back(std::move(rec));
  }
  write_manifest(out / "manifest.tsv", records);
  write_provenance(out / "provenance.json", "gen", c, {},
                   {{"kind", o.kind}, {"count", o.count}, {"width", o.width}, {"height", o.height}});
  log("wrote " + std::to_string(records.size()) + " records to " + (out / "manifest.tsv").string());
  return 0;
}

// ---------------------------------------------------------------- train

struct TrainOptions {
  std::string corpus;
  std::string out;
  std::string init_bank;
  std::optional<std::string> mode;
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> hidden;
  std::optional<std::size_t> samples;
  std::optional<double> learning_rate;
};

Matrix rows_of(const std::vector<SampledPatch>& samples, bool right) {
  Matrix m(samples.size(), samples.empty() ? 0 : samples.front().pair.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& v = right ? samples[i].pair.y : samples[i].pair.x;
    std::copy(v.begin(), v.end(), m.row(i).begin());
  }
  return m;
}

Matrix stack(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() + b.rows(), a.cols());
  std::copy(a.data().begin(), a.data().end(), out.data().begin());
  std::copy(b.data().begin(), b.data().end(), out.data().begin() + std::ptrdiff_t(a.data().size()));
  return out;
}

int cmd_train(const Globals& g, const TrainOptions& o) {
  RunConfig c = load_config(g);
  if (o.mode) {
    try {
      c.mode = parse_encoding_mode(*o.mode);
    } catch (const Error& e) {
      throw Error(ErrorCode::Config, e.what());
    }
  }
  if (o.epochs) c.train.epochs = *o.epochs;
  if (o.hidden) c.hidden_units = *o.hidden;
  if (o.samples) c.patch.samples = *o.samples;
  if (o.learning_rate) c.train.learning_rate = *o.learning_rate;
  c = parse_run_config(c.to_json());  // re-validate after overrides
  apply_threads(g, c);
  const fs::path out(o.out);

  if (c.mode == EncodingMode::Joint) {
    if (o.init_bank.empty())
      throw Error(ErrorCode::Config, "mode MD reuses a D-trained bank; pass --init-bank");
    BankMetadata meta;
    const FilterBank d = load_bank(o.init_bank, &meta);
    const auto r = train(c.train, PatchBatch(), EncodingMode::Joint, d.hidden_units(), &d);
    save_bank(out, r.bank, meta);
    save_transform(out, kWhiteningStem, load_transform(o.init_bank, meta.whitening));
    write_provenance(out / "provenance.json", "train", c, {o.init_bank}, {{"mode", "MD"}});
    log("re-tagged D bank as MD in " + out.string());
    return 0;
  }

  const Corpus corpus = load_corpus(o.corpus);
  const auto samples = sample_stereo_patches(corpus, c.patch.geometry, c.patch.samples,
                                             c.patch.require_ground_truth, c.seed);
  const Matrix left = rows_of(samples, false), right = rows_of(samples, true);

  PatchBatch raw;
  Matrix fit_rows;
  if (c.mode == EncodingMode::Depth) {
    raw.x = left;
    raw.y = right;
    fit_rows = stack(left, right);
  } else {
    const auto& ch = c.whitening.motion_channel;
    raw.x = ch == "left" ? left : ch == "right" ? right : stack(left, right);
    raw.y = raw.x;
    fit_rows = raw.x;
  }
  const auto white = fit_pca_whitening(fit_rows, c.keep_rule(), c.whitening.epsilon);
  PatchBatch data;
  data.x = apply_whitening_rows(white, raw.x);
  data.y = c.mode == EncodingMode::Depth ? apply_whitening_rows(white, raw.y) : data.x;
  log("whitened " + std::to_string(data.count()) + " samples: " + std::to_string(white.input_dim()) +
      " -> " + std::to_string(white.output_dim()) + " dims");

  const auto result = train(c.train, data, c.mode, c.hidden_units, nullptr,
                            [](std::size_t epoch, double obj) {
                              char line[96];
                              std::snprintf(line, sizeof line, "epoch %zu objective %.6f", epoch, obj);
                              log(line);
                            });
  const PatchGeometry& geo = c.patch.geometry;
  save_bank(out, result.bank, {geo.frames, geo.width * geo.height, kWhiteningStem});
  save_transform(out, kWhiteningStem, white);
  write_provenance(out / "provenance.json", "train", c, {o.corpus},
                   {{"mode", to_string(c.mode)},
                    {"initial_objective", result.initial_objective},
                    {"trace", result.trace}});
  return 0;
}

// ---------------------------------------------------------------- calibrate-depth

struct CalibrateOptions {
  std::string model;
  std::string corpus;
  std::string out;
  std::optional<std::size_t> samples;
};

struct LoadedModel {
  FilterBank bank;
  BankMetadata meta;
  WhiteningTransform whitening;
};

LoadedModel load_model(const fs::path& dir) {
  LoadedModel m;
  m.bank = load_bank(dir, &m.meta);
  m.whitening = load_transform(dir, m.meta.whitening);
  return m;
}

std::size_t patch_side(const LoadedModel& m) {
  const auto side = std::size_t(std::lround(std::sqrt(double(m.meta.frame_pixels))));
  if (side * side != m.meta.frame_pixels || m.meta.frames != 1)
    throw Error(ErrorCode::Config, "depth commands need a single-frame model with square patches");
  return side;
}

int cmd_calibrate(const Globals& g, const CalibrateOptions& o) {
  RunConfig c = load_config(g);
  if (o.samples) c.depth.samples = *o.samples;
  apply_threads(g, c);
  const LoadedModel m = load_model(o.model);
  if (m.bank.tied() || m.bank.mode() != EncodingMode::Depth)
    throw Error(ErrorCode::ModeMismatch, "depth calibration needs an SAE-D model");
  const std::size_t side = patch_side(m);

  const Corpus corpus = load_corpus(o.corpus);
  const auto samples =
      sample_stereo_patches(corpus, PatchGeometry{side, side, 1}, c.depth.samples, true, c.seed);
  PatchBatch batch(samples.size(), m.whitening.output_dim());
  Vector means(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Vector x = apply_whitening(m.whitening, samples[i].pair.x);
    const Vector y = apply_whitening(m.whitening, samples[i].pair.y);
    std::copy(x.begin(), x.end(), batch.x.row(i).begin());
    std::copy(y.begin(), y.end(), batch.y.row(i).begin());
    means[i] = nonzero_mean(samples[i].ground_truth->values);
  }
  const Vector edges =
      c.depth.binning == "quantile"
          ? fit_depth_bins(means, c.depth.bins)
          : linear_depth_bins(*std::min_element(means.begin(), means.end()),
                              *std::max_element(means.begin(), means.end()), c.depth.bins);
  std::vector<int> labels(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) labels[i] = bin_label(means[i], edges);

  const Matrix codes = encode_batch(m.bank, batch, EncodingMode::Depth);
  const auto fit = fit_calibrator(codes, labels, c.depth.calibrator, edges);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < codes.rows(); ++i)
    correct += predict_depth_label(fit.calibrator, codes.row(i)) == labels[i];
  const double delta = calibrate_delta(codes, c.interest.delta_factor);

  const fs::path out(o.out);
  save_calibrator(out, fit.calibrator);
  write_json(out / "interest.json", {{"delta", delta},
                                     {"delta_factor", c.interest.delta_factor},
                                     {"mode", "D"},
                                     {"config_digest", c.digest()}});
  const double acc = double(correct) / double(codes.rows());
  write_provenance(out / "provenance.json", "calibrate-depth", c, {o.model, o.corpus},
                   {{"training_accuracy", acc}, {"loss_trace", fit.loss_trace}});
  log("calibrator training accuracy " + std::to_string(acc));
  return 0;
}

// ---------------------------------------------------------------- depthmap

struct DepthmapOptions {
  std::string model;
  std::string calibrator;
  std::string left;
  std::string right;
  std::string out;
  std::optional<std::size_t> stride;
  bool mask = false;
};

int cmd_depthmap(const Globals& g, const DepthmapOptions& o) {
  RunConfig c = load_config(g);
  if (o.stride) c.depth.stride = *o.stride;
  apply_threads(g, c);
  const LoadedModel m = load_model(o.model);
  const std::size_t side = patch_side(m);
  const DepthCalibrator cal = load_calibrator(o.calibrator);
  const ImageFrame left = read_pgm_single(o.left), right = read_pgm_single(o.right);

  const auto codes = dense_codes(m.bank, m.whitening, left, right, side, c.depth.stride);
  DepthMap map = predict_depth_map(cal, codes);
  std::vector<fs::path> inputs{o.model, o.calibrator, o.left, o.right};
  const fs::path out(o.out);
  if (!out.parent_path().empty()) fs::create_directories(out.parent_path());
  json extra{{"grid_width", map.width}, {"grid_height", map.height}, {"stride", map.stride},
             {"patch", map.patch}};
  if (o.mask) {
    const json interest = read_json(fs::path(o.calibrator) / "interest.json");
    const double delta = interest.at("delta").get<double>();
    const auto keep = threshold_mask(codes.codes, delta);
    map = mask_depth_map(map, keep);
    std::vector<bool> bits(keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i) bits[i] = !keep[i];
    write_pbm(fs::path(out.string() + ".mask.pbm"), map.width, map.height, bits);
    extra["delta"] = delta;
    extra["retained"] = std::count(keep.begin(), keep.end(), true);
  }
  write_pgm_levels(fs::path(out.string() + ".pgm"), map.width, map.height, depth_map_levels(map));
  save_depth_map(fs::path(out.string() + ".sstf"), map);
  write_provenance(fs::path(out.string() + ".json"), "depthmap", c, inputs, extra);
  log("depth map " + std::to_string(map.width) + "x" + std::to_string(map.height));
  return 0;
}

// ---------------------------------------------------------------- extract

struct ExtractOptions {
  std::string model;
  std::string corpus;
  std::string out;
  std::string reducer;
  bool fit_reducer = false;
};

int cmd_extract(const Globals& g, const ExtractOptions& o) {
  const RunConfig c = load_config(g);
  apply_threads(g, c);
  if (o.fit_reducer == !o.reducer.empty())
    throw Error(ErrorCode::Config, "pass exactly one of --fit-reducer or --reducer");
  const LoadedModel m = load_model(o.model);
  const EncodingMode mode = m.bank.mode();
  if (m.meta.frames != c.blocks.sub_t || m.meta.frame_pixels != c.blocks.sub_h * c.blocks.sub_w)
    throw Error(ErrorCode::Config, "model patch size does not match the configured sub-block");

  const fs::path manifest(o.corpus);
  const auto records = read_manifest(manifest);
  const Corpus corpus = load_corpus(manifest);
  std::vector<SuperBlockCodes> codes;
  for (const auto& item : corpus)
    codes.push_back(extract_codes(item.sequence, m.bank, mode, c.blocks, m.whitening));

  const fs::path out(o.out);
  fs::create_directories(out);
  WhiteningTransform reducer;
  double delta = 0.0;
  if (o.fit_reducer) {
    std::size_t rows = 0;
    for (const auto& s : codes) rows += s.codes.rows();
    Matrix all(rows, codes.front().codes.cols());
    Vector norms;
    std::size_t r = 0;
    for (const auto& s : codes) {
      std::copy(s.codes.data().begin(), s.codes.data().end(), all.row(r).begin());
      r += s.codes.rows();
      norms.insert(norms.end(), s.norms.begin(), s.norms.end());
    }
    const std::size_t d_out = c.reducer_dim ? c.reducer_dim : m.bank.hidden_units();
    reducer = pca_reduce_fit(all, std::min(d_out, all.cols()));
    delta = calibrate_delta(norms, c.interest.delta_factor);
    save_transform(out, kReducerStem, reducer);
    write_json(out / "interest.json", {{"delta", delta},
                                       {"delta_factor", c.interest.delta_factor},
                                       {"mode", to_string(mode)},
                                       {"config_digest", c.digest()}});
  } else {
    reducer = load_transform(o.reducer, kReducerStem);
    delta = read_json(fs::path(o.reducer) / "interest.json").at("delta").get<double>();
  }

  json index = json::array();
  char name[64];
  for (std::size_t i = 0; i < codes.size(); ++i) {
    const auto d = reduce_descriptors(codes[i], reducer);
    std::snprintf(name, sizeof name, "desc_%04zu.sstf", i);
    save_tensor(out / name, to_tensor(d.descriptors));
    const auto keep = threshold_mask(d.norms, delta);
    json entry{{"descriptors", name},
               {"source", records[i].left},
               {"count", d.descriptors.rows()},
               {"retained", std::count(keep.begin(), keep.end(), true)},
               {"norms", d.norms}};
    entry["label"] = records[i].label ? json(*records[i].label) : json();
    index.push_back(entry);
  }
  write_json(out / "descriptors.json", {{"mode", to_string(mode)},
                                        {"dim", reducer.output_dim()},
                                        {"delta", delta},
                                        {"reducer", o.fit_reducer ? out.string() : o.reducer},
                                        {"config_digest", c.digest()},
                                        {"items", index}});
  std::vector<fs::path> inputs{o.model, o.corpus};
  if (!o.fit_reducer) inputs.push_back(o.reducer);
  write_provenance(out / "provenance.json", "extract", c, inputs, {{"clips", codes.size()}});
  log("extracted descriptors for " + std::to_string(codes.size()) + " clips");
  return 0;
}

// ---------------------------------------------------------------- codebook

struct DescriptorItem {
  Matrix descriptors;
  Vector norms;
  std::optional<int> label;
};

struct DescriptorIndex {
  double delta = 0.0;
  std::vector<DescriptorItem> items;
};

DescriptorIndex load_descriptors(const fs::path& dir) {
  const json j = read_json(dir / "descriptors.json");
  DescriptorIndex idx;
  idx.delta = j.at("delta").get<double>();
  for (const auto& e : j.at("items")) {
    DescriptorItem item;
    item.descriptors = tensor_to_matrix(load_tensor(dir / e.at("descriptors").get<std::string>()));
    item.norms = e.at("norms").get<Vector>();
    if (!e.at("label").is_null()) item.label = e.at("label").get<int>();
    idx.items.push_back(std::move(item));
  }
  return idx;
}

struct CodebookOptions {
  std::string descriptors;
  std::string out;
  std::optional<std::size_t> words;
};

int cmd_codebook(const Globals& g, const CodebookOptions& o) {
  RunConfig c = load_config(g);
  if (o.words) c.codebook.words = *o.words;
  apply_threads(g, c);
  const auto idx = load_descriptors(o.descriptors);
  std::size_t rows = 0;
  for (const auto& it : idx.items) rows += it.descriptors.rows();
  Matrix all(rows, idx.items.front().descriptors.cols());
  std::size_t r = 0;
  for (const auto& it : idx.items) {
    std::copy(it.descriptors.data().begin(), it.descriptors.data().end(), all.row(r).begin());
    r += it.descriptors.rows();
  }
  const auto cb = build_codebook(all, c.codebook.words, c.codebook.max_iters, c.seed);
  const fs::path out(o.out);
  if (!out.parent_path().empty()) fs::create_directories(out.parent_path());
  save_codebook(out, cb);
  write_provenance(fs::path(out.string() + ".provenance.json"), "codebook", c, {o.descriptors},
                   {{"iterations", cb.iterations}, {"objective", cb.objective}});
  log("codebook of " + std::to_string(cb.words()) + " words after " +
      std::to_string(cb.iterations) + " iterations");
  return 0;
}

// ---------------------------------------------------------------- classify

struct ClassifyOptions {
  std::string codebook;
  std::string train;
  std::string test;
  std::string out;
};

Matrix histograms(const DescriptorIndex& idx, const Codebook& cb, bool use_interest,
                  std::size_t* degenerate) {
  Matrix h(idx.items.size(), cb.words());
  for (std::size_t i = 0; i < idx.items.size(); ++i) {
    const auto& it = idx.items[i];
    const auto keep = use_interest ? threshold_mask(it.norms, idx.delta) : std::vector<bool>{};
    const auto bow = quantize_histogram(it.descriptors, cb, keep);
    *degenerate += bow.degenerate;
    std::copy(bow.frequencies.begin(), bow.frequencies.end(), h.row(i).begin());
  }
  return h;
}

std::vector<int> labels_of(const DescriptorIndex& idx, const std::string& what) {
  std::vector<int> labels;
  for (const auto& it : idx.items) {
    if (!it.label) throw Error(ErrorCode::InvalidArgument, what + " descriptors lack class labels");
    labels.push_back(*it.label);
  }
  return labels;
}

int cmd_classify(const Globals& g, const ClassifyOptions& o) {
  const RunConfig c = load_config(g);
  apply_threads(g, c);
  const Codebook cb = load_codebook(o.codebook);
  const auto train_idx = load_descriptors(o.train);
  const auto test_idx = load_descriptors(o.test);
  std::size_t degenerate = 0;
  const Matrix htr = histograms(train_idx, cb, c.use_interest, &degenerate);
  const Matrix hte = histograms(test_idx, cb, c.use_interest, &degenerate);
  const auto clf = train_classifier(htr, labels_of(train_idx, "training"), c.classifier);

  json items = json::array();
  for (std::size_t i = 0; i < hte.rows(); ++i) {
    const auto conf = predict_confidences(clf, hte.row(i));
    json e{{"confidences", conf}, {"predicted", clf.classes[argmax(conf)]}};
    e["label"] = test_idx.items[i].label ? json(*test_idx.items[i].label) : json();
    items.push_back(e);
  }
  const fs::path out(o.out);
  save_classifier(out / "classifier", clf);
  write_json(out / "confidences.json",
             {{"classes", clf.classes}, {"items", items}, {"config_digest", c.digest()}});
  write_provenance(out / "provenance.json", "classify", c, {o.codebook, o.train, o.test},
                   {{"degenerate_histograms", degenerate}});
  log("classified " + std::to_string(hte.rows()) + " clips");
  return 0;
}

// ---------------------------------------------------------------- eval

struct EvalOptions {
  std::string confidences;
  std::string fuse;
  std::string out;
};

struct ConfidenceFile {
  std::vector<int> classes;
  Matrix conf;
  std::vector<int> labels;
};

ConfidenceFile read_confidences(const fs::path& path) {
  const json j = read_json(path);
  ConfidenceFile f;
  f.classes = j.at("classes").get<std::vector<int>>();
  const auto& items = j.at("items");
  f.conf = Matrix(items.size(), f.classes.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto v = items[i].at("confidences").get<Vector>();
    if (v.size() != f.classes.size())
      throw Error(ErrorCode::DimensionMismatch, "confidence row length differs from class list");
    std::copy(v.begin(), v.end(), f.conf.row(i).begin());
    if (items[i].at("label").is_null())
      throw Error(ErrorCode::InvalidArgument, "evaluation needs labelled items");
    f.labels.push_back(items[i].at("label").get<int>());
  }
  return f;
}

int cmd_eval(const Globals& g, const EvalOptions& o) {
  const RunConfig c = load_config(g);
  ConfidenceFile f = read_confidences(o.confidences);
  std::vector<fs::path> inputs{o.confidences};
  if (!o.fuse.empty()) {
    const ConfidenceFile other = read_confidences(o.fuse);
    if (other.labels != f.labels)
      throw Error(ErrorCode::DimensionMismatch, "fused confidence files cover different items");
    for (std::size_t i = 0; i < f.conf.rows(); ++i) {
      const auto fused = fuse_average(f.conf.row(i), f.classes, other.conf.row(i), other.classes);
      std::copy(fused.begin(), fused.end(), f.conf.row(i).begin());
    }
    inputs.push_back(o.fuse);
  }
  const auto report = evaluate(f.conf, f.classes, f.labels);
  json per_class = json::object();
  for (std::size_t k = 0; k < report.ap_classes.size(); ++k)
    per_class[std::to_string(report.ap_classes[k])] = report.per_class_ap[k];
  const json j{{"per_class_ap", per_class},
               {"mean_ap", report.mean_ap},
               {"cc_rate", report.cc_rate},
               {"fused", !o.fuse.empty()},
               {"config_digest", c.digest()},
               {"inputs", describe_inputs(inputs)}};
  const fs::path out(o.out);
  if (!out.parent_path().empty()) fs::create_directories(out.parent_path());
  write_json(out, j);
  std::printf("mean_ap %.6f cc_rate %.6f\n", report.mean_ap, report.cc_rate);
  return 0;
}

int exit_code_for(const Error& e) {
  return e.code() == ErrorCode::Config ? kExitUsage : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synchrony autoencoder toolkit: depth maps and action recognition"};
  app.set_version_flag("--version", SSYNC_VERSION);
  app.require_subcommand(1);

  Globals g;
  app.add_option("--config", g.config_path, "Run configuration (JSON)")->check(CLI::ExistingFile);
  app.add_option("--threads", g.threads, "Worker cap (falls back to SSYNC_THREADS)")
      ->check(CLI::NonNegativeNumber);
  app.add_option_function<std::uint64_t>(
      "--seed",
      [&](std::uint64_t s) {
        g.seed = s;
        g.seed_set = true;
      },
      "Override the config seed");

  GenOptions gen;
  auto* sc_gen = app.add_subcommand("gen", "Write a synthetic PGM corpus and manifest");
  sc_gen->add_option("kind", gen.kind, "stereogram | moving | videos")
      ->required()
      ->check(CLI::IsMember({"stereogram", "moving", "videos"}));
  sc_gen->add_option("--out", gen.out, "Output directory")->required();
  sc_gen->add_option("--count", gen.count, "Number of items")->check(CLI::PositiveNumber);
  sc_gen->add_option("--width", gen.width)->check(CLI::PositiveNumber);
  sc_gen->add_option("--height", gen.height)->check(CLI::PositiveNumber);
  sc_gen->add_option("--frames", gen.frames, "Frames per clip (moving, videos)")
      ->check(CLI::PositiveNumber);
  sc_gen->add_option("--disparity", gen.disparity, "Fixed disparity; default draws 0..max");
  sc_gen->add_option("--max-disparity", gen.max_disparity)->check(CLI::NonNegativeNumber);
  sc_gen->add_option("--velocity-x", gen.velocity_x);
  sc_gen->add_option("--velocity-y", gen.velocity_y);
  sc_gen->add_option("--density", gen.density, "Dot density in (0,1)");
  sc_gen->add_flag("--with-depth", gen.with_depth, "Write ground-truth depth (stereogram)");

  TrainOptions tr;
  auto* sc_train = app.add_subcommand("train", "Whiten sampled patches and train a filter bank");
  sc_train->add_option("--corpus", tr.corpus, "Manifest")->check(CLI::ExistingFile);
  sc_train->add_option("--out", tr.out, "Model directory")->required();
  sc_train->add_option("--mode", tr.mode, "D | M | MD");
  sc_train->add_option("--init-bank", tr.init_bank, "D model directory (mode MD)");
  sc_train->add_option("--epochs", tr.epochs);
  sc_train->add_option("--hidden", tr.hidden, "Hidden units Q");
  sc_train->add_option("--samples", tr.samples, "Training patch pairs");
  sc_train->add_option("--learning-rate", tr.learning_rate);

  CalibrateOptions cal;
  auto* sc_cal = app.add_subcommand("calibrate-depth", "Fit the depth-bin calibrator");
  sc_cal->add_option("--model", cal.model)->required()->check(CLI::ExistingDirectory);
  sc_cal->add_option("--corpus", cal.corpus, "Manifest with depth")->required()->check(CLI::ExistingFile);
  sc_cal->add_option("--out", cal.out, "Calibrator directory")->required();
  sc_cal->add_option("--samples", cal.samples);

  DepthmapOptions dm;
  auto* sc_dm = app.add_subcommand("depthmap", "Dense depth-label map for one stereo pair");
  sc_dm->add_option("--model", dm.model)->required()->check(CLI::ExistingDirectory);
  sc_dm->add_option("--calibrator", dm.calibrator)->required()->check(CLI::ExistingDirectory);
  sc_dm->add_option("--left", dm.left)->required()->check(CLI::ExistingFile);
  sc_dm->add_option("--right", dm.right)->required()->check(CLI::ExistingFile);
  sc_dm->add_option("--out", dm.out, "Output prefix (.pgm, .sstf, .json)")->required();
  sc_dm->add_option("--stride", dm.stride)->check(CLI::PositiveNumber);
  sc_dm->add_flag("--mask", dm.mask, "Mask cells below the interest threshold");

  ExtractOptions ex;
  auto* sc_ex = app.add_subcommand("extract", "Super-block descriptors for every clip");
  sc_ex->add_option("--model", ex.model)->required()->check(CLI::ExistingDirectory);
  sc_ex->add_option("--corpus", ex.corpus, "Manifest of clips")->required()->check(CLI::ExistingFile);
  sc_ex->add_option("--out", ex.out, "Descriptor directory")->required();
  sc_ex->add_flag("--fit-reducer", ex.fit_reducer, "Fit the PCA reducer on these clips");
  sc_ex->add_option("--reducer", ex.reducer, "Descriptor directory holding a fitted reducer")
      ->check(CLI::ExistingDirectory);

  CodebookOptions cbo;
  auto* sc_cb = app.add_subcommand("codebook", "k-means codebook over descriptors");
  sc_cb->add_option("--descriptors", cbo.descriptors)->required()->check(CLI::ExistingDirectory);
  sc_cb->add_option("--out", cbo.out, "Codebook file (.sstf)")->required();
  sc_cb->add_option("--words", cbo.words)->check(CLI::PositiveNumber);

  ClassifyOptions cl;
  auto* sc_cl = app.add_subcommand("classify", "Train on one descriptor set, score another");
  sc_cl->add_option("--codebook", cl.codebook)->required()->check(CLI::ExistingFile);
  sc_cl->add_option("--train", cl.train)->required()->check(CLI::ExistingDirectory);
  sc_cl->add_option("--test", cl.test)->required()->check(CLI::ExistingDirectory);
  sc_cl->add_option("--out", cl.out)->required();

  EvalOptions ev;
  auto* sc_ev = app.add_subcommand("eval", "Average precision and CC rate");
  sc_ev->add_option("--confidences", ev.confidences)->required()->check(CLI::ExistingFile);
  sc_ev->add_option("--fuse", ev.fuse, "Second confidence file, averaged in")
      ->check(CLI::ExistingFile);
  sc_ev->add_option("--out", ev.out, "Report (.json)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*sc_gen) return cmd_gen(g, gen);
    if (*sc_train) {
      if (tr.corpus.empty() && tr.init_bank.empty())
        throw Error(ErrorCode::Config, "train needs --corpus (or --init-bank for MD)");
      return cmd_train(g, tr);
    }
    if (*sc_cal) return cmd_calibrate(g, cal);
    if (*sc_dm) return cmd_depthmap(g, dm);
    if (*sc_ex) return cmd_extract(g, ex);
    if (*sc_cb) return cmd_codebook(g, cbo);
    if (*sc_cl) return cmd_classify(g, cl);
    if (*sc_ev) return cmd_eval(g, ev);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
