#include "ssync/config.hpp"

#include <fstream>
#include <set>

#include "ssync/digest.hpp"
#include "ssync/error.hpp"

namespace ssync {

using nlohmann::json;

namespace {

// Reads known keys from one JSON object and rejects everything else.
class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw Error(ErrorCode::Config, name_ + " must be a JSON object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw Error(ErrorCode::Config, name_ + "." + key + " has the wrong type");
    }
  }

  template <typename T>
  void get_optional(const char* key, std::optional<T>& out) {
    seen_.insert(key);
    if (!j_.contains(key) || j_.at(key).is_null()) return;
    T v{};
    get(key, v);
    out = v;
  }

  const json* child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw Error(ErrorCode::Config, "unknown key " + name_ + "." + k);
  }

 private:
  const json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

void check(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::Config, what);
}

std::string pairing_name(JacobianPairing p) {
  return p == JacobianPairing::Analytic ? "analytic" : "as_printed";
}

}  // namespace

json RunConfig::to_json() const {
  json j;
  j["seed"] = seed;
  j["threads"] = threads;
  j["mode"] = to_string(mode);
  j["hidden_units"] = hidden_units;
  j["patch"] = {{"width", patch.geometry.width},
                {"height", patch.geometry.height},
                {"frames", patch.geometry.frames},
                {"samples", patch.samples},
                {"require_ground_truth", patch.require_ground_truth}};
  j["whitening"] = {{"epsilon", whitening.epsilon},
                    {"variance_keep", whitening.variance_keep ? json(*whitening.variance_keep) : json()},
                    {"components", whitening.components ? json(*whitening.components) : json()},
                    {"motion_channel", whitening.motion_channel}};
  j["train"] = {{"lambda", train.lambda},
                {"learning_rate", train.learning_rate},
                {"momentum", train.momentum},
                {"batch_size", train.batch_size},
                {"epochs", train.epochs},
                {"init_scale", train.init_scale},
                {"pairing", pairing_name(train.pairing)}};
  j["blocks"] = {{"super_t", blocks.super_t},
                 {"super_h", blocks.super_h},
                 {"super_w", blocks.super_w},
                 {"super_stride_t", blocks.super_stride_t},
                 {"super_stride_s", blocks.super_stride_s},
                 {"sub_t", blocks.sub_t},
                 {"sub_h", blocks.sub_h},
                 {"sub_w", blocks.sub_w},
                 {"sub_stride_t", blocks.sub_stride_t},
                 {"sub_stride_s", blocks.sub_stride_s}};
  j["interest"] = {{"enabled", use_interest},
                   {"delta_factor", interest.delta_factor}};
  j["depth"] = {{"bins", depth.bins},
                {"binning", depth.binning},
                {"stride", depth.stride},
                {"samples", depth.samples},
                {"epochs", depth.calibrator.epochs},
                {"learning_rate", depth.calibrator.learning_rate},
                {"batch_size", depth.calibrator.batch_size},
                {"l2", depth.calibrator.l2}};
  j["codebook"] = {{"words", codebook.words}, {"max_iters", codebook.max_iters}};
  j["reducer_dim"] = reducer_dim;
  j["classifier"] = {{"epochs", classifier.epochs},
                     {"learning_rate", classifier.learning_rate},
                     {"l2", classifier.l2}};
  j["corpus"] = corpus;
  return j;
}

std::string RunConfig::digest() const { return sha256_hex(to_json().dump()); }

RunConfig parse_run_config(const json& j) {
  RunConfig c;
  Section top(j, "config");
  top.get("seed", c.seed);
  top.get("threads", c.threads);
  std::string mode = to_string(c.mode);
  top.get("mode", mode);
  try {
    c.mode = parse_encoding_mode(mode);
  } catch (const Error& e) {
    throw Error(ErrorCode::Config, e.what());
  }
  top.get("hidden_units", c.hidden_units);
  top.get("reducer_dim", c.reducer_dim);
  top.get("corpus", c.corpus);

  if (const json* p = top.child("patch")) {
    Section s(*p, "patch");
    s.get("width", c.patch.geometry.width);
    s.get("height", c.patch.geometry.height);
    s.get("frames", c.patch.geometry.frames);
    s.get("samples", c.patch.samples);
    s.get("require_ground_truth", c.patch.require_ground_truth);
    s.finish();
  }
  if (const json* p = top.child("whitening")) {
    Section s(*p, "whitening");
    s.get("epsilon", c.whitening.epsilon);
    s.get_optional("variance_keep", c.whitening.variance_keep);
    s.get_optional("components", c.whitening.components);
    s.get("motion_channel", c.whitening.motion_channel);
    s.finish();
  }
  if (const json* p = top.child("train")) {
    Section s(*p, "train");
    s.get("lambda", c.train.lambda);
    s.get("learning_rate", c.train.learning_rate);
    s.get("momentum", c.train.momentum);
    s.get("batch_size", c.train.batch_size);
    s.get("epochs", c.train.epochs);
    s.get("init_scale", c.train.init_scale);
    std::string pairing = pairing_name(c.train.pairing);
    s.get("pairing", pairing);
    check(pairing == "analytic" || pairing == "as_printed",
          "train.pairing must be 'analytic' or 'as_printed'");
    c.train.pairing = pairing == "analytic" ? JacobianPairing::Analytic : JacobianPairing::AsPrinted;
    s.finish();
  }
  if (const json* p = top.child("blocks")) {
    Section s(*p, "blocks");
    s.get("super_t", c.blocks.super_t);
    s.get("super_h", c.blocks.super_h);
    s.get("super_w", c.blocks.super_w);
    s.get("super_stride_t", c.blocks.super_stride_t);
    s.get("super_stride_s", c.blocks.super_stride_s);
    s.get("sub_t", c.blocks.sub_t);
    s.get("sub_h", c.blocks.sub_h);
    s.get("sub_w", c.blocks.sub_w);
    s.get("sub_stride_t", c.blocks.sub_stride_t);
    s.get("sub_stride_s", c.blocks.sub_stride_s);
    s.finish();
  }
  if (const json* p = top.child("interest")) {
    Section s(*p, "interest");
    s.get("enabled", c.use_interest);
    s.get("delta_factor", c.interest.delta_factor);
    s.finish();
  }
  if (const json* p = top.child("depth")) {
    Section s(*p, "depth");
    s.get("bins", c.depth.bins);
    s.get("binning", c.depth.binning);
    s.get("stride", c.depth.stride);
    s.get("samples", c.depth.samples);
    s.get("epochs", c.depth.calibrator.epochs);
    s.get("learning_rate", c.depth.calibrator.learning_rate);
    s.get("batch_size", c.depth.calibrator.batch_size);
    s.get("l2", c.depth.calibrator.l2);
    s.finish();
  }
  if (const json* p = top.child("codebook")) {
    Section s(*p, "codebook");
    s.get("words", c.codebook.words);
    s.get("max_iters", c.codebook.max_iters);
    s.finish();
  }
  if (const json* p = top.child("classifier")) {
    Section s(*p, "classifier");
    s.get("epochs", c.classifier.epochs);
    s.get("learning_rate", c.classifier.learning_rate);
    s.get("l2", c.classifier.l2);
    s.finish();
  }
  top.finish();

  c.depth.calibrator.bins = c.depth.bins;
  c.depth.calibrator.seed = c.seed;
  c.classifier.seed = c.seed;
  c.train.seed = c.seed;

  check(c.hidden_units >= 1, "hidden_units must be >= 1");
  check(c.patch.geometry.width >= 1 && c.patch.geometry.height >= 1 && c.patch.geometry.frames >= 1,
        "patch geometry must be positive");
  check(c.whitening.motion_channel == "left" || c.whitening.motion_channel == "right" ||
            c.whitening.motion_channel == "both",
        "whitening.motion_channel must be left, right or both");
  check(c.depth.binning == "quantile" || c.depth.binning == "linear",
        "depth.binning must be quantile or linear");
  check(c.depth.bins >= 2 && c.depth.stride >= 1, "depth bins >= 2 and stride >= 1 required");
  check(c.codebook.words >= 1, "codebook.words must be >= 1");
  check(c.interest.delta_factor >= 0.0, "interest.delta_factor must be >= 0");
  try {
    c.train.validate();
    c.blocks.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::Config, e.what());
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Config, "cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Config, "config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_run_config(j);
}

}  // namespace ssync
