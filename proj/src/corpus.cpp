#include "ssync/corpus.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include "ssync/error.hpp"

namespace ssync {

PatchBatch PatchBatch::from_pairs(std::span<const PatchPair> pairs) {
  if (pairs.empty()) return {};
  PatchBatch b(pairs.size(), pairs.front().size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    require(pairs[i].x.size() == b.dim() && pairs[i].y.size() == b.dim(),
            ErrorCode::DimensionMismatch, "pairs in a batch must share one length");
    std::copy(pairs[i].x.begin(), pairs[i].x.end(), b.x.row(i).begin());
    std::copy(pairs[i].y.begin(), pairs[i].y.end(), b.y.row(i).begin());
  }
  return b;
}

PatchBatch PatchBatch::gather(std::span<const std::size_t> rows) const {
  PatchBatch b(rows.size(), dim());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy(x.row(rows[i]).begin(), x.row(rows[i]).end(), b.x.row(i).begin());
    std::copy(y.row(rows[i]).begin(), y.row(rows[i]).end(), b.y.row(i).begin());
  }
  return b;
}

std::vector<ManifestRecord> parse_manifest(const std::string& text) {
  std::vector<ManifestRecord> records;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (std::size_t tab; (tab = line.find('\t', start)) != std::string::npos; start = tab + 1)
      fields.push_back(line.substr(start, tab - start));
    fields.push_back(line.substr(start));
    require(fields.size() >= 2 && fields.size() <= 4, ErrorCode::MalformedHeader,
            "manifest line " + std::to_string(line_no) + " needs 2 to 4 tab-separated fields");
    ManifestRecord rec{fields[0], fields[1], std::nullopt, std::nullopt};
    require(rec.left != "-" && rec.right != "-", ErrorCode::MalformedHeader,
            "manifest line " + std::to_string(line_no) + " lacks a left or right image");
    if (fields.size() >= 3 && fields[2] != "-") rec.depth = fields[2];
    if (fields.size() == 4 && fields[3] != "-") {
      try {
        std::size_t used = 0;
        rec.label = std::stoi(fields[3], &used);
        require(used == fields[3].size(), ErrorCode::MalformedHeader, "trailing characters");
      } catch (const std::logic_error&) {
        throw Error(ErrorCode::MalformedHeader,
                    "manifest line " + std::to_string(line_no) + " has a non-integer class");
      }
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::string format_manifest(const std::vector<ManifestRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += r.left + '\t' + r.right + '\t' + r.depth.value_or("-") + '\t' +
           (r.label ? std::to_string(*r.label) : std::string("-")) + '\n';
  }
  return out;
}

std::vector<ManifestRecord> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::Io, "cannot open manifest " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_manifest(ss.str());
}

void write_manifest(const std::filesystem::path& path, const std::vector<ManifestRecord>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorCode::Io, "cannot open " + path.string() + " for writing");
  out << format_manifest(records);
}

Corpus load_corpus(const std::filesystem::path& manifest_path) {
  const auto base = manifest_path.parent_path();
  auto resolve = [&](const std::string& p) {
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp : base / fp;
  };
  Corpus corpus;
  for (const auto& rec : read_manifest(manifest_path)) {
    CorpusItem item;
    item.sequence.left = read_pgm(resolve(rec.left));
    item.sequence.right = read_pgm(resolve(rec.right));
    item.sequence.label = rec.label;
    item.sequence.validate();
    if (rec.depth) {
      item.depth = read_pgm_single(resolve(*rec.depth));
      require(item.depth->width == item.sequence.width() &&
                  item.depth->height == item.sequence.height(),
              ErrorCode::DimensionMismatch, "depth map size differs from its image pair");
    }
    corpus.push_back(std::move(item));
  }
  return corpus;
}

bool GroundTruthPatch::has_data() const {
  for (double v : values)
    if (v != 0.0) return true;
  return false;
}

Vector crop_block(const std::vector<ImageFrame>& frames, const CropWindow& w,
                  const PatchGeometry& g) {
  Vector out;
  out.reserve(g.pixel_count());
  for (std::size_t t = 0; t < g.frames; ++t) {
    const ImageFrame& f = frames[w.frame + t];
    for (std::size_t r = 0; r < g.height; ++r) {
      const double* row = f.pixels.data() + (w.row + r) * f.width + w.col;
      out.insert(out.end(), row, row + g.width);
    }
  }
  return out;
}

std::vector<SampledPatch> sample_stereo_patches(const Corpus& corpus, const PatchGeometry& geometry,
                                                std::size_t count, bool require_ground_truth,
                                                std::uint64_t seed) {
  std::vector<SampledPatch> out;
  if (count == 0) return out;
  require(!corpus.empty(), ErrorCode::InvalidArgument, "corpus is empty");
  require(geometry.width >= 1 && geometry.height >= 1 && geometry.frames >= 1,
          ErrorCode::InvalidArgument, "patch geometry must be positive");
  for (const auto& item : corpus) {
    require(geometry.width <= item.sequence.width() && geometry.height <= item.sequence.height() &&
                geometry.frames <= item.sequence.length(),
            ErrorCode::OutOfRange, "patch does not fit inside a corpus frame");
  }
  if (require_ground_truth) {
    bool any = false;
    for (const auto& item : corpus) any = any || item.depth.has_value();
    require(any, ErrorCode::Unsatisfiable, "no corpus item carries ground-truth depth");
  }

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick_item(0, corpus.size() - 1);
  const std::size_t max_attempts = 100 * count;
  out.reserve(count);
  for (std::size_t attempt = 0; out.size() < count; ++attempt) {
    require(attempt < max_attempts, ErrorCode::Unsatisfiable,
            "could not find enough windows with ground truth after " +
                std::to_string(max_attempts) + " attempts");
    CropWindow w;
    w.item = pick_item(rng);
    const auto& seq = corpus[w.item].sequence;
    w.frame = std::uniform_int_distribution<std::size_t>(0, seq.length() - geometry.frames)(rng);
    w.row = std::uniform_int_distribution<std::size_t>(0, seq.height() - geometry.height)(rng);
    w.col = std::uniform_int_distribution<std::size_t>(0, seq.width() - geometry.width)(rng);

    SampledPatch s;
    s.window = w;
    if (require_ground_truth) {
      const auto& depth = corpus[w.item].depth;
      if (!depth) continue;
      GroundTruthPatch gt;
      gt.window = w;
      gt.width = geometry.width;
      gt.height = geometry.height;
      gt.values.reserve(geometry.width * geometry.height);
      for (std::size_t r = 0; r < geometry.height; ++r) {
        const double* row = depth->pixels.data() + (w.row + r) * depth->width + w.col;
        gt.values.insert(gt.values.end(), row, row + geometry.width);
      }
      if (!gt.has_data()) continue;
      s.ground_truth = std::move(gt);
    }
    s.pair.x = crop_block(seq.left, w, geometry);
    s.pair.y = crop_block(seq.right, w, geometry);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace ssync
