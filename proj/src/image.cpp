#include "ssync/image.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

#include "ssync/error.hpp"

namespace ssync {

void ImageFrame::validate() const {
  require(pixels.size() == width * height, ErrorCode::DimensionMismatch,
          "frame pixel count does not match width*height");
  for (double p : pixels) require(std::isfinite(p), ErrorCode::InvalidArgument, "non-finite pixel");
}

void StereoSequence::validate() const {
  require(!left.empty() && left.size() == right.size(), ErrorCode::InvalidArgument,
          "stereo sequence needs T >= 1 frames on both channels");
  for (const auto* channel : {&left, &right})
    for (const auto& f : *channel) {
      f.validate();
      require(f.width == channel->front().width && f.height == channel->front().height,
              ErrorCode::DimensionMismatch, "frame sizes differ within a channel");
    }
}

ImageFrame downsample(const ImageFrame& frame, std::size_t new_w, std::size_t new_h) {
  require(new_w >= 1 && new_h >= 1, ErrorCode::InvalidArgument, "target size must be >= 1");
  require(new_w <= frame.width && new_h <= frame.height, ErrorCode::InvalidArgument,
          "downsample cannot upsample");
  const double sx = double(frame.width) / double(new_w);
  const double sy = double(frame.height) / double(new_h);

  ImageFrame out(new_w, new_h);
  for (std::size_t r = 0; r < new_h; ++r) {
    const double y0 = r * sy, y1 = (r + 1) * sy;
    for (std::size_t c = 0; c < new_w; ++c) {
      const double x0 = c * sx, x1 = (c + 1) * sx;
      double acc = 0.0, area = 0.0;
      for (auto yi = static_cast<std::size_t>(y0); yi < frame.height && double(yi) < y1; ++yi) {
        const double wy = std::min(y1, double(yi + 1)) - std::max(y0, double(yi));
        if (wy <= 0) continue;
        for (auto xi = static_cast<std::size_t>(x0); xi < frame.width && double(xi) < x1; ++xi) {
          const double wx = std::min(x1, double(xi + 1)) - std::max(x0, double(xi));
          if (wx <= 0) continue;
          acc += wx * wy * frame.at(yi, xi);
          area += wx * wy;
        }
      }
      out.at(r, c) = acc / area;
    }
  }
  return out;
}

namespace {

// Reads the next whitespace-delimited header token, skipping '#' comments.
std::string next_token(const std::vector<unsigned char>& buf, std::size_t& pos) {
  while (pos < buf.size()) {
    if (buf[pos] == '#') {
      while (pos < buf.size() && buf[pos] != '\n') ++pos;
    } else if (std::isspace(buf[pos])) {
      ++pos;
    } else {
      break;
    }
  }
  std::string tok;
  while (pos < buf.size() && !std::isspace(buf[pos]) && buf[pos] != '#') tok += char(buf[pos++]);
  return tok;
}

std::size_t parse_size(const std::string& tok, const std::filesystem::path& path) {
  require(!tok.empty() && tok.find_first_not_of("0123456789") == std::string::npos,
          ErrorCode::MalformedHeader, "bad PGM header in " + path.string());
  return std::stoul(tok);
}

void write_bytes(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorCode::Io, "cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  require(static_cast<bool>(out), ErrorCode::Io, "write failed: " + path.string());
}

}  // namespace

std::vector<ImageFrame> read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::Io, "cannot open " + path.string());
  const std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                       std::istreambuf_iterator<char>());
  std::vector<ImageFrame> frames;
  std::size_t pos = 0;
  while (true) {
    std::size_t probe = pos;
    while (probe < buf.size() && std::isspace(buf[probe])) ++probe;
    if (probe >= buf.size()) break;
    require(next_token(buf, pos) == "P5", ErrorCode::MalformedHeader,
            "not a binary PGM: " + path.string());
    const auto w = parse_size(next_token(buf, pos), path);
    const auto h = parse_size(next_token(buf, pos), path);
    const auto maxval = parse_size(next_token(buf, pos), path);
    require(w >= 1 && h >= 1 && maxval >= 1 && maxval <= 255, ErrorCode::MalformedHeader,
            "unsupported PGM geometry in " + path.string());
    ++pos;  // single whitespace byte before raster
    require(pos + w * h <= buf.size(), ErrorCode::TruncatedPayload,
            "truncated PGM raster in " + path.string());
    ImageFrame f(w, h);
    for (std::size_t i = 0; i < w * h; ++i) f.pixels[i] = double(buf[pos + i]) / double(maxval);
    pos += w * h;
    frames.push_back(std::move(f));
  }
  require(!frames.empty(), ErrorCode::MalformedHeader, "empty PGM file " + path.string());
  return frames;
}

ImageFrame read_pgm_single(const std::filesystem::path& path) {
  auto frames = read_pgm(path);
  return std::move(frames.front());
}

void write_pgm(const std::filesystem::path& path, const std::vector<ImageFrame>& frames) {
  std::string bytes;
  for (const auto& f : frames) {
    bytes += "P5\n" + std::to_string(f.width) + " " + std::to_string(f.height) + "\n255\n";
    for (double p : f.pixels) {
      const double q = std::round(std::clamp(p, 0.0, 1.0) * 255.0);
      bytes += static_cast<char>(static_cast<unsigned char>(q));
    }
  }
  write_bytes(path, bytes);
}

void write_pgm(const std::filesystem::path& path, const ImageFrame& frame) {
  write_pgm(path, std::vector<ImageFrame>{frame});
}

void write_pgm_levels(const std::filesystem::path& path, std::size_t width, std::size_t height,
                      const std::vector<unsigned char>& levels) {
  require(levels.size() == width * height, ErrorCode::DimensionMismatch, "level count mismatch");
  std::string bytes = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  bytes.append(levels.begin(), levels.end());
  write_bytes(path, bytes);
}

void write_pbm(const std::filesystem::path& path, std::size_t width, std::size_t height,
               const std::vector<bool>& bits) {
  require(bits.size() == width * height, ErrorCode::DimensionMismatch, "mask size mismatch");
  std::string bytes = "P4\n" + std::to_string(width) + " " + std::to_string(height) + "\n";
  const std::size_t row_bytes = (width + 7) / 8;
  for (std::size_t r = 0; r < height; ++r) {
    std::string row(row_bytes, '\0');
    for (std::size_t c = 0; c < width; ++c)
      if (bits[r * width + c]) row[c / 8] = char(row[c / 8] | (0x80 >> (c % 8)));
    bytes += row;
  }
  write_bytes(path, bytes);
}

}  // namespace ssync
