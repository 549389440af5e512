#pragma once

// Binary images and the Netpbm subset used to move them on and off disk.
//
// Cell state 1 means "edge present". In PBM files a 1 bit is conventionally
// drawn black, so an edge map rendered by a PBM viewer shows black edges on
// white. PGM input is binarized with a fixed threshold of 128.

#include <cctype>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "caedge/errors.hpp"

namespace caedge {

inline constexpr unsigned kBinarizeThreshold = 128;
inline constexpr unsigned kPgmMaxValue = 255;

/// Row-major lattice of 0/1 cells, at least 1x1.
class BinaryGrid {
 public:
  BinaryGrid(std::size_t width, std::size_t height, std::uint8_t fill = 0)
      : width_(width), height_(height) {
    check_shape();
    if (fill > 1) throw std::invalid_argument("BinaryGrid: fill must be 0 or 1");
    cells_.assign(width * height, fill);
  }

  BinaryGrid(std::size_t width, std::size_t height, std::vector<std::uint8_t> cells)
      : width_(width), height_(height), cells_(std::move(cells)) {
    check_shape();
    if (cells_.size() != width_ * height_)
      throw std::invalid_argument("BinaryGrid: cell count " + std::to_string(cells_.size()) +
                                  " does not match " + std::to_string(width_) + "x" +
                                  std::to_string(height_));
    for (auto c : cells_)
      if (c > 1) throw std::invalid_argument("BinaryGrid: cell states must be 0 or 1");
  }

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return cells_.size(); }

  std::span<const std::uint8_t> cells() const noexcept { return cells_; }
  std::span<const std::uint8_t> row(std::size_t r) const noexcept {
    return std::span(cells_).subspan(r * width_, width_);
  }

  std::uint8_t at(std::size_t r, std::size_t c) const { return cells_.at(r * width_ + c); }

  void set(std::size_t r, std::size_t c, std::uint8_t v) {
    if (v > 1) throw std::invalid_argument("BinaryGrid::set: state must be 0 or 1");
    cells_.at(r * width_ + c) = v;
  }

  bool same_shape(const BinaryGrid& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const BinaryGrid&, const BinaryGrid&) = default;

 private:
  friend class GridWriter;

  void check_shape() const {
    if (width_ == 0 || height_ == 0)
      throw std::invalid_argument("BinaryGrid: width and height must be at least 1");
  }

  std::size_t width_;
  std::size_t height_;
  std::vector<std::uint8_t> cells_;
};

/// Mutable access to a grid's cell buffer for kernels that fill every cell.
/// Writers must store only 0 or 1.
class GridWriter {
 public:
  explicit GridWriter(BinaryGrid& grid) : grid_(grid) {}
  std::span<std::uint8_t> cells() noexcept { return grid_.cells_; }
  std::span<std::uint8_t> row(std::size_t r) noexcept {
    return std::span(grid_.cells_).subspan(r * grid_.width_, grid_.width_);
  }

 private:
  BinaryGrid& grid_;
};

inline std::uint8_t binarize_pixel(unsigned gray) noexcept {
  return gray >= kBinarizeThreshold ? 1 : 0;
}

/// Threshold an 8-bit grayscale buffer into a grid.
inline BinaryGrid binarize(std::size_t width, std::size_t height,
                           std::span<const std::uint8_t> gray) {
  std::vector<std::uint8_t> cells(gray.size());
  for (std::size_t i = 0; i < gray.size(); ++i) cells[i] = binarize_pixel(gray[i]);
  return BinaryGrid(width, height, std::move(cells));
}

/// Cell 1 -> 255, cell 0 -> 0.
inline std::vector<std::uint8_t> to_gray(const BinaryGrid& grid) {
  std::vector<std::uint8_t> gray(grid.size());
  for (std::size_t i = 0; i < gray.size(); ++i) gray[i] = grid.cells()[i] ? 255 : 0;
  return gray;
}

inline BinaryGrid complement(const BinaryGrid& grid) {
  std::vector<std::uint8_t> cells(grid.cells().begin(), grid.cells().end());
  for (auto& c : cells) c ^= 1;
  return BinaryGrid(grid.width(), grid.height(), std::move(cells));
}

inline std::size_t count_ones(const BinaryGrid& grid) {
  std::size_t n = 0;
  for (auto c : grid.cells()) n += c;
  return n;
}

/// Number of cells where `a` and `b` differ.
inline std::size_t hamming(const BinaryGrid& a, const BinaryGrid& b) {
  if (!a.same_shape(b))
    throw DimensionMismatch("hamming: " + std::to_string(a.width()) + "x" +
                            std::to_string(a.height()) + " vs " + std::to_string(b.width()) +
                            "x" + std::to_string(b.height()));
  const auto ca = a.cells();
  const auto cb = b.cells();
  std::size_t d = 0;
  for (std::size_t i = 0; i < ca.size(); ++i) d += ca[i] ^ cb[i];
  return d;
}

namespace detail {

class NetpbmReader {
 public:
  explicit NetpbmReader(std::string_view data) : data_(data) {}

  BinaryGrid parse() {
    if (data_.size() < 2 || data_[0] != 'P')
      throw ImageError("not a Netpbm file: missing 'P' magic", 0);
    const char kind = data_[1];
    if (kind != '1' && kind != '2' && kind != '4' && kind != '5')
      throw ImageError(std::string("unsupported magic number P") + kind +
                           " (expected P1, P2, P4 or P5)",
                       0);
    pos_ = 2;
    if (pos_ < data_.size() && !is_space(data_[pos_]) && data_[pos_] != '#')
      throw ImageError("expected whitespace after magic number", pos_);

    const std::size_t width = read_header_uint("width");
    const std::size_t height = read_header_uint("height");
    if (width == 0 || height == 0) throw ImageError("image dimensions must be positive", pos_);
    if (width > kMaxSide || height > kMaxSide)
      throw ImageError("image dimensions too large", pos_);

    if (kind == '2' || kind == '5') {
      const std::size_t maxval_at = pos_;
      const std::size_t maxval = read_header_uint("maxval");
      if (maxval != kPgmMaxValue)
        throw ImageError("unsupported PGM maxval " + std::to_string(maxval) + " (only 255)",
                         maxval_at);
    }

    switch (kind) {
      case '1': return read_plain_pbm(width, height);
      case '2': return read_plain_pgm(width, height);
      case '4': return read_raw_pbm(width, height);
      default: return read_raw_pgm(width, height);
    }
  }

 private:
  static constexpr std::size_t kMaxSide = 1u << 16;

  static bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
  }

  void skip_space_and_comments() {
    while (pos_ < data_.size()) {
      if (is_space(data_[pos_])) {
        ++pos_;
      } else if (data_[pos_] == '#') {
        while (pos_ < data_.size() && data_[pos_] != '\n' && data_[pos_] != '\r') ++pos_;
      } else {
        break;
      }
    }
  }

  std::size_t read_uint(const char* what) {
    skip_space_and_comments();
    if (pos_ >= data_.size())
      throw ImageError(std::string("unexpected end of data reading ") + what, pos_);
    if (!std::isdigit(static_cast<unsigned char>(data_[pos_])))
      throw ImageError(std::string("expected ") + what, pos_);
    std::size_t v = 0;
    while (pos_ < data_.size() && std::isdigit(static_cast<unsigned char>(data_[pos_]))) {
      v = v * 10 + static_cast<std::size_t>(data_[pos_] - '0');
      if (v > 0xFFFFFFu) throw ImageError(std::string(what) + " out of range", pos_);
      ++pos_;
    }
    return v;
  }

  std::size_t read_header_uint(const char* what) {
    const std::size_t v = read_uint(what);
    if (pos_ < data_.size() && !is_space(data_[pos_]) && data_[pos_] != '#')
      throw ImageError(std::string("malformed header after ") + what, pos_);
    return v;
  }

  // Raw formats: exactly one whitespace byte separates the header from the data.
  void expect_raster_separator() {
    if (pos_ >= data_.size()) throw ImageError("truncated header", pos_);
    if (!is_space(data_[pos_])) throw ImageError("expected whitespace before raster", pos_);
    ++pos_;
  }

  BinaryGrid read_plain_pbm(std::size_t width, std::size_t height) {
    std::vector<std::uint8_t> cells(width * height);
    for (auto& cell : cells) {
      skip_space_and_comments();
      if (pos_ >= data_.size()) throw ImageError("truncated pixel data", pos_);
      const char c = data_[pos_];
      if (c != '0' && c != '1') throw ImageError("PBM pixel must be 0 or 1", pos_);
      cell = static_cast<std::uint8_t>(c - '0');
      ++pos_;
    }
    return BinaryGrid(width, height, std::move(cells));
  }

  BinaryGrid read_plain_pgm(std::size_t width, std::size_t height) {
    std::vector<std::uint8_t> gray(width * height);
    for (auto& g : gray) {
      skip_space_and_comments();
      if (pos_ >= data_.size()) throw ImageError("truncated pixel data", pos_);
      const std::size_t at = pos_;
      const std::size_t v = read_uint("pixel value");
      if (v > kPgmMaxValue)
        throw ImageError("PGM pixel " + std::to_string(v) + " exceeds maxval", at);
      g = static_cast<std::uint8_t>(v);
    }
    return binarize(width, height, gray);
  }

  BinaryGrid read_raw_pbm(std::size_t width, std::size_t height) {
    expect_raster_separator();
    const std::size_t row_bytes = (width + 7) / 8;
    if (data_.size() - pos_ < row_bytes * height)
      throw ImageError("truncated pixel data: need " + std::to_string(row_bytes * height) +
                           " bytes, have " + std::to_string(data_.size() - pos_),
                       data_.size());
    std::vector<std::uint8_t> cells(width * height);
    for (std::size_t r = 0; r < height; ++r) {
      const auto* row = reinterpret_cast<const unsigned char*>(data_.data() + pos_ + r * row_bytes);
      for (std::size_t c = 0; c < width; ++c)
        cells[r * width + c] = static_cast<std::uint8_t>((row[c / 8] >> (7 - c % 8)) & 1u);
    }
    return BinaryGrid(width, height, std::move(cells));
  }

  BinaryGrid read_raw_pgm(std::size_t width, std::size_t height) {
    expect_raster_separator();
    if (data_.size() - pos_ < width * height)
      throw ImageError("truncated pixel data: need " + std::to_string(width * height) +
                           " bytes, have " + std::to_string(data_.size() - pos_),
                       data_.size());
    const auto* first = reinterpret_cast<const std::uint8_t*>(data_.data() + pos_);
    return binarize(width, height, std::span(first, width * height));
  }

  std::string_view data_;
  std::size_t pos_ = 0;
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("error reading " + path.string());
  return data;
}

/// Write via a sibling temp file and rename so readers never see a partial file.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view data) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    out.flush();
    if (!out) throw IoError("error writing " + path.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot write " + path.string());
  }
}

}  // namespace detail

enum class PbmFormat { plain, raw };  // P1, P4

/// Decode P1, P2, P4 or P5 bytes.
inline BinaryGrid parse_image(std::string_view bytes) {
  return detail::NetpbmReader(bytes).parse();
}

inline BinaryGrid load_image(const std::filesystem::path& path) {
  return parse_image(detail::read_file(path));
}

/// P1 writes one row per line, cells separated by single spaces. P4 packs
/// each row MSB-first and pads it to a whole byte with zero bits.
inline std::string encode_image(const BinaryGrid& grid, PbmFormat format) {
  std::string out;
  const auto header = [&](char kind) {
    out += 'P';
    out += kind;
    out += '\n';
    out += std::to_string(grid.width());
    out += ' ';
    out += std::to_string(grid.height());
    out += '\n';
  };
  if (format == PbmFormat::plain) {
    header('1');
    out.reserve(out.size() + grid.size() * 2);
    for (std::size_t r = 0; r < grid.height(); ++r) {
      const auto row = grid.row(r);
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c) out += ' ';
        out += static_cast<char>('0' + row[c]);
      }
      out += '\n';
    }
  } else {
    header('4');
    const std::size_t row_bytes = (grid.width() + 7) / 8;
    std::string raster(row_bytes * grid.height(), '\0');
    for (std::size_t r = 0; r < grid.height(); ++r) {
      const auto row = grid.row(r);
      for (std::size_t c = 0; c < row.size(); ++c)
        if (row[c]) raster[r * row_bytes + c / 8] |= static_cast<char>(0x80u >> (c % 8));
    }
    out += raster;
  }
  return out;
}

inline void save_image(const BinaryGrid& grid, const std::filesystem::path& path,
                       PbmFormat format) {
  detail::write_file_atomic(path, encode_image(grid, format));
}

}  // namespace caedge
