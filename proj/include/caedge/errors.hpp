#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace caedge {

/// Malformed or unsupported image data. `offset()` is the byte position in
/// the input where parsing stopped.
class ImageError : public std::runtime_error {
 public:
  ImageError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// File could not be opened, read, or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two grids that must agree in shape do not.
class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A population document that does not satisfy the capop/1 schema.
class PopulationFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace caedge
