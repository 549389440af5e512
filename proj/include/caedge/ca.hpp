#pragma once

// Rule tables and the Moore-neighborhood update kernel.
//
// A 3x3 window is packed into a 9-bit code in row-major order with the
// top-left cell as the most significant bit:
//
//     bit 8  bit 7  bit 6
//     bit 5  bit 4  bit 3      bit 4 is the center cell
//     bit 2  bit 1  bit 0
//
// Neighbors outside the grid read as 0. Persisted rule tables depend on this
// ordering; do not change it.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "caedge/grid.hpp"
#include "caedge/rng.hpp"

namespace caedge {

inline constexpr std::size_t kRuleCount = 512;
inline constexpr unsigned kCenterBit = 4;

using WindowCode = std::uint16_t;

/// Next-state lookup for every 9-bit window code. Default-constructed tables
/// are all zeros.
class RuleTable {
 public:
  using Entries = std::array<std::uint8_t, kRuleCount>;

  RuleTable() = default;

  explicit RuleTable(const Entries& entries) : entries_(entries) {
    for (auto e : entries_)
      if (e > 1) throw std::invalid_argument("RuleTable: entries must be 0 or 1");
  }

  static RuleTable filled(std::uint8_t state) {
    if (state > 1) throw std::invalid_argument("RuleTable: entries must be 0 or 1");
    RuleTable t;
    t.entries_.fill(state);
    return t;
  }

  /// entries[c] = center bit of c; a fixed point of step() for every grid.
  static RuleTable identity() {
    RuleTable t;
    for (std::size_t c = 0; c < kRuleCount; ++c)
      t.entries_[c] = static_cast<std::uint8_t>((c >> kCenterBit) & 1u);
    return t;
  }

  std::uint8_t operator[](std::size_t code) const { return entries_[code]; }
  std::uint8_t at(std::size_t code) const { return entries_.at(code); }

  void set(std::size_t code, std::uint8_t state) {
    if (state > 1) throw std::invalid_argument("RuleTable::set: state must be 0 or 1");
    entries_.at(code) = state;
  }

  std::span<const std::uint8_t, kRuleCount> entries() const noexcept { return entries_; }

  std::size_t count_ones() const noexcept {
    std::size_t n = 0;
    for (auto e : entries_) n += e;
    return n;
  }

  friend bool operator==(const RuleTable&, const RuleTable&) = default;

 private:
  Entries entries_{};
};

inline WindowCode encode_window(const BinaryGrid& grid, std::size_t row, std::size_t col) {
  unsigned code = 0;
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) {
      const auto r = static_cast<std::ptrdiff_t>(row) + dr;
      const auto c = static_cast<std::ptrdiff_t>(col) + dc;
      unsigned bit = 0;
      if (r >= 0 && c >= 0 && r < static_cast<std::ptrdiff_t>(grid.height()) &&
          c < static_cast<std::ptrdiff_t>(grid.width()))
        bit = grid.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
      code = (code << 1) | bit;
    }
  }
  return static_cast<WindowCode>(code);
}

/// One synchronous pass of `rule` over `in`, written to `out` (same shape,
/// distinct object).
///
/// Each row keeps three 3-bit column triples (above, current, below) and
/// shifts one new column into each per cell, so a cell costs three loads
/// instead of nine.
inline void step_into(const BinaryGrid& in, const RuleTable& rule, BinaryGrid& out) {
  if (!in.same_shape(out)) throw DimensionMismatch("step_into: output shape differs");
  if (&in == &out) throw std::invalid_argument("step_into: output must not alias input");

  const std::size_t w = in.width();
  const std::size_t h = in.height();
  const auto table = rule.entries();
  const std::vector<std::uint8_t> zeros(w, 0);
  GridWriter writer(out);

  for (std::size_t r = 0; r < h; ++r) {
    const std::uint8_t* up = r > 0 ? in.row(r - 1).data() : zeros.data();
    const std::uint8_t* mid = in.row(r).data();
    const std::uint8_t* dn = r + 1 < h ? in.row(r + 1).data() : zeros.data();
    std::uint8_t* dst = writer.row(r).data();

    // Columns (-1, 0); column -1 is padding.
    unsigned t = up[0];
    unsigned m = mid[0];
    unsigned b = dn[0];
    std::size_t c = 0;
    for (; c + 1 < w; ++c) {
      t = ((t << 1) & 7u) | up[c + 1];
      m = ((m << 1) & 7u) | mid[c + 1];
      b = ((b << 1) & 7u) | dn[c + 1];
      dst[c] = table[(t << 6) | (m << 3) | b];
    }
    // Last column: right neighbor is padding.
    t = (t << 1) & 7u;
    m = (m << 1) & 7u;
    b = (b << 1) & 7u;
    dst[c] = table[(t << 6) | (m << 3) | b];
  }
}

inline BinaryGrid step(const BinaryGrid& grid, const RuleTable& rule) {
  BinaryGrid out(grid.width(), grid.height());
  step_into(grid, rule, out);
  return out;
}

/// `passes` successive applications of step().
inline BinaryGrid run(const BinaryGrid& grid, const RuleTable& rule, unsigned passes) {
  if (passes == 0) throw std::invalid_argument("run: passes must be at least 1");
  BinaryGrid current = step(grid, rule);
  if (passes == 1) return current;
  BinaryGrid scratch(grid.width(), grid.height());
  for (unsigned p = 1; p < passes; ++p) {
    step_into(current, rule, scratch);
    std::swap(current, scratch);
  }
  return current;
}

/// 512 independent fair coin flips, drawn as eight 64-bit words.
inline RuleTable random_rule(Rng& rng) {
  RuleTable::Entries entries{};
  for (std::size_t word = 0; word < kRuleCount / 64; ++word) {
    const std::uint64_t bits = rng.next();
    for (std::size_t i = 0; i < 64; ++i)
      entries[word * 64 + i] = static_cast<std::uint8_t>((bits >> i) & 1u);
  }
  return RuleTable(entries);
}

}  // namespace caedge
