#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "caedge/ca.hpp"
#include "caedge/grid.hpp"

namespace caedge {

/// Hamming distance between a CA result and the goal image. Lower is better.
struct FitnessValue {
  std::uint64_t distance = 0;
  std::uint64_t cells = 1;

  double normalized() const noexcept {
    return static_cast<double>(distance) / static_cast<double>(cells);
  }

  friend auto operator<=>(const FitnessValue&, const FitnessValue&) = default;
};

/// Scores rule tables against a fixed start/goal pair. Holds scratch buffers,
/// so one instance per thread.
class Evaluator {
 public:
  Evaluator(const BinaryGrid& start, const BinaryGrid& goal, unsigned passes)
      : start_(start),
        goal_(goal),
        passes_(passes),
        a_(start.width(), start.height()),
        b_(start.width(), start.height()) {
    if (!start.same_shape(goal))
      throw DimensionMismatch("start image is " + std::to_string(start.width()) + "x" +
                              std::to_string(start.height()) + " but goal image is " +
                              std::to_string(goal.width()) + "x" +
                              std::to_string(goal.height()));
    if (passes == 0) throw std::invalid_argument("evaluate: passes must be at least 1");
  }

  FitnessValue operator()(const RuleTable& rule) {
    step_into(start_, rule, a_);
    for (unsigned p = 1; p < passes_; ++p) {
      step_into(a_, rule, b_);
      std::swap(a_, b_);
    }
    return {hamming(a_, goal_), goal_.size()};
  }

 private:
  const BinaryGrid& start_;
  const BinaryGrid& goal_;
  unsigned passes_;
  BinaryGrid a_;
  BinaryGrid b_;
};

/// hamming(run(start, rule, passes), goal)
inline FitnessValue evaluate(const RuleTable& rule, const BinaryGrid& start,
                             const BinaryGrid& goal, unsigned passes) {
  return Evaluator(start, goal, passes)(rule);
}

}  // namespace caedge
