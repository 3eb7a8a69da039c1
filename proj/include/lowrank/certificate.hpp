#pragma once

#include <string>

namespace lowrank {

// An inequality checked on a concrete instance. For an upper bound the check
// is observed <= bound * (1 + 1e-9); for a lower bound it is
// observed >= bound * (1 - 1e-9). Slack is positive when the check has room.
struct Certificate {
  enum class Sense { AtMost, AtLeast };

  std::string label;
  double observed = 0.0;
  double bound = 0.0;
  double slack = 0.0;
  bool pass = false;
  Sense sense = Sense::AtMost;

  static constexpr double kRelativeTolerance = 1e-9;

  static Certificate at_most(std::string label, double observed, double bound);
  static Certificate at_least(std::string label, double observed, double bound);

  // observed / bound for upper bounds, bound / observed for lower bounds;
  // values <= 1 mean the inequality holds.
  double tightness() const;
};

}  // namespace lowrank
