#include "lowrank/certificate.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace lowrank {

Certificate Certificate::at_most(std::string label, double observed, double bound) {
  Certificate c;
  c.label = std::move(label);
  c.observed = observed;
  c.bound = bound;
  c.slack = bound - observed;
  c.sense = Sense::AtMost;
  c.pass = std::isfinite(observed) && observed <= bound * (1.0 + kRelativeTolerance);
  return c;
}

Certificate Certificate::at_least(std::string label, double observed, double bound) {
  Certificate c;
  c.label = std::move(label);
  c.observed = observed;
  c.bound = bound;
  c.slack = observed - bound;
  c.sense = Sense::AtLeast;
  c.pass = std::isfinite(observed) && observed >= bound * (1.0 - kRelativeTolerance);
  return c;
}

double Certificate::tightness() const {
  const double num = sense == Sense::AtMost ? observed : bound;
  const double den = sense == Sense::AtMost ? bound : observed;
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return num / den;
}

}  // namespace lowrank
