#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lowrank/certificate.hpp"
#include "lowrank/rectrep.hpp"
#include "lowrank/rng.hpp"
#include "lowrank/symrep.hpp"

namespace lowrank {

struct BatteryConfig {
  int instances = 200;
  std::uint64_t seed = 0;
  // Fixed dimensions; when absent each instance draws p in [2, 10],
  // r in [1, min(3, p - 1)], p1 in [1, 10] and p2 in [2, 10].
  std::optional<int> p;
  std::optional<int> r;
  std::optional<int> p1;
  std::optional<int> p2;
};

struct CertificateTally {
  std::string label;
  int checked = 0;
  int passed = 0;
  int not_applicable = 0;
  double worst_tightness = 0.0;  // largest observed/bound ratio (<= 1 passes)
};

struct BatteryReport {
  std::vector<CertificateTally> tallies;  // sorted by label
  bool all_passed() const;
};

BatteryReport run_certificate_battery(const BatteryConfig& config);

// Random instances shared by the battery and the tests.
Phi random_phi(Eigen::Index p, Eigen::Index r, Philox4x32& rng, double max_norm = 0.95);
Matrix random_symmetric(Eigen::Index r, Philox4x32& rng, bool positive_definite);
ThetaSym random_theta_sym(Eigen::Index p, Eigen::Index r, Philox4x32& rng, bool positive_definite = true);
ThetaRect random_theta_rect(Eigen::Index p1, Eigen::Index p2, Eigen::Index r, Philox4x32& rng);
// theta0 + scale * unit direction, retried with smaller scale until the
// result lies in the chart domain.
Vector perturb(const Vector& theta0, double scale, Philox4x32& rng);

}  // namespace lowrank
