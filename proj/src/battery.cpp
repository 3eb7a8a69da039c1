#include "lowrank/battery.hpp"

#include <algorithm>
#include <cmath>

#include "lowrank/errors.hpp"

namespace lowrank {

namespace {

Matrix random_gaussian(Eigen::Index rows, Eigen::Index cols, Philox4x32& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
  return m;
}

Matrix random_orthogonal(Eigen::Index r, Philox4x32& rng) {
  const Eigen::HouseholderQR<Matrix> qr(random_gaussian(r, r, rng));
  return qr.householderQ() * Matrix::Identity(r, r);
}

int uniform_int(Philox4x32& rng, int lo, int hi) { return lo + static_cast<int>(rng.below(hi - lo + 1)); }

double log_uniform(Philox4x32& rng, double lo, double hi) {
  return std::exp(std::log(lo) + rng.uniform() * (std::log(hi) - std::log(lo)));
}

class Tallies {
 public:
  void add(const Certificate& c) {
    auto& t = by_label_[c.label];
    t.label = c.label;
    ++t.checked;
    t.passed += c.pass;
    t.worst_tightness = std::max(t.worst_tightness, c.tightness());
  }
  void add(const std::optional<Certificate>& c, const std::string& label) {
    if (c) {
      add(*c);
    } else {
      auto& t = by_label_[label];
      t.label = label;
      ++t.not_applicable;
    }
  }
  BatteryReport report() const {
    BatteryReport r;
    for (const auto& [label, t] : by_label_) r.tallies.push_back(t);
    return r;
  }

 private:
  std::map<std::string, CertificateTally> by_label_;
};

}  // namespace

bool BatteryReport::all_passed() const {
  return std::all_of(tallies.begin(), tallies.end(), [](const CertificateTally& t) { return t.passed == t.checked; });
}

Phi random_phi(Eigen::Index p, Eigen::Index r, Philox4x32& rng, double max_norm) {
  Matrix a = random_gaussian(p - r, r, rng);
  const double norm = spectral_norm(a);
  if (norm > 0.0) a *= rng.uniform() * max_norm / norm;
  return Phi::from_matrix(p, a);
}

Matrix random_symmetric(Eigen::Index r, Philox4x32& rng, bool positive_definite) {
  const Matrix q = random_orthogonal(r, rng);
  Vector lambda(r);
  for (Eigen::Index k = 0; k < r; ++k) {
    const double mag = 0.5 + 2.5 * rng.uniform();
    lambda(k) = positive_definite || (rng() & 1u) == 0u ? mag : -mag;
  }
  return symmetrize(q * lambda.asDiagonal() * q.transpose());
}

ThetaSym random_theta_sym(Eigen::Index p, Eigen::Index r, Philox4x32& rng, bool positive_definite) {
  Phi phi = random_phi(p, r, rng);
  return ThetaSym(std::move(phi), vech(random_symmetric(r, rng, positive_definite)));
}

ThetaRect random_theta_rect(Eigen::Index p1, Eigen::Index p2, Eigen::Index r, Philox4x32& rng) {
  Phi phi = random_phi(p2, r, rng);
  Matrix m = random_gaussian(p1, r, rng);
  return ThetaRect(p1, std::move(phi), vec(m));
}

Vector perturb(const Vector& theta0, double scale, Philox4x32& rng) {
  Vector dir(theta0.size());
  for (Eigen::Index i = 0; i < dir.size(); ++i) dir(i) = rng.normal();
  if (dir.norm() > 0.0) dir.normalize();
  return theta0 + scale * dir;
}

BatteryReport run_certificate_battery(const BatteryConfig& config) {
  Tallies tallies;
  for (int inst = 0; inst < config.instances; ++inst) {
    Philox4x32 rng(config.seed, static_cast<std::uint64_t>(inst));
    const int p = config.p.value_or(uniform_int(rng, 2, 10));
    const int r = config.r.value_or(uniform_int(rng, 1, std::min(3, p - 1)));
    const int p2 = config.p2.value_or(uniform_int(rng, 2, 10));
    const int p1 = config.p1.value_or(uniform_int(rng, 1, 10));
    const int rr = std::min({r, p1, p2});
    require(r >= 1 && r <= p && rr >= 1, ErrorCode::DimensionMismatch, "battery: invalid dimensions");

    // Sample a reference point and a partner at a random distance, retrying
    // until the partner lies in the chart domain.
    auto partner_sym = [&](const ThetaSym& t0, double scale, bool pd) {
      for (;; scale *= 0.5) {
        try {
          ThetaSym t = ThetaSym::from_vector(p, r, perturb(t0.vector(), scale, rng));
          if (pd && Eigen::LLT<Matrix>(t.m()).info() != Eigen::Success) continue;
          return t;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::DomainViolation) throw;
        }
      }
    };

    const Phi phi0 = random_phi(p, r, rng);
    const ThetaSym mixed0(phi0, vech(random_symmetric(r, rng, false)));
    const ThetaSym far = partner_sym(mixed0, log_uniform(rng, 1e-4, 1.0), false);

    const auto u_certs = taylor_certificate_U(far.phi(), phi0);
    tallies.add(u_certs.lipschitz);
    tallies.add(u_certs.remainder);
    tallies.add(lipschitz_certificate_A(cayley_map(far.phi()), cayley_map(phi0)));
    tallies.add(taylor_certificate_sym(far, mixed0));

    const auto sub = subspace_equivalence_certificates(far.phi(), phi0);
    tallies.add(sub.c1);
    tallies.add(sub.c2);
    // A close partner so the local equivalences are usually in force.
    const ThetaSym near = partner_sym(mixed0, log_uniform(rng, 1e-6, 1e-2), false);
    const auto sub_near = subspace_equivalence_certificates(near.phi(), phi0);
    tallies.add(sub_near.c1);
    tallies.add(sub_near.c2);
    tallies.add(sub_near.c3, "subspace.phi_vs_sin_theta");
    tallies.add(sub_near.frame, "subspace.frame_vs_sin_theta");

    const ThetaSym pd0(phi0, vech(random_symmetric(r, rng, true)));
    const ThetaSym pd_near = partner_sym(pd0, log_uniform(rng, 1e-6, 1e-2), true);
    tallies.add(inverse_perturbation_certificate(pd_near, pd0), "symrep.inverse_perturbation");

    const RegularityRecord reg = regularity_bounds(mixed0);
    if (reg.sigma_min) tallies.add(*reg.sigma_min);
    tallies.add(reg.inv_gram);

    const ThetaRect rect0 = random_theta_rect(p1, p2, rr, rng);
    ThetaRect rect = rect0;
    for (double scale = log_uniform(rng, 1e-4, 1.0);; scale *= 0.5) {
      try {
        rect = ThetaRect::from_vector(p1, p2, rr, perturb(rect0.vector(), scale, rng));
        break;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::DomainViolation) throw;
      }
    }
    tallies.add(taylor_certificate_rect(rect, rect0));
    tallies.add(regularity_bound_rect(rect0).inv_gram);
  }
  return tallies.report();
}

}  // namespace lowrank
