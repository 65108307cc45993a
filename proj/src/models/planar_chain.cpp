#include "hzdclf/models/planar_chain.hpp"

#include <cmath>

#include "hzdclf/errors.hpp"

namespace hzdclf {

namespace {
// Rotation by 90 degrees, the derivative of R(theta) in the plane.
Eigen::Vector2d perp(const Eigen::Vector2d& v) { return {-v.y(), v.x()}; }
}  // namespace

PlanarChain::PlanarChain(PlanarChainConfig config) : config_(std::move(config)) {
  const int num_links = static_cast<int>(config_.links.size());
  if (num_links == 0) throw InvalidArgumentError("planar chain needs at least one link");
  nq_ = num_links + (config_.floating_base ? 2 : 0);

  angle_coord_.resize(num_links);
  angle_dep_.assign(num_links, std::vector<char>(nq_, 0));
  for (int b = 0; b < num_links; ++b) {
    const auto& link = config_.links[b];
    if (link.parent >= b) throw InvalidArgumentError("links must be listed parents-first");
    if (link.parent < -1) throw InvalidArgumentError("bad parent index");
    if (link.mass < 0.0 || link.inertia < 0.0) {
      throw InvalidArgumentError("link '" + link.name + "' has negative mass or inertia");
    }
    if (link.parent == -1 && !link.joint_in_parent.isZero(0.0)) {
      throw InvalidArgumentError("link '" + link.name + "' attaches to the base at its origin");
    }
    angle_coord_[b] = (config_.floating_base ? 2 : 0) + b;
    if (link.parent >= 0) angle_dep_[b] = angle_dep_[link.parent];
    angle_dep_[b][angle_coord_[b]] = 1;
    total_mass_ += link.mass;

    com_terms_.push_back(pointTerms(b, link.com));
  }

  for (int m = 0; m < static_cast<int>(config_.markers.size()); ++m) {
    const auto& marker = config_.markers[m];
    if (marker.link < 0 || marker.link >= num_links) {
      throw InvalidArgumentError("marker '" + marker.name + "' references a bad link");
    }
    if (!marker_index_.emplace(marker.name, m).second) {
      throw InvalidArgumentError("duplicate marker name '" + marker.name + "'");
    }
    marker_terms_.push_back(pointTerms(marker.link, marker.point));
  }

  for (const auto& s : config_.springs) {
    if (s.coord < 0 || s.coord >= nq_) throw InvalidArgumentError("spring coordinate out of range");
    if (s.stiffness < 0.0 || s.damping < 0.0) throw InvalidArgumentError("negative spring parameter");
  }
  if (config_.rotor_inertia.size() == 0) {
    config_.rotor_inertia = Eigen::VectorXd::Zero(nq_);
  } else if (config_.rotor_inertia.size() != nq_) {
    throw InvalidArgumentError("rotor_inertia size does not match coordinate count");
  }
  std::vector<char> seen(nq_, 0);
  for (int c : config_.actuated_coords) {
    if (c < 0 || c >= nq_ || seen[c]) throw InvalidArgumentError("bad actuated coordinate list");
    seen[c] = 1;
  }
}

std::vector<PlanarChain::Term> PlanarChain::pointTerms(int link, const Eigen::Vector2d& point) const {
  std::vector<Term> terms;
  terms.push_back({point, link});
  for (int c = link; config_.links[c].parent >= 0; c = config_.links[c].parent) {
    terms.push_back({config_.links[c].joint_in_parent, config_.links[c].parent});
  }
  return terms;
}

PlanarChain::Frames PlanarChain::frames(const Eigen::VectorXd& q) const {
  if (q.size() != nq_) throw InvalidArgumentError("state size does not match model");
  Frames f;
  f.theta.resize(numLinks());
  f.rot.resize(numLinks());
  for (int b = 0; b < numLinks(); ++b) {
    const int parent = config_.links[b].parent;
    f.theta[b] = (parent >= 0 ? f.theta[parent] : 0.0) + q(angle_coord_[b]);
    const double c = std::cos(f.theta[b]), s = std::sin(f.theta[b]);
    f.rot[b] << c, -s, s, c;
  }
  return f;
}

Eigen::Vector2d PlanarChain::base(const Eigen::VectorXd& q) const {
  return config_.floating_base ? Eigen::Vector2d(q(0), q(1)) : Eigen::Vector2d::Zero();
}

Eigen::Vector2d PlanarChain::termsPosition(const Frames& f, const Eigen::Vector2d& base,
                                           const std::vector<Term>& terms) const {
  Eigen::Vector2d p = base;
  for (const auto& t : terms) p += f.rot[t.link] * t.d;
  return p;
}

Eigen::MatrixXd PlanarChain::termsJacobian(const Frames& f, const std::vector<Term>& terms) const {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2, nq_);
  if (config_.floating_base) j.leftCols<2>().setIdentity();
  for (const auto& t : terms) {
    const Eigen::Vector2d v = perp(f.rot[t.link] * t.d);
    const auto& dep = angle_dep_[t.link];
    for (int col = 0; col < nq_; ++col) {
      if (dep[col]) j.col(col) += v;
    }
  }
  return j;
}

Eigen::Vector2d PlanarChain::termsJdotQdot(const Frames& f, const Eigen::VectorXd& qd,
                                           const std::vector<Term>& terms) const {
  // Per-link absolute angular rates, then d^2/dt^2 R(theta) d = -thetadot^2 R d
  // plus the thetaddot part that belongs to J qdd.
  std::vector<double> theta_dot(numLinks());
  for (int b = 0; b < numLinks(); ++b) {
    const int parent = config_.links[b].parent;
    theta_dot[b] = (parent >= 0 ? theta_dot[parent] : 0.0) + qd(angle_coord_[b]);
  }
  Eigen::Vector2d out = Eigen::Vector2d::Zero();
  for (const auto& t : terms) {
    out -= theta_dot[t.link] * theta_dot[t.link] * (f.rot[t.link] * t.d);
  }
  return out;
}

Eigen::MatrixXd PlanarChain::termsJacobianDerivative(const Frames& f, const std::vector<Term>& terms,
                                                     int coord) const {
  Eigen::MatrixXd dj = Eigen::MatrixXd::Zero(2, nq_);
  for (const auto& t : terms) {
    const auto& dep = angle_dep_[t.link];
    if (!dep[coord]) continue;
    const Eigen::Vector2d v = -(f.rot[t.link] * t.d);
    for (int col = 0; col < nq_; ++col) {
      if (dep[col]) dj.col(col) += v;
    }
  }
  return dj;
}

Eigen::MatrixXd PlanarChain::massMatrix(const Eigen::VectorXd& q) const {
  const Frames f = frames(q);
  Eigen::MatrixXd d = config_.rotor_inertia.asDiagonal();
  for (int b = 0; b < numLinks(); ++b) {
    const auto& link = config_.links[b];
    const Eigen::MatrixXd j = termsJacobian(f, com_terms_[b]);
    d += link.mass * j.transpose() * j;
    if (link.inertia != 0.0) {
      const auto& dep = angle_dep_[b];
      for (int r = 0; r < nq_; ++r) {
        if (!dep[r]) continue;
        for (int c = 0; c < nq_; ++c) {
          if (dep[c]) d(r, c) += link.inertia;
        }
      }
    }
  }
  return d;
}

Eigen::MatrixXd PlanarChain::massMatrixDerivative(const Eigen::VectorXd& q, int coord) const {
  if (coord < 0 || coord >= nq_) throw InvalidArgumentError("coordinate out of range");
  const Frames f = frames(q);
  Eigen::MatrixXd dd = Eigen::MatrixXd::Zero(nq_, nq_);
  for (int b = 0; b < numLinks(); ++b) {
    const double m = config_.links[b].mass;
    if (m == 0.0) continue;
    const Eigen::MatrixXd j = termsJacobian(f, com_terms_[b]);
    const Eigen::MatrixXd h = termsJacobianDerivative(f, com_terms_[b], coord);
    dd += m * (h.transpose() * j + j.transpose() * h);
  }
  return dd;
}

Eigen::MatrixXd PlanarChain::coriolisMatrix(const Eigen::VectorXd& q,
                                            const Eigen::VectorXd& qd) const {
  if (qd.size() != nq_) throw InvalidArgumentError("state size does not match model");
  std::vector<Eigen::MatrixXd> dd(nq_);
  for (int k = 0; k < nq_; ++k) dd[k] = massMatrixDerivative(q, k);

  // Christoffel symbols of the first kind; this form makes dD/dt - 2C skew.
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(nq_, nq_);
  for (int i = 0; i < nq_; ++i) {
    for (int j = 0; j < nq_; ++j) {
      double cij = 0.0;
      for (int k = 0; k < nq_; ++k) {
        cij += 0.5 * (dd[k](i, j) + dd[j](i, k) - dd[i](k, j)) * qd(k);
      }
      c(i, j) = cij;
    }
  }
  return c;
}

Eigen::VectorXd PlanarChain::gravityForces(const Eigen::VectorXd& q) const {
  const Frames f = frames(q);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(nq_);
  for (int b = 0; b < numLinks(); ++b) {
    const double m = config_.links[b].mass;
    if (m == 0.0) continue;
    g += m * config_.gravity * termsJacobian(f, com_terms_[b]).row(1).transpose();
  }
  return g;
}

Eigen::MatrixXd PlanarChain::actuationMatrix() const {
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(nq_, numActuators());
  for (int i = 0; i < numActuators(); ++i) b(config_.actuated_coords[i], i) = 1.0;
  return b;
}

double PlanarChain::potentialEnergy(const Eigen::VectorXd& q) const {
  const Frames f = frames(q);
  const Eigen::Vector2d origin = base(q);
  double pe = 0.0;
  for (int b = 0; b < numLinks(); ++b) {
    pe += config_.links[b].mass * config_.gravity * termsPosition(f, origin, com_terms_[b]).y();
  }
  for (const auto& s : config_.springs) pe += 0.5 * s.stiffness * q(s.coord) * q(s.coord);
  return pe;
}

double PlanarChain::linkAngle(const Eigen::VectorXd& q, int link) const {
  if (link < 0 || link >= numLinks()) throw InvalidArgumentError("link index out of range");
  return frames(q).theta[link];
}

int PlanarChain::markerIndex(const std::string& marker) const {
  const auto it = marker_index_.find(marker);
  if (it == marker_index_.end()) throw InvalidArgumentError("unknown marker '" + marker + "'");
  return it->second;
}

Eigen::Vector2d PlanarChain::markerPosition(const Eigen::VectorXd& q, const std::string& marker) const {
  return termsPosition(frames(q), base(q), marker_terms_[markerIndex(marker)]);
}

Eigen::MatrixXd PlanarChain::markerJacobian(const Eigen::VectorXd& q, const std::string& marker) const {
  return termsJacobian(frames(q), marker_terms_[markerIndex(marker)]);
}

Eigen::Vector2d PlanarChain::markerVelocity(const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                                            const std::string& marker) const {
  return markerJacobian(q, marker) * qd;
}

Eigen::Vector2d PlanarChain::markerJdotQdot(const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                                            const std::string& marker) const {
  if (qd.size() != nq_) throw InvalidArgumentError("state size does not match model");
  return termsJdotQdot(frames(q), qd, marker_terms_[markerIndex(marker)]);
}

Eigen::MatrixXd PlanarChain::markerJacobianDerivative(const Eigen::VectorXd& q,
                                                      const std::string& marker, int coord) const {
  if (coord < 0 || coord >= nq_) throw InvalidArgumentError("coordinate out of range");
  return termsJacobianDerivative(frames(q), marker_terms_[markerIndex(marker)], coord);
}

Eigen::Vector2d PlanarChain::comPosition(const Eigen::VectorXd& q) const {
  const Frames f = frames(q);
  const Eigen::Vector2d origin = base(q);
  Eigen::Vector2d weighted = Eigen::Vector2d::Zero();
  for (int b = 0; b < numLinks(); ++b) {
    weighted += config_.links[b].mass * termsPosition(f, origin, com_terms_[b]);
  }
  return weighted / total_mass_;
}

HolonomicConstraint PlanarChain::contactConstraint(const std::string& marker,
                                                   const Eigen::Vector2d& anchor) const {
  markerIndex(marker);  // validate early
  HolonomicConstraint c;
  c.name = "contact_" + marker;
  c.kind = ConstraintKind::kContact;
  c.layout = WrenchLayout::kPointPlanar;
  c.dim = 2;
  c.value = [this, marker, anchor](const Eigen::VectorXd& q) -> Eigen::VectorXd {
    return markerPosition(q, marker) - anchor;
  };
  c.jacobian = [this, marker](const Eigen::VectorXd& q) { return markerJacobian(q, marker); };
  c.jdot_qdot = [this, marker](const Eigen::VectorXd& q, const Eigen::VectorXd& qd) -> Eigen::VectorXd {
    return markerJdotQdot(q, qd, marker);
  };
  return c;
}

HolonomicConstraint PlanarChain::jointLockConstraint(const std::string& name, int coord,
                                                     double target) const {
  if (coord < 0 || coord >= nq_) throw InvalidArgumentError("coordinate out of range");
  HolonomicConstraint c;
  c.name = name;
  c.kind = ConstraintKind::kJointLock;
  c.dim = 1;
  const int n = nq_;
  c.value = [coord, target](const Eigen::VectorXd& q) {
    return Eigen::VectorXd::Constant(1, q(coord) - target);
  };
  c.jacobian = [coord, n](const Eigen::VectorXd&) {
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(1, n);
    j(0, coord) = 1.0;
    return j;
  };
  c.jdot_qdot = [](const Eigen::VectorXd&, const Eigen::VectorXd&) {
    return Eigen::VectorXd::Zero(1);
  };
  return c;
}

HolonomicConstraint PlanarChain::distanceConstraint(const std::string& name,
                                                    const std::string& marker_a,
                                                    const std::string& marker_b,
                                                    double distance) const {
  markerIndex(marker_a);
  markerIndex(marker_b);
  if (distance <= 0.0) throw InvalidArgumentError("distance must be positive");

  const auto gap = [this, marker_a, marker_b](const Eigen::VectorXd& q) -> Eigen::Vector2d {
    return markerPosition(q, marker_a) - markerPosition(q, marker_b);
  };

  HolonomicConstraint c;
  c.name = name;
  c.kind = ConstraintKind::kClosure;
  c.dim = 1;
  c.value = [gap, distance](const Eigen::VectorXd& q) {
    return Eigen::VectorXd::Constant(1, gap(q).norm() - distance);
  };
  c.jacobian = [this, gap, marker_a, marker_b](const Eigen::VectorXd& q) -> Eigen::MatrixXd {
    const Eigen::Vector2d delta = gap(q);
    const double norm = delta.norm();
    if (norm < 1e-9) throw SolverError("distance constraint markers are coincident");
    return (delta / norm).transpose() *
           (markerJacobian(q, marker_a) - markerJacobian(q, marker_b));
  };
  c.jdot_qdot = [this, gap, marker_a, marker_b](const Eigen::VectorXd& q,
                                                const Eigen::VectorXd& qd) -> Eigen::VectorXd {
    const Eigen::Vector2d delta = gap(q);
    const double norm = delta.norm();
    if (norm < 1e-9) throw SolverError("distance constraint markers are coincident");
    const Eigen::Vector2d u = delta / norm;
    const Eigen::Vector2d dv =
        markerVelocity(q, qd, marker_a) - markerVelocity(q, qd, marker_b);
    const Eigen::Vector2d da =
        markerJdotQdot(q, qd, marker_a) - markerJdotQdot(q, qd, marker_b);
    const double along = u.dot(dv);
    return Eigen::VectorXd::Constant(1, (dv.squaredNorm() - along * along) / norm + u.dot(da));
  };
  return c;
}

}  // namespace hzdclf
