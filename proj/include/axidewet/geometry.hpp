#pragma once

#include "axidewet/anisotropy.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <algorithm>
#include <iosfwd>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace axidewet {

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Topology {
  two_contacts,   ///< both endpoints on the substrate (z = 0)
  inner_on_axis,  ///< node 0 on the symmetry axis (r = 0)
};

const char* to_string(Topology t);

/// Polygonal generating curve in the (r, z) half plane. Node 0 is the inner
/// endpoint, node J the outer contact point on the substrate.
template <typename Scalar>
struct BasicCurve {
  using Nodes = Eigen::Matrix<Scalar, 2, Eigen::Dynamic>;

  Nodes nodes;
  Topology topology = Topology::two_contacts;

  BasicCurve() = default;
  BasicCurve(Nodes x, Topology t) : nodes(std::move(x)), topology(t) {}

  Eigen::Index num_nodes() const { return nodes.cols(); }
  Eigen::Index num_elements() const { return nodes.cols() - 1; }
  Scalar r(Eigen::Index j) const { return nodes(0, j); }
  Scalar z(Eigen::Index j) const { return nodes(1, j); }
  auto node(Eigen::Index j) const { return nodes.col(j); }
  Scalar r_inner() const { return nodes(0, 0); }
  Scalar r_outer() const { return nodes(0, nodes.cols() - 1); }
};

using GeneratingCurve = BasicCurve<double>;

/// Throws GeometryError when the boundary conditions, positivity of r, or
/// non-degeneracy of elements are violated.
template <typename Scalar>
void validate_curve(const BasicCurve<Scalar>& c) {
  const Eigen::Index n = c.num_nodes();
  if (n < 2) throw GeometryError("generating curve needs at least two nodes");
  if (c.z(n - 1) != Scalar(0)) throw GeometryError("outer contact point must satisfy z = 0");
  if (c.topology == Topology::two_contacts && c.z(0) != Scalar(0))
    throw GeometryError("inner contact point must satisfy z = 0");
  if (c.topology == Topology::inner_on_axis && c.r(0) != Scalar(0))
    throw GeometryError("axis node must satisfy r = 0");
  if (c.r(0) < Scalar(0)) throw GeometryError("node 0 has negative r");
  for (Eigen::Index j = 1; j < n; ++j) {
    if (!(c.r(j) > Scalar(0)))
      throw GeometryError("node " + std::to_string(j) + " has non-positive r");
    if (!((c.node(j) - c.node(j - 1)).norm() > Scalar(0)))
      throw GeometryError("element " + std::to_string(j) + " has zero length");
  }
}

template <typename Scalar>
struct ElementFrame {
  Scalar length;
  Eigen::Matrix<Scalar, 2, 1> tangent;
  Eigen::Matrix<Scalar, 2, 1> normal;
  Scalar theta;
};

/// (a, b)^perp = (b, -a); the unit normal is n = -tau^perp = (-sin t, cos t).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, 2, 1> perp(const Eigen::MatrixBase<Derived>& v) {
  return {v(1), -v(0)};
}

template <typename Scalar>
ElementFrame<Scalar> element_frame(const BasicCurve<Scalar>& c, Eigen::Index j) {
  using std::atan2;
  const Eigen::Matrix<Scalar, 2, 1> d = c.node(j) - c.node(j - 1);
  const Scalar len = d.norm();
  if (!(len > Scalar(0)))
    throw GeometryError("element " + std::to_string(j) + " has zero length");
  ElementFrame<Scalar> f;
  f.length = len;
  f.tangent = d / len;
  f.normal = -perp(f.tangent);
  f.theta = atan2(f.tangent(1), f.tangent(0));
  if (f.theta == Scalar(-std::numbers::pi)) f.theta = Scalar(std::numbers::pi);
  return f;
}

/// Element j = 1..J joins nodes j-1 and j; result index j-1.
template <typename Scalar>
std::vector<ElementFrame<Scalar>> element_frames(const BasicCurve<Scalar>& c) {
  std::vector<ElementFrame<Scalar>> frames;
  frames.reserve(static_cast<std::size_t>(c.num_elements()));
  for (Eigen::Index j = 1; j < c.num_nodes(); ++j) frames.push_back(element_frame(c, j));
  return frames;
}

/// Volume of the solid obtained by revolving the region between the curve and
/// the substrate, pi * int r^2 (n . e1) |X_rho| drho. The integrand is
/// quadratic per element and is integrated exactly, so the value is the exact
/// volume of the revolved polygon.
template <typename Scalar>
Scalar signed_volume(const BasicCurve<Scalar>& c) {
  Scalar v(0);
  for (Eigen::Index j = 1; j < c.num_nodes(); ++j) {
    const Scalar ra = c.r(j - 1), rb = c.r(j);
    v -= (c.z(j) - c.z(j - 1)) * (ra * ra + ra * rb + rb * rb);
  }
  return Scalar(std::numbers::pi) * v / Scalar(3);
}

template <typename Scalar>
Scalar discrete_volume(const BasicCurve<Scalar>& c) {
  const Scalar v = signed_volume(c);
  if (v < Scalar(0))
    throw GeometryError("curve encloses negative volume (reversed node orientation?)");
  return v;
}

/// W = 2 pi sum_j l_j gamma(theta_j) mean(r) - sigma pi (r_outer^2 - r_inner^2).
template <typename Scalar>
Scalar discrete_energy(const BasicCurve<Scalar>& c, const AnisotropyModel& model, double sigma) {
  Scalar surface(0);
  for (Eigen::Index j = 1; j < c.num_nodes(); ++j) {
    const auto f = element_frame(c, j);
    surface += f.length * model.eval(f.theta).value * (c.r(j - 1) + c.r(j)) / Scalar(2);
  }
  const Scalar ro = c.r_outer(), ri = c.r_inner();
  return Scalar(2 * std::numbers::pi) * surface -
         Scalar(sigma * std::numbers::pi) * (ro * ro - ri * ri);
}

/// Time-integrated weighted normal on each element, stored at the element's
/// two endpoints (it is affine in rho on each element):
///   f = -(1/6)[(2 r^m + r^{m+1}) X^m_rho + (2 r^{m+1} + r^m) X^{m+1}_rho]^perp
template <typename Scalar>
struct WeightedNormal {
  Eigen::Matrix<Scalar, 2, Eigen::Dynamic> left;   ///< value at q_{j-1}^+
  Eigen::Matrix<Scalar, 2, Eigen::Dynamic> right;  ///< value at q_j^-
};

template <typename Scalar>
WeightedNormal<Scalar> weighted_normal(const BasicCurve<Scalar>& old_curve,
                                       const BasicCurve<Scalar>& new_curve) {
  if (old_curve.num_nodes() != new_curve.num_nodes())
    throw GeometryError("weighted normal needs curves with matching node counts");
  const Eigen::Index ne = old_curve.num_elements();
  const Scalar inv_h = Scalar(ne);
  WeightedNormal<Scalar> f;
  f.left.resize(2, ne);
  f.right.resize(2, ne);
  for (Eigen::Index j = 1; j <= ne; ++j) {
    const Eigen::Matrix<Scalar, 2, 1> dm =
        perp((old_curve.node(j) - old_curve.node(j - 1)).eval()) * inv_h;
    const Eigen::Matrix<Scalar, 2, 1> dn =
        perp((new_curve.node(j) - new_curve.node(j - 1)).eval()) * inv_h;
    auto at = [&](Eigen::Index k) -> Eigen::Matrix<Scalar, 2, 1> {
      const Scalar rm = old_curve.r(k), rn = new_curve.r(k);
      return -((Scalar(2) * rm + rn) * dm + (Scalar(2) * rn + rm) * dn) / Scalar(6);
    };
    f.left.col(j - 1) = at(j - 1);
    f.right.col(j - 1) = at(j);
  }
  return f;
}

/// Exact integral over one element of width h of the product u . v of two
/// affine vector fields given by their endpoint values.
template <typename A, typename B, typename C, typename D>
auto affine_dot_integral(const A& ua, const B& ub, const C& va, const D& vb,
                         typename A::Scalar h) {
  using Scalar = typename A::Scalar;
  return h * (Scalar(2) * ua.dot(va) + ua.dot(vb) + ub.dot(va) + Scalar(2) * ub.dot(vb)) /
         Scalar(6);
}

/// 2 pi <X^{m+1} - X^m, f^{m+1/2}>, which equals vol(X^{m+1}) - vol(X^m)
/// whenever both curves satisfy the substrate/axis boundary conditions.
template <typename Scalar>
Scalar volume_increment(const BasicCurve<Scalar>& old_curve, const BasicCurve<Scalar>& new_curve) {
  const auto f = weighted_normal(old_curve, new_curve);
  const Eigen::Index ne = old_curve.num_elements();
  const Scalar h = Scalar(1) / Scalar(ne);
  Scalar acc(0);
  for (Eigen::Index j = 1; j <= ne; ++j) {
    const Eigen::Matrix<Scalar, 2, 1> da = new_curve.node(j - 1) - old_curve.node(j - 1);
    const Eigen::Matrix<Scalar, 2, 1> db = new_curve.node(j) - old_curve.node(j);
    acc += affine_dot_integral(da, db, f.left.col(j - 1).eval(), f.right.col(j - 1).eval(), h);
  }
  return Scalar(2 * std::numbers::pi) * acc;
}

template <typename Scalar>
Scalar mesh_ratio(const BasicCurve<Scalar>& c) {
  if (c.num_elements() < 1) throw GeometryError("mesh ratio needs at least one element");
  Scalar lo = std::numeric_limits<Scalar>::infinity(), hi(0);
  for (Eigen::Index j = 1; j < c.num_nodes(); ++j) {
    const Scalar len = (c.node(j) - c.node(j - 1)).norm();
    lo = std::min(lo, len);
    hi = std::max(hi, len);
  }
  return hi / lo;
}

/// Turning-angle curvature at interior nodes (entries 0 and J are zero).
/// Positive where the curve bends away from its normal, e.g. on a cap.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> discrete_curvature(const BasicCurve<Scalar>& c) {
  const Eigen::Index n = c.num_nodes();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> kappa = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(n);
  for (Eigen::Index j = 1; j + 1 < n; ++j) {
    const auto a = element_frame(c, j);
    const auto b = element_frame(c, j + 1);
    Scalar turn = b.theta - a.theta;
    const Scalar pi(std::numbers::pi);
    while (turn > pi) turn -= Scalar(2) * pi;
    while (turn <= -pi) turn += Scalar(2) * pi;
    kappa(j) = -turn / ((a.length + b.length) / Scalar(2));
  }
  return kappa;
}

/// Contact angle at the outer contact point, in radians, measured inside the
/// film. The tangent angles of the last two elements are extrapolated
/// linearly (in arc length) to the contact point.
double contact_angle(const GeneratingCurve& c);

enum class ShapeKind { semi_ellipse, torus, elongated };

/// semi_ellipse: params {a (radius along the substrate), b (height)}
/// torus:        params {R (centre radius), a (tube radius)}
/// elongated:    params {length, height, inner radius}
struct ShapeSpec {
  ShapeKind kind = ShapeKind::semi_ellipse;
  std::vector<double> params;
};

/// Nodes are equidistributed in arc length.
GeneratingCurve make_initial_shape(const ShapeSpec& spec, int J);

void write_curve_csv(std::ostream& os, const GeneratingCurve& c);
void write_curve_csv(const std::string& path, const GeneratingCurve& c);
/// Topology is inferred: r_0 == 0 means inner_on_axis.
GeneratingCurve read_curve_csv(std::istream& is);

}  // namespace axidewet
