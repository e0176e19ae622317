#include "axidewet/geometry.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace axidewet;
using std::numbers::pi;

namespace {

GeneratingCurve curve(std::initializer_list<std::pair<double, double>> pts,
                      Topology t = Topology::two_contacts) {
  Eigen::Matrix2Xd x(2, static_cast<Eigen::Index>(pts.size()));
  Eigen::Index j = 0;
  for (auto [r, z] : pts) x.col(j++) << r, z;
  return {x, t};
}

// Pappus: the solid of revolution of a simple polygon has volume
// 2 pi * area * r_centroid. The region is the curve closed along the substrate
// (and the axis).
double pappus_volume(const GeneratingCurve& c) {
  std::vector<Eigen::Vector2d> p;
  if (c.topology == Topology::inner_on_axis && c.z(0) != 0.0) p.emplace_back(0.0, 0.0);
  for (Eigen::Index j = 0; j < c.num_nodes(); ++j) p.emplace_back(c.node(j));
  double mr = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& u = p[i];
    const auto& v = p[(i + 1) % p.size()];
    const double cr = u.x() * v.y() - v.x() * u.y();
    mr += (u.x() + v.x()) * cr / 6;
  }
  // nodes run from the inner point over the top to the outer point: clockwise
  return -2 * pi * mr;
}

GeneratingCurve hemisphere(int J) {
  Eigen::Matrix2Xd x(2, J + 1);
  for (int j = 0; j <= J; ++j) {
    const double a = pi / 2 * (1.0 - double(j) / J);
    x.col(j) << std::cos(a), std::sin(a);
  }
  x(0, 0) = 0.0;
  x(1, J) = 0.0;
  return {x, Topology::inner_on_axis};
}

GeneratingCurve perturbed(const GeneratingCurve& c, double amp, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-amp, amp);
  GeneratingCurve p = c;
  for (Eigen::Index j = 0; j < c.num_nodes(); ++j) {
    const bool last = j == c.num_nodes() - 1;
    if (!(j == 0 && c.topology == Topology::inner_on_axis)) p.nodes(0, j) += u(rng);
    if (!last && !(j == 0 && c.topology == Topology::two_contacts)) p.nodes(1, j) += u(rng);
  }
  return p;
}

}  // namespace

TEST_CASE("element frames") {
  const auto f1 = element_frame(curve({{1, 0}, {2, 0}}), 1);
  CHECK(f1.theta == doctest::Approx(0.0));
  CHECK((f1.normal - Eigen::Vector2d(0, 1)).norm() < 1e-15);
  const auto f2 = element_frame(curve({{1, 0}, {1, 1}}), 1);
  CHECK(f2.theta == doctest::Approx(pi / 2));
  CHECK((f2.normal - Eigen::Vector2d(-1, 0)).norm() < 1e-15);
  const auto f3 = element_frame(curve({{1, 0}, {0, 1}}), 1);
  CHECK(f3.theta == doctest::Approx(3 * pi / 4));
  CHECK((f3.normal - Eigen::Vector2d(-std::sqrt(0.5), -std::sqrt(0.5))).norm() < 1e-15);
  CHECK_THROWS_WITH_AS(element_frames(curve({{1, 0}, {1, 1}, {1, 1}, {2, 0}})),
                       "element 2 has zero length", GeometryError);
}

TEST_CASE("volume of polygons") {
  const auto rect = curve({{1, 0}, {1, 1}, {2, 1}, {2, 0}});
  CHECK(discrete_volume(rect) == doctest::Approx(3 * pi).epsilon(1e-15));
  CHECK(signed_volume(rect) == doctest::Approx(pappus_volume(rect)).epsilon(1e-14));

  GeneratingCurve reversed = rect;
  reversed.nodes = rect.nodes.rowwise().reverse().eval();
  CHECK(signed_volume(reversed) == doctest::Approx(-3 * pi).epsilon(1e-15));
  CHECK_THROWS_AS(discrete_volume(reversed), GeometryError);

  for (const auto& c : {make_initial_shape({ShapeKind::semi_ellipse, {4, 2}}, 30),
                        make_initial_shape({ShapeKind::torus, {4, 1}}, 30),
                        make_initial_shape({ShapeKind::elongated, {10, 1, 2}}, 60)})
    CHECK(signed_volume(c) == doctest::Approx(pappus_volume(c)).epsilon(1e-13));
}

TEST_CASE("hemisphere volume converges at second order") {
  const double exact = 2 * pi / 3;
  const double e1 = exact - discrete_volume(hemisphere(40));
  const double e2 = exact - discrete_volume(hemisphere(80));
  CHECK(e1 > 0.0);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.01));
}

TEST_CASE("discrete energy") {
  const auto iso = AnisotropyModel::isotropic();
  CHECK(discrete_energy(curve({{0, 0}, {1, 0}}, Topology::inner_on_axis), iso, 1.0) ==
        doctest::Approx(0.0).scale(1.0));
  // rectangle: inner wall r=1 (length 1), top (mean r 3/2, length 1), outer wall r=2
  const auto rect = curve({{1, 0}, {1, 1}, {2, 1}, {2, 0}});
  CHECK(discrete_energy(rect, iso, 0.0) == doctest::Approx(2 * pi * (1 + 1.5 + 2)).epsilon(1e-15));
  CHECK(discrete_energy(rect, iso, 0.5) ==
        doctest::Approx(2 * pi * 4.5 - 0.5 * pi * 3).epsilon(1e-15));
  const double area = discrete_energy(hemisphere(400), iso, 0.0);
  CHECK(area == doctest::Approx(2 * pi).epsilon(1e-4));
}

TEST_CASE("weighted normal") {
  const auto c = make_initial_shape({ShapeKind::semi_ellipse, {4, 2}}, 20);
  const auto f = weighted_normal(c, c);
  const auto frames = element_frames(c);
  for (Eigen::Index j = 1; j <= c.num_elements(); ++j) {
    const auto& fr = frames[static_cast<std::size_t>(j - 1)];
    const double scale = fr.length * c.num_elements();
    CHECK((f.left.col(j - 1) - c.r(j - 1) * scale * fr.normal).norm() < 1e-13);
    CHECK((f.right.col(j - 1) - c.r(j) * scale * fr.normal).norm() < 1e-13);
  }
  GeneratingCurve zero_r = curve({{0, 0}, {0, 1}, {0, 2}});
  CHECK(weighted_normal(zero_r, zero_r).left.norm() == 0.0);
}

TEST_CASE("discrete volume identity on random pairs") {
  std::mt19937_64 rng(7);
  for (const auto& base : {make_initial_shape({ShapeKind::semi_ellipse, {4, 2}}, 24),
                           make_initial_shape({ShapeKind::torus, {4, 1}}, 24)}) {
    for (int trial = 0; trial < 50; ++trial) {
      const auto a = perturbed(base, 0.1, rng);
      const auto b = perturbed(a, 0.2, rng);
      const double vmax = std::max(std::abs(signed_volume(a)), std::abs(signed_volume(b)));
      CHECK(std::abs(volume_increment(a, b) - (signed_volume(b) - signed_volume(a))) <=
            1e-12 * vmax);
    }
  }
  // pure translation in z of the free nodes
  auto c = make_initial_shape({ShapeKind::semi_ellipse, {2, 1}}, 16);
  auto d = c;
  for (Eigen::Index j = 1; j + 1 < d.num_nodes(); ++j) d.nodes(1, j) += 0.05;
  CHECK(volume_increment(c, d) ==
        doctest::Approx(discrete_volume(d) - discrete_volume(c)).epsilon(1e-12));
}

TEST_CASE("mesh ratio") {
  CHECK(mesh_ratio(curve({{1, 0}, {2, 0}, {3, 0}, {4, 0}})) == doctest::Approx(1.0));
  CHECK(mesh_ratio(curve({{0, 0}, {1, 0}, {3, 0}, {7, 0}})) == doctest::Approx(4.0));
}

TEST_CASE("discrete curvature") {
  const auto line = curve({{1, 0}, {1, 1}, {1, 2}, {1, 3}});
  CHECK(discrete_curvature(line).cwiseAbs().maxCoeff() == 0.0);
  // arc of a circle of radius 2 traversed clockwise over the top: a cap
  const int J = 64;
  Eigen::Matrix2Xd x(2, J + 1);
  for (int j = 0; j <= J; ++j) {
    const double a = pi * (0.75 - 0.5 * j / J);
    x.col(j) << 5 + 2 * std::cos(a), 2 * std::sin(a);
  }
  const GeneratingCurve arc(x, Topology::two_contacts);
  const auto k = discrete_curvature(arc);
  for (Eigen::Index j = 1; j < J; ++j) CHECK(k(j) == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("initial shapes") {
  const auto e = make_initial_shape({ShapeKind::semi_ellipse, {4, 2}}, 10);
  CHECK(e.num_nodes() == 11);
  CHECK(e.topology == Topology::inner_on_axis);
  CHECK(e.r(0) == 0.0);
  CHECK(e.z(10) == 0.0);
  CHECK(e.r(10) == doctest::Approx(4.0));
  CHECK(e.z(0) == doctest::Approx(2.0));

  const auto t = make_initial_shape({ShapeKind::torus, {4, 1}}, 16);
  CHECK(t.topology == Topology::two_contacts);
  CHECK(t.r(0) == doctest::Approx(3.0));
  CHECK(t.z(0) == 0.0);
  CHECK(t.r(16) == doctest::Approx(5.0));
  CHECK(t.z(16) == 0.0);

  for (const auto& c : {make_initial_shape({ShapeKind::semi_ellipse, {0.66, 1}}, 80), t,
                        make_initial_shape({ShapeKind::elongated, {30, 1, 2}}, 100)}) {
    CHECK_NOTHROW(validate_curve(c));
    CHECK(mesh_ratio(c) < 1.01);
  }
  CHECK_THROWS_AS(make_initial_shape({ShapeKind::torus, {1, 2}}, 16), GeometryError);
}

TEST_CASE("curve validation") {
  CHECK_THROWS_WITH_AS(validate_curve(curve({{1, 0}, {2, 1}})),
                       "outer contact point must satisfy z = 0", GeometryError);
  CHECK_THROWS_AS(validate_curve(curve({{1, 0.5}, {2, 0}})), GeometryError);
  CHECK_THROWS_AS(validate_curve(curve({{0.5, 0}, {1, 1}}, Topology::inner_on_axis)),
                  GeometryError);
  CHECK_THROWS_AS(validate_curve(curve({{0, 1}, {-1, 1}, {1, 0}}, Topology::inner_on_axis)),
                  GeometryError);
}

TEST_CASE("contact angle") {
  // straight cone: the angle inside the film is atan(h / R)
  const auto cone = curve({{0, 1}, {1, 0.5}, {2, 0}}, Topology::inner_on_axis);
  CHECK(contact_angle(cone) == doctest::Approx(std::atan(0.5)).epsilon(1e-14));
  const auto wall = curve({{1, 0}, {1, 1}, {2, 1}, {2, 0.5}, {2, 0}});
  CHECK(contact_angle(wall) == doctest::Approx(pi / 2).epsilon(1e-14));
  // on a circular cap the extrapolated angle approaches the exact one at O(h^2)
  const auto cap = hemisphere(40);
  CHECK(contact_angle(cap) == doctest::Approx(pi / 2).epsilon(1e-3));
}

TEST_CASE("curve csv round trip is exact") {
  const auto c = make_initial_shape({ShapeKind::semi_ellipse, {4, 2}}, 17);
  std::stringstream ss;
  write_curve_csv(ss, c);
  const auto d = read_curve_csv(ss);
  CHECK(d.topology == c.topology);
  CHECK(d.nodes == c.nodes);
}
