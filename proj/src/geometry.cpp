#include "axidewet/geometry.hpp"

#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>

namespace axidewet {

const char* to_string(Topology t) {
  return t == Topology::inner_on_axis ? "inner_on_axis" : "two_contacts";
}

namespace {

using Param = std::function<Eigen::Vector2d(double)>;

// Samples `path` on [0, 1] at J+1 parameters equidistributed in arc length.
Eigen::Matrix2Xd equidistribute(const Param& path, int J) {
  const int dense = 4000 * J;
  std::vector<double> s(dense + 1, 0.0);
  Eigen::Vector2d prev = path(0.0);
  for (int k = 1; k <= dense; ++k) {
    const Eigen::Vector2d p = path(static_cast<double>(k) / dense);
    s[k] = s[k - 1] + (p - prev).norm();
    prev = p;
  }
  Eigen::Matrix2Xd x(2, J + 1);
  std::size_t k = 0;
  for (int j = 0; j <= J; ++j) {
    const double target = s.back() * j / J;
    while (k + 1 < s.size() && s[k + 1] < target) ++k;
    double t;
    if (j == J) {
      t = 1.0;
    } else if (k + 1 >= s.size()) {
      t = 1.0;
    } else {
      const double w = (s[k + 1] > s[k]) ? (target - s[k]) / (s[k + 1] - s[k]) : 0.0;
      t = (k + w) / dense;
    }
    x.col(j) = path(t);
  }
  return x;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw GeometryError("invalid initial shape: " + what);
}

}  // namespace

GeneratingCurve make_initial_shape(const ShapeSpec& spec, int J) {
  require(J >= 8, "J must be at least 8");
  const double pi = std::numbers::pi;
  GeneratingCurve c;
  switch (spec.kind) {
    case ShapeKind::semi_ellipse: {
      require(spec.params.size() == 2, "semi_ellipse takes (a, b)");
      const double a = spec.params[0], b = spec.params[1];
      require(a > 0 && b > 0, "semi_ellipse axes must be positive");
      // from the top of the axis (0, b) to the contact point (a, 0)
      c.nodes = equidistribute(
          [=](double t) {
            const double phi = pi / 2 * (1.0 - t);
            return Eigen::Vector2d(a * std::cos(phi), b * std::sin(phi));
          },
          J);
      c.topology = Topology::inner_on_axis;
      c.nodes(0, 0) = 0.0;
      break;
    }
    case ShapeKind::torus: {
      require(spec.params.size() == 2, "torus takes (R, a)");
      const double R = spec.params[0], a = spec.params[1];
      require(a > 0 && R > a, "torus needs R > a > 0");
      c.nodes.resize(2, J + 1);
      for (int j = 0; j <= J; ++j) {
        const double phi = pi * (1.0 - static_cast<double>(j) / J);
        c.nodes.col(j) = Eigen::Vector2d(R + a * std::cos(phi), a * std::sin(phi));
      }
      c.nodes(0, 0) = R - a;
      c.nodes(0, J) = R + a;
      c.nodes(1, 0) = 0.0;
      c.topology = Topology::two_contacts;
      break;
    }
    case ShapeKind::elongated: {
      require(spec.params.size() == 3, "elongated takes (length, height, inner radius)");
      const double len = spec.params[0], b = spec.params[1], ri = spec.params[2];
      require(b > 0 && ri > 0, "elongated needs positive height and inner radius");
      require(len >= 2 * b, "elongated length must be at least twice its height");
      const double arc = pi * b / 2;
      const double flat = len - 2 * b;
      const double total = 2 * arc + flat;
      c.nodes = equidistribute(
          [=](double t) {
            const double s = t * total;
            if (s <= arc) {
              const double phi = pi - s / b;
              return Eigen::Vector2d(ri + b + b * std::cos(phi), b * std::sin(phi));
            }
            if (s <= arc + flat) return Eigen::Vector2d(ri + b + (s - arc), b);
            const double phi = pi / 2 - (s - arc - flat) / b;
            return Eigen::Vector2d(ri + len - b + b * std::cos(phi), b * std::sin(phi));
          },
          J);
      c.nodes(0, 0) = ri;
      c.topology = Topology::two_contacts;
      break;
    }
  }
  c.nodes(1, J) = 0.0;
  if (c.topology == Topology::two_contacts) c.nodes(1, 0) = 0.0;
  validate_curve(c);
  return c;
}

void write_curve_csv(std::ostream& os, const GeneratingCurve& c) {
  os << "j,r,z\n";
  os << std::setprecision(17);
  for (Eigen::Index j = 0; j < c.num_nodes(); ++j) os << j << ',' << c.r(j) << ',' << c.z(j) << '\n';
}

void write_curve_csv(const std::string& path, const GeneratingCurve& c) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_curve_csv(os, c);
}

GeneratingCurve read_curve_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "j,r,z")
    throw GeometryError("curve csv must start with the header j,r,z");
  std::vector<Eigen::Vector2d> pts;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string j, r, z;
    if (!std::getline(ls, j, ',') || !std::getline(ls, r, ',') || !std::getline(ls, z))
      throw GeometryError("malformed curve csv row: " + line);
    if (std::stoul(j) != pts.size()) throw GeometryError("curve csv rows out of order");
    pts.emplace_back(std::strtod(r.c_str(), nullptr), std::strtod(z.c_str(), nullptr));
  }
  GeneratingCurve c;
  c.nodes.resize(2, static_cast<Eigen::Index>(pts.size()));
  for (std::size_t j = 0; j < pts.size(); ++j) c.nodes.col(static_cast<Eigen::Index>(j)) = pts[j];
  c.topology = (!pts.empty() && pts.front().x() == 0.0) ? Topology::inner_on_axis
                                                        : Topology::two_contacts;
  validate_curve(c);
  return c;
}

double contact_angle(const GeneratingCurve& c) {
  const Eigen::Index J = c.num_elements();
  const auto last = element_frame(c, J);
  const double phi = -last.theta;
  if (J < 2) return phi;
  const auto prev = element_frame(c, J - 1);
  double turn = last.theta - prev.theta;
  while (turn > std::numbers::pi) turn -= 2.0 * std::numbers::pi;
  while (turn <= -std::numbers::pi) turn += 2.0 * std::numbers::pi;
  return phi - turn * last.length / (last.length + prev.length);
}

}  // namespace axidewet
