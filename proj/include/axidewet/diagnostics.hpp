#pragma once

#include "axidewet/anisotropy.hpp"
#include "axidewet/energy_matrix.hpp"
#include "axidewet/evolution.hpp"
#include "axidewet/fem_assembly.hpp"
#include "axidewet/geometry.hpp"

#include <Eigen/Core>

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

namespace axidewet {

/// Simple, counter-clockwise polygon without a repeated closing vertex.
struct RegionPolygon {
  Eigen::Matrix2Xd vertices;

  Eigen::Index size() const { return vertices.cols(); }
  Eigen::Vector2d vertex(Eigen::Index i) const { return vertices.col(i % vertices.cols()); }
};

/// Shoelace area, positive for counter-clockwise vertices.
double signed_area(const Eigen::Matrix2Xd& vertices);

/// Checks simplicity and orients counter-clockwise. Throws GeometryError naming
/// the first pair of intersecting edges.
RegionPolygon make_region(const Eigen::Matrix2Xd& vertices);

/// Closes the curve along z = 0 (and along r = 0 for inner_on_axis).
RegionPolygon region_of(const GeneratingCurve& c);

/// Index pair of the first intersecting non-adjacent edges, if any.
std::optional<std::pair<Eigen::Index, Eigen::Index>> find_self_intersection(
    const Eigen::Matrix2Xd& vertices);

/// Area of the intersection of two simple polygons (Green's theorem over the
/// boundary pieces of each polygon that lie inside the other).
double intersection_area(const RegionPolygon& p, const RegionPolygon& q);

double manifold_distance(const RegionPolygon& p, const RegionPolygon& q);
double manifold_distance(const GeneratingCurve& a, const GeneratingCurve& b);

/// Linear-in-time interpolant between the snapshots bracketing t. Snapshots
/// must hold a single film; the bracketing pair must share node count and
/// topology.
GeneratingCurve interpolate_snapshots(const std::vector<Snapshot>& snaps, double t);

double interpolated_error(const std::vector<Snapshot>& run_a, const std::vector<Snapshot>& run_b,
                          double t);

struct LadderLevel {
  int J = 10;
  double dt = 0.6;
};

/// h -> h/2, dt -> dt/4 starting from (1/J0, dt0).
std::vector<LadderLevel> make_ladder(int J0, double dt0, int levels);

struct ConvergenceScenario {
  ShapeSpec shape;
  AnisotropyModel model = AnisotropyModel::isotropic();
  EnergyMatrixSpec spec = EnergyMatrixSpec::constant(0, 2.0);
  SchemeConfig scheme;
  double T = 1.0;
};

struct ConvergenceRow {
  int level = 0;
  double h = 0.0;
  double dt = 0.0;
  double error = 0.0;
  std::optional<double> order;
};

/// Runs every level to T and reports e_k = Md(level k, level k+1) and
/// order_k = log2(e_{k-1} / e_k). The last level only serves as reference.
/// Levels run on `workers` threads.
std::vector<ConvergenceRow> convergence_study(const std::vector<LadderLevel>& ladder,
                                              const ConvergenceScenario& scenario,
                                              int workers = 1);

void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows);

}  // namespace axidewet
