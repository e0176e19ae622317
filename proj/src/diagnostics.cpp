#include "axidewet/diagnostics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace axidewet {

namespace {

using Pt = Eigen::Vector2d;

double cross(const Pt& u, const Pt& v) { return u.x() * v.y() - u.y() * v.x(); }

double orient(const Pt& a, const Pt& b, const Pt& c) { return cross(b - a, c - a); }

bool on_segment(const Pt& a, const Pt& b, const Pt& p) {
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
         std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

bool segments_intersect(const Pt& a, const Pt& b, const Pt& c, const Pt& d) {
  const double d1 = orient(c, d, a), d2 = orient(c, d, b);
  const double d3 = orient(a, b, c), d4 = orient(a, b, d);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  return (d1 == 0 && on_segment(c, d, a)) || (d2 == 0 && on_segment(c, d, b)) ||
         (d3 == 0 && on_segment(a, b, c)) || (d4 == 0 && on_segment(a, b, d));
}

double point_segment_distance(const Pt& p, const Pt& a, const Pt& b) {
  const Pt ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + t * ab)).norm();
}

double coordinate_scale(const RegionPolygon& p, const RegionPolygon& q) {
  return std::max({p.vertices.cwiseAbs().maxCoeff(), q.vertices.cwiseAbs().maxCoeff(), 1e-300});
}

enum class Side { inside, outside, shared_same, shared_opposite };

Side classify(const Pt& x, const Pt& dir, const RegionPolygon& q, double tol) {
  const Eigen::Index n = q.size();
  for (Eigen::Index k = 0; k < n; ++k) {
    const Pt c = q.vertex(k), d = q.vertex(k + 1);
    if (point_segment_distance(x, c, d) <= tol)
      return dir.dot(d - c) > 0 ? Side::shared_same : Side::shared_opposite;
  }
  bool inside = false;
  for (Eigen::Index k = 0; k < n; ++k) {
    const Pt c = q.vertex(k), d = q.vertex(k + 1);
    if ((c.y() > x.y()) != (d.y() > x.y())) {
      const double xi = c.x() + (x.y() - c.y()) * (d.x() - c.x()) / (d.y() - c.y());
      if (x.x() < xi) inside = !inside;
    }
  }
  return inside ? Side::inside : Side::outside;
}

// Sum of (x dy - y dx)/2 over the pieces of dP inside Q (plus the pieces
// running along dQ in the same direction when keep_shared is set).
double boundary_integral(const RegionPolygon& p, const RegionPolygon& q, bool keep_shared,
                         double tol) {
  constexpr double kParamSlack = 1e-12;
  double total = 0.0;
  std::vector<double> ts;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const Pt a = p.vertex(i), b = p.vertex(i + 1), r = b - a;
    const double rlen2 = r.squaredNorm();
    ts.assign({0.0, 1.0});
    for (Eigen::Index k = 0; k < q.size(); ++k) {
      const Pt c = q.vertex(k), d = q.vertex(k + 1), s = d - c;
      const double denom = cross(r, s);
      if (std::abs(denom) > 1e-14 * std::sqrt(rlen2 * s.squaredNorm())) {
        const double t = cross(c - a, s) / denom;
        const double u = cross(c - a, r) / denom;
        if (t >= -kParamSlack && t <= 1 + kParamSlack && u >= -kParamSlack && u <= 1 + kParamSlack)
          ts.push_back(std::clamp(t, 0.0, 1.0));
      } else if (std::abs(cross(c - a, r)) <= tol * std::sqrt(rlen2)) {
        for (const Pt& e : {c, d}) {
          const double t = (e - a).dot(r) / rlen2;
          if (t > 0.0 && t < 1.0) ts.push_back(t);
        }
      }
    }
    std::sort(ts.begin(), ts.end());
    for (std::size_t m = 0; m + 1 < ts.size(); ++m) {
      const double t0 = ts[m], t1 = ts[m + 1];
      if (t1 - t0 <= 1e-14) continue;
      const Pt x0 = a + t0 * r, x1 = a + t1 * r;
      const Side side = classify(0.5 * (x0 + x1), r, q, tol);
      if (side == Side::inside || (keep_shared && side == Side::shared_same))
        total += 0.5 * cross(x0, x1);
    }
  }
  return total;
}

}  // namespace

double signed_area(const Eigen::Matrix2Xd& v) {
  double a = 0.0;
  const Eigen::Index n = v.cols();
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index k = (i + 1) % n;
    a += v(0, i) * v(1, k) - v(0, k) * v(1, i);
  }
  return 0.5 * a;
}

std::optional<std::pair<Eigen::Index, Eigen::Index>> find_self_intersection(
    const Eigen::Matrix2Xd& v) {
  const Eigen::Index n = v.cols();
  auto vert = [&](Eigen::Index i) -> Pt { return v.col(i % n); };
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = i + 1; k < n; ++k) {
      const Pt a = vert(i), b = vert(i + 1), c = vert(k), d = vert(k + 1);
      const bool adjacent = k == i + 1 || (i == 0 && k == n - 1);
      if (adjacent) {
        // the shared vertex is fine; folding back onto the other edge is not
        const Pt e1 = b - a, e2 = d - c;
        if (cross(e1, e2) == 0.0 && e1.dot(e2) < 0)
          return std::make_pair(i, k);
        continue;
      }
      if (segments_intersect(a, b, c, d)) return std::make_pair(i, k);
    }
  }
  return std::nullopt;
}

RegionPolygon make_region(const Eigen::Matrix2Xd& vertices) {
  std::vector<Pt> pts;
  for (Eigen::Index i = 0; i < vertices.cols(); ++i) {
    const Pt x = vertices.col(i);
    if (pts.empty() || x != pts.back()) pts.push_back(x);
  }
  while (pts.size() > 1 && pts.front() == pts.back()) pts.pop_back();
  if (pts.size() < 3) throw GeometryError("region polygon needs at least three distinct vertices");
  RegionPolygon out;
  out.vertices.resize(2, static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) out.vertices.col(static_cast<Eigen::Index>(i)) = pts[i];
  if (auto bad = find_self_intersection(out.vertices))
    throw GeometryError("polygon edges " + std::to_string(bad->first) + " and " +
                        std::to_string(bad->second) + " intersect");
  const double area = signed_area(out.vertices);
  if (area == 0.0) throw GeometryError("polygon has zero area");
  if (area < 0.0) out.vertices = out.vertices.rowwise().reverse().eval();
  return out;
}

RegionPolygon region_of(const GeneratingCurve& c) {
  Eigen::Matrix2Xd v = c.nodes;
  if (c.topology == Topology::inner_on_axis && c.z(0) != 0.0) {
    v.conservativeResize(2, v.cols() + 1);
    v.col(v.cols() - 1) = Pt(0.0, 0.0);
  }
  return make_region(v);
}

double intersection_area(const RegionPolygon& p, const RegionPolygon& q) {
  const double tol = 1e-12 * coordinate_scale(p, q);
  const double area = boundary_integral(p, q, true, tol) + boundary_integral(q, p, false, tol);
  const double cap = std::min(signed_area(p.vertices), signed_area(q.vertices));
  return std::clamp(area, 0.0, cap);
}

double manifold_distance(const RegionPolygon& p, const RegionPolygon& q) {
  const double d =
      signed_area(p.vertices) + signed_area(q.vertices) - 2.0 * intersection_area(p, q);
  return std::max(d, 0.0);
}

double manifold_distance(const GeneratingCurve& a, const GeneratingCurve& b) {
  return manifold_distance(region_of(a), region_of(b));
}

GeneratingCurve interpolate_snapshots(const std::vector<Snapshot>& snaps, double t) {
  if (snaps.empty()) throw std::invalid_argument("no snapshots to interpolate");
  const double slack = 1e-12 * std::max(1.0, std::abs(t));
  auto single = [](const Snapshot& s) -> const GeneratingCurve& {
    if (s.films.size() != 1)
      throw std::invalid_argument("snapshot at t=" + std::to_string(s.t) + " holds " +
                                  std::to_string(s.films.size()) + " films");
    return s.films.front();
  };
  for (std::size_t i = 0; i < snaps.size(); ++i) {
    if (std::abs(snaps[i].t - t) <= slack) return single(snaps[i]);
    if (i + 1 < snaps.size() && snaps[i].t < t && t < snaps[i + 1].t) {
      const auto& x0 = single(snaps[i]);
      const auto& x1 = single(snaps[i + 1]);
      if (x0.num_nodes() != x1.num_nodes() || x0.topology != x1.topology)
        throw std::invalid_argument("snapshots bracketing t differ in shape of the mesh");
      const double dt = snaps[i + 1].t - snaps[i].t;
      const double w1 = (t - snaps[i].t) / dt;
      return GeneratingCurve((1.0 - w1) * x0.nodes + w1 * x1.nodes, x0.topology);
    }
  }
  throw std::out_of_range("t=" + std::to_string(t) + " lies outside the recorded snapshots");
}

double interpolated_error(const std::vector<Snapshot>& run_a, const std::vector<Snapshot>& run_b,
                          double t) {
  return manifold_distance(interpolate_snapshots(run_a, t), interpolate_snapshots(run_b, t));
}

std::vector<LadderLevel> make_ladder(int J0, double dt0, int levels) {
  if (J0 < 2 || !(dt0 > 0.0) || levels < 1) throw std::invalid_argument("invalid ladder");
  std::vector<LadderLevel> out;
  for (int k = 0; k < levels; ++k) out.push_back({J0 << k, dt0 / std::pow(4.0, k)});
  return out;
}

std::vector<ConvergenceRow> convergence_study(const std::vector<LadderLevel>& ladder,
                                              const ConvergenceScenario& scenario, int workers) {
  if (ladder.size() < 2) throw std::invalid_argument("a convergence study needs two levels");
  std::vector<GeneratingCurve> finals(ladder.size());
  std::vector<std::exception_ptr> errors(ladder.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k; (k = next++) < ladder.size();) {
      try {
        SchemeConfig cfg = scenario.scheme;
        cfg.dt = ladder[k].dt;
        RunOptions opts;
        opts.T = scenario.T;
        opts.events.enabled = false;
        const auto rec = run(make_initial_shape(scenario.shape, ladder[k].J), scenario.model,
                             scenario.spec, cfg, opts);
        finals[k] = rec.final_films.front();
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const int n = std::clamp(workers, 1, static_cast<int>(ladder.size()));
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<ConvergenceRow> rows;
  for (std::size_t k = 0; k + 1 < ladder.size(); ++k) {
    ConvergenceRow row;
    row.level = static_cast<int>(k);
    row.h = 1.0 / ladder[k].J;
    row.dt = ladder[k].dt;
    row.error = manifold_distance(finals[k], finals[k + 1]);
    if (k > 0 && rows.back().error > 0.0 && row.error > 0.0)
      row.order = std::log2(rows.back().error / row.error);
    rows.push_back(row);
  }
  return rows;
}

void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows) {
  const auto old_prec = os.precision(17);
  os << "level,h,dt,error,order\n";
  for (const auto& r : rows) {
    os << r.level << ',' << r.h << ',' << r.dt << ',' << r.error << ',';
    if (r.order) os << *r.order;
    os << '\n';
  }
  os.precision(old_prec);
}

}  // namespace axidewet
