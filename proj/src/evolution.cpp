#include "axidewet/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

namespace axidewet {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr const char* kTrajectoryHeader =
    "t,volume,dV_rel,energy,energy_ratio,mesh_ratio,r_inner,r_outer,picard_iters";
}  // namespace

EventPolicy EventPolicy::resolved(const GeneratingCurve& initial) const {
  EventPolicy p = *this;
  const double fallback = 1e-3 * initial.r_outer();
  if (!(p.axis_touch_eps > 0.0)) p.axis_touch_eps = fallback;
  if (!(p.pinch_eps > 0.0)) p.pinch_eps = p.axis_touch_eps;
  return p;
}

void EventPolicy::validate() const {
  if (!(axis_touch_eps > 0.0) || !(pinch_eps > 0.0))
    throw std::invalid_argument("event thresholds must be positive");
}

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::axis_touch:
      return "axis_touch";
    case EventKind::pinch_off:
      return "pinch_off";
    case EventKind::split_refused:
      return "split_refused";
    case EventKind::recontact:
      return "recontact";
  }
  return "?";
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::reached_end:
      return "reached_end";
    case Termination::recontact:
      return "recontact";
    case Termination::solver_failure:
      return "solver_failure";
  }
  return "?";
}

bool detect_axis_touch(const GeneratingCurve& c, const EventPolicy& policy) {
  return c.topology == Topology::two_contacts && c.r_inner() < policy.axis_touch_eps;
}

AxisTransition apply_axis_transition(const GeneratingCurve& c) {
  if (c.topology != Topology::two_contacts)
    throw std::invalid_argument("axis transition needs a curve with two contact points");
  AxisTransition out;
  out.curve = c;
  const double r0 = c.r(0), r1 = c.r(1);
  out.curve.nodes(0, 0) = 0.0;
  out.curve.topology = Topology::inner_on_axis;
  out.volume_jump = signed_volume(out.curve) - signed_volume(c);
  out.sliver_bound = kPi * r0 * (r0 + r1) * c.nodes.row(1).maxCoeff() / 3.0;
  return out;
}

std::optional<Eigen::Index> detect_pinch_off(const GeneratingCurve& c, const EventPolicy& policy) {
  std::optional<Eigen::Index> best;
  for (Eigen::Index j = 1; j + 1 < c.num_nodes(); ++j) {
    if (!(c.z(j) < policy.pinch_eps)) continue;
    if (!best || c.z(j) < c.z(*best)) best = j;
  }
  return best;
}

std::optional<SplitResult> split_curve(const GeneratingCurve& c, Eigen::Index j) {
  const Eigen::Index n = c.num_nodes();
  if (j <= 0 || j >= n - 1) throw std::invalid_argument("split node must be interior");
  if (j + 1 < kMinSplitNodes || n - j < kMinSplitNodes) return std::nullopt;
  SplitResult out;
  out.inner = GeneratingCurve(c.nodes.leftCols(j + 1), c.topology);
  out.outer = GeneratingCurve(c.nodes.rightCols(n - j), Topology::two_contacts);
  out.inner.nodes(1, j) = 0.0;
  out.outer.nodes(1, 0) = 0.0;
  out.volume_jump = signed_volume(out.inner) + signed_volume(out.outer) - signed_volume(c);
  const double rs = c.r(j - 1) + c.r(j) + c.r(j + 1);
  out.sliver_bound = kPi * std::abs(c.z(j)) * rs * rs / 3.0;
  return out;
}

std::optional<std::size_t> detect_recontact(const std::vector<GeneratingCurve>& films,
                                            const EventPolicy& policy,
                                            const std::vector<bool>& armed) {
  for (std::size_t f = 0; f + 1 < films.size(); ++f) {
    if (f < armed.size() && !armed[f]) continue;
    if (films[f + 1].r_inner() - films[f].r_outer() < policy.pinch_eps) return f;
  }
  return std::nullopt;
}

double total_volume(const std::vector<GeneratingCurve>& films) {
  double v = 0.0;
  for (const auto& f : films) v += signed_volume(f);
  return v;
}

namespace {

StepRecord measure(double t, const std::vector<GeneratingCurve>& films, const AnisotropyModel& model,
                   double sigma, double v0, double e0, int iters) {
  StepRecord r;
  r.t = t;
  r.volume = total_volume(films);
  r.dV_rel = (r.volume - v0) / v0;
  r.energy = 0.0;
  r.mesh_ratio = 0.0;
  r.r_inner = films.front().r_inner();
  r.r_outer = films.back().r_outer();
  for (const auto& f : films) {
    r.energy += discrete_energy(f, model, sigma);
    r.mesh_ratio = std::max(r.mesh_ratio, mesh_ratio(f));
    r.r_inner = std::min(r.r_inner, f.r_inner());
    r.r_outer = std::max(r.r_outer, f.r_outer());
  }
  r.energy_ratio = r.energy / e0;
  r.picard_iters = iters;
  return r;
}

// Takes the full step unless the inner contact point of the innermost film
// would cross the axis; then the step is shortened by bisection until r_0
// lands in [0, eps). `h` is updated to the length actually taken.
template <typename Attempt>
std::vector<GeneratingCurve> locate_axis_touch(Attempt& attempt, double& h, double eps) {
  constexpr int kMaxBisections = 40;
  std::optional<SolverError> first_error;
  try {
    return attempt(h);
  } catch (const SolverError& e) {
    first_error = e;
  }
  double lo = 0.0, hi = h;
  for (int i = 0; i < kMaxBisections; ++i) {
    const double mid = 0.5 * (lo + hi);
    try {
      auto out = attempt(mid);
      const double r0 = out.front().r_inner();
      if (r0 >= eps) {
        lo = mid;
      } else {
        h = mid;
        return out;
      }
    } catch (const SolverError&) {
      hi = mid;
    }
  }
  if (first_error) throw *first_error;
  throw SolverError("could not locate the axis touch within the step");
}

}  // namespace

TrajectoryRecord run(const GeneratingCurve& initial, const AnisotropyModel& model,
                     const EnergyMatrixSpec& spec, const SchemeConfig& config,
                     const RunOptions& options) {
  config.validate();
  validate_curve(initial);
  if (!(options.T > 0.0)) throw std::invalid_argument("final time T must be positive");
  if (options.snapshot_every < 0) throw std::invalid_argument("snapshot interval must be >= 0");
  const EventPolicy policy = options.events.resolved(initial);
  policy.validate();

  TrajectoryRecord rec;
  std::vector<GeneratingCurve> films{initial};
  const double sigma = config.contact.sigma;
  const double v0 = total_volume(films);
  const double e0 = discrete_energy(initial, model, sigma);
  if (!(v0 > 0.0)) throw GeometryError("initial curve encloses no volume");

  auto push_row = [&](const StepRecord& row) {
    rec.rows.push_back(row);
    if (options.on_step) options.on_step(row);
  };
  push_row(measure(0.0, films, model, sigma, v0, e0, 0));
  rec.snapshots.push_back({0, 0.0, films});

  std::set<std::pair<std::size_t, Eigen::Index>> refused;
  // armed[f]: the gap between films f and f+1 has opened to pinch_eps since the split
  std::vector<bool> armed;
  double t = 0.0;
  int m = 0;
  while (t < options.T) {
    const double grid = std::floor(t / config.dt + 1e-9) + 1.0;
    double t_next = std::min(options.T, grid * config.dt);
    if (options.T - t_next < 1e-9 * config.dt) t_next = options.T;
    const double full_step = t_next - t;
    double step = full_step;
    std::vector<GeneratingCurve> next;
    int iters = 0;
    try {
      auto attempt = [&](double h) {
        SchemeConfig cfg = config;
        cfg.dt = h;
        std::vector<GeneratingCurve> out;
        iters = 0;
        for (const auto& film : films) {
          StepResult res = solve_step(film, model, spec, cfg);
          iters += res.picard_iters;
          out.push_back(std::move(res.curve));
        }
        return out;
      };
      if (policy.enabled && films.front().topology == Topology::two_contacts) {
        next = locate_axis_touch(attempt, step, policy.axis_touch_eps);
      } else {
        next = attempt(step);
      }
    } catch (const SolverError& e) {
      rec.termination = Termination::solver_failure;
      std::ostringstream os;
      os << "step " << m + 1 << " at t=" << t << ": " << e.what();
      rec.failure = os.str();
      rec.final_films = films;
      rec.snapshots.push_back({m, t, films});
      throw RunAborted(rec.failure, rec);
    }
    films = std::move(next);
    t = step == full_step ? t_next : t + step;
    ++m;

    bool stop = false;
    if (policy.enabled) {
      for (std::size_t f = 0; f < films.size(); ++f) {
        const auto j = detect_pinch_off(films[f], policy);
        if (!j) continue;
        auto split = split_curve(films[f], *j);
        if (!split) {
          if (refused.insert({f, *j}).second)
            rec.events.push_back({t, EventKind::split_refused, static_cast<int>(f),
                                  static_cast<int>(*j), 0.0, 0.0,
                                  "piece would have fewer than 4 nodes"});
          continue;
        }
        rec.events.push_back({t, EventKind::pinch_off, static_cast<int>(f), static_cast<int>(*j),
                              split->volume_jump, split->sliver_bound, ""});
        films[f] = std::move(split->inner);
        films.insert(films.begin() + static_cast<std::ptrdiff_t>(f) + 1, std::move(split->outer));
        armed.insert(armed.begin() + static_cast<std::ptrdiff_t>(f), false);
        refused.clear();
        ++f;
      }
      for (std::size_t f = 0; f < films.size(); ++f) {
        if (!detect_axis_touch(films[f], policy)) continue;
        auto tr = apply_axis_transition(films[f]);
        rec.events.push_back({t, EventKind::axis_touch, static_cast<int>(f), 0, tr.volume_jump,
                              tr.sliver_bound, ""});
        films[f] = std::move(tr.curve);
      }
      if (const auto f = detect_recontact(films, policy, armed)) {
        rec.events.push_back({t, EventKind::recontact, static_cast<int>(*f),
                              static_cast<int>(films[*f].num_nodes() - 1), 0.0, 0.0,
                              "films " + std::to_string(*f) + " and " + std::to_string(*f + 1) +
                                  " touch"});
        rec.termination = Termination::recontact;
        stop = true;
      }
      for (std::size_t f = 0; f < armed.size(); ++f)
        if (films[f + 1].r_inner() - films[f].r_outer() >= policy.pinch_eps) armed[f] = true;
    }
    push_row(measure(t, films, model, sigma, v0, e0, iters));
    if (options.snapshot_every > 0 && m % options.snapshot_every == 0)
      rec.snapshots.push_back({m, t, films});
    if (stop) break;
  }
  if (rec.snapshots.back().step != m) rec.snapshots.push_back({m, t, films});
  rec.final_films = films;
  return rec;
}

void write_trajectory_csv(std::ostream& os, const std::vector<StepRecord>& rows) {
  const auto old_prec = os.precision(17);
  os << kTrajectoryHeader << '\n';
  for (const auto& r : rows)
    os << r.t << ',' << r.volume << ',' << r.dV_rel << ',' << r.energy << ',' << r.energy_ratio
       << ',' << r.mesh_ratio << ',' << r.r_inner << ',' << r.r_outer << ',' << r.picard_iters
       << '\n';
  os.precision(old_prec);
}

void write_trajectory_csv(const std::string& path, const std::vector<StepRecord>& rows) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_trajectory_csv(os, rows);
}

std::vector<StepRecord> read_trajectory_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kTrajectoryHeader)
    throw std::runtime_error("trajectory CSV: unexpected header");
  std::vector<StepRecord> rows;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 9)
      throw std::runtime_error("trajectory CSV line " + std::to_string(lineno) +
                               ": expected 9 fields");
    auto num = [&](int i) {
      const std::string& text = cells[static_cast<std::size_t>(i)];
      char* end = nullptr;
      const double v = std::strtod(text.c_str(), &end);
      if (text.empty() || end != text.c_str() + text.size())
        throw std::runtime_error("trajectory CSV line " + std::to_string(lineno) + ": bad number");
      return v;
    };
    StepRecord r;
    r.t = num(0);
    r.volume = num(1);
    r.dV_rel = num(2);
    r.energy = num(3);
    r.energy_ratio = num(4);
    r.mesh_ratio = num(5);
    r.r_inner = num(6);
    r.r_outer = num(7);
    r.picard_iters = std::stoi(cells[8]);
    rows.push_back(r);
  }
  return rows;
}

std::vector<StepRecord> read_trajectory_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_trajectory_csv(is);
}

void write_events_csv(std::ostream& os, const std::vector<EventRecord>& events) {
  const auto old_prec = os.precision(17);
  os << "t,kind,film,node,volume_jump,sliver_bound,message\n";
  for (const auto& e : events)
    os << e.t << ',' << to_string(e.kind) << ',' << e.film << ',' << e.node << ','
       << e.volume_jump << ',' << e.sliver_bound << ',' << e.message << '\n';
  os.precision(old_prec);
}

}  // namespace axidewet
