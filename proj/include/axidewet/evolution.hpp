#pragma once

#include "axidewet/anisotropy.hpp"
#include "axidewet/energy_matrix.hpp"
#include "axidewet/fem_assembly.hpp"
#include "axidewet/geometry.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace axidewet {

/// Thresholds for the topology events. A non-positive value means "derive
/// from the initial curve" (1e-3 times its outer radius).
struct EventPolicy {
  double axis_touch_eps = 0.0;
  double pinch_eps = 0.0;
  bool enabled = true;

  EventPolicy resolved(const GeneratingCurve& initial) const;
  void validate() const;
};

/// One row of the trajectory. With several films the extensive quantities
/// are summed, r_inner/r_outer are the extreme contact radii and the mesh
/// ratio is the worst one.
struct StepRecord {
  double t = 0.0;
  double volume = 0.0;
  double dV_rel = 0.0;
  double energy = 0.0;
  double energy_ratio = 1.0;
  double mesh_ratio = 1.0;
  double r_inner = 0.0;
  double r_outer = 0.0;
  int picard_iters = 0;
};

enum class EventKind { axis_touch, pinch_off, split_refused, recontact };
const char* to_string(EventKind k);

struct EventRecord {
  double t = 0.0;
  EventKind kind = EventKind::axis_touch;
  int film = 0;
  int node = 0;
  double volume_jump = 0.0;   ///< volume after minus volume before
  double sliver_bound = 0.0;  ///< a priori bound on |volume_jump|
  std::string message;
};

struct Snapshot {
  int step = 0;
  double t = 0.0;
  std::vector<GeneratingCurve> films;
};

enum class Termination { reached_end, recontact, solver_failure };
const char* to_string(Termination t);

struct TrajectoryRecord {
  std::vector<StepRecord> rows;
  std::vector<Snapshot> snapshots;
  std::vector<EventRecord> events;
  std::vector<GeneratingCurve> final_films;
  Termination termination = Termination::reached_end;
  std::string failure;
};

struct RunOptions {
  double T = 1.0;
  int snapshot_every = 0;  ///< 0: only the initial and final state
  EventPolicy events;
  std::function<void(const StepRecord&)> on_step;
};

/// Thrown when a step cannot be completed; carries everything recorded so far.
class RunAborted : public SolverError {
 public:
  RunAborted(const std::string& what, TrajectoryRecord partial)
      : SolverError(what), partial_(std::move(partial)) {}
  const TrajectoryRecord& partial() const { return partial_; }

 private:
  TrajectoryRecord partial_;
};

/// Advances until t = T or a terminal event. The last step is shortened so
/// that T is hit exactly. Event checks run after each accepted step, in the
/// order pinch-off, axis touch, re-contact.
TrajectoryRecord run(const GeneratingCurve& initial, const AnisotropyModel& model,
                     const EnergyMatrixSpec& spec, const SchemeConfig& config,
                     const RunOptions& options);

bool detect_axis_touch(const GeneratingCurve& c, const EventPolicy& policy);

struct AxisTransition {
  GeneratingCurve curve;
  double volume_jump = 0.0;
  double sliver_bound = 0.0;
};

/// Snaps r_0 to 0 and switches to inner_on_axis. The bound is
/// pi r_0 (r_0 + r_1) max(z) / 3, the exact jump being pi r_0 z_1 (r_0 + r_1) / 3.
AxisTransition apply_axis_transition(const GeneratingCurve& c);

/// Interior node with z_j < pinch_eps and the smallest z (ties: smaller index).
std::optional<Eigen::Index> detect_pinch_off(const GeneratingCurve& c, const EventPolicy& policy);

/// Minimum node count of a film produced by a split.
inline constexpr Eigen::Index kMinSplitNodes = 4;

struct SplitResult {
  GeneratingCurve inner;
  GeneratingCurve outer;
  double volume_jump = 0.0;
  double sliver_bound = 0.0;
};

/// Splits at interior node j, duplicating it with z = 0. The inner piece keeps
/// the parent's inner topology. Returns nullopt if a piece would have fewer
/// than kMinSplitNodes nodes.
std::optional<SplitResult> split_curve(const GeneratingCurve& c, Eigen::Index j);

/// Index f of the first pair of neighbouring films (f, f+1), ordered from the
/// axis outwards, whose gap r_inner(f+1) - r_outer(f) is below pinch_eps.
/// Pairs with armed[f] == false are skipped; an empty mask arms every pair.
/// run() arms a pair once its gap has reached pinch_eps after the split that
/// created it, since the two pieces start out touching.
std::optional<std::size_t> detect_recontact(const std::vector<GeneratingCurve>& films,
                                            const EventPolicy& policy,
                                            const std::vector<bool>& armed = {});

double total_volume(const std::vector<GeneratingCurve>& films);

void write_trajectory_csv(std::ostream& os, const std::vector<StepRecord>& rows);
void write_trajectory_csv(const std::string& path, const std::vector<StepRecord>& rows);
std::vector<StepRecord> read_trajectory_csv(std::istream& is);
std::vector<StepRecord> read_trajectory_csv(const std::string& path);

void write_events_csv(std::ostream& os, const std::vector<EventRecord>& events);

}  // namespace axidewet
