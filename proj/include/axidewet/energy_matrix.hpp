#pragma once

#include "axidewet/anisotropy.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <memory>
#include <vector>

namespace axidewet {

template <typename Scalar>
using Mat2 = Eigen::Matrix<Scalar, 2, 2>;
template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;

/// Reflection R(2 theta) = [[cos 2t, sin 2t], [sin 2t, -cos 2t]] across the
/// line spanned by (cos t, sin t).
template <typename Scalar>
Mat2<Scalar> reflection(Scalar theta) {
  using std::cos;
  using std::sin;
  const Scalar c = cos(Scalar(2) * theta);
  const Scalar s = sin(Scalar(2) * theta);
  Mat2<Scalar> r;
  r << c, s, s, -c;
  return r;
}

/// [[gamma, -gamma'], [gamma', gamma]].
template <typename Scalar>
Mat2<Scalar> gamma_rotation_block(const GammaValues<Scalar>& g) {
  Mat2<Scalar> m;
  m << g.value, -g.d1, g.d1, g.value;
  return m;
}

/// Normal projector (I - R(2 theta)) / 2 = n n^T with n = (-sin t, cos t).
template <typename Scalar>
Mat2<Scalar> normal_projector(Scalar theta) {
  return (Mat2<Scalar>::Identity() - reflection(theta)) / Scalar(2);
}

/// Surface energy matrix B_q(theta) = M(theta) R(2 theta)^(1-q) + S(theta) n n^T.
template <typename Scalar>
Mat2<Scalar> surface_energy_matrix(int q, const GammaValues<Scalar>& g, Scalar theta,
                                   Scalar stabilizer) {
  const Mat2<Scalar> m = gamma_rotation_block(g);
  const Mat2<Scalar> lead = (q == 0) ? Mat2<Scalar>(m * reflection(theta)) : m;
  return lead + stabilizer * normal_projector(theta);
}

/// Minimal stabilizer sampled on a uniform periodic theta grid, evaluated by
/// periodic piecewise-linear interpolation.
class StabilizerTable {
 public:
  StabilizerTable() = default;
  StabilizerTable(std::vector<double> theta, std::vector<double> s0);

  const std::vector<double>& theta() const { return theta_; }
  const std::vector<double>& values() const { return s0_; }
  std::size_t size() const { return s0_.size(); }

  double operator()(double theta) const;

 private:
  std::vector<double> theta_;
  std::vector<double> s0_;
};

enum class StabilizerKind { constant, table, function };

/// The pair (q, S) that fixes B_q. For table-based stabilizers the applied
/// value is max(interpolant, 0) * margin.
class EnergyMatrixSpec {
 public:
  static EnergyMatrixSpec constant(int q, double value);
  static EnergyMatrixSpec tabulated(int q, std::shared_ptr<const StabilizerTable> table,
                                    double margin = kDefaultMargin);
  static EnergyMatrixSpec function(int q, std::function<double(double)> stabilizer);

  /// Minimal table computed for the model with default grids.
  static EnergyMatrixSpec automatic(const AnisotropyModel& model, int q,
                                    double margin = kDefaultMargin);

  static constexpr double kDefaultMargin = 1.01;

  int q() const { return q_; }
  StabilizerKind kind() const { return kind_; }
  double margin() const { return margin_; }
  const StabilizerTable* table() const { return table_.get(); }

  double stabilizer(double theta) const;

  /// Throws std::invalid_argument if the model is inadmissible for q.
  void validate_for(const AnisotropyModel& model) const;

 private:
  int q_ = 1;
  StabilizerKind kind_ = StabilizerKind::constant;
  double constant_ = 0.0;
  double margin_ = 1.0;
  std::shared_ptr<const StabilizerTable> table_;
  std::function<double(double)> fn_;
};

/// B_q(theta) for the given spec and model.
Eigen::Matrix2d eval_B(const EnergyMatrixSpec& spec, const AnisotropyModel& model, double theta);

struct StabilizerOptions {
  int theta_grid_size = 720;
  int hat_grid_size = 2048;
  double bisect_tol = 1e-8;
  double s_max = 100.0;
  /// Feasibility slack on the pointwise inequality (absorbs round-off at the
  /// tight directions theta_hat = theta and theta_hat = theta + pi).
  double feasibility_slack = 1e-12;
};

/// Residual of the q = 0 condition
///   [gamma(t) B_0(t) v(th)] . v(th) - gamma(th)^2
/// for stabilizer value s.
double stability_residual_q0(const AnisotropyModel& model, double theta, double theta_hat,
                             double s);

/// P_alpha(t, th) - Q(t, th) for the q = 1 condition.
double stability_residual_q1(const AnisotropyModel& model, double theta, double theta_hat,
                             double alpha);

/// Smallest stabilizer per theta grid point, found by bisection on [0, s_max].
/// Throws std::runtime_error if even s_max is infeasible.
StabilizerTable compute_min_stabilizer(const AnisotropyModel& model, int q,
                                       const StabilizerOptions& options = {});

struct StabilityReport {
  bool satisfied = true;
  double worst_residual = 0.0;
  double theta = 0.0;
  double theta_hat = 0.0;
  double v_norm = 1.0;
  double w_norm = 1.0;
};

/// Checks the energy-stability inequality for the spec on a product grid of
/// `grid` angles (and magnitudes {0.5, 1, 2} for q = 1).
StabilityReport verify_stability_inequality(const EnergyMatrixSpec& spec,
                                            const AnisotropyModel& model, int grid,
                                            double tol = 1e-12);

}  // namespace axidewet
