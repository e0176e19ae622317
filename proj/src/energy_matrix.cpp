#include "axidewet/energy_matrix.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace axidewet {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double grid_angle(int i, int n) { return -std::numbers::pi + kTwoPi * i / n; }

// The residual of both stability conditions is monotone in the stabilizer,
// so each theta row reduces to precomputed per-theta_hat data.
struct Row {
  std::vector<double> base;
  std::vector<double> coef;
  std::vector<double> q_term;
};

Row q0_row(const AnisotropyModel& model, double theta, const std::vector<double>& hat,
           const std::vector<double>& gamma_hat) {
  const auto g = model.eval(theta);
  Row row;
  row.base.resize(hat.size());
  row.coef.resize(hat.size());
  for (std::size_t i = 0; i < hat.size(); ++i) {
    const double phi = hat[i] - theta;
    const double s = std::sin(phi);
    // [gamma M R v].v = gamma (gamma cos 2 phi + gamma' sin 2 phi)
    row.base[i] = g.value * (g.value * std::cos(2.0 * phi) + g.d1 * std::sin(2.0 * phi)) -
                  gamma_hat[i] * gamma_hat[i];
    row.coef[i] = g.value * s * s;
  }
  return row;
}

Row q1_row(const AnisotropyModel& model, double theta, const std::vector<double>& hat,
           const std::vector<double>& gamma_hat) {
  const auto g = model.eval(theta);
  Row row;
  row.base.assign(hat.size(), g.value);
  row.coef.resize(hat.size());
  row.q_term.resize(hat.size());
  for (std::size_t i = 0; i < hat.size(); ++i) {
    const double d = std::sin(theta - hat[i]);
    row.coef[i] = d * d;
    row.q_term[i] = gamma_hat[i] + g.value * std::cos(theta - hat[i]) + g.d1 * d;
  }
  return row;
}

double row_min_residual(int q, const Row& row, double s) {
  double worst = std::numeric_limits<double>::infinity();
  if (q == 0) {
    for (std::size_t i = 0; i < row.base.size(); ++i)
      worst = std::min(worst, row.base[i] + s * row.coef[i]);
  } else {
    for (std::size_t i = 0; i < row.base.size(); ++i) {
      const double g = row.base[i];
      worst = std::min(worst, 2.0 * std::sqrt((g + s * row.coef[i]) * g) - row.q_term[i]);
    }
  }
  return worst;
}

}  // namespace

StabilizerTable::StabilizerTable(std::vector<double> theta, std::vector<double> s0)
    : theta_(std::move(theta)), s0_(std::move(s0)) {
  if (theta_.size() != s0_.size() || s0_.size() < 2)
    throw std::invalid_argument("stabilizer table needs matching theta/value arrays");
  for (double v : s0_)
    if (v < 0.0 || !std::isfinite(v))
      throw std::invalid_argument("stabilizer values must be finite and non-negative");
}

double StabilizerTable::operator()(double theta) const {
  const auto n = static_cast<double>(s0_.size());
  double u = (theta + std::numbers::pi) / kTwoPi * n;
  u -= n * std::floor(u / n);
  const auto i0 = static_cast<std::size_t>(std::floor(u)) % s0_.size();
  const std::size_t i1 = (i0 + 1) % s0_.size();
  const double w = u - std::floor(u);
  return (1.0 - w) * s0_[i0] + w * s0_[i1];
}

EnergyMatrixSpec EnergyMatrixSpec::constant(int q, double value) {
  if (q != 0 && q != 1) throw std::invalid_argument("q must be 0 or 1");
  if (!(value >= 0.0)) throw std::invalid_argument("stabilizer must be non-negative");
  EnergyMatrixSpec s;
  s.q_ = q;
  s.kind_ = StabilizerKind::constant;
  s.constant_ = value;
  return s;
}

EnergyMatrixSpec EnergyMatrixSpec::tabulated(int q, std::shared_ptr<const StabilizerTable> table,
                                             double margin) {
  if (q != 0 && q != 1) throw std::invalid_argument("q must be 0 or 1");
  if (!table) throw std::invalid_argument("missing stabilizer table");
  if (!(margin >= 1.0)) throw std::invalid_argument("stabilizer margin must be >= 1");
  EnergyMatrixSpec s;
  s.q_ = q;
  s.kind_ = StabilizerKind::table;
  s.table_ = std::move(table);
  s.margin_ = margin;
  return s;
}

EnergyMatrixSpec EnergyMatrixSpec::function(int q, std::function<double(double)> stabilizer) {
  if (q != 0 && q != 1) throw std::invalid_argument("q must be 0 or 1");
  EnergyMatrixSpec s;
  s.q_ = q;
  s.kind_ = StabilizerKind::function;
  s.fn_ = std::move(stabilizer);
  return s;
}

EnergyMatrixSpec EnergyMatrixSpec::automatic(const AnisotropyModel& model, int q,
                                             double margin) {
  auto table = std::make_shared<const StabilizerTable>(compute_min_stabilizer(model, q));
  return tabulated(q, std::move(table), margin);
}

double EnergyMatrixSpec::stabilizer(double theta) const {
  switch (kind_) {
    case StabilizerKind::constant:
      return constant_;
    case StabilizerKind::table:
      return std::max((*table_)(theta), 0.0) * margin_;
    case StabilizerKind::function: {
      const double v = fn_(theta);
      if (v < 0.0) throw std::domain_error("stabilizer function returned a negative value");
      return v;
    }
  }
  return 0.0;
}

void EnergyMatrixSpec::validate_for(const AnisotropyModel& model) const {
  const auto report = check_admissibility(model, q_);
  if (!report.admissible) {
    std::ostringstream os;
    os << "anisotropy " << model.describe() << " is not admissible for q=" << q_;
    if (report.offending_theta) os << " (violated at theta=" << *report.offending_theta << ")";
    throw std::invalid_argument(os.str());
  }
}

Eigen::Matrix2d eval_B(const EnergyMatrixSpec& spec, const AnisotropyModel& model, double theta) {
  if (spec.q() != 0 && spec.q() != 1) throw std::invalid_argument("q must be 0 or 1");
  return surface_energy_matrix(spec.q(), model.eval(theta), theta, spec.stabilizer(theta));
}

double stability_residual_q0(const AnisotropyModel& model, double theta, double theta_hat,
                             double s) {
  const Vec2<double> v(std::cos(theta_hat), std::sin(theta_hat));
  const double g = model.eval(theta).value;
  const double gh = model.eval(theta_hat).value;
  const Eigen::Matrix2d b = surface_energy_matrix(0, model.eval(theta), theta, s);
  return g * v.dot(b * v) - gh * gh;
}

double stability_residual_q1(const AnisotropyModel& model, double theta, double theta_hat,
                             double alpha) {
  const auto g = model.eval(theta);
  const double gh = model.eval(theta_hat).value;
  const double d = -std::sin(theta_hat) * std::cos(theta) + std::cos(theta_hat) * std::sin(theta);
  const double p = 2.0 * std::sqrt((g.value + alpha * d * d) * g.value);
  const double qv = gh +
                    g.value * (std::sin(theta) * std::sin(theta_hat) +
                               std::cos(theta) * std::cos(theta_hat)) +
                    g.d1 * d;
  return p - qv;
}

StabilizerTable compute_min_stabilizer(const AnisotropyModel& model, int q,
                                       const StabilizerOptions& options) {
  if (q != 0 && q != 1) throw std::invalid_argument("q must be 0 or 1");
  if (options.theta_grid_size < 2 || options.hat_grid_size < 2 || !(options.bisect_tol > 0.0))
    throw std::invalid_argument("invalid stabilizer grid options");
  const auto admissible = check_admissibility(model, q);
  if (!admissible.admissible) {
    std::ostringstream os;
    os << "cannot build a stabilizer for inadmissible anisotropy " << model.describe()
       << " with q=" << q;
    throw std::invalid_argument(os.str());
  }

  std::vector<double> hat(options.hat_grid_size);
  std::vector<double> gamma_hat(options.hat_grid_size);
  for (int i = 0; i < options.hat_grid_size; ++i) {
    hat[i] = grid_angle(i, options.hat_grid_size);
    gamma_hat[i] = model.eval(hat[i]).value;
  }

  std::vector<double> theta(options.theta_grid_size);
  std::vector<double> s0(options.theta_grid_size);
  for (int t = 0; t < options.theta_grid_size; ++t) {
    theta[t] = grid_angle(t, options.theta_grid_size);
    const Row row = (q == 0) ? q0_row(model, theta[t], hat, gamma_hat)
                             : q1_row(model, theta[t], hat, gamma_hat);
    auto feasible = [&](double s) {
      return row_min_residual(q, row, s) >= -options.feasibility_slack;
    };
    if (feasible(0.0)) {
      s0[t] = 0.0;
      continue;
    }
    if (!feasible(options.s_max)) {
      std::ostringstream os;
      os << "no stabilizer <= " << options.s_max << " satisfies the stability condition at theta="
         << theta[t] << " for " << model.describe() << " (q=" << q
         << "); worst residual " << row_min_residual(q, row, options.s_max);
      throw std::runtime_error(os.str());
    }
    double lo = 0.0;
    double hi = options.s_max;
    while (hi - lo > options.bisect_tol) {
      const double mid = 0.5 * (lo + hi);
      (feasible(mid) ? hi : lo) = mid;
    }
    s0[t] = hi;
  }
  return StabilizerTable(std::move(theta), std::move(s0));
}

StabilityReport verify_stability_inequality(const EnergyMatrixSpec& spec,
                                            const AnisotropyModel& model, int grid, double tol) {
  StabilityReport report;
  report.worst_residual = std::numeric_limits<double>::infinity();
  const double mags[] = {0.5, 1.0, 2.0};
  for (int i = 0; i < grid; ++i) {
    const double t = grid_angle(i, grid);
    const Eigen::Matrix2d b = eval_B(spec, model, t);
    const double gt = model.eval(t).value;
    for (int k = 0; k < grid; ++k) {
      const double th = grid_angle(k, grid);
      const double gh = model.eval(th).value;
      const Vec2<double> vh(std::cos(th), std::sin(th));
      if (spec.q() == 0) {
        const double r = gt * vh.dot(b * vh) - gh * gh;
        if (r < report.worst_residual) report = {true, r, t, th, 1.0, 1.0};
      } else {
        const Vec2<double> vt(std::cos(t), std::sin(t));
        for (double a : mags) {
          for (double c : mags) {
            const Vec2<double> v = a * vt;
            const Vec2<double> w = c * vh;
            const double r = (b * w).dot(w - v) / a - (c * gh - a * gt);
            if (r < report.worst_residual) report = {true, r, t, th, a, c};
          }
        }
      }
    }
  }
  report.satisfied = report.worst_residual >= -tol;
  return report;
}

}  // namespace axidewet
