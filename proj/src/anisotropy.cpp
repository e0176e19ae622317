#include "axidewet/anisotropy.hpp"

#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace axidewet {

namespace {

double grid_angle(int i, int n) {
  return -std::numbers::pi + 2.0 * std::numbers::pi * i / n;
}

}  // namespace

AnisotropyModel AnisotropyModel::isotropic() { return kfold(1, 0.0); }

AnisotropyModel AnisotropyModel::kfold(int k, double beta) {
  if (k <= 0) throw std::invalid_argument("kfold anisotropy needs k > 0");
  AnisotropyModel m;
  m.kind_ = AnisotropyKind::kfold;
  m.k_ = k;
  m.beta_ = beta;
  m.validate();
  return m;
}

AnisotropyModel AnisotropyModel::bgn(std::vector<Eigen::Matrix2d> metrics) {
  if (metrics.empty()) throw std::invalid_argument("bgn anisotropy needs at least one metric");
  for (const auto& G : metrics) {
    if ((G - G.transpose()).cwiseAbs().maxCoeff() > 0.0)
      throw std::invalid_argument("bgn metric must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(G);
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw std::invalid_argument("bgn metric must be positive definite");
  }
  AnisotropyModel m;
  m.kind_ = AnisotropyKind::bgn;
  m.metrics_ = std::move(metrics);
  m.validate();
  return m;
}

AnisotropyModel AnisotropyModel::bgn(double eps) {
  const double e2 = eps * eps;
  Eigen::Matrix2d g1 = Eigen::Vector2d(e2, 1.0).asDiagonal();
  Eigen::Matrix2d g2 = Eigen::Vector2d(1.0, e2).asDiagonal();
  AnisotropyModel m = bgn(std::vector<Eigen::Matrix2d>{g1, g2});
  m.beta_ = eps;
  return m;
}

AnisotropyModel AnisotropyModel::series(std::vector<double> cos_coefficients) {
  if (cos_coefficients.empty())
    throw std::invalid_argument("series anisotropy needs at least one coefficient");
  AnisotropyModel m;
  m.kind_ = AnisotropyKind::series;
  m.coeffs_ = std::move(cos_coefficients);
  m.validate();
  return m;
}

void AnisotropyModel::validate() const {
  for (int i = 0; i <= kAdmissibilityGrid; ++i) {
    const double t = grid_angle(i, kAdmissibilityGrid);
    const double g = eval(t).value;
    if (!(g > 0.0)) {
      std::ostringstream os;
      os << "anisotropy " << describe() << " is not positive at theta=" << t << " (gamma=" << g
         << ")";
      throw std::invalid_argument(os.str());
    }
    const double mirror = eval(-t).value;
    if (std::abs(g - mirror) > kSymmetryTolerance * std::max(1.0, std::abs(g))) {
      std::ostringstream os;
      os << "anisotropy " << describe() << " is not even at theta=" << t;
      throw std::invalid_argument(os.str());
    }
  }
}

std::string AnisotropyModel::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case AnisotropyKind::kfold:
      os << "kfold(k=" << k_ << ", beta=" << beta_ << ")";
      break;
    case AnisotropyKind::bgn:
      os << "bgn(" << metrics_.size() << " metrics)";
      break;
    case AnisotropyKind::series:
      os << "series(" << coeffs_.size() << " terms)";
      break;
  }
  return os.str();
}

void ContactParameters::validate() const {
  if (!(eta > 0.0) || !std::isfinite(eta))
    throw std::invalid_argument("contact-line mobility eta must be positive and finite");
  if (!std::isfinite(sigma)) throw std::invalid_argument("sigma must be finite");
}

double contact_flux(const AnisotropyModel& model, double theta, double sigma) {
  const auto g = model.eval(theta);
  return g.value * std::cos(theta) - g.d1 * std::sin(theta) - sigma;
}

AdmissibilityReport check_admissibility(const AnisotropyModel& model, int q, int grid) {
  if (q != 0 && q != 1) throw std::invalid_argument("q must be 0 or 1");
  AdmissibilityReport report;
  if (q == 0) {
    report.worst = 0.0;
    for (int i = 0; i < grid; ++i) {
      const double t = grid_angle(i, grid);
      const double g = model.eval(t).value;
      const double gp = model.eval(t + std::numbers::pi).value;
      const double diff = std::abs(g - gp);
      if (diff > report.worst) {
        report.worst = diff;
        report.offending_theta = t;
      }
    }
    report.admissible = report.worst <= kSymmetryTolerance;
    if (report.admissible) report.offending_theta.reset();
  } else {
    report.worst = std::numeric_limits<double>::infinity();
    double arg = 0.0;
    for (int i = 0; i < grid; ++i) {
      const double t = grid_angle(i, grid);
      const double val = 3.0 * model.eval(t).value - model.eval(t + std::numbers::pi).value;
      if (val < report.worst) {
        report.worst = val;
        arg = t;
      }
    }
    report.admissible = report.worst > 0.0;
    if (!report.admissible) report.offending_theta = arg;
  }
  return report;
}

}  // namespace axidewet
