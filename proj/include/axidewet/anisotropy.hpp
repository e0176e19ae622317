#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace axidewet {

/// Value and first two angular derivatives of a surface energy density.
template <typename Scalar>
struct GammaValues {
  Scalar value;
  Scalar d1;
  Scalar d2;
};

enum class AnisotropyKind { kfold, bgn, series };

/// Surface energy density gamma(theta) of the film/vapour interface, theta
/// being the tangent angle of the generating curve.
///
/// Three families are supported:
///  - kfold:  1 + beta cos(k theta)
///  - bgn:    sum_l sqrt(v^T G_l v), v = (cos theta, sin theta)
///  - series: sum_k c_k cos(k theta)
///
/// Construction validates positivity and even symmetry on a dense grid and
/// throws std::invalid_argument otherwise. Instances are immutable.
class AnisotropyModel {
 public:
  static AnisotropyModel isotropic();
  static AnisotropyModel kfold(int k, double beta);
  /// Metrics are symmetric positive definite 2x2 matrices.
  static AnisotropyModel bgn(std::vector<Eigen::Matrix2d> metrics);
  /// The two-term density sqrt(sin^2 + eps^2 cos^2) + sqrt(eps^2 sin^2 + cos^2).
  static AnisotropyModel bgn(double eps);
  static AnisotropyModel series(std::vector<double> cos_coefficients);

  AnisotropyKind kind() const { return kind_; }
  int k() const { return k_; }
  double beta() const { return beta_; }
  const std::vector<Eigen::Matrix2d>& metrics() const { return metrics_; }
  const std::vector<double>& coefficients() const { return coeffs_; }

  template <typename Scalar>
  GammaValues<Scalar> eval(Scalar theta) const;

  std::string describe() const;

 private:
  AnisotropyModel() = default;
  void validate() const;

  AnisotropyKind kind_ = AnisotropyKind::kfold;
  int k_ = 0;
  double beta_ = 0.0;
  std::vector<Eigen::Matrix2d> metrics_;
  std::vector<double> coeffs_;
};

template <typename Scalar>
GammaValues<Scalar> AnisotropyModel::eval(Scalar theta) const {
  using std::cos;
  using std::sin;
  using std::sqrt;
  switch (kind_) {
    case AnisotropyKind::kfold: {
      const Scalar kk = Scalar(k_);
      const Scalar c = cos(kk * theta);
      const Scalar s = sin(kk * theta);
      return {Scalar(1) + Scalar(beta_) * c, -Scalar(beta_) * kk * s,
              -Scalar(beta_) * kk * kk * c};
    }
    case AnisotropyKind::series: {
      GammaValues<Scalar> g{Scalar(0), Scalar(0), Scalar(0)};
      for (std::size_t n = 0; n < coeffs_.size(); ++n) {
        const Scalar kk = Scalar(static_cast<double>(n));
        const Scalar c = cos(kk * theta);
        const Scalar s = sin(kk * theta);
        g.value += Scalar(coeffs_[n]) * c;
        g.d1 -= Scalar(coeffs_[n]) * kk * s;
        g.d2 -= Scalar(coeffs_[n]) * kk * kk * c;
      }
      return g;
    }
    case AnisotropyKind::bgn: {
      using Vec = Eigen::Matrix<Scalar, 2, 1>;
      const Vec v(cos(theta), sin(theta));
      const Vec dv(-sin(theta), cos(theta));
      GammaValues<Scalar> g{Scalar(0), Scalar(0), Scalar(0)};
      for (const auto& metric : metrics_) {
        const Eigen::Matrix<Scalar, 2, 2> G = metric.template cast<Scalar>();
        const Scalar a = v.dot(G * v);
        const Scalar b = v.dot(G * dv);
        // v'' = -v
        const Scalar c = dv.dot(G * dv) - a;
        const Scalar root = sqrt(a);
        g.value += root;
        g.d1 += b / root;
        g.d2 += c / root - b * b / (a * root);
      }
      return g;
    }
  }
  return {Scalar(1), Scalar(0), Scalar(0)};
}

/// Surface contact-line parameters: sigma = (gamma_VS - gamma_FS) / gamma_0
/// and the finite contact-line mobility eta.
struct ContactParameters {
  double sigma = 0.0;
  double eta = 100.0;

  void validate() const;
};

/// f(theta; sigma) = gamma cos(theta) - gamma' sin(theta) - sigma.
double contact_flux(const AnisotropyModel& model, double theta, double sigma);

struct AdmissibilityReport {
  bool admissible = true;
  /// Worst value of the tested quantity (|gamma(t)-gamma(t+pi)| for q=0,
  /// min of 3 gamma(t) - gamma(t+pi) for q=1).
  double worst = 0.0;
  std::optional<double> offending_theta;
};

inline constexpr int kAdmissibilityGrid = 4096;
inline constexpr double kSymmetryTolerance = 1e-12;

/// q = 0 requires gamma(theta) = gamma(theta + pi);
/// q = 1 requires 3 gamma(theta) > gamma(theta + pi).
AdmissibilityReport check_admissibility(const AnisotropyModel& model, int q,
                                        int grid = kAdmissibilityGrid);

}  // namespace axidewet
