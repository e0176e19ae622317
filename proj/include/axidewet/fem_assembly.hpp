#pragma once

#include "axidewet/anisotropy.hpp"
#include "axidewet/banded_lu.hpp"
#include "axidewet/energy_matrix.hpp"
#include "axidewet/geometry.hpp"

#include <Eigen/Core>

#include <stdexcept>
#include <string>
#include <vector>

namespace axidewet {

/// P: structure preserving (volume and energy), L: linear, V: volume preserving.
enum class Method { P, L, V };

const char* to_string(Method m);
Method method_from_string(const std::string& s);

struct SchemeConfig {
  Method method = Method::P;
  double dt = 1e-2;
  double picard_tol = 1e-12;
  int picard_max = 50;
  int max_halvings = 5;
  ContactParameters contact;

  void validate() const;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Equation/unknown numbering, node-major (dr_j, dz_j, mu_j) with fixed
/// coordinates skipped. Test functions mirror the trial functions.
struct DofMap {
  static constexpr Eigen::Index kFixed = -1;

  std::vector<Eigen::Index> r;
  std::vector<Eigen::Index> z;
  std::vector<Eigen::Index> mu;
  Eigen::Index size = 0;

  static DofMap build(const GeneratingCurve& c);
  Eigen::Index coord(Eigen::Index node, int component) const {
    return component == 0 ? r[static_cast<std::size_t>(node)] : z[static_cast<std::size_t>(node)];
  }
  bool free(Eigen::Index node, int component) const { return coord(node, component) != kFixed; }
};

/// Bandwidth of the node-major ordering: three unknowns per node, P1
/// coupling to the adjacent nodes only.
inline constexpr Eigen::Index kStepBandwidth = 5;

struct StepSystem {
  BandedMatrix<double> matrix;
  Eigen::VectorXd rhs;
  DofMap dofs;
};

/// Quadrature for the terms that couple the position update with the chemical
/// potential. `exact` integrates the cubic integrands exactly and is what makes
/// the discrete volume identity hold; `lumped` is the vertex (trapezoidal) rule.
enum class CouplingQuadrature { exact, lumped };

/// Elementwise field with possible jumps at the nodes: column j-1 holds the
/// one-sided values at q_{j-1}^+ (left) and q_j^- (right) on element j.
struct ElementwiseField {
  Eigen::MatrixXd left;
  Eigen::MatrixXd right;

  static ElementwiseField nodal(const Eigen::MatrixXd& values);
  static ElementwiseField per_element(const Eigen::MatrixXd& values);
};

/// (h/2) sum_j [(u.v)(q_j^-) + (u.v)(q_{j-1}^+)], h = 1/J.
double lumped_inner(const ElementwiseField& u, const ElementwiseField& v);

/// With `iterate_mu` (mu at the iterate, one value per node) the products of the
/// unknowns with the weighted normal are linearised by Newton's method,
/// otherwise the weighted normal is simply frozen at the iterate.
StepSystem assemble_P_iterate(const GeneratingCurve& old_curve, const GeneratingCurve& iterate,
                              const AnisotropyModel& model, const EnergyMatrixSpec& spec,
                              const SchemeConfig& config,
                              const Eigen::VectorXd& iterate_mu = Eigen::VectorXd());

StepSystem assemble_L_step(const GeneratingCurve& old_curve, const AnisotropyModel& model,
                           const EnergyMatrixSpec& spec, const SchemeConfig& config);

StepSystem assemble_V_iterate(const GeneratingCurve& old_curve, const GeneratingCurve& iterate,
                              const AnisotropyModel& model, const EnergyMatrixSpec& spec,
                              const SchemeConfig& config,
                              CouplingQuadrature quadrature = CouplingQuadrature::exact);

/// lambda^{m+1/2} at a node: value + mu_coefficient * mu^{m+1}(q_j).
/// At an axis node this is -mu/2; elsewhere omega . e1 / r with omega the
/// vertex average of gamma n - gamma' tau over the adjacent elements.
struct LambdaHalf {
  double mu_coefficient = 0.0;
  double value = 0.0;
};

LambdaHalf eval_lambda_half(const GeneratingCurve& old_curve, const AnisotropyModel& model,
                            Eigen::Index node);

struct StepSolution {
  GeneratingCurve curve;
  Eigen::VectorXd mu;
};

/// Solves for the increments and adds them to `old_curve`; fixed coordinates are
/// taken from `old_curve` and the boundary conditions are reimposed exactly.
StepSolution solve_system(const StepSystem& system, const GeneratingCurve& old_curve);

struct StepResult {
  GeneratingCurve curve;
  Eigen::VectorXd mu;
  int picard_iters = 0;  ///< total over all sub-steps
  int halvings = 0;      ///< deepest dt halving level used
};

/// Advances one time step of length config.dt. P/V iterate a linearisation about
/// the previous iterate; on non-convergence dt is halved and the step is
/// covered by sub-steps. Throws SolverError when that fails as well.
StepResult solve_step(const GeneratingCurve& old_curve, const AnisotropyModel& model,
                      const EnergyMatrixSpec& spec, const SchemeConfig& config);

}  // namespace axidewet
