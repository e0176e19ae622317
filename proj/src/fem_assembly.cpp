#include "axidewet/fem_assembly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace axidewet {

const char* to_string(Method m) {
  switch (m) {
    case Method::P:
      return "P";
    case Method::L:
      return "L";
    case Method::V:
      return "V";
  }
  return "?";
}

Method method_from_string(const std::string& s) {
  if (s == "P") return Method::P;
  if (s == "L") return Method::L;
  if (s == "V") return Method::V;
  throw std::invalid_argument("unknown method '" + s + "' (expected P, L or V)");
}

void SchemeConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("time step dt must be positive");
  if (!(picard_tol > 0.0)) throw std::invalid_argument("picard_tol must be positive");
  if (picard_max < 1) throw std::invalid_argument("picard_max must be at least 1");
  if (max_halvings < 0) throw std::invalid_argument("max_halvings must be non-negative");
  contact.validate();
}

DofMap DofMap::build(const GeneratingCurve& c) {
  const auto n = static_cast<std::size_t>(c.num_nodes());
  DofMap d;
  d.r.assign(n, kFixed);
  d.z.assign(n, kFixed);
  d.mu.assign(n, kFixed);
  Eigen::Index next = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const bool axis = j == 0 && c.topology == Topology::inner_on_axis;
    const bool substrate = j == n - 1 || (j == 0 && c.topology == Topology::two_contacts);
    if (!axis) d.r[j] = next++;
    if (!substrate) d.z[j] = next++;
    d.mu[j] = next++;
  }
  d.size = next;
  return d;
}

ElementwiseField ElementwiseField::nodal(const Eigen::MatrixXd& values) {
  const Eigen::Index ne = values.cols() - 1;
  return {values.leftCols(ne), values.rightCols(ne)};
}

ElementwiseField ElementwiseField::per_element(const Eigen::MatrixXd& values) {
  return {values, values};
}

double lumped_inner(const ElementwiseField& u, const ElementwiseField& v) {
  if (u.left.cols() != v.left.cols() || u.left.rows() != v.left.rows() ||
      u.right.cols() != u.left.cols() || v.right.cols() != v.left.cols() || u.left.cols() == 0)
    throw std::invalid_argument("lumped inner product on mismatched partitions");
  const double h = 1.0 / static_cast<double>(u.left.cols());
  double acc = 0.0;
  for (Eigen::Index j = 0; j < u.left.cols(); ++j)
    acc += u.right.col(j).dot(v.right.col(j)) + u.left.col(j).dot(v.left.col(j));
  return 0.5 * h * acc;
}

LambdaHalf eval_lambda_half(const GeneratingCurve& old_curve, const AnisotropyModel& model,
                            Eigen::Index node) {
  if (node < 0 || node >= old_curve.num_nodes())
    throw std::out_of_range("lambda evaluated outside the curve");
  if (node == 0 && old_curve.topology == Topology::inner_on_axis) return {-0.5, 0.0};
  const double r = old_curve.r(node);
  if (!(r > 0.0))
    throw GeometryError("lambda at node " + std::to_string(node) +
                        " divides by r = 0 on a node that is not an axis node");
  Eigen::Vector2d omega = Eigen::Vector2d::Zero();
  int count = 0;
  for (Eigen::Index e : {node, node + 1}) {
    if (e < 1 || e >= old_curve.num_nodes()) continue;
    const auto f = element_frame(old_curve, e);
    const auto g = model.eval(f.theta);
    omega += g.value * f.normal - g.d1 * f.tangent;
    ++count;
  }
  return {0.0, omega.x() / count / r};
}

namespace {

constexpr Eigen::Index kFixed = DofMap::kFixed;

// int_elem lambda_k lambda_l lambda_i / h for local indices in {0, 1}.
double triple(int k, int l, int i) { return (k == l && l == i) ? 0.25 : 1.0 / 12.0; }

class Assembler {
 public:
  explicit Assembler(const GeneratingCurve& old_curve)
      : old_(old_curve),
        dofs_(DofMap::build(old_curve)),
        a_(dofs_.size, kStepBandwidth, kStepBandwidth),
        b_(Eigen::VectorXd::Zero(dofs_.size)) {}

  const DofMap& dofs() const { return dofs_; }
  Eigen::Index test_coord(Eigen::Index node, int c) const { return dofs_.coord(node, c); }
  Eigen::Index test_mu(Eigen::Index node) const { return dofs_.mu[static_cast<std::size_t>(node)]; }

  // The unknowns are the increments X^{m+1} - X^m, so that round-off scales
  // with the update rather than with the position.

  // term v * X^{m+1}_node[c] in equation `row`
  void coord(Eigen::Index row, Eigen::Index node, int c, double v) {
    if (row == kFixed) return;
    b_(row) -= v * old_.nodes(c, node);
    delta(row, node, c, v);
  }
  // term v * (X^{m+1} - X^m)_node[c] in equation `row`
  void delta(Eigen::Index row, Eigen::Index node, int c, double v) {
    if (row == kFixed) return;
    const Eigen::Index col = dofs_.coord(node, c);
    if (col != kFixed) a_.coeffRef(row, col) += v;
  }
  void mu(Eigen::Index row, Eigen::Index node, double v) {
    if (row == kFixed) return;
    a_.coeffRef(row, dofs_.mu[static_cast<std::size_t>(node)]) += v;
  }
  void rhs(Eigen::Index row, double v) {
    if (row != kFixed) b_(row) += v;
  }

  StepSystem finish() { return {std::move(a_), std::move(b_), dofs_}; }

 private:
  const GeneratingCurve& old_;
  DofMap dofs_;
  BandedMatrix<double> a_;
  Eigen::VectorXd b_;
};

void check_pair(const GeneratingCurve& old_curve, const GeneratingCurve& iterate) {
  if (old_curve.num_nodes() != iterate.num_nodes() || old_curve.topology != iterate.topology)
    throw std::invalid_argument("Picard iterate must share node count and topology with X^m");
}

// Delta t <r^m d mu, d phi |X^m_rho|^{-1}> with the minus sign of the first equation.
void add_mu_stiffness(Assembler& as, const GeneratingCurve& old_curve, double dt) {
  const double sign[2] = {-1.0, 1.0};
  for (Eigen::Index j = 1; j < old_curve.num_nodes(); ++j) {
    const Eigen::Index nodes[2] = {j - 1, j};
    const double len = (old_curve.node(j) - old_curve.node(j - 1)).norm();
    const double k = 0.5 * (old_curve.r(j - 1) + old_curve.r(j)) / len;
    for (int i = 0; i < 2; ++i)
      for (int kk = 0; kk < 2; ++kk)
        as.mu(as.test_mu(nodes[i]), nodes[kk], -dt * k * sign[i] * sign[kk]);
  }
}

// <X^{m+1} - X^m, phi f^{m+1/2}> and <mu f^{m+1/2}, psi> with f lagged at `iterate`.
void add_weighted_normal_coupling(Assembler& as, const GeneratingCurve& old_curve,
                                  const GeneratingCurve& iterate, bool position_rows,
                                  bool mu_rows, CouplingQuadrature quad) {
  const auto f = weighted_normal(old_curve, iterate);
  const double h = 1.0 / static_cast<double>(old_curve.num_elements());
  for (Eigen::Index j = 1; j < old_curve.num_nodes(); ++j) {
    const Eigen::Index nodes[2] = {j - 1, j};
    const Eigen::Vector2d fl[2] = {f.left.col(j - 1), f.right.col(j - 1)};
    for (int i = 0; i < 2; ++i) {
      for (int k = 0; k < 2; ++k) {
        Eigen::Vector2d w = Eigen::Vector2d::Zero();
        if (quad == CouplingQuadrature::exact) {
          for (int l = 0; l < 2; ++l) w += h * triple(k, l, i) * fl[l];
        } else if (k == i) {
          w = 0.5 * h * fl[i];
        }
        if (w.isZero(0.0)) continue;
        for (int c = 0; c < 2; ++c) {
          if (mu_rows) {
            const Eigen::Index row = as.test_mu(nodes[i]);
            as.delta(row, nodes[k], c, w(c));
          }
          if (position_rows) as.mu(as.test_coord(nodes[i], c), nodes[k], w(c));
        }
      }
    }
  }
}

// Newton terms of the products mu f(X) (position rows) and (X - X^m) . f(X) (mu rows),
// f being quadratic in X^{m+1}: adds mu_it Df (X - X_it) and (X_it - X^m) . Df (X - X_it).
void add_weighted_normal_newton(Assembler& as, const GeneratingCurve& old_curve,
                                const GeneratingCurve& iterate, const Eigen::VectorXd& mu_it) {
  const Eigen::Index ne = old_curve.num_elements();
  const double h = 1.0 / static_cast<double>(ne), inv_h = static_cast<double>(ne);
  Eigen::Matrix2d dperp;  // d perp(v) / dv
  dperp << 0, 1, -1, 0;
  for (Eigen::Index j = 1; j <= ne; ++j) {
    const Eigen::Index nodes[2] = {j - 1, j};
    const double sgn[2] = {-1.0, 1.0};
    const Eigen::Vector2d dm = perp((old_curve.node(j) - old_curve.node(j - 1)).eval()) * inv_h;
    const Eigen::Vector2d dn = perp((iterate.node(j) - iterate.node(j - 1)).eval()) * inv_h;
    // jac[l][m] = d f(q_l) / d X_m, local indices
    Eigen::Matrix2d jac[2][2];
    for (int l = 0; l < 2; ++l) {
      const double rm = old_curve.r(nodes[l]), rn = iterate.r(nodes[l]);
      for (int m = 0; m < 2; ++m) {
        jac[l][m] = -(2.0 * rn + rm) * inv_h * sgn[m] * dperp / 6.0;
        if (l == m) jac[l][m].col(0) -= (dm + 2.0 * dn) / 6.0;
      }
    }
    for (int i = 0; i < 2; ++i) {
      for (int m = 0; m < 2; ++m) {
        // position rows: sum_{k,l} h triple(k,l,i) mu_k jac[l][m]
        // mu row: sum_{k,l} h triple(k,l,i) (X_it - X^m)_k^T jac[l][m]
        Eigen::Matrix2d pos = Eigen::Matrix2d::Zero();
        Eigen::RowVector2d murow = Eigen::RowVector2d::Zero();
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l) {
            const double w = h * triple(k, l, i);
            pos += w * mu_it(nodes[k]) * jac[l][m];
            murow += w * (iterate.node(nodes[k]) - old_curve.node(nodes[k])).transpose() * jac[l][m];
          }
        for (int cc = 0; cc < 2; ++cc) {
          const double x_it = iterate.nodes(cc, nodes[m]);
          for (int c = 0; c < 2; ++c) {
            const Eigen::Index row = as.test_coord(nodes[i], c);
            as.coord(row, nodes[m], cc, pos(c, cc));
            as.rhs(row, pos(c, cc) * x_it);
          }
          const Eigen::Index row = as.test_mu(nodes[i]);
          as.coord(row, nodes[m], cc, murow(cc));
          as.rhs(row, murow(cc) * x_it);
        }
      }
    }
  }
}

// <scale B_q(theta^m) X^{m+1}_rho, psi_rho |X^m_rho|^{-1}>, scale = r^m (P) or 1 (L, V).
void add_surface_stiffness(Assembler& as, const GeneratingCurve& old_curve,
                           const AnisotropyModel& model, const EnergyMatrixSpec& spec,
                           bool radial_weight) {
  const double sign[2] = {-1.0, 1.0};
  for (Eigen::Index j = 1; j < old_curve.num_nodes(); ++j) {
    const Eigen::Index nodes[2] = {j - 1, j};
    const auto frame = element_frame(old_curve, j);
    const Eigen::Matrix2d b = eval_B(spec, model, frame.theta);
    const double weight =
        (radial_weight ? 0.5 * (old_curve.r(j - 1) + old_curve.r(j)) : 1.0) / frame.length;
    for (int i = 0; i < 2; ++i)
      for (int c = 0; c < 2; ++c) {
        const Eigen::Index row = as.test_coord(nodes[i], c);
        for (int k = 0; k < 2; ++k)
          for (int cc = 0; cc < 2; ++cc)
            as.coord(row, nodes[k], cc, weight * sign[i] * sign[k] * b(c, cc));
      }
  }
}

// Second equation of the L/V schemes, without the stiffness term.
void add_lambda_coupling(Assembler& as, const GeneratingCurve& old_curve,
                         const AnisotropyModel& model) {
  const Eigen::Index n = old_curve.num_nodes();
  std::vector<LambdaHalf> lambda(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) lambda[static_cast<std::size_t>(i)] = eval_lambda_half(old_curve, model, i);
  for (Eigen::Index j = 1; j < n; ++j) {
    const auto frame = element_frame(old_curve, j);
    for (Eigen::Index node : {j - 1, j}) {
      const auto& lam = lambda[static_cast<std::size_t>(node)];
      for (int c = 0; c < 2; ++c) {
        const Eigen::Index row = as.test_coord(node, c);
        const double w = 0.5 * frame.length * frame.normal(c);
        as.mu(row, node, w * (1.0 + lam.mu_coefficient));
        as.rhs(row, -w * lam.value);
      }
    }
  }
}

// Delta t-scaled first equation of the L scheme: <r^m (X^{m+1}-X^m), phi n^m |X^m_rho|>^h.
void add_linear_normal_coupling(Assembler& as, const GeneratingCurve& old_curve) {
  for (Eigen::Index j = 1; j < old_curve.num_nodes(); ++j) {
    const auto frame = element_frame(old_curve, j);
    for (Eigen::Index node : {j - 1, j}) {
      const Eigen::Index row = as.test_mu(node);
      for (int c = 0; c < 2; ++c) {
        const double w = 0.5 * frame.length * old_curve.r(node) * frame.normal(c);
        as.delta(row, node, c, w);
      }
    }
  }
}

// Contact-line terms of the L/V schemes.
void add_linear_contact_terms(Assembler& as, const GeneratingCurve& old_curve,
                              const SchemeConfig& config) {
  const double eta = config.contact.eta, sigma = config.contact.sigma;
  const Eigen::Index last = old_curve.num_nodes() - 1;
  const double k = 1.0 / (eta * config.dt);
  Eigen::Index row = as.test_coord(last, 0);
  as.delta(row, last, 0, k);
  as.rhs(row, sigma);
  row = as.test_coord(0, 0);
  as.delta(row, 0, 0, k);
  as.rhs(row, -sigma);
}

}  // namespace

StepSystem assemble_P_iterate(const GeneratingCurve& old_curve, const GeneratingCurve& iterate,
                              const AnisotropyModel& model, const EnergyMatrixSpec& spec,
                              const SchemeConfig& config, const Eigen::VectorXd& iterate_mu) {
  check_pair(old_curve, iterate);
  Assembler as(old_curve);
  add_weighted_normal_coupling(as, old_curve, iterate, true, true, CouplingQuadrature::exact);
  if (iterate_mu.size() == iterate.num_nodes())
    add_weighted_normal_newton(as, old_curve, iterate, iterate_mu);
  add_mu_stiffness(as, old_curve, config.dt);
  add_surface_stiffness(as, old_curve, model, spec, true);

  // <gamma(theta^{m+1}), psi_1 |X^{m+1}_rho|>. gamma(theta(D))|D| = (gamma tau + gamma' n).D is
  // 1-homogeneous in the element difference D, so the coefficient vector is frozen at the iterate.
  for (Eigen::Index j = 1; j < iterate.num_nodes(); ++j) {
    const auto frame = element_frame(iterate, j);
    const auto g = model.eval(frame.theta);
    const Eigen::Vector2d w = 0.5 * (g.value * frame.tangent + g.d1 * frame.normal);
    for (Eigen::Index i : {j - 1, j}) {
      const Eigen::Index row = as.test_coord(i, 0);
      for (int c = 0; c < 2; ++c) {
        as.coord(row, j, c, w(c));
        as.coord(row, j - 1, c, -w(c));
      }
    }
  }

  // (1/(2 eta dt)) (r^{m+1} + r^m)(r^{m+1} - r^m) = d (2 r^m + d) / (2 eta dt), d = r^{m+1} - r^m,
  // linearised about the iterate; the sigma terms are linear and taken implicitly.
  const double eta = config.contact.eta, sigma = config.contact.sigma;
  const Eigen::Index last = old_curve.num_nodes() - 1;
  auto contact = [&](Eigen::Index node, double sign) {
    const Eigen::Index row = as.test_coord(node, 0);
    const double d_it = iterate.r(node) - old_curve.r(node);
    const double c = 1.0 / (2.0 * eta * config.dt);
    as.delta(row, node, 0, c * 2.0 * (old_curve.r(node) + d_it));
    as.rhs(row, c * d_it * d_it);
    // sign * (sigma/2) (r^{m+1} + r^m) on the left-hand side
    as.delta(row, node, 0, sign * 0.5 * sigma);
    as.rhs(row, -sign * sigma * old_curve.r(node));
  };
  contact(last, -1.0);
  contact(0, 1.0);
  return as.finish();
}

StepSystem assemble_L_step(const GeneratingCurve& old_curve, const AnisotropyModel& model,
                           const EnergyMatrixSpec& spec, const SchemeConfig& config) {
  Assembler as(old_curve);
  add_linear_normal_coupling(as, old_curve);
  add_mu_stiffness(as, old_curve, config.dt);
  add_lambda_coupling(as, old_curve, model);
  add_surface_stiffness(as, old_curve, model, spec, false);
  add_linear_contact_terms(as, old_curve, config);
  return as.finish();
}

StepSystem assemble_V_iterate(const GeneratingCurve& old_curve, const GeneratingCurve& iterate,
                              const AnisotropyModel& model, const EnergyMatrixSpec& spec,
                              const SchemeConfig& config, CouplingQuadrature quadrature) {
  check_pair(old_curve, iterate);
  Assembler as(old_curve);
  add_weighted_normal_coupling(as, old_curve, iterate, false, true, quadrature);
  add_mu_stiffness(as, old_curve, config.dt);
  add_lambda_coupling(as, old_curve, model);
  add_surface_stiffness(as, old_curve, model, spec, false);
  add_linear_contact_terms(as, old_curve, config);
  return as.finish();
}

StepSolution solve_system(const StepSystem& system, const GeneratingCurve& old_curve) {
  const BandedLU<double> lu(system.matrix);
  const Eigen::VectorXd u = lu.solve(system.rhs);
  StepSolution out;
  out.curve = old_curve;
  out.mu.resize(old_curve.num_nodes());
  for (Eigen::Index j = 0; j < old_curve.num_nodes(); ++j) {
    for (int c = 0; c < 2; ++c) {
      const Eigen::Index idx = system.dofs.coord(j, c);
      if (idx != kFixed) out.curve.nodes(c, j) += u(idx);
    }
    out.mu(j) = u(system.dofs.mu[static_cast<std::size_t>(j)]);
  }
  const Eigen::Index last = old_curve.num_nodes() - 1;
  out.curve.nodes(1, last) = 0.0;
  if (old_curve.topology == Topology::two_contacts)
    out.curve.nodes(1, 0) = 0.0;
  else
    out.curve.nodes(0, 0) = 0.0;
  return out;
}

namespace {

// Intermediate iterates only need finite coordinates and non-degenerate
// elements; the sign conditions on r are checked on the converged curve.
void check_iterate(const GeneratingCurve& c) {
  if (!c.nodes.allFinite()) throw GeometryError("Picard iterate is not finite");
  for (Eigen::Index j = 1; j < c.num_nodes(); ++j)
    if (!((c.node(j) - c.node(j - 1)).norm() > 0.0))
      throw GeometryError("element " + std::to_string(j) + " of a Picard iterate has zero length");
}

double next_scale(const GeneratingCurve& c) { return c.nodes.cwiseAbs().maxCoeff(); }

struct Attempt {
  bool ok = false;
  StepSolution solution;
  int iters = 0;
  std::string reason;
};

Attempt attempt_step(const GeneratingCurve& old_curve, const AnisotropyModel& model,
                     const EnergyMatrixSpec& spec, const SchemeConfig& config) {
  Attempt at;
  try {
    if (config.method == Method::L) {
      at.solution = solve_system(assemble_L_step(old_curve, model, spec, config), old_curve);
      at.iters = 1;
      validate_curve(at.solution.curve);
      at.ok = true;
      return at;
    }
    GeneratingCurve iterate = old_curve;
    Eigen::VectorXd mu_it;
    for (int it = 1; it <= config.picard_max; ++it) {
      const StepSystem sys = config.method == Method::P
                                 ? assemble_P_iterate(old_curve, iterate, model, spec, config, mu_it)
                                 : assemble_V_iterate(old_curve, iterate, model, spec, config);
      StepSolution next = solve_system(sys, old_curve);
      check_iterate(next.curve);
      const double disp = (next.curve.nodes - iterate.nodes).colwise().norm().maxCoeff();
      iterate = next.curve;
      mu_it = next.mu;
      at.solution = std::move(next);
      at.iters = it;
      if (!std::isfinite(disp)) break;
      const double floor = 64.0 * std::numeric_limits<double>::epsilon() *
                           next_scale(iterate);
      if (disp <= std::max(config.picard_tol, floor)) {
        validate_curve(at.solution.curve);
        at.ok = true;
        return at;
      }
    }
    at.reason = "Picard iteration did not converge in " + std::to_string(config.picard_max) +
                " sweeps";
  } catch (const SingularMatrixError& e) {
    at.reason = e.what();
  } catch (const GeometryError& e) {
    at.reason = e.what();
  }
  return at;
}

StepResult step_recursive(const GeneratingCurve& old_curve, const AnisotropyModel& model,
                          const EnergyMatrixSpec& spec, const SchemeConfig& config, int depth) {
  Attempt at = attempt_step(old_curve, model, spec, config);
  if (at.ok) return {std::move(at.solution.curve), std::move(at.solution.mu), at.iters, depth};
  if (depth >= config.max_halvings) {
    std::ostringstream os;
    os << "time step failed after " << depth << " halvings (dt=" << config.dt
       << "): " << at.reason;
    throw SolverError(os.str());
  }
  SchemeConfig half = config;
  half.dt = 0.5 * config.dt;
  StepResult first = step_recursive(old_curve, model, spec, half, depth + 1);
  StepResult second = step_recursive(first.curve, model, spec, half, depth + 1);
  second.picard_iters += first.picard_iters + at.iters;
  second.halvings = std::max(first.halvings, second.halvings);
  return second;
}

}  // namespace

StepResult solve_step(const GeneratingCurve& old_curve, const AnisotropyModel& model,
                      const EnergyMatrixSpec& spec, const SchemeConfig& config) {
  config.validate();
  validate_curve(old_curve);
  return step_recursive(old_curve, model, spec, config, 0);
}

}  // namespace axidewet
