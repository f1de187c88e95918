#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace synesthete {

/// Finite joint distribution p(v, c) over the source rows V and relevance
/// columns C. All information quantities in this module are in nats.
struct DiscreteJoint {
  Eigen::MatrixXd p;  // |V| x |C|

  /// Validates entries >= 0, total == 1 within 1e-9, and no all-zero rows.
  static DiscreteJoint validated(Eigen::MatrixXd m);

  Eigen::VectorXd row_marginal() const;  // p(v)
  Eigen::VectorXd col_marginal() const;  // p(c)
};

/// Loads a CSV matrix of nonnegative reals. The matrix is normalized to
/// total mass 1; a deviation beyond 1e-6 is reported through the warning
/// flag (and logged).
DiscreteJoint load_joint_csv(std::istream& in, bool* normalized_warning = nullptr);

/// I(X;Y) = sum p(x,y) log[p(x,y) / (p(x) p(y))], with 0 log 0 = 0.
double mutual_information(const DiscreteJoint& joint);

/// KL(q || p) = sum q log(q / p). Returns +infinity when q puts mass where
/// p has none. Distributions must share support size.
double kl_divergence(const Eigen::VectorXd& q, const Eigen::VectorXd& p);

/// One converged (or max_iter-truncated) run of the iterative solver.
///
/// Invariants maintained on every iterate, not just at convergence:
/// rows of q_e_given_v and q_c_given_e are stochastic, q_e is the marginal
/// of q_e_given_v under p(v), and objective_trace is non-increasing.
struct IbSolution {
  Eigen::MatrixXd q_e_given_v;  // |V| x k
  Eigen::VectorXd q_e;          // k
  Eigen::MatrixXd q_c_given_e;  // k x |C|
  double beta = 0.0;
  std::vector<double> objective_trace;  // I(V;E) - beta * I(E;C) per cycle
  bool converged = false;
  std::uint64_t seed = 0;

  double objective() const { return objective_trace.back(); }
};

/// Iterative self-consistent solver for
///
///   min_{q(e|v)}  I(V;E) - beta * I(E;C)
///
/// cycling q(e|v) <- q(e) exp(-beta KL(p(c|v) || q(c|e))) / Z, then the
/// marginal q(e), then q(c|e), from a seeded random row-stochastic start.
/// Stops when the objective moves by less than tol or after max_iter
/// cycles; hitting max_iter is reported via the converged flag, not an
/// error. Throws Degenerate for k < 1.
IbSolution solve_ib(const DiscreteJoint& joint, int k, double beta,
                    std::uint64_t seed, int max_iter = 200,
                    double tol = 1e-10);

/// Runs `restarts` independently seeded solves (seed, seed+1, ...) and
/// returns the best objective; exact ties go to the lowest seed. Restarts
/// run concurrently.
IbSolution solve_ib_best(const DiscreteJoint& joint, int k, double beta,
                         std::uint64_t seed, int restarts, int max_iter = 200,
                         double tol = 1e-10);

/// Deterministic cluster per row: argmax of q(e|v), ties to lowest index.
std::vector<int> hard_assignment(const IbSolution& sol);

/// P(v, e, c) stored as one |V| x |C| slice per bottleneck value e.
struct ThreeWayJoint {
  std::vector<Eigen::MatrixXd> slices;

  double total() const;
  Eigen::MatrixXd marginal_vc() const;  // sum over e
};

/// Builds the generative factorization P(v|e) P(c|e) P(e) from a solution,
/// inverting q(e|v) against p(v) by Bayes' rule.
ThreeWayJoint factorized_joint(const IbSolution& sol,
                               const Eigen::VectorXd& p_v);

/// I(V;C|E) of a three-way distribution; zero for any factorized_joint
/// output, by construction.
double conditional_mutual_information(const ThreeWayJoint& joint);

/// Tradeoff scale in its two parameterizations: beta = gamma / (1 + gamma).
struct GammaBeta {
  double gamma = 0.0;
  double beta = 0.0;
};

GammaBeta gamma_to_beta(double gamma);

}  // namespace synesthete
