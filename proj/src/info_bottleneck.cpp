#include "synesthete/info_bottleneck.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <future>
#include <istream>
#include <limits>
#include <random>
#include <string>

#include "synesthete/errors.hpp"
#include "synesthete/logging.hpp"

namespace synesthete {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMassTolerance = 1e-9;

// Mutual information of an arbitrary nonnegative matrix summing to 1.
// Unlike the public entry point this accepts all-zero rows, which show up
// in conditional slices and degenerate cluster joints.
double mi_of_matrix(const Eigen::MatrixXd& joint) {
  const Eigen::VectorXd rows = joint.rowwise().sum();
  const Eigen::VectorXd cols = joint.colwise().sum();
  double total = 0.0;
  for (Eigen::Index i = 0; i < joint.rows(); ++i) {
    for (Eigen::Index j = 0; j < joint.cols(); ++j) {
      const double pij = joint(i, j);
      if (pij <= 0.0) continue;
      total += pij * std::log(pij / (rows(i) * cols(j)));
    }
  }
  return total;
}

}  // namespace

DiscreteJoint DiscreteJoint::validated(Eigen::MatrixXd m) {
  if (m.rows() < 1 || m.cols() < 1) {
    throw InvalidInput("joint must be non-empty");
  }
  if (!m.allFinite() || (m.array() < 0.0).any()) {
    throw InvalidInput("joint entries must be finite and nonnegative");
  }
  if (std::abs(m.sum() - 1.0) > kMassTolerance) {
    throw InvalidInput("joint mass is " + std::to_string(m.sum()) +
                       ", expected 1");
  }
  for (Eigen::Index v = 0; v < m.rows(); ++v) {
    if (m.row(v).sum() <= 0.0) {
      throw InvalidInput("joint row " + std::to_string(v) + " has zero mass");
    }
  }
  DiscreteJoint joint;
  joint.p = std::move(m);
  return joint;
}

Eigen::VectorXd DiscreteJoint::row_marginal() const {
  return p.rowwise().sum();
}

Eigen::VectorXd DiscreteJoint::col_marginal() const {
  return p.colwise().sum().transpose();
}

DiscreteJoint load_joint_csv(std::istream& in, bool* normalized_warning) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (line.front() == '#') continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      std::string field = line.substr(
          start,
          comma == std::string::npos ? std::string::npos : comma - start);
      const auto b = field.find_first_not_of(" \t\r");
      const auto e = field.find_last_not_of(" \t\r");
      field = b == std::string::npos ? std::string()
                                     : field.substr(b, e - b + 1);
      double value = 0.0;
      const auto [ptr, ec] =
          std::from_chars(field.data(), field.data() + field.size(), value);
      if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw ParseError(line_no, "not a number: '" + field + "'");
      }
      row.push_back(value);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError(line_no, "ragged matrix row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidInput("joint CSV is empty");

  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  if (!m.allFinite() || (m.array() < 0.0).any()) {
    throw InvalidInput("joint entries must be finite and nonnegative");
  }
  const double mass = m.sum();
  if (mass <= 0.0) throw InvalidInput("joint has zero total mass");
  const bool off = std::abs(mass - 1.0) > 1e-6;
  if (off) {
    logging::warn("joint mass ", mass, " deviates from 1; normalizing");
  }
  if (normalized_warning != nullptr) *normalized_warning = off;
  return DiscreteJoint::validated(m / mass);
}

double mutual_information(const DiscreteJoint& joint) {
  return mi_of_matrix(joint.p);
}

double kl_divergence(const Eigen::VectorXd& q, const Eigen::VectorXd& p) {
  if (q.size() != p.size()) {
    throw DimensionMismatch("KL divergence needs equal support sizes");
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    if (q(i) <= 0.0) continue;
    if (p(i) <= 0.0) return kInf;
    total += q(i) * std::log(q(i) / p(i));
  }
  return total;
}

namespace {

void check_stochastic_rows(const Eigen::MatrixXd& m, const char* what) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if ((m.row(i).array() < 0.0).any() ||
        std::abs(m.row(i).sum() - 1.0) > kMassTolerance) {
      throw std::logic_error(std::string("IB iterate lost stochasticity: ") +
                             what);
    }
  }
}

struct IbWorkspace {
  Eigen::VectorXd p_v;          // |V|
  Eigen::MatrixXd p_c_given_v;  // |V| x |C|
  Eigen::VectorXd p_c;          // |C|
};

// q(e) and q(c|e) induced by the current encoder. Clusters with vanished
// mass get the source marginal p(c); their weight in every other quantity
// is zero.
void update_decoder(const IbWorkspace& ws, const Eigen::MatrixXd& q_e_given_v,
                    Eigen::VectorXd& q_e, Eigen::MatrixXd& q_c_given_e) {
  q_e = q_e_given_v.transpose() * ws.p_v;
  const Eigen::Index k = q_e_given_v.cols();
  const Eigen::Index nc = ws.p_c_given_v.cols();
  q_c_given_e.resize(k, nc);
  for (Eigen::Index e = 0; e < k; ++e) {
    if (q_e(e) <= 0.0) {
      q_c_given_e.row(e) = ws.p_c.transpose();
      continue;
    }
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(nc);
    for (Eigen::Index v = 0; v < q_e_given_v.rows(); ++v) {
      acc += q_e_given_v(v, e) * ws.p_v(v) * ws.p_c_given_v.row(v);
    }
    q_c_given_e.row(e) = acc / q_e(e);
  }
}

double objective_value(const IbWorkspace& ws,
                       const Eigen::MatrixXd& q_e_given_v,
                       const Eigen::VectorXd& q_e,
                       const Eigen::MatrixXd& q_c_given_e, double beta) {
  const Eigen::MatrixXd joint_ve =
      ws.p_v.asDiagonal() * q_e_given_v;                       // p(v) q(e|v)
  const Eigen::MatrixXd joint_ec = q_e.asDiagonal() * q_c_given_e;
  return mi_of_matrix(joint_ve) - beta * mi_of_matrix(joint_ec);
}

}  // namespace

IbSolution solve_ib(const DiscreteJoint& joint, int k, double beta,
                    std::uint64_t seed, int max_iter, double tol) {
  if (k < 1) throw Degenerate("bottleneck cardinality k must be >= 1");
  if (!(beta > 0.0)) throw InvalidInput("beta must be > 0");
  if (max_iter < 1) throw InvalidInput("max_iter must be >= 1");

  const Eigen::Index nv = joint.p.rows();
  const Eigen::Index nc = joint.p.cols();

  IbWorkspace ws;
  ws.p_v = joint.row_marginal();
  ws.p_c = joint.col_marginal();
  ws.p_c_given_v = joint.p.array().colwise() / ws.p_v.array();

  IbSolution sol;
  sol.beta = beta;
  sol.seed = seed;

  // Seeded random row-stochastic start.
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  sol.q_e_given_v.resize(nv, k);
  for (Eigen::Index v = 0; v < nv; ++v) {
    double row_sum = 0.0;
    for (Eigen::Index e = 0; e < k; ++e) {
      // -log u is Exp(1); normalized rows are Dirichlet(1, ..., 1).
      const double w = -std::log(1.0 - uniform(rng));
      sol.q_e_given_v(v, e) = w;
      row_sum += w;
    }
    sol.q_e_given_v.row(v) /= row_sum;
  }

  update_decoder(ws, sol.q_e_given_v, sol.q_e, sol.q_c_given_e);
  sol.objective_trace.push_back(
      objective_value(ws, sol.q_e_given_v, sol.q_e, sol.q_c_given_e, beta));

  Eigen::MatrixXd log_weights(nv, k);
  for (int iter = 0; iter < max_iter; ++iter) {
    // Encoder step in log space; logsumexp keeps hard assignments stable
    // at large beta.
    for (Eigen::Index e = 0; e < k; ++e) {
      const double log_qe = sol.q_e(e) > 0.0 ? std::log(sol.q_e(e)) : -kInf;
      for (Eigen::Index v = 0; v < nv; ++v) {
        const double kl = kl_divergence(ws.p_c_given_v.row(v).transpose(),
                                        sol.q_c_given_e.row(e).transpose());
        log_weights(v, e) = log_qe - beta * kl;
      }
    }
    for (Eigen::Index v = 0; v < nv; ++v) {
      const double peak = log_weights.row(v).maxCoeff();
      if (!std::isfinite(peak)) continue;  // no admissible cluster: keep row
      const Eigen::ArrayXd shifted =
          (log_weights.row(v).array() - peak).exp();
      sol.q_e_given_v.row(v) = (shifted / shifted.sum()).transpose();
    }

    update_decoder(ws, sol.q_e_given_v, sol.q_e, sol.q_c_given_e);

    check_stochastic_rows(sol.q_e_given_v, "q(e|v)");
    check_stochastic_rows(sol.q_c_given_e, "q(c|e)");

    const double objective = objective_value(ws, sol.q_e_given_v, sol.q_e,
                                             sol.q_c_given_e, beta);
    const double previous = sol.objective_trace.back();
    sol.objective_trace.push_back(objective);
    if (std::abs(objective - previous) < tol) {
      sol.converged = true;
      break;
    }
  }
  return sol;
}

IbSolution solve_ib_best(const DiscreteJoint& joint, int k, double beta,
                         std::uint64_t seed, int restarts, int max_iter,
                         double tol) {
  if (restarts < 1) throw InvalidInput("restarts must be >= 1");
  std::vector<std::future<IbSolution>> futures;
  futures.reserve(static_cast<std::size_t>(restarts));
  for (int r = 0; r < restarts; ++r) {
    futures.push_back(std::async(std::launch::async, [&, r] {
      return solve_ib(joint, k, beta, seed + static_cast<std::uint64_t>(r),
                      max_iter, tol);
    }));
  }
  IbSolution best;
  bool have_best = false;
  for (auto& f : futures) {
    IbSolution candidate = f.get();
    // Strict improvement only, so equal objectives keep the lowest seed
    // (futures arrive in seed order).
    if (!have_best || candidate.objective() < best.objective()) {
      best = std::move(candidate);
      have_best = true;
    }
  }
  return best;
}

std::vector<int> hard_assignment(const IbSolution& sol) {
  std::vector<int> clusters(static_cast<std::size_t>(sol.q_e_given_v.rows()));
  for (Eigen::Index v = 0; v < sol.q_e_given_v.rows(); ++v) {
    int arg = 0;
    double best = sol.q_e_given_v(v, 0);
    for (Eigen::Index e = 1; e < sol.q_e_given_v.cols(); ++e) {
      if (sol.q_e_given_v(v, e) > best) {
        best = sol.q_e_given_v(v, e);
        arg = static_cast<int>(e);
      }
    }
    clusters[static_cast<std::size_t>(v)] = arg;
  }
  return clusters;
}

double ThreeWayJoint::total() const {
  double sum = 0.0;
  for (const auto& slice : slices) sum += slice.sum();
  return sum;
}

Eigen::MatrixXd ThreeWayJoint::marginal_vc() const {
  if (slices.empty()) throw InvalidInput("empty three-way joint");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(slices.front().rows(),
                                              slices.front().cols());
  for (const auto& slice : slices) out += slice;
  return out;
}

ThreeWayJoint factorized_joint(const IbSolution& sol,
                               const Eigen::VectorXd& p_v) {
  if (p_v.size() != sol.q_e_given_v.rows()) {
    throw DimensionMismatch("p_v size does not match the solution");
  }
  // P(v|e) P(e) = q(e|v) p(v), so each slice is rank-one in (v, c).
  ThreeWayJoint out;
  const Eigen::Index k = sol.q_e_given_v.cols();
  out.slices.reserve(static_cast<std::size_t>(k));
  for (Eigen::Index e = 0; e < k; ++e) {
    const Eigen::VectorXd ve =
        sol.q_e_given_v.col(e).cwiseProduct(p_v);  // P(v, e)
    out.slices.push_back(ve * sol.q_c_given_e.row(e));
  }
  return out;
}

double conditional_mutual_information(const ThreeWayJoint& joint) {
  double total = 0.0;
  for (const auto& slice : joint.slices) {
    const double p_e = slice.sum();
    if (p_e <= 0.0) continue;
    total += p_e * mi_of_matrix(slice / p_e);
  }
  return total;
}

GammaBeta gamma_to_beta(double gamma) {
  if (!(gamma >= 0.0)) throw InvalidInput("gamma must be >= 0");
  return {gamma, gamma / (1.0 + gamma)};
}

}  // namespace synesthete
