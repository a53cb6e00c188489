#include "advbound/packing.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "advbound/alpha.hpp"
#include "advbound/errors.hpp"

namespace advbound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCenteringTol = 1e-12;  // on decrement^2 / 2
constexpr double kLooseCentering = 1e-8;
constexpr double kArmijo = 0.25;
constexpr double kBacktrack = 0.5;
constexpr double kFractionToBoundary = 0.99;
constexpr double kZeroReport = 1e-9;
constexpr int kExtraOuterRounds = 4;

// Separable concave objective sum_l w_l log_alpha(z_l).
struct AlphaUtility {
  const std::vector<double>& w;
  double alpha;

  double slope(std::size_t l, double z) const { return w[l] * log_alpha_derivative(alpha, z); }
  double curvature(std::size_t l, double z) const {
    if (alpha == 0.0) return 0.0;
    if (is_cross_entropy(alpha)) return w[l] / (z * z);
    return alpha * w[l] * std::pow(z, -alpha - 1.0);
  }
  // h_l(z + dz) - h_l(z) without cancellation.
  double increment(std::size_t l, double z, double dz) const {
    if (alpha == 0.0) return w[l] * dz;
    const double rel = std::log1p(dz / z);
    if (is_cross_entropy(alpha)) return w[l] * rel;
    const double p = 1.0 - alpha;
    return w[l] * std::pow(z, p) * std::expm1(p * rel) / p;
  }
};

// Linear objective sum_l c_l z_l.
struct LinearUtility {
  const std::vector<double>& c;

  double slope(std::size_t l, double) const { return c[l]; }
  double curvature(std::size_t, double) const { return 0.0; }
  double increment(std::size_t l, double, double dz) const { return c[l] * dz; }
};

struct CoreResult {
  std::vector<double> z;
  std::vector<double> slack;
  double t = 1.0;
  int newton_iters = 0;
  int outer_iters = 0;
};

std::vector<double> row_products(const Incidence& d, std::span<const double> z) {
  std::vector<double> out(d.rows(), 0.0);
  for (std::size_t r = 0; r < d.rows(); ++r) {
    for (std::size_t l : d.row(r)) out[r] += z[l];
  }
  return out;
}

std::string describe(const char* what, double t, int iters, double decrement) {
  std::ostringstream os;
  os << what << " (t = " << t << ", newton iterations = " << iters
     << ", decrement^2 = " << decrement << ")";
  return os.str();
}

// Minimizes t * (-f(z)) - sum_r log(1 - D_r z) - sum_l log z_l along an increasing t
// schedule. `z` must be strictly feasible.
template <class Objective>
CoreResult barrier_maximize(const Objective& obj, const Incidence& d, std::vector<double> z,
                            const SolverTolerances& tol) {
  const std::size_t n = z.size();
  const std::size_t m = d.rows();
  CoreResult res;
  res.slack = row_products(d, z);
  for (double& s : res.slack) s = 1.0 - s;
  for (double s : res.slack) {
    if (!(s > 0.0)) throw SolverError("interior-point start is not strictly feasible");
  }

  const double barrier_terms = static_cast<double>(n + m);
  const double t_final = barrier_terms / tol.gap_tol;

  // Initial t: least-squares fit of the centrality condition at the start point.
  {
    std::vector<double> b(n, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t l : d.row(r)) b[l] += 1.0 / res.slack[r];
    }
    double gb = 0.0;
    double gg = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
      const double g = obj.slope(l, z[l]);
      gb += g * (b[l] - 1.0 / z[l]);
      gg += g * g;
    }
    double t0 = gg > 0.0 ? gb / gg : 1.0;
    if (!(t0 > 1e-3)) t0 = 1.0;
    res.t = std::min(t0, t_final);
  }

  Eigen::MatrixXd hess(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  Eigen::VectorXd grad(static_cast<Eigen::Index>(n));
  Eigen::VectorXd step(static_cast<Eigen::Index>(n));
  std::vector<double> ds(m);
  std::vector<double> inv_s(m);

  auto center = [&](double t) {
    int iters = 0;
    while (true) {
      for (std::size_t r = 0; r < m; ++r) inv_s[r] = 1.0 / res.slack[r];
      hess.setZero();
      for (std::size_t l = 0; l < n; ++l) {
        const auto li = static_cast<Eigen::Index>(l);
        grad(li) = -t * obj.slope(l, z[l]) - 1.0 / z[l];
        hess(li, li) = t * obj.curvature(l, z[l]) + 1.0 / (z[l] * z[l]);
      }
      for (std::size_t r = 0; r < m; ++r) {
        const auto row = d.row(r);
        const double q = inv_s[r] * inv_s[r];
        for (std::size_t a = 0; a < row.size(); ++a) {
          const auto ia = static_cast<Eigen::Index>(row[a]);
          grad(ia) += inv_s[r];
          for (std::size_t b = 0; b <= a; ++b) {
            const auto ib = static_cast<Eigen::Index>(row[b]);
            // row members are ascending, so ia >= ib: lower triangle
            hess(ia, ib) += q;
          }
        }
      }

      Eigen::LLT<Eigen::MatrixXd, Eigen::Lower> llt(hess);
      double reg = 1e-10;
      while (llt.info() != Eigen::Success) {
        if (reg > 1e6) throw SolverError(describe("Newton system could not be factored", t, iters, kInf));
        Eigen::MatrixXd shifted = hess;
        shifted.diagonal().array() += reg * std::max(1.0, hess.diagonal().maxCoeff());
        llt.compute(shifted);
        reg *= 100.0;
      }
      step = -llt.solve(grad);
      const double decrement = -grad.dot(step);
      if (!std::isfinite(decrement)) throw SolverError(describe("Newton step is not finite", t, iters, decrement));
      if (decrement / 2.0 <= kCenteringTol) return;
      if (iters >= tol.max_newton_iters) {
        throw SolverError(describe("Newton iteration cap exceeded", t, iters, decrement));
      }

      // Largest step keeping z and the slacks strictly positive.
      double max_step = 1.0 / kFractionToBoundary;
      for (std::size_t l = 0; l < n; ++l) {
        const double dz = step(static_cast<Eigen::Index>(l));
        if (dz < 0.0) max_step = std::min(max_step, -z[l] / dz);
      }
      for (std::size_t r = 0; r < m; ++r) {
        double acc = 0.0;
        for (std::size_t l : d.row(r)) acc += step(static_cast<Eigen::Index>(l));
        ds[r] = -acc;
        if (ds[r] < 0.0) max_step = std::min(max_step, -res.slack[r] / ds[r]);
      }
      double alpha = std::min(1.0, kFractionToBoundary * max_step);

      auto merit_change = [&](double a) {
        double change = 0.0;
        for (std::size_t l = 0; l < n; ++l) {
          const double dz = a * step(static_cast<Eigen::Index>(l));
          change -= t * obj.increment(l, z[l], dz);
          change -= std::log1p(dz / z[l]);
        }
        for (std::size_t r = 0; r < m; ++r) change -= std::log1p(a * ds[r] / res.slack[r]);
        return change;
      };

      bool accepted = false;
      for (int k = 0; k < 80; ++k) {
        if (merit_change(alpha) <= -kArmijo * alpha * decrement) {
          accepted = true;
          break;
        }
        alpha *= kBacktrack;
      }
      if (!accepted) {
        if (decrement / 2.0 <= kLooseCentering) return;  // round-off floor reached
        throw SolverError(describe("Newton step failed to decrease the barrier", t, iters, decrement));
      }
      for (std::size_t l = 0; l < n; ++l) z[l] += alpha * step(static_cast<Eigen::Index>(l));
      for (std::size_t r = 0; r < m; ++r) res.slack[r] += alpha * ds[r];
      ++iters;
      ++res.newton_iters;
    }
  };

  while (true) {
    center(res.t);
    ++res.outer_iters;
    if (res.t >= t_final) break;
    res.t = std::min(res.t * tol.barrier_growth, t_final);
  }
  res.z = std::move(z);
  return res;
}

// Fixes variables constrained only by their own singleton row at 1 and solves the rest.
struct Presolve {
  std::vector<std::size_t> free_vars;  // original ids of variables kept
  std::vector<std::size_t> free_rows;  // original ids of rows kept
  std::vector<bool> fixed;             // per original variable
  Incidence reduced;
};

Presolve presolve(const Incidence& d) {
  Presolve p;
  const std::size_t n = d.cols;
  std::vector<int> uses(n, 0);
  std::vector<bool> own_singleton(n, false);
  for (std::size_t r = 0; r < d.rows(); ++r) {
    const auto row = d.row(r);
    for (std::size_t l : row) ++uses[l];
    if (row.size() == 1) own_singleton[row[0]] = true;
  }
  p.fixed.assign(n, false);
  std::vector<std::size_t> new_id(n, 0);
  for (std::size_t l = 0; l < n; ++l) {
    p.fixed[l] = own_singleton[l] && uses[l] == 1;
    if (!p.fixed[l]) {
      new_id[l] = p.free_vars.size();
      p.free_vars.push_back(l);
    }
  }
  p.reduced.cols = p.free_vars.size();
  std::vector<std::size_t> members;
  for (std::size_t r = 0; r < d.rows(); ++r) {
    const auto row = d.row(r);
    if (row.size() == 1 && p.fixed[row[0]]) continue;
    members.clear();
    for (std::size_t l : row) members.push_back(new_id[l]);
    std::sort(members.begin(), members.end());
    p.reduced.add_row(members);
    p.free_rows.push_back(r);
  }
  return p;
}

std::size_t max_row_size(const Incidence& d) {
  std::size_t widest = 1;
  for (std::size_t r = 0; r < d.rows(); ++r) widest = std::max(widest, d.row(r).size());
  return widest;
}

bool strictly_feasible(const Incidence& d, std::span<const double> z) {
  for (double v : z) {
    if (!(v > 0.0)) return false;
  }
  for (double s : row_products(d, z)) {
    if (!(s < 1.0)) return false;
  }
  return true;
}

// Strictly feasible start in the reduced space.
std::vector<double> starting_point(const Presolve& p, std::optional<std::span<const double>> warm,
                                   double theta) {
  const std::size_t n = p.free_vars.size();
  const double uniform = 1.0 / static_cast<double>(max_row_size(p.reduced) + 1);
  std::vector<double> z(n, uniform);
  if (!warm) return z;
  std::vector<double> z0(n);
  for (std::size_t j = 0; j < n; ++j) z0[j] = (*warm)[p.free_vars[j]];
  // A warm start taken from a smaller constraint set may violate new rows; move further
  // toward the uniform point until strictly feasible.
  for (int attempt = 0; attempt < 60; ++attempt) {
    for (std::size_t j = 0; j < n; ++j) z[j] = (1.0 - theta) * z0[j] + theta * uniform;
    if (strictly_feasible(p.reduced, z)) return z;
    theta = 1.0 - 0.5 * (1.0 - theta);
  }
  std::fill(z.begin(), z.end(), uniform);
  return z;
}

void validate_tolerances(const SolverTolerances& tol) {
  if (!(tol.kkt_tol > 0.0) || !(tol.gap_tol > 0.0) || tol.max_newton_iters < 1 ||
      !(tol.barrier_growth > 1.0) || !(tol.warm_start_theta > 0.0 && tol.warm_start_theta < 1.0)) {
    throw ValidationError("invalid solver tolerances");
  }
}

double clean_zero(double x) { return x == 0.0 ? 0.0 : x; }

}  // namespace

PackingProblem PackingProblem::from_hypergraph(const LabeledDataset& data, const ConflictHypergraph& graph,
                                               double alpha) {
  if (graph.variable_count() != data.size()) {
    throw ValidationError("hypergraph was built for a different dataset");
  }
  PackingProblem p;
  p.weights = data.weights();
  p.incidence = graph.incidence;
  p.alpha = alpha;
  p.class_count = data.class_count();
  p.validate();
  return p;
}

void PackingProblem::validate() const {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ValidationError("alpha must be finite and >= 0");
  if (incidence.cols != weights.size()) throw ValidationError("incidence width differs from weight count");
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw ValidationError("packing weights must be positive");
  }
  std::vector<bool> seen(weights.size(), false);
  for (std::size_t r = 0; r < incidence.rows(); ++r) {
    const auto row = incidence.row(r);
    if (row.empty()) throw ValidationError("packing row " + std::to_string(r) + " is empty");
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (row[j] >= weights.size()) throw ValidationError("packing row refers to a missing variable");
      if (j > 0 && row[j] <= row[j - 1]) throw ValidationError("packing row members must be ascending");
      seen[row[j]] = true;
    }
  }
  for (std::size_t l = 0; l < seen.size(); ++l) {
    if (!seen[l]) throw ValidationError("variable " + std::to_string(l) + " appears in no constraint");
  }
}

DualSolution solve(const PackingProblem& problem, const SolverTolerances& tolerances,
                   std::optional<std::span<const double>> warm_start) {
  problem.validate();
  validate_tolerances(tolerances);
  const std::size_t n = problem.variable_count();
  if (warm_start) {
    if (warm_start->size() != n) throw ValidationError("warm start has the wrong length");
    for (double v : *warm_start) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("warm start entries must be finite and >= 0");
    }
  }

  const Presolve pre = presolve(problem.incidence);
  const AlphaUtility full_obj{problem.weights, problem.alpha};

  DualSolution sol;
  sol.z.assign(n, 1.0);
  sol.lambda.assign(problem.row_count(), 0.0);
  for (std::size_t r = 0; r < problem.row_count(); ++r) {
    const auto row = problem.incidence.row(r);
    if (row.size() == 1 && pre.fixed[row[0]]) sol.lambda[r] = full_obj.slope(row[0], 1.0);
  }

  if (!pre.free_vars.empty()) {
    std::vector<double> w(pre.free_vars.size());
    for (std::size_t j = 0; j < w.size(); ++j) w[j] = problem.weights[pre.free_vars[j]];
    const AlphaUtility obj{w, problem.alpha};
    std::vector<double> start = starting_point(pre, warm_start, tolerances.warm_start_theta);

    CoreResult core = barrier_maximize(obj, pre.reduced, std::move(start), tolerances);
    auto scatter = [&](const CoreResult& c) {
      for (std::size_t j = 0; j < pre.free_vars.size(); ++j) sol.z[pre.free_vars[j]] = c.z[j];
      for (std::size_t k = 0; k < pre.free_rows.size(); ++k) {
        sol.lambda[pre.free_rows[k]] = 1.0 / (c.t * c.slack[k]);
      }
    };
    scatter(core);
    sol.newton_iters = core.newton_iters;
    sol.outer_iters = core.outer_iters;
    sol.kkt_residual = kkt_residual(problem, sol.z, sol.lambda);

    // Certificate not met yet: keep following the path.
    SolverTolerances tighter = tolerances;
    for (int round = 0; round < kExtraOuterRounds && sol.kkt_residual > tolerances.kkt_tol; ++round) {
      tighter.gap_tol /= tolerances.barrier_growth;
      std::vector<double> resume(pre.free_vars.size());
      for (std::size_t j = 0; j < resume.size(); ++j) resume[j] = sol.z[pre.free_vars[j]];
      core = barrier_maximize(obj, pre.reduced, std::move(resume), tighter);
      scatter(core);
      sol.newton_iters += core.newton_iters;
      sol.outer_iters += core.outer_iters;
      sol.kkt_residual = kkt_residual(problem, sol.z, sol.lambda);
    }
    if (!(sol.kkt_residual <= tolerances.kkt_tol)) {
      std::ostringstream os;
      os << "KKT residual " << sol.kkt_residual << " above tolerance " << tolerances.kkt_tol;
      throw SolverError(os.str());
    }

    if (problem.alpha == 0.0) {
      for (std::size_t l = 0; l < n; ++l) {
        if (sol.z[l] < kZeroReport) {
          sol.z[l] = 0.0;
          sol.zeroed.push_back(l);
        }
      }
      if (!sol.zeroed.empty()) sol.kkt_residual = kkt_residual(problem, sol.z, sol.lambda);
    }
  }

  double objective = 0.0;
  for (std::size_t l = 0; l < n; ++l) objective += problem.weights[l] * log_alpha(problem.alpha, sol.z[l]);
  sol.objective = clean_zero(objective);
  sol.risk_lower_bound = clean_zero(-objective);
  return sol;
}

double kkt_residual(const PackingProblem& problem, std::span<const double> z, std::span<const double> lambda) {
  const std::size_t n = problem.variable_count();
  if (z.size() != n || lambda.size() != problem.row_count()) {
    throw ValidationError("kkt_residual: size mismatch");
  }
  const AlphaUtility obj{problem.weights, problem.alpha};
  std::vector<double> dual(n, 0.0);
  double worst = 0.0;
  for (std::size_t r = 0; r < problem.row_count(); ++r) {
    double load = 0.0;
    for (std::size_t l : problem.incidence.row(r)) {
      dual[l] += lambda[r];
      load += z[l];
    }
    worst = std::max(worst, load - 1.0);                               // primal infeasibility
    worst = std::max(worst, -lambda[r]);                               // dual infeasibility
    worst = std::max(worst, std::abs(lambda[r] * (1.0 - load)));       // complementary slackness
  }
  for (std::size_t l = 0; l < n; ++l) {
    worst = std::max(worst, -z[l]);
    if (z[l] <= 0.0 && problem.alpha > 0.0) return kInf;
    const double grad = obj.slope(l, std::max(z[l], 0.0));
    // nu_l >= 0 is the multiplier of z_l >= 0.
    const double nu = std::max(dual[l] - grad, 0.0);
    worst = std::max(worst, grad - dual[l]);  // stationarity: grad - D^T lambda + nu = 0
    worst = std::max(worst, nu * std::max(z[l], 0.0));
  }
  return worst;
}

double oracle_solve(const PackingProblem& problem) {
  problem.validate();
  const std::size_t n = problem.variable_count();
  if (n > 4) throw ValidationError("oracle_solve supports at most 4 variables");
  constexpr int kRounds = 6;
  constexpr int kPoints = 21;
  constexpr double kFloor = 1e-6;
  constexpr double kShrink = 5.0;

  std::vector<double> lo(n, kFloor);
  std::vector<double> hi(n, 1.0);
  std::vector<double> best_z(n, kFloor);
  double best = -kInf;
  std::vector<double> z(n);
  std::vector<int> idx(n);
  for (int round = 0; round < kRounds; ++round) {
    std::fill(idx.begin(), idx.end(), 0);
    while (true) {
      for (std::size_t l = 0; l < n; ++l) {
        z[l] = lo[l] + (hi[l] - lo[l]) * idx[l] / (kPoints - 1);
      }
      bool feasible = true;
      for (std::size_t r = 0; r < problem.row_count() && feasible; ++r) {
        double load = 0.0;
        for (std::size_t l : problem.incidence.row(r)) load += z[l];
        feasible = load <= 1.0 + 1e-12;
      }
      if (feasible) {
        double value = 0.0;
        for (std::size_t l = 0; l < n; ++l) value += problem.weights[l] * log_alpha(problem.alpha, z[l]);
        if (value > best) {
          best = value;
          best_z = z;
        }
      }
      std::size_t k = 0;
      while (k < n && ++idx[k] == kPoints) idx[k++] = 0;
      if (k == n) break;
    }
    for (std::size_t l = 0; l < n; ++l) {
      const double half = (hi[l] - lo[l]) / kShrink / 2.0;
      lo[l] = std::max(kFloor, best_z[l] - half);
      hi[l] = std::min(1.0, best_z[l] + half);
    }
  }
  return best;
}

ZeroOneDualResult zero_one_dual_solve(const PackingProblem& problem, const SolverTolerances& tolerances) {
  if (problem.alpha != 0.0) throw ValidationError("zero_one_dual_solve requires alpha = 0");
  problem.validate();
  validate_tolerances(tolerances);
  const Presolve pre = presolve(problem.incidence);

  ZeroOneDualResult res;
  res.g.assign(problem.variable_count(), 1.0);
  if (!pre.free_vars.empty()) {
    std::vector<double> c(pre.free_vars.size());
    for (std::size_t j = 0; j < c.size(); ++j) c[j] = problem.weights[pre.free_vars[j]];
    const CoreResult core =
        barrier_maximize(LinearUtility{c}, pre.reduced, starting_point(pre, std::nullopt, 0.5), tolerances);
    for (std::size_t j = 0; j < pre.free_vars.size(); ++j) res.g[pre.free_vars[j]] = core.z[j];
  }
  double value = 0.0;
  for (std::size_t l = 0; l < res.g.size(); ++l) value += problem.weights[l] * res.g[l];
  res.dual_value = value;
  res.risk_lower_bound = clean_zero(1.0 - value);
  return res;
}

}  // namespace advbound
