#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "advbound/dataset.hpp"
#include "advbound/geometry.hpp"

namespace advbound {

// maximize sum_l w_l log_alpha(z_l)  s.t.  D z <= 1, z >= 0.
struct PackingProblem {
  std::vector<double> weights;  // w, one per variable
  Incidence incidence;          // D, 0/1 rows
  double alpha = 1.0;
  int class_count = 1;  // K; rows have at most K members

  static PackingProblem from_hypergraph(const LabeledDataset& data, const ConflictHypergraph& graph,
                                        double alpha);
  std::size_t variable_count() const { return weights.size(); }
  std::size_t row_count() const { return incidence.rows(); }
  // Throws ValidationError if a column is empty, a weight is not positive, or alpha < 0.
  void validate() const;
};

struct SolverTolerances {
  double kkt_tol = 1e-6;
  double gap_tol = 1e-8;
  int max_newton_iters = 200;  // per centering step
  double barrier_growth = 10.0;
  double warm_start_theta = 0.01;
};

struct DualSolution {
  std::vector<double> z;       // psi per variable
  std::vector<double> lambda;  // one multiplier per constraint row
  double objective = 0.0;      // sum_l w_l log_alpha(z_l)
  double risk_lower_bound = 0.0;
  double kkt_residual = 0.0;
  int newton_iters = 0;
  int outer_iters = 0;
  // Variables whose value fell below 1e-9 at alpha = 0 and were reported as exact 0.
  std::vector<std::size_t> zeroed;
};

// Barrier path-following solve. A warm start z0 is moved toward the strictly
// feasible uniform point as (1 - theta) z0 + theta u.
DualSolution solve(const PackingProblem& problem, const SolverTolerances& tolerances = {},
                   std::optional<std::span<const double>> warm_start = std::nullopt);

// Max of stationarity, primal infeasibility, dual infeasibility and complementary
// slackness. The multipliers of z >= 0 are implied as max(D^T lambda - grad, 0).
double kkt_residual(const PackingProblem& problem, std::span<const double> z,
                    std::span<const double> lambda);

// Successive-refinement grid search, for n <= 4 variables. Returns the best objective.
double oracle_solve(const PackingProblem& problem);

struct ZeroOneDualResult {
  std::vector<double> g;
  double dual_value = 0.0;        // max sum_l w_l g_l over the stored constraints
  double risk_lower_bound = 0.0;  // 1 - dual_value
};

// Linear dual of the 0-1 loss in the g = 1 + phi variables. Requires alpha == 0.
ZeroOneDualResult zero_one_dual_solve(const PackingProblem& problem,
                                      const SolverTolerances& tolerances = {});

}  // namespace advbound
