#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>
#include <vector>

#include "advbound/errors.hpp"
#include "advbound/geometry.hpp"
#include "advbound/packing.hpp"
#include "support.hpp"

using namespace advbound;
namespace ts = testsupport;

namespace {

double max_row_sum(const PackingProblem& p, const std::vector<double>& z) {
  double worst = -1e300;
  for (std::size_t r = 0; r < p.row_count(); ++r) {
    double s = 0.0;
    for (std::size_t l : p.incidence.row(r)) s += z[l];
    worst = std::max(worst, s);
  }
  return worst;
}

double objective_of(const PackingProblem& p, const std::vector<double>& z) {
  double s = 0.0;
  for (std::size_t l = 0; l < z.size(); ++l) s += p.weights[l] * log_alpha(p.alpha, z[l]);
  return s;
}

PackingProblem random_problem(ts::Rng& rng, double alpha) {
  const int k = ts::uniform_int(rng, 2, 4);
  const auto d = ts::random_dataset(rng, k, 5, 2, 3.0, true);
  const auto g = build_hypergraph(d, Metric{}, ts::uniform(rng, 0.2, 1.8), ts::uniform_int(rng, 2, k));
  return PackingProblem::from_hypergraph(d, g, alpha);
}

}  // namespace

TEST_CASE("pair instance under cross-entropy") {
  const auto p = ts::pair_problem(1.0);
  const auto sol = solve(p);
  CHECK(sol.z[0] == doctest::Approx(0.5).epsilon(1e-7));
  CHECK(sol.z[1] == doctest::Approx(0.5).epsilon(1e-7));
  CHECK(std::abs(sol.risk_lower_bound - std::log(2.0)) <= 1e-7);
  CHECK(sol.risk_lower_bound == -sol.objective);
  CHECK(sol.kkt_residual <= 1e-6);
  REQUIRE(sol.lambda.size() == 1);
  CHECK(sol.lambda[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(-oracle_solve(p) - std::log(2.0)) <= 1e-3);
}

TEST_CASE("pair instance under the 0-1 loss") {
  const auto p = ts::pair_problem(0.0);
  const auto sol = solve(p);
  CHECK(std::abs(sol.risk_lower_bound - 0.5) <= 1e-7);
  CHECK(sol.z[0] + sol.z[1] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(std::abs(-oracle_solve(p) - 0.5) <= 1e-3);
  const auto dual = zero_one_dual_solve(p);
  CHECK(dual.dual_value == doctest::Approx(0.5).epsilon(1e-7));
  CHECK(dual.risk_lower_bound == doctest::Approx(0.5).epsilon(1e-7));
}

TEST_CASE("pair instance for alpha = 2") {
  const auto sol = solve(ts::pair_problem(2.0));
  CHECK(std::abs(sol.risk_lower_bound - 1.0) <= 1e-7);
}

TEST_CASE("unequal weights follow z proportional to w^(1/alpha)") {
  for (double alpha : {0.5, 1.0, 2.0, 3.0}) {
    auto p = ts::pair_problem(alpha);
    p.weights = {0.7, 0.3};
    const auto sol = solve(p);
    const double a = std::pow(0.7, 1.0 / alpha), b = std::pow(0.3, 1.0 / alpha);
    CHECK(sol.z[0] == doctest::Approx(a / (a + b)).epsilon(1e-6));
    CHECK(sol.z[1] == doctest::Approx(b / (a + b)).epsilon(1e-6));
    const double expected = -(0.7 * log_alpha(alpha, a / (a + b)) + 0.3 * log_alpha(alpha, b / (a + b)));
    CHECK(std::abs(sol.risk_lower_bound - expected) <= 1e-7);
  }
}

TEST_CASE("alpha = 0 rounds tiny entries to exact zeros") {
  auto p = ts::pair_problem(0.0);
  p.weights = {0.7, 0.3};
  // At the default gap the inactive entry sits near 1e-8, above the rounding cutoff.
  const auto loose = solve(p);
  CHECK(loose.zeroed.empty());
  CHECK(loose.z[1] < 1e-7);
  SolverTolerances tight;
  tight.gap_tol = 1e-11;
  const auto sol = solve(p, tight);
  CHECK(std::abs(sol.risk_lower_bound - 0.3) <= 1e-9);
  CHECK(sol.z[1] == 0.0);
  CHECK(sol.z[0] == doctest::Approx(1.0).epsilon(1e-7));
  REQUIRE(sol.zeroed.size() == 1);
  CHECK(sol.zeroed[0] == 1);
  CHECK_FALSE(std::signbit(sol.z[1]));
}

TEST_CASE("singleton-only instances are exactly zero") {
  for (double alpha : {0.0, 0.5, 1.0, 2.0}) {
    const auto p = ts::singleton_problem({0.2, 0.3, 0.5}, alpha);
    const auto sol = solve(p);
    CHECK(sol.risk_lower_bound == 0.0);
    CHECK_FALSE(std::signbit(sol.risk_lower_bound));
    for (double z : sol.z) CHECK(z == 1.0);
    CHECK(std::abs(oracle_solve(p)) <= 1e-9);
  }
  const auto dual = zero_one_dual_solve(ts::singleton_problem({0.5, 0.5}, 0.0));
  CHECK(dual.risk_lower_bound == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
  for (double g : dual.g) CHECK(g == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("full confusion of three classes") {
  const auto ce = solve(ts::full_confusion_problem(3, 1.0));
  CHECK(std::abs(ce.risk_lower_bound - std::log(3.0)) <= 1e-7);
  for (double z : ce.z) CHECK(z == doctest::Approx(1.0 / 3.0).epsilon(1e-7));
  const double half_alpha = 2.0 * (1.0 - std::sqrt(1.0 / 3.0));
  CHECK(std::abs(-oracle_solve(ts::full_confusion_problem(3, 0.5)) - half_alpha) <= 1e-3);
  CHECK(std::abs(solve(ts::full_confusion_problem(3, 0.5)).risk_lower_bound - half_alpha) <= 1e-7);
  CHECK(std::abs(zero_one_dual_solve(ts::full_confusion_problem(3, 0.0)).risk_lower_bound - 2.0 / 3.0) <= 1e-7);
}

TEST_CASE("kkt_residual examples") {
  const auto p = ts::pair_problem(1.0);
  const std::vector<double> z{0.5, 0.5};
  const std::vector<double> lambda{1.0};
  CHECK(kkt_residual(p, z, lambda) <= 1e-15);
  const std::vector<double> none{0.0};
  const std::vector<double> inner{0.4, 0.3};
  CHECK(kkt_residual(p, inner, none) == doctest::Approx(0.5 / 0.3));

  double prev = kkt_residual(p, z, lambda);
  for (int i = 1; i <= 10; ++i) {
    const std::vector<double> moved{0.5 + 1e-3 * i, 0.5};
    const double r = kkt_residual(p, moved, lambda);
    CHECK(r > prev);
    prev = r;
  }
  const std::vector<double> negative{-1.0};
  CHECK(kkt_residual(p, z, negative) >= 1.0);
}

TEST_CASE("oracle limits") {
  auto p = ts::singleton_problem({0.2, 0.2, 0.2, 0.2, 0.2}, 1.0);
  CHECK_THROWS_AS(oracle_solve(p), ValidationError);
  CHECK_THROWS_AS(zero_one_dual_solve(ts::pair_problem(0.5)), ValidationError);
}

TEST_CASE("problem validation") {
  auto p = ts::pair_problem(1.0);
  p.weights[0] = 0.0;
  CHECK_THROWS_AS(solve(p), ValidationError);
  p = ts::pair_problem(-0.5);
  CHECK_THROWS_AS(solve(p), ValidationError);
  p = ts::pair_problem(1.0);
  p.incidence.cols = 3;
  p.weights.push_back(0.1);
  CHECK_THROWS_AS(solve(p), ValidationError);  // column 2 is empty
  p = ts::pair_problem(1.0);
  const std::size_t bad[] = {5};
  p.incidence.add_row(bad);
  CHECK_THROWS_AS(solve(p), ValidationError);
  const std::vector<double> wrong_size{0.5};
  CHECK_THROWS_AS(solve(ts::pair_problem(1.0), {}, std::span<const double>(wrong_size)), ValidationError);
}

TEST_CASE("unreachable tolerances raise a solver error") {
  SolverTolerances tol;
  tol.kkt_tol = 1e-30;
  CHECK_THROWS_AS(solve(ts::full_confusion_problem(3, 1.0), tol), SolverError);
}

TEST_CASE("random instances: feasibility, certificates and oracle agreement") {
  ts::Rng rng(31);
  for (int trial = 0; trial < 60; ++trial) {
    const double alpha = std::vector<double>{0.0, 0.25, 0.5, 1.0, 1.5, 2.0}[static_cast<std::size_t>(trial % 6)];
    const auto p = random_problem(rng, alpha);
    const auto sol = solve(p);
    CHECK(max_row_sum(p, sol.z) <= 1.0 + 1e-9);
    for (double z : sol.z) CHECK(z >= 0.0);
    for (double l : sol.lambda) CHECK(l >= 0.0);
    CHECK(sol.kkt_residual <= 1e-6);
    CHECK(kkt_residual(p, sol.z, sol.lambda) == doctest::Approx(sol.kkt_residual).epsilon(1e-9).scale(1e-12));
    CHECK(sol.objective == doctest::Approx(objective_of(p, sol.z)).epsilon(1e-12));
    if (alpha == 0.0) {
      CHECK(std::abs(sol.risk_lower_bound - zero_one_dual_solve(p).risk_lower_bound) <= 1e-6);
    }
  }
}

TEST_CASE("small instances agree with the grid oracle") {
  ts::Rng rng(32);
  int checked = 0;
  while (checked < 40) {
    const auto d = ts::random_dataset(rng, 2, 2, 1, 2.0, true);
    const auto g = build_hypergraph(d, Metric{}, ts::uniform(rng, 0.0, 1.0), 2);
    for (double alpha : {0.0, 0.5, 1.0, 2.0}) {
      const auto p = PackingProblem::from_hypergraph(d, g, alpha);
      CHECK(std::abs(solve(p).objective - oracle_solve(p)) <= 1e-3);
      // The oracle only sees feasible points, so it cannot beat the optimum.
      CHECK(oracle_solve(p) <= solve(p).objective + 1e-7);
      ++checked;
    }
  }
}

TEST_CASE("solves are bitwise deterministic") {
  ts::Rng rng(33);
  for (int trial = 0; trial < 5; ++trial) {
    const auto p = random_problem(rng, 0.75);
    const auto a = solve(p);
    const auto b = solve(p);
    REQUIRE(a.z.size() == b.z.size());
    CHECK(std::memcmp(a.z.data(), b.z.data(), a.z.size() * sizeof(double)) == 0);
    CHECK(a.newton_iters == b.newton_iters);
  }
}

TEST_CASE("warm starts reach the cold-start optimum") {
  ts::Rng rng(34);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = random_problem(rng, trial % 2 ? 1.0 : 0.5);
    const auto cold = solve(p);
    auto alt = p;
    alt.alpha = 0.25;
    const auto other = solve(alt);
    const auto warm = solve(p, {}, std::span<const double>(other.z));
    CHECK(std::abs(warm.risk_lower_bound - cold.risk_lower_bound) <= 1e-7);
    // A warm start on the boundary, or even infeasible, is pulled inside first.
    const std::vector<double> ones(p.variable_count(), 1.0);
    const auto from_ones = solve(p, {}, std::span<const double>(ones));
    CHECK(std::abs(from_ones.risk_lower_bound - cold.risk_lower_bound) <= 1e-7);
  }
}

TEST_CASE("from_hypergraph copies weights and rows") {
  const auto d = LabeledDataset::from_points({{0, 0}, {2, 0}, {1, 1.9}}, {0, 1, 2}, {0.5, 0.25, 0.25});
  const auto g = build_hypergraph(d, Metric{}, 1.0, 3);
  const auto p = PackingProblem::from_hypergraph(d, g, 0.5);
  CHECK(p.weights == d.weights());
  CHECK(p.incidence == g.incidence);
  CHECK(p.class_count == 3);
  CHECK(p.alpha == 0.5);
}
