#include "advbound/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <optional>
#include <sstream>

#include "advbound/alpha.hpp"
#include "advbound/errors.hpp"
#include "advbound/geometry.hpp"
#include "advbound/packing.hpp"

namespace advbound {

namespace {

std::string cell_tag(double epsilon, double alpha) {
  std::ostringstream os;
  os << "cell (epsilon = " << epsilon << ", alpha = " << alpha << "): ";
  return os.str();
}

// Runs `fn`, prefixing any library error with the cell coordinates.
template <class Fn>
auto annotate(double epsilon, double alpha, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const SolverError& e) {
    throw SolverError(cell_tag(epsilon, alpha) + e.what());
  } catch (const ResourceError& e) {
    throw ResourceError(cell_tag(epsilon, alpha) + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(cell_tag(epsilon, alpha) + e.what());
  }
}

struct Cell {
  DualSolution solution;
  RiskRow row;
};

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

RiskCurve sweep(const LabeledDataset& data, const RunConfig& config) {
  config.validate(data.class_count());
  std::vector<double> alphas = config.alpha_list;
  std::sort(alphas.begin(), alphas.end());
  alphas.erase(std::unique(alphas.begin(), alphas.end()), alphas.end());
  const auto& eps = config.epsilon_grid;
  const int cap = data.class_count() >= 2 ? config.interaction_cap : 1;

  std::vector<ConflictHypergraph> graphs;
  std::vector<double> build_ms;
  graphs.reserve(eps.size());
  for (double e : eps) {
    const auto start = std::chrono::steady_clock::now();
    graphs.push_back(annotate(e, alphas.front(), [&] {
      return build_hypergraph(data, config.metric, e, cap, config.hypergraph);
    }));
    build_ms.push_back(elapsed_ms(start));
  }

  std::vector<std::vector<Cell>> cells(alphas.size(), std::vector<Cell>(eps.size()));

  auto solve_cell = [&](std::size_t a, std::size_t e, std::optional<std::span<const double>> warm) {
    const auto start = std::chrono::steady_clock::now();
    Cell& cell = cells[a][e];
    if (e > 0 && graphs[e] == graphs[e - 1]) {
      cell.solution = cells[a][e - 1].solution;
      cell.solution.newton_iters = 0;
      cell.solution.outer_iters = 0;
    } else {
      cell.solution = annotate(eps[e], alphas[a], [&] {
        return solve(PackingProblem::from_hypergraph(data, graphs[e], alphas[a]), config.tolerances, warm);
      });
    }
    cell.row = {eps[e],
                alphas[a],
                cell.solution.risk_lower_bound,
                cell.solution.kkt_residual,
                cell.solution.newton_iters,
                graphs[e].edges.size(),
                elapsed_ms(start) + (a == 0 ? build_ms[e] : 0.0)};
  };

  auto run_slice = [&](std::size_t a, bool cross_alpha) {
    for (std::size_t e = 0; e < eps.size(); ++e) {
      std::optional<std::span<const double>> warm;
      if (e > 0) {
        warm = std::span<const double>(cells[a][e - 1].solution.z);
      } else if (cross_alpha && a > 0) {
        warm = std::span<const double>(cells[a - 1][e].solution.z);
      }
      solve_cell(a, e, warm);
    }
  };

  if (config.parallel_alpha && alphas.size() > 1) {
    // Slices are independent here: each warm-start chain runs along epsilon only.
    std::vector<std::future<void>> jobs;
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      jobs.push_back(std::async(std::launch::async, [&, a] { run_slice(a, false); }));
    }
    for (auto& j : jobs) j.get();
  } else {
    for (std::size_t a = 0; a < alphas.size(); ++a) run_slice(a, true);
  }

  RiskCurve curve;
  for (const auto& slice : cells) {
    for (const auto& cell : slice) curve.rows.push_back(cell.row);
  }
  return curve;
}

double full_confusion_value(double alpha, int class_count, std::span<const double> class_masses) {
  if (class_count < 1 || class_masses.size() != static_cast<std::size_t>(class_count)) {
    throw ValidationError("full_confusion_value: need one mass per class");
  }
  double total = 0.0;
  for (double m : class_masses) {
    if (!(m >= 0.0)) throw ValidationError("class masses must be >= 0");
    total += m;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ValidationError("class masses must sum to 1");

  const double first = class_masses.front();
  const bool equal = std::all_of(class_masses.begin(), class_masses.end(),
                                 [&](double m) { return std::abs(m - first) <= 1e-12; });
  if (equal) {
    const double v = -log_alpha(alpha, 1.0 / static_cast<double>(class_count));
    return v == 0.0 ? 0.0 : v;
  }

  PackingProblem p;
  p.alpha = alpha;
  p.class_count = class_count;
  std::vector<std::size_t> members;
  for (double m : class_masses) {
    if (m > 0.0) {
      members.push_back(p.weights.size());
      p.weights.push_back(m);
    }
  }
  p.incidence.cols = p.weights.size();
  p.incidence.add_row(members);
  return solve(p).risk_lower_bound;
}

}  // namespace advbound
