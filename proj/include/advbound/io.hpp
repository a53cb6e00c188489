#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "advbound/geometry.hpp"
#include "advbound/packing.hpp"

namespace advbound {

inline constexpr int kSolutionSchema = 1;

// A solved cell together with what is needed to rebuild potentials from it.
struct SolutionRecord {
  DualSolution solution;
  std::vector<VariableKey> keys;  // (class, point) of each entry of solution.z
  double alpha = 1.0;
  double epsilon = 0.0;
  Metric metric;
  int cap = 2;
};

SolutionRecord make_record(const ConflictHypergraph& graph, DualSolution solution, double alpha, double epsilon,
                           const Metric& metric, int cap);

std::string solution_to_json(const SolutionRecord& record);
SolutionRecord solution_from_json(const std::string& text);

// Throws ValidationError on non-finite values or I/O failure.
void write_solution(const SolutionRecord& record, const std::filesystem::path& path);
SolutionRecord read_solution(const std::filesystem::path& path);

// Reorders psi from a record into the dataset's variable order.
std::vector<double> psi_for_dataset(const SolutionRecord& record, const LabeledDataset& data);

struct RunConfig {
  Metric metric;
  std::vector<double> epsilon_grid;
  std::vector<double> alpha_list;
  int interaction_cap = 2;
  SolverTolerances tolerances;
  HypergraphOptions hypergraph;
  bool parallel_alpha = false;

  // Checks grid ordering, alpha >= 0, 2 <= cap <= K and theta in (0, 1).
  void validate(int class_count) const;
};

// "start:stop:step" (inclusive) or a comma-separated list.
std::vector<double> parse_epsilon_grid(const std::string& text);
// Comma-separated alphas; tokens CE (alpha = 1) and ZERO_ONE (alpha = 0) are accepted.
std::vector<double> parse_alpha_list(const std::string& text);

struct RiskRow {
  double epsilon = 0.0;
  double alpha = 0.0;
  double risk_lower_bound = 0.0;
  double kkt_residual = 0.0;
  int newton_iters = 0;
  std::size_t edge_count = 0;
  double wall_time_ms = 0.0;
};

struct RiskCurve {
  std::vector<RiskRow> rows;  // sorted by (alpha, epsilon)
};

// `epsilon,alpha,value,kkt_residual,newton_iters`
void write_curve_csv(const RiskCurve& curve, std::ostream& out);
void write_curve_csv(const RiskCurve& curve, const std::filesystem::path& path);

}  // namespace advbound
