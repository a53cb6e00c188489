// advbound: adversarial risk lower bounds under the 0-infinity perturbation cost.
//
//   advbound hypergraph --data D.csv --metric euclidean --epsilon 1.0 --cap 3 [--dump edges.csv]
//   advbound solve      --data D.csv --metric chebyshev --epsilon 1.0 --alpha 1 --cap 3 --out sol.json
//   advbound curve      --data D.csv --metric euclidean --epsilons 0:4:0.5 --alphas 0,0.5,0.75,1 --cap 3 --out curve.csv
//   advbound classify   --solution sol.json --data D.csv --queries Q.csv --loss alpha:0.75 --out preds.csv
//
// Exit codes: 0 success, 2 validation error, 3 solver non-convergence, 4 resource limit.

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "advbound/classifier.hpp"
#include "advbound/dataset.hpp"
#include "advbound/errors.hpp"
#include "advbound/geometry.hpp"
#include "advbound/harness.hpp"
#include "advbound/io.hpp"
#include "advbound/packing.hpp"

namespace {

using namespace advbound;

constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;
constexpr int kExitResource = 4;

struct Common {
  std::string data;
  bool weighted = false;
  std::string metric = "euclidean";
  double epsilon = 0.0;
  int cap = 2;
  std::size_t edge_limit = 10'000'000;
  SolverTolerances tol;
};

void add_data_options(CLI::App* cmd, Common& c) {
  cmd->add_option("--data", c.data, "Labeled CSV: label,x1,...,xd[,weight]")->required();
  cmd->add_flag("--weighted", c.weighted, "Last CSV column is a weight");
}

void add_geometry_options(CLI::App* cmd, Common& c, bool single_epsilon) {
  cmd->add_option("--metric", c.metric, "euclidean or chebyshev")->capture_default_str();
  if (single_epsilon) cmd->add_option("--epsilon", c.epsilon, "Adversarial budget")->required();
  cmd->add_option("--cap", c.cap, "Largest number of interacting classes")->capture_default_str();
  cmd->add_option("--edge-limit", c.edge_limit, "Abort when the hypergraph grows past this")->capture_default_str();
}

void add_solver_options(CLI::App* cmd, Common& c) {
  cmd->add_option("--kkt-tol", c.tol.kkt_tol)->capture_default_str();
  cmd->add_option("--gap-tol", c.tol.gap_tol)->capture_default_str();
  cmd->add_option("--max-newton", c.tol.max_newton_iters, "Newton steps per centering")->capture_default_str();
  cmd->add_option("--kappa", c.tol.barrier_growth, "Barrier parameter growth")->capture_default_str();
  cmd->add_option("--theta", c.tol.warm_start_theta, "Warm-start perturbation")->capture_default_str();
}

LabeledDataset load(const Common& c) {
  std::vector<std::string> warnings;
  LoadOptions opts;
  if (c.weighted) opts.weighted = true;
  auto data = load_dataset(c.data, opts, &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
  return data;
}

int effective_cap(const LabeledDataset& data, int cap) { return data.class_count() >= 2 ? cap : 1; }

double parse_single_alpha(const std::string& text) {
  const auto list = parse_alpha_list(text);
  if (list.size() != 1) throw ValidationError("--alpha takes a single value");
  return list.front();
}

int run_hypergraph(const Common& c, const std::string& dump) {
  const auto data = load(c);
  const Metric metric = Metric::parse(c.metric);
  const auto graph = build_hypergraph(data, metric, c.epsilon, effective_cap(data, c.cap), {c.edge_limit});
  std::cout << "variables " << graph.variable_count() << "\nedges " << graph.edges.size() << "\nsingletons "
            << graph.singleton_count << '\n';
  if (!dump.empty()) {
    std::ofstream out(dump);
    if (!out) throw ValidationError("cannot write '" + dump + "'");
    write_edges_csv(graph, out);
  }
  return 0;
}

int run_solve(const Common& c, const std::string& alpha_text, const std::string& out) {
  const auto data = load(c);
  const Metric metric = Metric::parse(c.metric);
  const double alpha = parse_single_alpha(alpha_text);
  const int cap = effective_cap(data, c.cap);
  const auto graph = build_hypergraph(data, metric, c.epsilon, cap, {c.edge_limit});
  auto sol = solve(PackingProblem::from_hypergraph(data, graph, alpha), c.tol);
  std::cout.precision(17);
  std::cout << "risk_lower_bound " << sol.risk_lower_bound << "\nkkt_residual " << sol.kkt_residual
            << "\nnewton_iters " << sol.newton_iters << "\nedges " << graph.edges.size() << '\n';
  if (!out.empty()) write_solution(make_record(graph, std::move(sol), alpha, c.epsilon, metric, cap), out);
  return 0;
}

int run_curve(Common& c, const std::string& eps_text, const std::string& alpha_text, const std::string& out,
              bool parallel) {
  const auto data = load(c);
  RunConfig config;
  config.metric = Metric::parse(c.metric);
  config.epsilon_grid = parse_epsilon_grid(eps_text);
  config.alpha_list = parse_alpha_list(alpha_text);
  config.interaction_cap = effective_cap(data, c.cap);
  config.tolerances = c.tol;
  config.hypergraph.edge_limit = c.edge_limit;
  config.parallel_alpha = parallel;
  const auto curve = sweep(data, config);
  if (out.empty()) {
    write_curve_csv(curve, std::cout);
  } else {
    write_curve_csv(curve, std::filesystem::path(out));
  }
  return 0;
}

int run_classify(const Common& c, const std::string& solution_path, const std::string& queries_path,
                 const std::string& loss_text, const std::string& out_path) {
  const auto data = load(c);
  const auto record = read_solution(solution_path);
  const auto loss = LossSpec::parse(loss_text);
  if (loss.kind() != LossKind::kQuadratic && std::abs(loss.alpha() - record.alpha) > 1e-12) {
    std::cerr << "warning: loss alpha " << loss.alpha() << " differs from the solution's alpha " << record.alpha
              << "; potentials are not optimal for this loss\n";
  }
  const auto potentials = PotentialSet::from_solution(data, psi_for_dataset(record, data), record.alpha,
                                                      record.metric, GroundCost::zero_infinity(record.epsilon));
  const auto queries = load_queries(queries_path);

  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw ValidationError("cannot write '" + out_path + "'");
  }
  std::ostream& out = out_path.empty() ? std::cout : file;
  out.precision(17);
  const int k = data.class_count();
  out << "query_id";
  for (int i = 0; i < k; ++i) out << ",f_" << i;
  out << ",Z\n";
  for (std::size_t q = 0; q < queries.size(); ++q) {
    std::ostringstream row;
    row.precision(17);
    row << q;
    try {
      const auto result = classify(potentials, loss, queries[q]);
      for (double f : result.f) row << ',' << f;
      row << ',' << (result.normalizer ? *result.normalizer : std::numeric_limits<double>::quiet_NaN());
    } catch (const UnreachableQueryError& e) {
      std::cerr << "warning: query " << q << ": " << e.what() << '\n';
      row.str("");
      row << q;
      for (int i = 0; i <= k; ++i) row << ",nan";
    }
    out << row.str() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learner-agnostic adversarial risk lower bounds"};
  app.require_subcommand(1);

  Common common;
  std::string dump;
  std::string alpha_text = "1";
  std::string out;
  std::string eps_text;
  std::string alphas_text = "0,0.5,0.75,1";
  bool parallel = false;
  std::string solution_path;
  std::string queries_path;
  std::string loss_text = "ce";

  auto* hyper = app.add_subcommand("hypergraph", "Enumerate the conflict hypergraph");
  add_data_options(hyper, common);
  add_geometry_options(hyper, common, true);
  hyper->add_option("--dump", dump, "Write edges as CSV");

  auto* solve_cmd = app.add_subcommand("solve", "Solve the packing dual for one (epsilon, alpha)");
  add_data_options(solve_cmd, common);
  add_geometry_options(solve_cmd, common, true);
  add_solver_options(solve_cmd, common);
  solve_cmd->add_option("--alpha", alpha_text, "alpha >= 0, CE or ZERO_ONE")->capture_default_str();
  solve_cmd->add_option("--out", out, "Solution JSON");

  auto* curve_cmd = app.add_subcommand("curve", "Sweep an (epsilon, alpha) grid");
  add_data_options(curve_cmd, common);
  add_geometry_options(curve_cmd, common, false);
  add_solver_options(curve_cmd, common);
  curve_cmd->add_option("--epsilons", eps_text, "start:stop:step or a comma list")->required();
  curve_cmd->add_option("--alphas", alphas_text, "Comma list; CE and ZERO_ONE accepted")->capture_default_str();
  curve_cmd->add_option("--out", out, "Curve CSV (stdout when omitted)");
  curve_cmd->add_flag("--parallel", parallel, "Solve alpha slices concurrently");

  auto* classify_cmd = app.add_subcommand("classify", "Evaluate the optimal robust classifier");
  add_data_options(classify_cmd, common);
  classify_cmd->add_option("--solution", solution_path, "Solution JSON from `solve`")->required();
  classify_cmd->add_option("--queries", queries_path, "CSV of query vectors")->required();
  classify_cmd->add_option("--loss", loss_text, "ce, zero_one, quadratic or alpha:<value>")->capture_default_str();
  classify_cmd->add_option("--out", out, "Predictions CSV (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*hyper) return run_hypergraph(common, dump);
    if (*solve_cmd) return run_solve(common, alpha_text, out);
    if (*curve_cmd) return run_curve(common, eps_text, alphas_text, out, parallel);
    if (*classify_cmd) return run_classify(common, solution_path, queries_path, loss_text, out);
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const ResourceError& e) {
    std::cerr << "resource limit: " << e.what() << '\n';
    return kExitResource;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return 0;
}
