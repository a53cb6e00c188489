#include "advbound/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "advbound/errors.hpp"
#include "json.hpp"

namespace advbound {

using nlohmann::json;

namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw ValidationError(std::string("solution field '") + what + "' is not finite");
}

double parse_number(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ValidationError("'" + s + "' is not a number");
  }
  while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
  if (used != s.size() || !std::isfinite(v)) throw ValidationError("'" + s + "' is not a number");
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    const auto a = item.find_first_not_of(" \t");
    const auto b = item.find_last_not_of(" \t");
    out.push_back(a == std::string::npos ? std::string() : item.substr(a, b - a + 1));
  }
  return out;
}

}  // namespace

SolutionRecord make_record(const ConflictHypergraph& graph, DualSolution solution, double alpha, double epsilon,
                           const Metric& metric, int cap) {
  SolutionRecord rec;
  rec.keys.reserve(solution.z.size());
  for (std::size_t l = 0; l < solution.z.size(); ++l) rec.keys.push_back(graph.key(l));
  rec.solution = std::move(solution);
  rec.alpha = alpha;
  rec.epsilon = epsilon;
  rec.metric = metric;
  rec.cap = cap;
  return rec;
}

std::string solution_to_json(const SolutionRecord& rec) {
  const auto& s = rec.solution;
  if (rec.keys.size() != s.z.size()) throw ValidationError("solution record keys do not match psi");
  require_finite(rec.alpha, "alpha");
  require_finite(rec.epsilon, "epsilon");
  require_finite(s.objective, "objective");
  require_finite(s.risk_lower_bound, "risk_lower_bound");
  require_finite(s.kkt_residual, "kkt_residual");

  json psi = json::array();
  for (std::size_t l = 0; l < s.z.size(); ++l) {
    require_finite(s.z[l], "psi");
    psi.push_back({{"class", rec.keys[l].cls}, {"point", rec.keys[l].point}, {"value", s.z[l]}});
  }
  for (double v : s.lambda) require_finite(v, "lambda");

  json doc = {
      {"schema", kSolutionSchema},
      {"alpha", rec.alpha},
      {"epsilon", rec.epsilon},
      {"metric", rec.metric.name()},
      {"cap", rec.cap},
      {"objective", s.objective},
      {"risk_lower_bound", s.risk_lower_bound},
      {"kkt_residual", s.kkt_residual},
      {"newton_iters", s.newton_iters},
      {"outer_iters", s.outer_iters},
      {"psi", psi},
      {"lambda", s.lambda},
      {"zeroed", s.zeroed},
  };
  return doc.dump(2);
}

SolutionRecord solution_from_json(const std::string& text) {
  SolutionRecord rec;
  try {
    const json doc = json::parse(text);
    if (doc.at("schema").get<int>() != kSolutionSchema) {
      throw ValidationError("unsupported solution schema " + doc.at("schema").dump());
    }
    rec.alpha = doc.at("alpha").get<double>();
    rec.epsilon = doc.at("epsilon").get<double>();
    rec.metric = Metric::parse(doc.at("metric").get<std::string>());
    rec.cap = doc.at("cap").get<int>();
    auto& s = rec.solution;
    s.objective = doc.at("objective").get<double>();
    s.risk_lower_bound = doc.at("risk_lower_bound").get<double>();
    s.kkt_residual = doc.at("kkt_residual").get<double>();
    s.newton_iters = doc.at("newton_iters").get<int>();
    s.outer_iters = doc.value("outer_iters", 0);
    for (const auto& entry : doc.at("psi")) {
      rec.keys.push_back({entry.at("class").get<int>(), entry.at("point").get<std::size_t>()});
      s.z.push_back(entry.at("value").get<double>());
    }
    if (doc.contains("lambda")) s.lambda = doc.at("lambda").get<std::vector<double>>();
    if (doc.contains("zeroed")) s.zeroed = doc.at("zeroed").get<std::vector<std::size_t>>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed solution JSON: ") + e.what());
  }
  return rec;
}

void write_solution(const SolutionRecord& record, const std::filesystem::path& path) {
  const std::string text = solution_to_json(record);
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  out << text << '\n';
  if (!out) throw ValidationError("write failed for '" + path.string() + "'");
}

SolutionRecord read_solution(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open solution '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return solution_from_json(buffer.str());
}

std::vector<double> psi_for_dataset(const SolutionRecord& record, const LabeledDataset& data) {
  if (record.keys.size() != data.size()) {
    throw ValidationError("solution has " + std::to_string(record.keys.size()) + " entries but the dataset has " +
                          std::to_string(data.size()) + " points");
  }
  std::vector<double> psi(data.size(), 0.0);
  std::vector<bool> filled(data.size(), false);
  for (std::size_t j = 0; j < record.keys.size(); ++j) {
    const auto& key = record.keys[j];
    if (key.cls < 0 || key.cls >= data.class_count() || key.point >= data.class_size(key.cls)) {
      throw ValidationError("solution entry does not match the dataset");
    }
    const std::size_t id = data.class_begin(key.cls) + key.point;
    if (filled[id]) throw ValidationError("solution lists a point twice");
    filled[id] = true;
    psi[id] = record.solution.z[j];
  }
  return psi;
}

void RunConfig::validate(int class_count) const {
  if (epsilon_grid.empty()) throw ValidationError("epsilon grid is empty");
  for (std::size_t i = 0; i < epsilon_grid.size(); ++i) {
    if (!(epsilon_grid[i] >= 0.0) || !std::isfinite(epsilon_grid[i])) {
      throw ValidationError("epsilon values must be finite and >= 0");
    }
    if (i > 0 && !(epsilon_grid[i] > epsilon_grid[i - 1])) {
      throw ValidationError("epsilon grid must be strictly increasing");
    }
  }
  if (alpha_list.empty()) throw ValidationError("alpha list is empty");
  for (double a : alpha_list) {
    if (!(a >= 0.0) || !std::isfinite(a)) throw ValidationError("alpha values must be finite and >= 0");
  }
  if (class_count >= 2 && (interaction_cap < 2 || interaction_cap > class_count)) {
    throw ValidationError("interaction cap must lie in [2, " + std::to_string(class_count) + "]");
  }
  if (!(tolerances.warm_start_theta > 0.0 && tolerances.warm_start_theta < 1.0)) {
    throw ValidationError("warm_start_theta must lie in (0, 1)");
  }
}

std::vector<double> parse_epsilon_grid(const std::string& text) {
  std::vector<double> grid;
  const auto parts = split(text, ':');
  if (parts.size() == 3) {
    const double start = parse_number(parts[0]);
    const double stop = parse_number(parts[1]);
    const double step = parse_number(parts[2]);
    if (!(step > 0.0) || stop < start) throw ValidationError("epsilon range must be start:stop:step with step > 0");
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    if (count > 1'000'000) throw ValidationError("epsilon range is too long");
    for (long k = 0; k <= count; ++k) grid.push_back(start + static_cast<double>(k) * step);
    return grid;
  }
  if (parts.size() != 1) throw ValidationError("epsilon grid '" + text + "' is not start:stop:step or a list");
  for (const auto& item : split(text, ',')) grid.push_back(parse_number(item));
  return grid;
}

std::vector<double> parse_alpha_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) {
    std::string key = item;
    std::transform(key.begin(), key.end(), key.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (key == "CE") {
      out.push_back(1.0);
    } else if (key == "ZERO_ONE") {
      out.push_back(0.0);
    } else {
      const double a = parse_number(item);
      if (a < 0.0) throw ValidationError("alpha must be >= 0");
      out.push_back(a);
    }
  }
  return out;
}

void write_curve_csv(const RiskCurve& curve, std::ostream& out) {
  out.precision(17);
  out << "epsilon,alpha,value,kkt_residual,newton_iters\n";
  for (const auto& row : curve.rows) {
    out << row.epsilon << ',' << row.alpha << ',' << row.risk_lower_bound << ',' << row.kkt_residual << ','
        << row.newton_iters << '\n';
  }
}

void write_curve_csv(const RiskCurve& curve, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  write_curve_csv(curve, out);
}

}  // namespace advbound
