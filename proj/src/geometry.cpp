#include "advbound/geometry.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <functional>
#include <ostream>
#include <unordered_set>

#include "advbound/errors.hpp"

namespace advbound {

namespace {

using ConstSpan = std::span<const double>;

double squared_distance(ConstSpan x, ConstSpan y) {
  double acc = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double d = x[k] - y[k];
    acc += d * d;
  }
  return acc;
}

void check_dims(std::span<const ConstSpan> points) {
  for (const auto& p : points) {
    if (p.size() != points.front().size()) throw ValidationError("points differ in dimension");
  }
}

// Closed ball through every point of `boundary`, centered in their affine hull.
struct Ball {
  std::vector<double> center;
  double radius_sq = -1.0;  // negative means empty
};

bool contains(const Ball& ball, ConstSpan p) {
  if (ball.radius_sq < 0.0) return false;
  return squared_distance(ball.center, p) <= ball.radius_sq * (1.0 + 1e-12) + 1e-24;
}

Ball circumball(const std::vector<ConstSpan>& boundary) {
  Ball ball;
  if (boundary.empty()) return ball;
  const ConstSpan p0 = boundary.front();
  ball.center.assign(p0.begin(), p0.end());
  ball.radius_sq = 0.0;
  const std::size_t m = boundary.size() - 1;
  if (m == 0) return ball;

  const std::size_t d = p0.size();
  Eigen::MatrixXd v(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(m));
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = 0; k < d; ++k) {
      v(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = boundary[j + 1][k] - p0[k];
    }
  }
  const Eigen::MatrixXd gram = 2.0 * v.transpose() * v;
  const Eigen::VectorXd rhs = v.colwise().squaredNorm().transpose();
  const Eigen::VectorXd lambda = gram.completeOrthogonalDecomposition().solve(rhs);
  const Eigen::VectorXd offset = v * lambda;
  for (std::size_t k = 0; k < d; ++k) ball.center[k] += offset(static_cast<Eigen::Index>(k));
  for (const auto& p : boundary) ball.radius_sq = std::max(ball.radius_sq, squared_distance(ball.center, p));
  return ball;
}

// Deterministic Welzl recursion over points[0..n).
Ball welzl(std::span<const ConstSpan> points, std::size_t n, std::vector<ConstSpan>& boundary) {
  const std::size_t dim = points.front().size();
  if (n == 0 || boundary.size() == dim + 1) return circumball(boundary);
  const ConstSpan p = points[n - 1];
  Ball ball = welzl(points, n - 1, boundary);
  if (contains(ball, p)) return ball;
  boundary.push_back(p);
  ball = welzl(points, n - 1, boundary);
  boundary.pop_back();
  return ball;
}

double meb_radius_two(ConstSpan a, ConstSpan b) { return 0.5 * std::sqrt(squared_distance(a, b)); }

double meb_radius_three(ConstSpan p0, ConstSpan p1, ConstSpan p2) {
  const double a = squared_distance(p1, p2);
  const double b = squared_distance(p0, p2);
  const double c = squared_distance(p0, p1);
  const double longest = std::max({a, b, c});
  // Right or obtuse: the longest side is a diameter.
  if (a >= b + c || b >= a + c || c >= a + b) return 0.5 * std::sqrt(longest);
  const double area16 = 2.0 * (a * b + b * c + c * a) - a * a - b * b - c * c;
  if (area16 <= 0.0) return 0.5 * std::sqrt(longest);
  return std::sqrt(a * b * c / area16);
}

double euclidean_meb_radius(std::span<const ConstSpan> points) {
  switch (points.size()) {
    case 0:
      return 0.0;
    case 1:
      return 0.0;
    case 2:
      return meb_radius_two(points[0], points[1]);
    case 3:
      return meb_radius_three(points[0], points[1], points[2]);
    default: {
      std::vector<ConstSpan> boundary;
      return std::sqrt(std::max(welzl(points, points.size(), boundary).radius_sq, 0.0));
    }
  }
}

double chebyshev_radius(std::span<const ConstSpan> points) {
  if (points.empty()) return 0.0;
  double widest = 0.0;
  for (std::size_t k = 0; k < points.front().size(); ++k) {
    double lo = points.front()[k];
    double hi = lo;
    for (const auto& p : points) {
      lo = std::min(lo, p[k]);
      hi = std::max(hi, p[k]);
    }
    widest = std::max(widest, hi - lo);
  }
  return 0.5 * widest;
}

struct MembersHash {
  std::size_t operator()(const std::vector<std::size_t>& v) const {
    std::size_t h = 1469598103934665603ull;
    for (std::size_t x : v) {
      h ^= x + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

using MemberSet = std::unordered_set<std::vector<std::size_t>, MembersHash>;

// Inserts every proper sub-tuple of size >= 2 into `covered`.
void cover_subsets(const std::vector<std::size_t>& members, MemberSet& covered) {
  const std::size_t s = members.size();
  const std::size_t full = (std::size_t{1} << s) - 1;
  std::vector<std::size_t> sub;
  for (std::size_t mask = 1; mask < full; ++mask) {
    if (std::popcount(mask) < 2) continue;
    sub.clear();
    for (std::size_t k = 0; k < s; ++k) {
      if (mask & (std::size_t{1} << k)) sub.push_back(members[k]);
    }
    covered.insert(sub);
  }
}

}  // namespace

Metric Metric::parse(const std::string& name) {
  std::string key = name;
  std::transform(key.begin(), key.end(), key.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (key == "euclidean" || key == "l2") return {MetricKind::kEuclidean};
  if (key == "chebyshev" || key == "linf") return {MetricKind::kChebyshev};
  throw ValidationError("unknown metric '" + name + "' (expected euclidean or chebyshev)");
}

std::string Metric::name() const {
  return kind == MetricKind::kEuclidean ? "euclidean" : "chebyshev";
}

double distance(const Metric& metric, ConstSpan x, ConstSpan y) {
  if (x.size() != y.size()) throw ValidationError("distance: dimension mismatch");
  if (metric.kind == MetricKind::kEuclidean) return std::sqrt(squared_distance(x, y));
  double worst = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) worst = std::max(worst, std::abs(x[k] - y[k]));
  return worst;
}

double enclosing_radius(const Metric& metric, std::span<const ConstSpan> points) {
  check_dims(points);
  return metric.kind == MetricKind::kEuclidean ? euclidean_meb_radius(points) : chebyshev_radius(points);
}

bool balls_intersect(const Metric& metric, std::span<const ConstSpan> points, double epsilon) {
  if (points.empty()) return true;
  return enclosing_radius(metric, points) <= intersection_threshold(epsilon);
}

void Incidence::add_row(std::span<const std::size_t> members) {
  col_idx.insert(col_idx.end(), members.begin(), members.end());
  row_ptr.push_back(col_idx.size());
}

VariableKey ConflictHypergraph::key(std::size_t variable) const {
  const auto it = std::upper_bound(class_offsets.begin(), class_offsets.end(), variable);
  const auto cls = static_cast<std::size_t>(it - class_offsets.begin()) - 1;
  return {static_cast<int>(cls), variable - class_offsets[cls]};
}

std::size_t ConflictHypergraph::variable_id(const VariableKey& k) const {
  return class_offsets[static_cast<std::size_t>(k.cls)] + k.point;
}

ConflictHypergraph build_hypergraph(const LabeledDataset& data, const Metric& metric, double epsilon,
                                    int cap, const HypergraphOptions& options) {
  const int k = data.class_count();
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw ValidationError("epsilon must be finite and >= 0");
  if (k >= 2 && (cap < 2 || cap > k)) {
    throw ValidationError("interaction cap must lie in [2, " + std::to_string(k) + "]");
  }
  const std::size_t n = data.size();

  ConflictHypergraph graph;
  graph.class_count = k;
  graph.class_offsets.resize(static_cast<std::size_t>(k) + 1);
  for (int c = 0; c <= k; ++c) {
    graph.class_offsets[static_cast<std::size_t>(c)] = c < k ? data.class_begin(c) : n;
  }
  graph.incidence.cols = n;

  // Necessary pairwise condition d(x_i, x_j) <= 2 eps.
  const double threshold = intersection_threshold(epsilon);
  std::vector<std::uint8_t> adjacent(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (data.label(i) == data.label(j)) continue;
      if (0.5 * distance(metric, data.point(i), data.point(j)) <= threshold) {
        adjacent[i * n + j] = adjacent[j * n + i] = 1;
      }
    }
  }

  const bool exact_test = metric.kind == MetricKind::kEuclidean;
  MemberSet covered;
  std::vector<bool> in_edge(n, false);
  std::vector<std::size_t> tuple;
  std::vector<ConstSpan> tuple_points;

  const int top = k >= 2 ? cap : 1;
  for (int size = top; size >= 2; --size) {
    // Class subsets of this size in lexicographic order.
    std::vector<int> subset(static_cast<std::size_t>(size));
    for (int i = 0; i < size; ++i) subset[static_cast<std::size_t>(i)] = i;
    while (true) {
      std::function<void(std::size_t)> extend = [&](std::size_t depth) {
        if (depth == subset.size()) {
          if (covered.count(tuple)) return;
          if (graph.edges.size() >= options.edge_limit) {
            throw ResourceError("conflict hypergraph exceeds the edge limit of " +
                                std::to_string(options.edge_limit));
          }
          graph.edges.push_back({tuple});
          for (std::size_t v : tuple) in_edge[v] = true;
          cover_subsets(tuple, covered);
          return;
        }
        const int c = subset[depth];
        for (std::size_t v = data.class_begin(c); v < data.class_end(c); ++v) {
          bool ok = true;
          for (std::size_t u : tuple) {
            if (!adjacent[u * n + v]) {
              ok = false;
              break;
            }
          }
          if (!ok) continue;
          tuple.push_back(v);
          tuple_points.push_back(data.point(v));
          // Chebyshev balls are boxes, so pairwise intersection already implies a common point.
          if (!exact_test || tuple.size() < 3 ||
              enclosing_radius(metric, tuple_points) <= threshold) {
            extend(depth + 1);
          }
          tuple.pop_back();
          tuple_points.pop_back();
        }
      };
      extend(0);

      int pos = size - 1;
      while (pos >= 0 && subset[static_cast<std::size_t>(pos)] == k - size + pos) --pos;
      if (pos < 0) break;
      ++subset[static_cast<std::size_t>(pos)];
      for (int j = pos + 1; j < size; ++j) {
        subset[static_cast<std::size_t>(j)] = subset[static_cast<std::size_t>(j) - 1] + 1;
      }
    }
  }

  for (std::size_t v = 0; v < n; ++v) {
    if (!in_edge[v]) {
      graph.edges.push_back({{v}});
      ++graph.singleton_count;
    }
  }
  if (graph.edges.size() > options.edge_limit) {
    throw ResourceError("conflict hypergraph exceeds the edge limit of " + std::to_string(options.edge_limit));
  }
  std::sort(graph.edges.begin(), graph.edges.end());
  for (const auto& e : graph.edges) graph.incidence.add_row(e.members);
  return graph;
}

void write_edges_csv(const ConflictHypergraph& graph, std::ostream& out) {
  out << "edge_id,size,members\n";
  for (std::size_t r = 0; r < graph.edges.size(); ++r) {
    const auto& members = graph.edges[r].members;
    out << r << ',' << members.size() << ',';
    for (std::size_t j = 0; j < members.size(); ++j) {
      const auto key = graph.key(members[j]);
      if (j) out << ';';
      out << key.cls << ':' << key.point;
    }
    out << '\n';
  }
}

}  // namespace advbound
