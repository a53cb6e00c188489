#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "advbound/dataset.hpp"

namespace advbound {

enum class MetricKind { kEuclidean, kChebyshev };

struct Metric {
  MetricKind kind = MetricKind::kEuclidean;

  static Metric parse(const std::string& name);
  std::string name() const;
  bool operator==(const Metric&) const = default;
};

// l2 or l-infinity distance. Throws ValidationError on dimension mismatch.
double distance(const Metric& metric, std::span<const double> x, std::span<const double> y);

// Radius of the smallest closed ball of `metric` containing all points. For the
// Euclidean metric this is the minimum enclosing ball; for Chebyshev it is half the
// largest coordinate span.
double enclosing_radius(const Metric& metric, std::span<const std::span<const double>> points);

// Slack applied to epsilon before comparing radii: ties resolve toward intersection.
inline double intersection_threshold(double epsilon) { return epsilon * (1.0 + 1e-12) + 1e-12; }

// True iff the closed epsilon-balls around `points` share a common point.
bool balls_intersect(const Metric& metric, std::span<const std::span<const double>> points,
                     double epsilon);

// Row-major sparse 0/1 matrix. Row r holds the column ids row_ptr[r]..row_ptr[r+1].
struct Incidence {
  std::size_t cols = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::size_t> col_idx;

  std::size_t rows() const { return row_ptr.size() - 1; }
  std::span<const std::size_t> row(std::size_t r) const {
    return {col_idx.data() + row_ptr[r], row_ptr[r + 1] - row_ptr[r]};
  }
  void add_row(std::span<const std::size_t> members);
  bool operator==(const Incidence&) const = default;
};

struct VariableKey {
  int cls = 0;
  std::size_t point = 0;  // index within the class
  bool operator==(const VariableKey&) const = default;
};

// Variable ids of one constraint row in ascending order. Ids are class-major, so
// members are also ordered by class.
struct ConstraintEdge {
  std::vector<std::size_t> members;
  bool operator==(const ConstraintEdge&) const = default;
  auto operator<=>(const ConstraintEdge&) const = default;
};

struct ConflictHypergraph {
  int class_count = 0;
  std::vector<std::size_t> class_offsets;  // variable ids of class c: [offsets[c], offsets[c+1])
  std::vector<ConstraintEdge> edges;       // lexicographic in member ids
  Incidence incidence;                     // one row per edge
  std::size_t singleton_count = 0;

  std::size_t variable_count() const { return incidence.cols; }
  VariableKey key(std::size_t variable) const;
  std::size_t variable_id(const VariableKey& key) const;
  bool operator==(const ConflictHypergraph&) const = default;
};

struct HypergraphOptions {
  std::size_t edge_limit = 10'000'000;
};

// Enumerates cross-class tuples (2 <= size <= cap) whose epsilon-balls intersect,
// keeps only inclusion-maximal ones, and adds singleton rows for variables no
// stored tuple covers. Throws ResourceError when the edge count exceeds the limit.
ConflictHypergraph build_hypergraph(const LabeledDataset& data, const Metric& metric, double epsilon,
                                    int cap, const HypergraphOptions& options = {});

// Debug dump: `edge_id,size,class:point;class:point;...`.
void write_edges_csv(const ConflictHypergraph& graph, std::ostream& out);

}  // namespace advbound
