#pragma once

#include <optional>
#include <span>
#include <vector>

#include "advbound/alpha.hpp"
#include "advbound/dataset.hpp"
#include "advbound/geometry.hpp"
#include "advbound/packing.hpp"

namespace advbound {

struct GroundCost {
  enum class Kind { kZeroInfinity, kScaledDistance };
  Kind kind = Kind::kZeroInfinity;
  double epsilon = 0.0;  // zero-infinity budget
  double tau = 1.0;      // scaled-distance cost d(x, y) / tau

  static GroundCost zero_infinity(double epsilon) { return {Kind::kZeroInfinity, epsilon, 1.0}; }
  static GroundCost scaled_distance(double tau) { return {Kind::kScaledDistance, 0.0, tau}; }
};

// Dual potentials phi on the support atoms of a dataset. The dataset must outlive
// the potential set.
class PotentialSet {
 public:
  PotentialSet(const LabeledDataset& data, std::vector<double> phi, Metric metric, GroundCost cost);

  // phi = log_alpha(psi) for the packing solution computed with this alpha.
  static PotentialSet from_solution(const LabeledDataset& data, std::span<const double> psi, double alpha,
                                    Metric metric, GroundCost cost);

  const LabeledDataset& data() const { return *data_; }
  double phi(std::size_t atom) const { return phi_[atom]; }
  const Metric& metric() const { return metric_; }
  const GroundCost& cost() const { return cost_; }

 private:
  const LabeledDataset* data_;
  std::vector<double> phi_;
  Metric metric_;
  GroundCost cost_;
};

// inf over class-`cls` atoms x of c(x, query) - phi(x); +infinity when empty.
double c_transform(const PotentialSet& potentials, int cls, std::span<const double> query);

struct ClassifierOutput {
  std::vector<double> f;
  std::vector<double> transforms;
  std::optional<double> normalizer;  // Z for cross-entropy and alpha-log losses
};

// Optimal robust prediction from a vector of c-transform values.
ClassifierOutput classify_transforms(const LossSpec& loss, std::span<const double> transforms);

// Evaluates the transforms at `query` and applies classify_transforms. Throws
// UnreachableQueryError when every transform is +infinity.
ClassifierOutput classify(const PotentialSet& potentials, const LossSpec& loss, std::span<const double> query);

struct SaddleReport {
  // max_i [loss(f, i) - transform_i] over finite transforms (may be negative).
  double feasibility = 0.0;
  // Quadratic only: reconstructed multiplier residuals (stationarity, sign, complementarity).
  double multipliers = 0.0;
  double max_violation = 0.0;
  bool passed = false;
};

SaddleReport verify_saddle_transforms(const LossSpec& loss, std::span<const double> transforms,
                                      std::span<const double> f, double tol);

SaddleReport verify_saddle(const PotentialSet& potentials, const LossSpec& loss, std::span<const double> query,
                           std::span<const double> f, double tol);

}  // namespace advbound
