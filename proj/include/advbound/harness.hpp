#pragma once

#include <span>

#include "advbound/dataset.hpp"
#include "advbound/io.hpp"

namespace advbound {

// Solves every (epsilon, alpha) cell. Alphas run in ascending order; within an
// alpha slice epsilons ascend. Each cell warm-starts from (same alpha, previous
// epsilon), else from (previous alpha, same epsilon). Hypergraphs are built once per
// epsilon and shared across alphas; a cell whose hypergraph equals the previous
// epsilon's reuses that solution unchanged.
// Errors are rethrown with the failing cell prepended to the message.
RiskCurve sweep(const LabeledDataset& data, const RunConfig& config);

// Asymptotic bound when every cross-class tuple interacts: -log_alpha(1/K) for equal
// class masses, otherwise the packing optimum of one atom per class under a single
// all-class constraint.
double full_confusion_value(double alpha, int class_count, std::span<const double> class_masses);

}  // namespace advbound
