#include "advbound/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "advbound/errors.hpp"

namespace advbound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Class order for the quadratic rule: ascending transform, ties by class index,
// +infinity last.
std::vector<std::size_t> ascending_order(std::span<const double> a) {
  std::vector<std::size_t> order(a.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a[x] < a[y]; });
  return order;
}

struct QuadraticCut {
  std::vector<std::size_t> order;
  std::size_t active = 0;  // i*
  double level = 0.0;      // c*
};

QuadraticCut quadratic_cut(std::span<const double> a) {
  QuadraticCut cut;
  cut.order = ascending_order(a);
  const std::size_t k = a.size();
  double prefix = 0.0;
  cut.active = k;
  for (std::size_t i = 1; i <= k; ++i) {
    prefix += a[cut.order[i - 1]];
    if (i == k) break;
    const double next = a[cut.order[i]];
    if (next == kInf || static_cast<double>(i) * next - prefix > 2.0) {
      cut.active = i;
      break;
    }
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < cut.active; ++i) sum += a[cut.order[i]];
  cut.level = (2.0 + sum) / static_cast<double>(cut.active);
  return cut;
}

void check_simplex(std::span<const double> f) {
  double total = 0.0;
  for (double x : f) {
    if (!(x >= -1e-9)) throw ValidationError("prediction has a negative entry");
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ValidationError("prediction does not sum to 1");
}

std::vector<double> transforms_at(const PotentialSet& potentials, std::span<const double> query) {
  const int k = potentials.data().class_count();
  std::vector<double> a(static_cast<std::size_t>(k));
  for (int c = 0; c < k; ++c) a[static_cast<std::size_t>(c)] = c_transform(potentials, c, query);
  return a;
}

}  // namespace

PotentialSet::PotentialSet(const LabeledDataset& data, std::vector<double> phi, Metric metric, GroundCost cost)
    : data_(&data), phi_(std::move(phi)), metric_(metric), cost_(cost) {
  if (phi_.size() != data.size()) throw ValidationError("one potential per support atom is required");
  for (double p : phi_) {
    if (!std::isfinite(p)) throw ValidationError("potentials must be finite");
  }
  if (cost_.kind == GroundCost::Kind::kZeroInfinity && !(cost_.epsilon >= 0.0)) {
    throw ValidationError("epsilon must be >= 0");
  }
  if (cost_.kind == GroundCost::Kind::kScaledDistance && !(cost_.tau > 0.0)) {
    throw ValidationError("tau must be > 0");
  }
}

PotentialSet PotentialSet::from_solution(const LabeledDataset& data, std::span<const double> psi, double alpha,
                                         Metric metric, GroundCost cost) {
  std::vector<double> phi(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) phi[i] = log_alpha(alpha, psi[i]);
  return PotentialSet(data, std::move(phi), metric, cost);
}

double c_transform(const PotentialSet& potentials, int cls, std::span<const double> query) {
  const auto& data = potentials.data();
  if (query.size() != data.dim()) throw ValidationError("query dimension differs from the dataset");
  if (cls < 0 || cls >= data.class_count()) throw ValidationError("class index out of range");
  const auto& cost = potentials.cost();
  double best = kInf;
  for (std::size_t x = data.class_begin(cls); x < data.class_end(cls); ++x) {
    const double d = distance(potentials.metric(), data.point(x), query);
    if (cost.kind == GroundCost::Kind::kZeroInfinity) {
      if (d <= cost.epsilon) best = std::min(best, -potentials.phi(x));
    } else {
      best = std::min(best, d / cost.tau - potentials.phi(x));
    }
  }
  return best;
}

ClassifierOutput classify_transforms(const LossSpec& loss, std::span<const double> transforms) {
  ClassifierOutput out;
  out.transforms.assign(transforms.begin(), transforms.end());
  const std::size_t k = transforms.size();
  out.f.assign(k, 0.0);
  bool reachable = false;
  for (double a : transforms) {
    if (std::isnan(a) || a == -kInf) throw ValidationError("transforms must be real or +infinity");
    reachable = reachable || a != kInf;
  }
  if (!reachable) throw UnreachableQueryError("query is outside the reach of every class");

  switch (loss.kind()) {
    case LossKind::kCrossEntropy: {
      // log-space softmax of -a
      double lowest = kInf;
      for (double a : transforms) lowest = std::min(lowest, a);
      double total = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        out.f[i] = transforms[i] == kInf ? 0.0 : std::exp(lowest - transforms[i]);
        total += out.f[i];
      }
      for (double& v : out.f) v /= total;
      out.normalizer = -lowest + std::log(total);
      break;
    }
    case LossKind::kAlphaLog: {
      const double z = find_normalizer(loss.alpha(), transforms);
      double total = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        out.f[i] = normalized_weight(loss.alpha(), transforms[i], z);
        total += out.f[i];
      }
      for (double& v : out.f) v /= total;
      out.normalizer = z;
      break;
    }
    case LossKind::kQuadratic: {
      const QuadraticCut cut = quadratic_cut(transforms);
      for (std::size_t i = 0; i < cut.active; ++i) {
        const std::size_t c = cut.order[i];
        out.f[c] = std::max(0.5 * (cut.level - transforms[c]), 0.0);
      }
      break;
    }
  }
  return out;
}

ClassifierOutput classify(const PotentialSet& potentials, const LossSpec& loss, std::span<const double> query) {
  return classify_transforms(loss, transforms_at(potentials, query));
}

SaddleReport verify_saddle_transforms(const LossSpec& loss, std::span<const double> transforms,
                                      std::span<const double> f, double tol) {
  if (f.size() != transforms.size()) throw ValidationError("prediction and transforms differ in length");
  check_simplex(f);
  SaddleReport report;
  report.feasibility = -kInf;
  for (std::size_t i = 0; i < transforms.size(); ++i) {
    if (transforms[i] == kInf) continue;
    report.feasibility = std::max(report.feasibility, loss_value(loss, f, i) - transforms[i]);
  }

  if (loss.kind() == LossKind::kQuadratic) {
    const QuadraticCut cut = quadratic_cut(transforms);
    double norm_sq = 0.0;
    for (double v : f) norm_sq += v * v;
    const double lambda_m = cut.level - norm_sq - 1.0;
    double worst = 0.0;
    for (std::size_t pos = 0; pos < cut.order.size(); ++pos) {
      const std::size_t c = cut.order[pos];
      if (transforms[c] == kInf) {
        worst = std::max(worst, std::abs(f[c]));
        continue;
      }
      const double gamma = pos < cut.active ? 0.0 : transforms[c] - cut.level;
      worst = std::max(worst, std::max(-gamma, 0.0));
      worst = std::max(worst, std::abs(gamma * f[c]));
      worst = std::max(worst, std::abs(loss_value(loss, f, c) - transforms[c] + lambda_m + gamma));
    }
    report.multipliers = worst;
    report.max_violation = std::max(report.feasibility, report.multipliers);
  } else {
    report.max_violation = report.feasibility;
  }
  report.passed = report.max_violation <= tol;
  return report;
}

SaddleReport verify_saddle(const PotentialSet& potentials, const LossSpec& loss, std::span<const double> query,
                           std::span<const double> f, double tol) {
  return verify_saddle_transforms(loss, transforms_at(potentials, query), f, tol);
}

}  // namespace advbound
