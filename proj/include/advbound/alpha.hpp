#pragma once

#include <cstddef>
#include <span>
#include <string>

namespace advbound {

// Alphas within this distance of 1 are treated as cross-entropy.
inline constexpr double kCrossEntropyBand = 1e-9;

inline bool is_cross_entropy(double alpha) {
  return alpha > 1.0 - kCrossEntropyBand && alpha < 1.0 + kCrossEntropyBand;
}

enum class LossKind { kAlphaLog, kCrossEntropy, kQuadratic };

// Selects the loss family. alpha_log(1) normalizes to cross-entropy.
class LossSpec {
 public:
  static LossSpec alpha_log(double alpha);
  static LossSpec cross_entropy() { return LossSpec(LossKind::kCrossEntropy, 1.0); }
  static LossSpec quadratic() { return LossSpec(LossKind::kQuadratic, 0.0); }

  // Accepts "ce", "zero_one", "quadratic", "alpha:<value>" (case-insensitive keywords).
  static LossSpec parse(const std::string& text);

  LossKind kind() const { return kind_; }
  // Meaningful for kAlphaLog and kCrossEntropy (where it is 1).
  double alpha() const { return alpha_; }
  std::string to_string() const;

 private:
  LossSpec(LossKind kind, double alpha) : kind_(kind), alpha_(alpha) {}
  LossKind kind_;
  double alpha_;
};

// (t^{1-alpha} - 1)/(1 - alpha); natural log near alpha = 1.
// t = 0 gives -1/(1-alpha) for alpha < 1 and -infinity otherwise. Throws on t < 0.
double log_alpha(double alpha, double t);

// Derivative of log_alpha in t, i.e. t^{-alpha}.
double log_alpha_derivative(double alpha, double t);

// Inverse of log_alpha on its range. Throws std::domain_error outside the domain.
double exp_alpha(double alpha, double s);

// Lower end of log_alpha's range for alpha < 1: -1/(1-alpha).
inline double log_alpha_floor(double alpha) { return -1.0 / (1.0 - alpha); }

// Loss of the soft prediction v for true class i. v must lie in the simplex within 1e-9.
// Returns +infinity for v_i = 0 under cross-entropy or alpha >= 1.
double loss_value(const LossSpec& spec, std::span<const double> v, std::size_t i);

// Unique Z with sum_i g_i(Z) = 1 where g_i(Z) = exp_alpha(-a_i - Z), clamped from below
// at -1/(1-alpha) when alpha < 1. Entries equal to +infinity contribute zero.
// Throws ValidationError when every entry is +infinity.
double find_normalizer(double alpha, std::span<const double> a);

// Per-class weights g_i(Z) for a given normalizer.
double normalized_weight(double alpha, double a_i, double z);

}  // namespace advbound
