#include "advbound/alpha.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "advbound/errors.hpp"

namespace advbound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSimplexTol = 1e-9;
constexpr int kMaxBisection = 200;

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

double parse_alpha_value(const std::string& text) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ValidationError("invalid alpha value '" + text + "'");
  }
  if (used != text.size() || !std::isfinite(value) || value < 0.0) {
    throw ValidationError("invalid alpha value '" + text + "'");
  }
  return value;
}

}  // namespace

LossSpec LossSpec::alpha_log(double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw ValidationError("alpha must be a finite value >= 0");
  }
  if (is_cross_entropy(alpha)) return cross_entropy();
  return LossSpec(LossKind::kAlphaLog, alpha);
}

LossSpec LossSpec::parse(const std::string& text) {
  const std::string key = lowercase(text);
  if (key == "ce" || key == "cross_entropy") return cross_entropy();
  if (key == "zero_one" || key == "01") return alpha_log(0.0);
  if (key == "quadratic") return quadratic();
  if (key.rfind("alpha:", 0) == 0) return alpha_log(parse_alpha_value(text.substr(6)));
  return alpha_log(parse_alpha_value(text));
}

std::string LossSpec::to_string() const {
  switch (kind_) {
    case LossKind::kCrossEntropy:
      return "ce";
    case LossKind::kQuadratic:
      return "quadratic";
    case LossKind::kAlphaLog: {
      std::ostringstream os;
      os.precision(17);
      os << "alpha:" << alpha_;
      return os.str();
    }
  }
  return "?";
}

double log_alpha(double alpha, double t) {
  if (t < 0.0 || std::isnan(t)) throw std::domain_error("log_alpha: argument must be >= 0");
  if (is_cross_entropy(alpha)) return t == 0.0 ? -kInf : std::log(t);
  if (t == 0.0) return alpha < 1.0 ? log_alpha_floor(alpha) : -kInf;
  return (std::pow(t, 1.0 - alpha) - 1.0) / (1.0 - alpha);
}

double log_alpha_derivative(double alpha, double t) {
  if (alpha == 0.0) return 1.0;
  if (is_cross_entropy(alpha)) return 1.0 / t;
  return std::pow(t, -alpha);
}

double exp_alpha(double alpha, double s) {
  if (std::isnan(s)) throw std::domain_error("exp_alpha: NaN argument");
  if (is_cross_entropy(alpha)) return std::exp(s);
  if (alpha < 1.0) {
    if (s < log_alpha_floor(alpha)) throw std::domain_error("exp_alpha: argument below -1/(1-alpha)");
    if (s == kInf) return kInf;
    const double base = std::max((1.0 - alpha) * s + 1.0, 0.0);
    return std::pow(base, 1.0 / (1.0 - alpha));
  }
  // alpha > 1: the domain is s < 1/(alpha-1).
  const double base = (1.0 - alpha) * s + 1.0;
  if (!(base > 0.0)) throw std::domain_error("exp_alpha: argument above 1/(alpha-1)");
  return std::pow(base, 1.0 / (1.0 - alpha));
}

double loss_value(const LossSpec& spec, std::span<const double> v, std::size_t i) {
  if (i >= v.size()) throw ValidationError("loss_value: class index out of range");
  double total = 0.0;
  for (double x : v) {
    if (!(x >= -kSimplexTol)) throw ValidationError("loss_value: vector has a negative entry");
    total += x;
  }
  if (std::abs(total - 1.0) > kSimplexTol) {
    throw ValidationError("loss_value: vector does not sum to 1");
  }
  const double vi = std::max(v[i], 0.0);
  switch (spec.kind()) {
    case LossKind::kCrossEntropy:
      return vi == 0.0 ? kInf : -std::log(vi);
    case LossKind::kAlphaLog:
      return -log_alpha(spec.alpha(), vi);
    case LossKind::kQuadratic: {
      double sq = 0.0;
      for (std::size_t j = 0; j < v.size(); ++j) {
        const double d = v[j] - (j == i ? 1.0 : 0.0);
        sq += d * d;
      }
      return sq;
    }
  }
  return kInf;
}

double normalized_weight(double alpha, double a_i, double z) {
  if (a_i == kInf) return 0.0;
  const double s = -a_i - z;
  if (is_cross_entropy(alpha)) return std::exp(s);
  if (alpha < 1.0) return exp_alpha(alpha, std::max(s, log_alpha_floor(alpha)));
  if ((1.0 - alpha) * s + 1.0 <= 0.0) return kInf;
  return exp_alpha(alpha, s);
}

double find_normalizer(double alpha, std::span<const double> a) {
  std::vector<double> finite;
  for (double x : a) {
    if (std::isnan(x) || x == -kInf) throw ValidationError("find_normalizer: entries must be real or +inf");
    if (x != kInf) finite.push_back(x);
  }
  if (finite.empty()) throw ValidationError("find_normalizer: all entries are +infinity");
  const double a_min = *std::min_element(finite.begin(), finite.end());
  const double a_max = *std::max_element(finite.begin(), finite.end());

  if (is_cross_entropy(alpha)) {
    // log-sum-exp of -a, shifted by the largest exponent
    double acc = 0.0;
    for (double x : finite) acc += std::exp(a_min - x);
    return -a_min + std::log(acc);
  }

  auto total = [&](double z) {
    double sum = 0.0;
    for (double x : finite) sum += normalized_weight(alpha, x, z);
    return sum;
  };

  double lo = 0.0;
  double hi = 0.0;
  if (alpha < 1.0) {
    lo = -a_max - 10.0;
    for (double step = 10.0; total(lo) < 1.0; step *= 2.0) lo -= step;
  } else {
    // total(z) is finite only for z > -a_min - 1/(alpha-1) and blows up at that boundary.
    const double boundary = -a_min - 1.0 / (alpha - 1.0);
    double delta = 1.0;
    lo = boundary + delta;
    while (total(lo) < 1.0 && delta > 0.0) {
      delta *= 0.5;
      lo = boundary + delta;
    }
  }
  hi = std::max(lo, -a_min + 10.0);
  for (double step = 10.0; total(hi) > 1.0; step *= 2.0) hi += step;

  for (int it = 0; it < kMaxBisection; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (total(mid) > 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  // Pick the endpoint whose sum is closer to 1.
  return std::abs(total(lo) - 1.0) <= std::abs(total(hi) - 1.0) ? lo : hi;
}

}  // namespace advbound
