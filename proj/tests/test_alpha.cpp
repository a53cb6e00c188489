#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "advbound/alpha.hpp"
#include "advbound/errors.hpp"
#include "support.hpp"

using namespace advbound;
namespace ts = testsupport;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// Independent evaluation of sum_i g_i(Z) straight from the definition.
double simplex_sum(double alpha, const std::vector<double>& a, double z) {
  double s = 0.0;
  for (double ai : a) {
    if (std::isinf(ai)) continue;
    if (std::abs(alpha - 1.0) < 1e-9) {
      s += std::exp(-ai - z);
    } else if (alpha < 1.0) {
      const double arg = std::max(-ai - z, -1.0 / (1.0 - alpha));
      s += std::pow((1.0 - alpha) * arg + 1.0, 1.0 / (1.0 - alpha));
    } else {
      s += std::pow((1.0 - alpha) * (-ai - z) + 1.0, 1.0 / (1.0 - alpha));
    }
  }
  return s;
}
}  // namespace

TEST_CASE("log_alpha closed forms") {
  CHECK(log_alpha(0.0, 0.4) == doctest::Approx(-0.6).epsilon(1e-15));
  CHECK(log_alpha(2.0, 0.5) == doctest::Approx(-1.0).epsilon(1e-15));
  for (double a : {0.0, 0.3, 0.75, 1.0, 1.5, 2.0, 5.0}) CHECK(log_alpha(a, 1.0) == 0.0);
  CHECK(log_alpha(1.0, 3.0) == doctest::Approx(std::log(3.0)).epsilon(1e-15));
  CHECK(log_alpha(0.5, 1.0 / 3.0) == doctest::Approx(-2.0 * (1.0 - std::sqrt(1.0 / 3.0))).epsilon(1e-14));
}

TEST_CASE("log_alpha near one routes to the natural log") {
  CHECK(log_alpha(1.0 + 5e-10, 0.3) == std::log(0.3));
  CHECK(log_alpha(1.0 - 5e-10, 0.3) == std::log(0.3));
  // Just outside the band the power formula applies and still agrees closely.
  CHECK(log_alpha(1.0 + 1e-6, 0.3) == doctest::Approx(std::log(0.3)).epsilon(1e-5));
}

TEST_CASE("log_alpha at zero and negative arguments") {
  CHECK(log_alpha(0.0, 0.0) == -1.0);
  CHECK(log_alpha(0.5, 0.0) == doctest::Approx(-2.0));
  CHECK(log_alpha(1.0, 0.0) == -kInf);
  CHECK(log_alpha(2.0, 0.0) == -kInf);
  CHECK_THROWS_AS(log_alpha(0.5, -1e-3), std::domain_error);
}

TEST_CASE("exp_alpha closed forms and domain") {
  CHECK(exp_alpha(0.0, -0.25) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(exp_alpha(2.0, -2.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(exp_alpha(1.0, 0.7) == doctest::Approx(std::exp(0.7)).epsilon(1e-15));
  CHECK_THROWS_AS(exp_alpha(0.5, -2.5), std::domain_error);  // below -1/(1-alpha) = -2
  CHECK_THROWS_AS(exp_alpha(2.0, 1.0), std::domain_error);   // needs s < 1
  CHECK(exp_alpha(0.5, -2.0) == 0.0);
}

TEST_CASE("exp_alpha inverts log_alpha") {
  CHECK(exp_alpha(0.75, log_alpha(0.75, 0.37)) == doctest::Approx(0.37).epsilon(1e-12));
  ts::Rng rng(1);
  for (int i = 0; i < 2000; ++i) {
    const double a = ts::uniform(rng, 0.0, 3.0);
    const double t = std::exp(ts::uniform(rng, -8.0, 3.0));
    const double back = exp_alpha(a, log_alpha(a, t));
    CHECK(std::abs(back - t) <= 1e-12 * t + 1e-300);
  }
}

TEST_CASE("log_alpha is increasing and concave") {
  ts::Rng rng(2);
  for (int i = 0; i < 500; ++i) {
    const double a = ts::uniform(rng, 0.0, 3.0);
    const double t = ts::uniform(rng, 0.05, 5.0);
    const double h = 1e-3;
    const double lo = log_alpha(a, t - h), mid = log_alpha(a, t), hi = log_alpha(a, t + h);
    CHECK(lo < mid);
    CHECK(mid < hi);
    CHECK(lo + hi - 2.0 * mid <= 1e-12);
    const double d = 1e-5 * t;
    const double slope = (log_alpha(a, t + d) - log_alpha(a, t - d)) / (2 * d);
    CHECK(log_alpha_derivative(a, t) == doctest::Approx(slope).epsilon(1e-6));
  }
}

TEST_CASE("loss_value examples") {
  const std::vector<double> third{1.0 / 3, 1.0 / 3, 1.0 / 3};
  CHECK(loss_value(LossSpec::cross_entropy(), third, 0) == doctest::Approx(std::log(3.0)).epsilon(1e-14));
  const std::vector<double> e2{0.0, 0.0, 1.0};
  CHECK(loss_value(LossSpec::quadratic(), e2, 2) == 0.0);
  CHECK(loss_value(LossSpec::quadratic(), e2, 0) == doctest::Approx(2.0));
  const std::vector<double> v{0.7, 0.3};
  CHECK(loss_value(LossSpec::alpha_log(0.0), v, 1) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(loss_value(LossSpec::cross_entropy(), e2, 0) == kInf);
  CHECK(loss_value(LossSpec::alpha_log(2.0), e2, 1) == kInf);
  CHECK(loss_value(LossSpec::alpha_log(0.5), e2, 1) == doctest::Approx(2.0));
}

TEST_CASE("loss_value rejects vectors off the simplex") {
  const std::vector<double> bad{0.7, 0.4};
  CHECK_THROWS_AS(loss_value(LossSpec::cross_entropy(), bad, 0), ValidationError);
  const std::vector<double> neg{1.1, -0.1};
  CHECK_THROWS_AS(loss_value(LossSpec::cross_entropy(), neg, 0), ValidationError);
  const std::vector<double> ok{0.5, 0.5};
  CHECK_THROWS_AS(loss_value(LossSpec::cross_entropy(), ok, 2), ValidationError);
  const std::vector<double> close{0.5, 0.5 + 5e-10};
  CHECK_NOTHROW(loss_value(LossSpec::cross_entropy(), close, 0));
}

TEST_CASE("loss ordering across alpha") {
  ts::Rng rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const int k = ts::uniform_int(rng, 2, 5);
    std::vector<double> v(static_cast<std::size_t>(k));
    double s = 0.0;
    for (auto& x : v) s += (x = -std::log(ts::uniform(rng, 1e-9, 1.0)));
    for (auto& x : v) x /= s;
    const double a = ts::uniform(rng, 0.0, 1.0);
    const double b = ts::uniform(rng, a, 1.0);
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double la = loss_value(LossSpec::alpha_log(a), v, i);
      const double lb = loss_value(LossSpec::alpha_log(b), v, i);
      const double ce = loss_value(LossSpec::cross_entropy(), v, i);
      CHECK(la <= lb + 1e-12);
      CHECK(lb <= ce + 1e-12);
    }
  }
}

TEST_CASE("LossSpec construction and parsing") {
  CHECK(LossSpec::alpha_log(1.0).kind() == LossKind::kCrossEntropy);
  CHECK(LossSpec::alpha_log(1.0 + 1e-10).kind() == LossKind::kCrossEntropy);
  CHECK(LossSpec::alpha_log(0.75).kind() == LossKind::kAlphaLog);
  CHECK(LossSpec::alpha_log(0.75).alpha() == 0.75);
  CHECK_THROWS_AS(LossSpec::alpha_log(-0.1), ValidationError);
  CHECK(LossSpec::parse("ce").kind() == LossKind::kCrossEntropy);
  CHECK(LossSpec::parse("CE").kind() == LossKind::kCrossEntropy);
  CHECK(LossSpec::parse("zero_one").alpha() == 0.0);
  CHECK(LossSpec::parse("quadratic").kind() == LossKind::kQuadratic);
  CHECK(LossSpec::parse("alpha:0.75").alpha() == 0.75);
  CHECK(LossSpec::parse("alpha:1").kind() == LossKind::kCrossEntropy);
  CHECK_THROWS_AS(LossSpec::parse("alpha:"), ValidationError);
  CHECK_THROWS_AS(LossSpec::parse("hinge"), ValidationError);
  CHECK_THROWS_AS(LossSpec::parse("alpha:-2"), ValidationError);
}

TEST_CASE("find_normalizer examples") {
  const std::vector<double> zeros3{0.0, 0.0, 0.0};
  CHECK(find_normalizer(1.0, zeros3) == doctest::Approx(std::log(3.0)).epsilon(1e-14));
  const std::vector<double> zeros2{0.0, 0.0};
  CHECK(find_normalizer(0.0, zeros2) == doctest::Approx(0.5).epsilon(1e-12));
  const std::vector<double> far{0.0, 5.0};
  const double z = find_normalizer(0.0, far);
  CHECK(std::abs(z) <= 1e-12);
  CHECK(normalized_weight(0.0, 0.0, z) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(normalized_weight(0.0, 5.0, z) == 0.0);
}

TEST_CASE("find_normalizer with infinite entries") {
  const std::vector<double> a{0.2, kInf, -0.4};
  for (double alpha : {0.0, 0.5, 1.0, 2.0}) {
    const double z = find_normalizer(alpha, a);
    CHECK(std::abs(simplex_sum(alpha, a, z) - 1.0) <= 1e-12);
    CHECK(normalized_weight(alpha, kInf, z) == 0.0);
  }
  const std::vector<double> none{kInf, kInf};
  CHECK_THROWS_AS(find_normalizer(0.5, none), ValidationError);
  const std::vector<double> nan{0.0, std::nan("")};
  CHECK_THROWS_AS(find_normalizer(0.5, nan), ValidationError);
}

TEST_CASE("find_normalizer solves the simplex equation and shifts with the data") {
  ts::Rng rng(4);
  for (int trial = 0; trial < 400; ++trial) {
    const double alpha = trial % 4 == 0 ? 1.0 : ts::uniform(rng, 0.0, 3.0);
    const int k = ts::uniform_int(rng, 1, 6);
    std::vector<double> a(static_cast<std::size_t>(k));
    for (auto& x : a) x = ts::uniform(rng, -4.0, 4.0);
    const double z = find_normalizer(alpha, a);
    CHECK(std::abs(simplex_sum(alpha, a, z) - 1.0) <= 1e-12);

    const double c = ts::uniform(rng, -3.0, 3.0);
    std::vector<double> shifted = a;
    for (auto& x : shifted) x += c;
    const double zs = find_normalizer(alpha, shifted);
    CHECK(zs == doctest::Approx(z - c).epsilon(1e-9).scale(1.0));
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(std::abs(normalized_weight(alpha, a[i], z) - normalized_weight(alpha, shifted[i], zs)) <= 1e-9);
    }
  }
}
