#pragma once

// Shared generators and independent reference computations for the test binaries.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "advbound/alpha.hpp"
#include "advbound/dataset.hpp"
#include "advbound/geometry.hpp"
#include "advbound/packing.hpp"

namespace testsupport {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

// Random labeled dataset with every class nonempty. Coordinates in [0, scale)^dim.
inline advbound::LabeledDataset random_dataset(Rng& rng, int classes, int max_per_class, int dim, double scale,
                                               bool random_weights = false) {
  std::vector<std::vector<double>> pts;
  std::vector<long> labels;
  std::vector<double> weights;
  for (int c = 0; c < classes; ++c) {
    const int count = uniform_int(rng, 1, max_per_class);
    for (int i = 0; i < count; ++i) {
      std::vector<double> p(static_cast<std::size_t>(dim));
      for (auto& x : p) x = uniform(rng, 0.0, scale);
      pts.push_back(std::move(p));
      labels.push_back(c);
      weights.push_back(random_weights ? uniform(rng, 0.2, 1.0) : 1.0);
    }
  }
  return advbound::LabeledDataset::from_points(pts, labels, weights);
}

inline std::vector<std::span<const double>> spans(const std::vector<std::vector<double>>& pts) {
  std::vector<std::span<const double>> out;
  for (const auto& p : pts) out.emplace_back(p);
  return out;
}

// Planar brute force: smallest max-distance from a grid of candidate centers,
// refined around the incumbent. Independent of the closed-form / Welzl code.
inline double grid_enclosing_radius_2d(const std::vector<std::vector<double>>& pts) {
  double lo_x = pts[0][0], hi_x = pts[0][0], lo_y = pts[0][1], hi_y = pts[0][1];
  for (const auto& p : pts) {
    lo_x = std::min(lo_x, p[0]);
    hi_x = std::max(hi_x, p[0]);
    lo_y = std::min(lo_y, p[1]);
    hi_y = std::max(hi_y, p[1]);
  }
  double cx = 0.5 * (lo_x + hi_x), cy = 0.5 * (lo_y + hi_y);
  double half = 0.5 * std::max(hi_x - lo_x, hi_y - lo_y) + 1e-9;
  double best = std::numeric_limits<double>::infinity();
  // Slow shrinking: the objective has narrow valleys along bisectors.
  for (int round = 0; round < 60; ++round) {
    double bx = cx, by = cy;
    for (int i = 0; i <= 80; ++i) {
      for (int j = 0; j <= 80; ++j) {
        const double x = cx - half + 2.0 * half * i / 80.0;
        const double y = cy - half + 2.0 * half * j / 80.0;
        double r = 0.0;
        for (const auto& p : pts) r = std::max(r, std::hypot(p[0] - x, p[1] - y));
        if (r < best) {
          best = r;
          bx = x;
          by = y;
        }
      }
    }
    cx = bx;
    cy = by;
    half *= 0.6;
  }
  return best;
}

// Exact planar minimum enclosing circle by exhaustion: the optimum is a diameter
// circle of some pair or the circumcircle of some triple, whichever is smallest
// while still covering every point.
inline double combinatorial_enclosing_radius_2d(const std::vector<std::vector<double>>& pts) {
  double best = std::numeric_limits<double>::infinity();
  auto consider = [&](double cx, double cy, double r) {
    for (const auto& p : pts) {
      if (std::hypot(p[0] - cx, p[1] - cy) > r * (1 + 1e-12) + 1e-12) return;
    }
    best = std::min(best, r);
  };
  const std::size_t n = pts.size();
  if (n == 1) return 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double cx = 0.5 * (pts[i][0] + pts[j][0]), cy = 0.5 * (pts[i][1] + pts[j][1]);
      consider(cx, cy, 0.5 * std::hypot(pts[i][0] - pts[j][0], pts[i][1] - pts[j][1]));
      for (std::size_t k = j + 1; k < n; ++k) {
        const double ax = pts[i][0], ay = pts[i][1];
        const double bx = pts[j][0] - ax, by = pts[j][1] - ay;
        const double qx = pts[k][0] - ax, qy = pts[k][1] - ay;
        const double d = 2.0 * (bx * qy - by * qx);
        if (std::abs(d) < 1e-14) continue;
        const double b2 = bx * bx + by * by, q2 = qx * qx + qy * qy;
        const double ux = (qy * b2 - by * q2) / d, uy = (bx * q2 - qx * b2) / d;
        consider(ax + ux, ay + uy, std::hypot(ux, uy));
      }
    }
  }
  return best;
}

// max_i [||v - e_i||^2 - t_i] minimized over a simplex grid with step 1/steps (K = 3).
// Infinite transforms are skipped.
inline double quadratic_point_value(double a, double b, std::span<const double> t) {
  const double v[3] = {a, b, 1.0 - a - b};
  const double sq = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    if (std::isinf(t[static_cast<std::size_t>(i)])) continue;
    worst = std::max(worst, sq - 2.0 * v[i] + 1.0 - t[static_cast<std::size_t>(i)]);
  }
  return worst;
}

inline double quadratic_grid_minimax(std::span<const double> t, int steps) {
  double best = std::numeric_limits<double>::infinity();
  for (int a = 0; a <= steps; ++a) {
    for (int b = 0; a + b <= steps; ++b) {
      best = std::min(best, quadratic_point_value(static_cast<double>(a) / steps, static_cast<double>(b) / steps, t));
    }
  }
  return best;
}

// Same grid, then six rounds of 41x41 sub-grids around the incumbent, each shrinking
// the window by 5. The objective is a max of kinked quadratics, so a plain grid
// overestimates the minimax by up to ~1/steps; refinement removes that bias.
inline double quadratic_refined_minimax(std::span<const double> t, int steps) {
  double best = std::numeric_limits<double>::infinity();
  double ba = 0.0, bb = 0.0;
  for (int a = 0; a <= steps; ++a) {
    for (int b = 0; a + b <= steps; ++b) {
      const double x = static_cast<double>(a) / steps, y = static_cast<double>(b) / steps;
      const double v = quadratic_point_value(x, y, t);
      if (v < best) {
        best = v;
        ba = x;
        bb = y;
      }
    }
  }
  double half = 2.0 / steps;
  for (int round = 0; round < 6; ++round) {
    const double ca = ba, cb = bb;
    for (int i = 0; i <= 40; ++i) {
      for (int j = 0; j <= 40; ++j) {
        const double x = ca - half + 2.0 * half * i / 40.0;
        const double y = cb - half + 2.0 * half * j / 40.0;
        if (x < 0.0 || y < 0.0 || x + y > 1.0) continue;
        const double v = quadratic_point_value(x, y, t);
        if (v < best) {
          best = v;
          ba = x;
          bb = y;
        }
      }
    }
    half /= 5.0;
  }
  return best;
}

inline double quadratic_minimax_value(std::span<const double> f, std::span<const double> t) {
  double sq = 0.0;
  for (double v : f) sq += v * v;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (std::isinf(t[i])) continue;
    worst = std::max(worst, sq - 2.0 * f[i] + 1.0 - t[i]);
  }
  return worst;
}

// Pair instance: one point per class, weights (1/2, 1/2), single row {0, 1}.
inline advbound::PackingProblem pair_problem(double alpha) {
  advbound::PackingProblem p;
  p.weights = {0.5, 0.5};
  p.alpha = alpha;
  p.class_count = 2;
  p.incidence.cols = 2;
  const std::size_t row[] = {0, 1};
  p.incidence.add_row(row);
  return p;
}

// K classes with one point each, all in a single row.
inline advbound::PackingProblem full_confusion_problem(int k, double alpha) {
  advbound::PackingProblem p;
  p.weights.assign(static_cast<std::size_t>(k), 1.0 / k);
  p.alpha = alpha;
  p.class_count = k;
  p.incidence.cols = static_cast<std::size_t>(k);
  std::vector<std::size_t> row;
  for (int i = 0; i < k; ++i) row.push_back(static_cast<std::size_t>(i));
  p.incidence.add_row(row);
  return p;
}

inline advbound::PackingProblem singleton_problem(std::vector<double> weights, double alpha) {
  advbound::PackingProblem p;
  p.alpha = alpha;
  p.class_count = static_cast<int>(weights.size());
  p.incidence.cols = weights.size();
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const std::size_t row[] = {i};
    p.incidence.add_row(row);
  }
  p.weights = std::move(weights);
  return p;
}

}  // namespace testsupport
