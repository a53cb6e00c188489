#include "advbound/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <vector>

namespace advbound {

namespace {

constexpr int kSide = 28;

struct Segment {
  double r0, c0, r1, c1;
};

const std::vector<std::vector<Segment>>& glyphs() {
  static const std::vector<std::vector<Segment>> table = {
      // 1
      {{4, 14, 23, 14}, {4, 14, 8, 11}},
      // 4
      {{4, 9, 15, 9}, {15, 9, 15, 20}, {4, 18, 23, 18}},
      // 7
      {{5, 8, 5, 20}, {5, 20, 23, 12}},
      // 9
      {{5, 9, 5, 19}, {5, 19, 13, 19}, {13, 19, 13, 9}, {13, 9, 5, 9}, {13, 19, 23, 17}},
  };
  return table;
}

void draw(std::vector<double>& img, const Segment& s, int thickness, double level) {
  const double len = std::hypot(s.r1 - s.r0, s.c1 - s.c0);
  const int samples = std::max(2, static_cast<int>(4.0 * len));
  for (int k = 0; k <= samples; ++k) {
    const double t = static_cast<double>(k) / samples;
    const int r = static_cast<int>(std::lround(s.r0 + t * (s.r1 - s.r0)));
    const int c = static_cast<int>(std::lround(s.c0 + t * (s.c1 - s.c0)));
    for (int dr = 0; dr < thickness; ++dr) {
      for (int dc = 0; dc < thickness; ++dc) {
        const int rr = r + dr;
        const int cc = c + dc;
        if (rr >= 0 && rr < kSide && cc >= 0 && cc < kSide) {
          img[static_cast<std::size_t>(rr * kSide + cc)] = level;
        }
      }
    }
  }
}

}  // namespace

LabeledDataset make_gaussian_blobs(int per_class, std::uint64_t seed) {
  static constexpr std::array<std::array<double, 2>, 3> kMeans{{{-2.0, 2.0}, {2.0, 2.0}, {-2.0, -2.0}}};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::vector<double>> points;
  std::vector<long> labels;
  for (long c = 0; c < 3; ++c) {
    for (int i = 0; i < per_class; ++i) {
      points.push_back({kMeans[static_cast<std::size_t>(c)][0] + normal(rng),
                        kMeans[static_cast<std::size_t>(c)][1] + normal(rng)});
      labels.push_back(c);
    }
  }
  return LabeledDataset::from_points(points, labels);
}

LabeledDataset make_digit_images(int per_class, std::uint64_t seed) {
  static constexpr std::array<long, 4> kDigits{1, 4, 7, 9};
  static constexpr std::array<double, 3> kLevels{0.5, 0.75, 1.0};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> shift(-2, 2);
  std::uniform_int_distribution<int> jitter(-2, 2);
  std::uniform_int_distribution<int> thick(1, 2);
  std::uniform_int_distribution<std::size_t> level(0, kLevels.size() - 1);

  std::vector<std::vector<double>> points;
  std::vector<long> labels;
  for (std::size_t g = 0; g < kDigits.size(); ++g) {
    for (int i = 0; i < per_class; ++i) {
      std::vector<double> img(kSide * kSide, 0.0);
      const double dr = shift(rng);
      const double dc = shift(rng);
      const int t = thick(rng);
      const double lv = kLevels[level(rng)];
      for (const auto& s : glyphs()[g]) {
        const Segment moved{s.r0 + dr + jitter(rng), s.c0 + dc + jitter(rng), s.r1 + dr + jitter(rng),
                            s.c1 + dc + jitter(rng)};
        draw(img, moved, t, lv);
      }
      points.push_back(std::move(img));
      labels.push_back(kDigits[g]);
    }
  }
  return LabeledDataset::from_points(points, labels);
}

}  // namespace advbound
