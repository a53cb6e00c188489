#pragma once

#include <cstdint>

#include "advbound/dataset.hpp"

namespace advbound {

// Three classes in the plane, `per_class` draws from N(m_i, I_2) with
// m = (-2, 2), (2, 2), (-2, -2). Uniform weights.
LabeledDataset make_gaussian_blobs(int per_class, std::uint64_t seed);

// Digit-like 28x28 stroke images (classes labeled 1, 4, 7, 9), flattened to R^784.
// Strokes are jittered, shifted and drawn at one of a few intensity levels, so
// l-infinity distances between images concentrate on a handful of values.
LabeledDataset make_digit_images(int per_class, std::uint64_t seed);

}  // namespace advbound
