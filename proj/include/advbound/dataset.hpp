#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace advbound {

// One parsed input row before validation.
struct RawAtom {
  std::size_t row = 0;  // 1-based source line, used in error messages
  long label = 0;
  std::vector<double> coords;
  double weight = 0.0;
};

// Per-class weighted point clouds. Points are stored class-major, so the dense
// variable id of a point equals its index here.
class LabeledDataset {
 public:
  LabeledDataset() = default;

  // Remaps labels to 0..K-1 (ascending), merges identical same-class atoms by
  // summing weights, drops zero-weight atoms and renormalizes to total mass 1.
  // Diagnostics that do not abort the load are appended to `warnings`.
  static LabeledDataset build(std::vector<RawAtom> atoms,
                              std::vector<std::string>* warnings = nullptr);

  // Convenience for in-memory data. Empty `weights` means uniform 1/n.
  static LabeledDataset from_points(const std::vector<std::vector<double>>& points,
                                    const std::vector<long>& labels,
                                    std::vector<double> weights = {},
                                    std::vector<std::string>* warnings = nullptr);

  std::size_t size() const { return labels_.size(); }
  std::size_t dim() const { return dim_; }
  int class_count() const { return static_cast<int>(original_labels_.size()); }

  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  int label(std::size_t i) const { return labels_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }
  const std::vector<double>& weights() const { return weights_; }

  std::size_t class_begin(int c) const { return offsets_[static_cast<std::size_t>(c)]; }
  std::size_t class_end(int c) const { return offsets_[static_cast<std::size_t>(c) + 1]; }
  std::size_t class_size(int c) const { return class_end(c) - class_begin(c); }
  std::size_t index_in_class(std::size_t i) const { return i - class_begin(labels_[i]); }

  long original_label(int c) const { return original_labels_[static_cast<std::size_t>(c)]; }
  std::vector<double> class_masses() const;

 private:
  std::size_t dim_ = 0;
  std::vector<double> coords_;
  std::vector<int> labels_;
  std::vector<double> weights_;
  std::vector<std::size_t> offsets_;
  std::vector<long> original_labels_;
};

struct LoadOptions {
  // Whether the last column is a weight. When unset, a header row whose last
  // column is named "weight" turns it on; otherwise rows carry no weight.
  std::optional<bool> weighted;
};

// Reads `label,x1,...,xd[,weight]` rows. Blank lines and lines starting with '#'
// are skipped; a first line whose leading field is not numeric is a header.
LabeledDataset load_dataset(const std::filesystem::path& path, const LoadOptions& options = {},
                            std::vector<std::string>* warnings = nullptr);

// Parses CSV text directly (same rules as load_dataset).
LabeledDataset parse_dataset(const std::string& text, const LoadOptions& options = {},
                             std::vector<std::string>* warnings = nullptr);

// Writes the merged representation back as `label,x1,...,xd,weight` with a header.
void save_dataset(const LabeledDataset& data, const std::filesystem::path& path);

// Reads unlabeled query vectors, one per row.
std::vector<std::vector<double>> load_queries(const std::filesystem::path& path);

}  // namespace advbound
