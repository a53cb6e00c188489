#include "advbound/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "advbound/errors.hpp"

namespace advbound {

namespace {

constexpr double kRenormalizeWarn = 1e-9;

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  try {
    std::size_t used = 0;
    out = std::stod(s, &used);
    return used == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

std::string row_tag(std::size_t row) { return "row " + std::to_string(row); }

struct ParsedLines {
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
  bool header_says_weighted = false;
};

ParsedLines tokenize(std::istream& in) {
  ParsedLines out;
  std::string line;
  std::size_t lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto fields = split_fields(t);
    if (first) {
      first = false;
      double probe = 0.0;
      if (!parse_double(fields.front(), probe)) {
        std::string last = fields.back();
        std::transform(last.begin(), last.end(), last.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        out.header_says_weighted = last == "weight" || last == "w";
        continue;
      }
    }
    out.rows.emplace_back(lineno, std::move(fields));
  }
  return out;
}

LabeledDataset parse_stream(std::istream& in, const LoadOptions& options,
                            std::vector<std::string>* warnings) {
  ParsedLines lines = tokenize(in);
  const bool weighted = options.weighted.value_or(lines.header_says_weighted);
  const std::size_t extra = weighted ? 2 : 1;

  std::vector<RawAtom> atoms;
  atoms.reserve(lines.rows.size());
  std::size_t dim = 0;
  for (auto& [row, fields] : lines.rows) {
    if (fields.size() < extra + 1) {
      throw DatasetError(DatasetErrorKind::kMalformedRow, row,
                         row_tag(row) + ": expected label, at least one coordinate" +
                             (weighted ? " and a weight" : ""));
    }
    RawAtom atom;
    atom.row = row;
    double label = 0.0;
    if (!parse_double(fields[0], label) || label < 0.0 || label != std::floor(label) ||
        label > 1e15) {
      throw DatasetError(DatasetErrorKind::kMalformedRow, row,
                         row_tag(row) + ": label '" + fields[0] + "' is not a nonnegative integer");
    }
    atom.label = static_cast<long>(label);
    const std::size_t d = fields.size() - extra;
    if (dim == 0) {
      dim = d;
    } else if (d != dim) {
      throw DatasetError(DatasetErrorKind::kDimensionMismatch, row,
                         row_tag(row) + ": dimension " + std::to_string(d) + " differs from " +
                             std::to_string(dim));
    }
    atom.coords.resize(d);
    for (std::size_t k = 0; k < d; ++k) {
      if (!parse_double(fields[k + 1], atom.coords[k]) || !std::isfinite(atom.coords[k])) {
        throw DatasetError(DatasetErrorKind::kMalformedRow, row,
                           row_tag(row) + ": coordinate '" + fields[k + 1] + "' is not a finite number");
      }
    }
    if (weighted) {
      if (!parse_double(fields.back(), atom.weight) || !std::isfinite(atom.weight)) {
        throw DatasetError(DatasetErrorKind::kMalformedRow, row,
                           row_tag(row) + ": weight '" + fields.back() + "' is not a finite number");
      }
    } else {
      atom.weight = 1.0;
    }
    atoms.push_back(std::move(atom));
  }
  if (atoms.empty()) throw DatasetError(DatasetErrorKind::kEmptyClass, 0, "dataset has no rows");
  if (!weighted) {
    const double u = 1.0 / static_cast<double>(atoms.size());
    for (auto& a : atoms) a.weight = u;
  }
  return LabeledDataset::build(std::move(atoms), warnings);
}

}  // namespace

LabeledDataset LabeledDataset::build(std::vector<RawAtom> atoms, std::vector<std::string>* warnings) {
  auto warn = [&](std::string msg) {
    if (warnings) warnings->push_back(std::move(msg));
  };
  if (atoms.empty()) throw DatasetError(DatasetErrorKind::kEmptyClass, 0, "dataset has no points");

  const std::size_t dim = atoms.front().coords.size();
  std::map<long, int> label_ids;
  for (const auto& a : atoms) {
    if (a.coords.empty()) {
      throw DatasetError(DatasetErrorKind::kMalformedRow, a.row, row_tag(a.row) + ": no coordinates");
    }
    if (a.coords.size() != dim) {
      throw DatasetError(DatasetErrorKind::kDimensionMismatch, a.row,
                         row_tag(a.row) + ": dimension " + std::to_string(a.coords.size()) +
                             " differs from " + std::to_string(dim));
    }
    if (a.label < 0) {
      throw DatasetError(DatasetErrorKind::kMalformedRow, a.row, row_tag(a.row) + ": negative label");
    }
    if (!(a.weight >= 0.0) || !std::isfinite(a.weight)) {
      throw DatasetError(DatasetErrorKind::kNonPositiveWeight, a.row,
                         row_tag(a.row) + ": weight must be positive");
    }
    label_ids.emplace(a.label, 0);
  }
  std::vector<long> originals;
  for (auto& [label, id] : label_ids) {
    id = static_cast<int>(originals.size());
    originals.push_back(label);
  }

  // Merge duplicates per class, keeping first-occurrence order.
  std::map<std::pair<int, std::vector<double>>, std::size_t> seen;
  std::vector<RawAtom> merged;
  std::vector<int> merged_class;
  for (auto& a : atoms) {
    const int c = label_ids.at(a.label);
    auto [it, inserted] = seen.try_emplace({c, a.coords}, merged.size());
    if (inserted) {
      merged.push_back(std::move(a));
      merged_class.push_back(c);
    } else {
      auto& target = merged[it->second];
      warn(row_tag(a.row) + ": duplicate of " + row_tag(target.row) + " merged");
      target.weight += a.weight;
    }
  }

  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < merged.size(); ++i) {
    if (merged[i].weight == 0.0) {
      warn(row_tag(merged[i].row) + ": zero weight, atom dropped");
      continue;
    }
    order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return merged_class[x] < merged_class[y]; });

  LabeledDataset out;
  out.dim_ = dim;
  out.original_labels_ = originals;
  const int k = static_cast<int>(originals.size());
  out.offsets_.assign(static_cast<std::size_t>(k) + 1, 0);
  double total = 0.0;
  for (std::size_t i : order) {
    const auto& a = merged[i];
    out.coords_.insert(out.coords_.end(), a.coords.begin(), a.coords.end());
    out.labels_.push_back(merged_class[i]);
    out.weights_.push_back(a.weight);
    out.offsets_[static_cast<std::size_t>(merged_class[i]) + 1]++;
    total += a.weight;
  }
  for (int c = 0; c < k; ++c) {
    if (out.offsets_[static_cast<std::size_t>(c) + 1] == 0) {
      throw DatasetError(DatasetErrorKind::kEmptyClass, 0,
                         "class with label " + std::to_string(originals[static_cast<std::size_t>(c)]) +
                             " has no positive-weight points");
    }
  }
  std::partial_sum(out.offsets_.begin(), out.offsets_.end(), out.offsets_.begin());

  if (std::abs(total - 1.0) > kRenormalizeWarn) {
    std::ostringstream os;
    os.precision(17);
    os << "weights sum to " << total << "; renormalized to 1";
    warn(os.str());
  }
  for (double& w : out.weights_) w /= total;
  return out;
}

LabeledDataset LabeledDataset::from_points(const std::vector<std::vector<double>>& points,
                                           const std::vector<long>& labels,
                                           std::vector<double> weights,
                                           std::vector<std::string>* warnings) {
  if (points.size() != labels.size() || (!weights.empty() && weights.size() != points.size())) {
    throw ValidationError("from_points: points, labels and weights differ in length");
  }
  std::vector<RawAtom> atoms(points.size());
  const double uniform = points.empty() ? 0.0 : 1.0 / static_cast<double>(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    atoms[i].row = i + 1;
    atoms[i].label = labels[i];
    atoms[i].coords = points[i];
    atoms[i].weight = weights.empty() ? uniform : weights[i];
  }
  return build(std::move(atoms), warnings);
}

std::vector<double> LabeledDataset::class_masses() const {
  std::vector<double> masses(static_cast<std::size_t>(class_count()), 0.0);
  for (std::size_t i = 0; i < size(); ++i) masses[static_cast<std::size_t>(labels_[i])] += weights_[i];
  return masses;
}

LabeledDataset load_dataset(const std::filesystem::path& path, const LoadOptions& options,
                            std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) {
    throw DatasetError(DatasetErrorKind::kIo, 0, "cannot open dataset '" + path.string() + "'");
  }
  return parse_stream(in, options, warnings);
}

LabeledDataset parse_dataset(const std::string& text, const LoadOptions& options,
                             std::vector<std::string>* warnings) {
  std::istringstream in(text);
  return parse_stream(in, options, warnings);
}

void save_dataset(const LabeledDataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  out.precision(17);
  out << "label";
  for (std::size_t k = 0; k < data.dim(); ++k) out << ",x" << (k + 1);
  out << ",weight\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << data.original_label(data.label(i));
    for (double x : data.point(i)) out << ',' << x;
    out << ',' << data.weight(i) << '\n';
  }
  if (!out) throw ValidationError("write failed for '" + path.string() + "'");
}

std::vector<std::vector<double>> load_queries(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError(DatasetErrorKind::kIo, 0, "cannot open queries '" + path.string() + "'");
  std::vector<std::vector<double>> out;
  std::string line;
  std::size_t lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto fields = split_fields(t);
    std::vector<double> q(fields.size());
    bool ok = true;
    for (std::size_t k = 0; k < fields.size(); ++k) ok = ok && parse_double(fields[k], q[k]) && std::isfinite(q[k]);
    if (!ok && first) {
      first = false;
      continue;  // header
    }
    first = false;
    if (!ok) throw DatasetError(DatasetErrorKind::kMalformedRow, lineno, row_tag(lineno) + ": non-numeric query");
    if (!out.empty() && q.size() != out.front().size()) {
      throw DatasetError(DatasetErrorKind::kDimensionMismatch, lineno,
                         row_tag(lineno) + ": query dimension differs from earlier rows");
    }
    out.push_back(std::move(q));
  }
  return out;
}

}  // namespace advbound
