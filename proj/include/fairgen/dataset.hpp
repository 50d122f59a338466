#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "fairgen/rng.hpp"
#include "fairgen/schema.hpp"

namespace fairgen {

struct Record {
  std::vector<float> features;
  int label = 0;
  GroupId group;

  bool operator==(const Record&) const = default;
};

/// Immutable after construction; safe for concurrent reads. Indexed by
/// (group, label) cell.
class Dataset {
 public:
  Dataset(AxisSchema schema, int feature_dim, int num_labels,
          std::vector<Record> records);

  const AxisSchema& schema() const { return schema_; }
  int feature_dim() const { return feature_dim_; }
  int num_labels() const { return num_labels_; }
  std::size_t size() const { return records_.size(); }
  const Record& record(std::size_t i) const { return records_[i]; }
  const std::vector<Record>& records() const { return records_; }

  /// Record positions in the (group, label) cell, ascending.
  const std::vector<std::int64_t>& cell(const GroupId& g, int label) const;
  const std::vector<std::int64_t>& cell_by_code(int group_code, int label) const;

  std::vector<std::int64_t> members(const GroupId& g,
                                    std::optional<int> label = {}) const;
  std::vector<std::int64_t> members(const ParentGroupId& sel,
                                    std::optional<int> label = {}) const;
  std::vector<std::int64_t> members(const GroupPredicate& sel,
                                    std::optional<int> label = {}) const;

  std::size_t num_nonempty_cells() const;

 private:
  AxisSchema schema_;
  int feature_dim_ = 0;
  int num_labels_ = 0;
  std::vector<Record> records_;
  std::vector<std::vector<std::int64_t>> index_;  // [group_code * K + label]
};

/// Schema file contents: axes plus the dataset-wide dimensions.
struct DatasetHeader {
  AxisSchema schema;
  int feature_dim = 0;
  int num_labels = 0;
};

DatasetHeader load_schema(const std::filesystem::path& schema_path);
void write_schema(const DatasetHeader& header, const std::filesystem::path& schema_path);

Dataset load_dataset(const std::filesystem::path& data_path,
                     const std::filesystem::path& schema_path);
void write_dataset(const Dataset& ds, const std::filesystem::path& data_path,
                   const std::filesystem::path& schema_path);

/// n uniform draws with replacement; deterministic given the stream state.
std::vector<std::int64_t> sample_with_replacement(
    const std::vector<std::int64_t>& positions, std::size_t n, Rng& rng);

/// Rebuilds the dataset so every nonempty (group, label) cell has exactly
/// n_per_cell records: uniform subsampling without replacement when the cell
/// is larger, draws with replacement when smaller.
Dataset equal_sample(const Dataset& ds, int n_per_cell, Rng& rng);

/// Projects records onto a subset of axes (original axis order preserved).
Dataset restrict_axes(const Dataset& ds, const std::vector<int>& keep);

}  // namespace fairgen
