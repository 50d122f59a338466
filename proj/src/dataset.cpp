#include "fairgen/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "fairgen/text_io.hpp"

namespace fairgen {

Dataset::Dataset(AxisSchema schema, int feature_dim, int num_labels,
                 std::vector<Record> records)
    : schema_(std::move(schema)),
      feature_dim_(feature_dim),
      num_labels_(num_labels),
      records_(std::move(records)) {
  if (feature_dim_ < 1)
    throw std::invalid_argument("feature_dim must be >= 1");
  if (num_labels_ < 2)
    throw std::invalid_argument("num_labels must be >= 2");
  index_.assign(static_cast<std::size_t>(schema_.num_groups()) * num_labels_, {});
  for (std::size_t pos = 0; pos < records_.size(); ++pos) {
    const Record& r = records_[pos];
    if (static_cast<int>(r.features.size()) != feature_dim_)
      throw std::invalid_argument("record " + std::to_string(pos) + " has " +
                                  std::to_string(r.features.size()) +
                                  " features, expected " + std::to_string(feature_dim_));
    for (float f : r.features)
      if (!std::isfinite(f))
        throw std::invalid_argument("record " + std::to_string(pos) +
                                    " has a non-finite feature");
    if (r.label < 0 || r.label >= num_labels_)
      throw std::invalid_argument("record " + std::to_string(pos) + " label " +
                                  std::to_string(r.label) + " out of range [0, " +
                                  std::to_string(num_labels_) + ")");
    int code = schema_.group_code(r.group);
    index_[static_cast<std::size_t>(code) * num_labels_ + r.label].push_back(
        static_cast<std::int64_t>(pos));
  }
}

const std::vector<std::int64_t>& Dataset::cell(const GroupId& g, int label) const {
  return cell_by_code(schema_.group_code(g), label);
}

const std::vector<std::int64_t>& Dataset::cell_by_code(int group_code, int label) const {
  if (label < 0 || label >= num_labels_)
    throw std::invalid_argument("label out of range");
  return index_[static_cast<std::size_t>(group_code) * num_labels_ + label];
}

std::vector<std::int64_t> Dataset::members(const GroupId& g,
                                           std::optional<int> label) const {
  schema_.validate(g);
  int code = schema_.group_code(g);
  std::vector<std::int64_t> out;
  if (label) {
    out = cell_by_code(code, *label);
  } else {
    for (int k = 0; k < num_labels_; ++k) {
      const auto& c = cell_by_code(code, k);
      out.insert(out.end(), c.begin(), c.end());
    }
    std::sort(out.begin(), out.end());
  }
  return out;
}

std::vector<std::int64_t> Dataset::members(const ParentGroupId& sel,
                                           std::optional<int> label) const {
  return members(GroupPredicate{sel.base, {sel.masked_axis}}, label);
}

std::vector<std::int64_t> Dataset::members(const GroupPredicate& sel,
                                           std::optional<int> label) const {
  schema_.validate(sel.base);
  std::vector<std::int64_t> out;
  // Enumerate the matching full groups and concatenate their cells.
  std::vector<int> masked = sel.masked_axes;
  std::sort(masked.begin(), masked.end());
  GroupId probe = sel.base;
  std::vector<int> counters(masked.size(), 0);
  for (;;) {
    for (std::size_t i = 0; i < masked.size(); ++i)
      probe.values[masked[i]] = counters[i];
    int code = schema_.group_code(probe);
    if (label) {
      const auto& c = cell_by_code(code, *label);
      out.insert(out.end(), c.begin(), c.end());
    } else {
      for (int k = 0; k < num_labels_; ++k) {
        const auto& c = cell_by_code(code, k);
        out.insert(out.end(), c.begin(), c.end());
      }
    }
    // Next combination of masked-axis values.
    std::size_t i = 0;
    for (; i < masked.size(); ++i) {
      if (++counters[i] < schema_.axis(masked[i]).cardinality)
        break;
      counters[i] = 0;
    }
    if (i == masked.size())
      break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t Dataset::num_nonempty_cells() const {
  std::size_t n = 0;
  for (const auto& c : index_)
    n += !c.empty();
  return n;
}

DatasetHeader load_schema(const std::filesystem::path& schema_path) {
  KeyValueFile kv = KeyValueFile::read(schema_path);
  DatasetHeader header;
  header.feature_dim = static_cast<int>(parse_int(kv.get("feature_dim"), "feature_dim"));
  header.num_labels = static_cast<int>(parse_int(kv.get("num_labels"), "num_labels"));

  std::vector<Axis> axes;
  for (int i = 0;; ++i) {
    std::string name_key = "axis." + std::to_string(i) + ".name";
    std::string card_key = "axis." + std::to_string(i) + ".cardinality";
    if (!kv.has(name_key))
      break;
    Axis a;
    a.name = kv.get(name_key);
    a.cardinality = static_cast<int>(parse_int(kv.get(card_key), card_key));
    axes.push_back(std::move(a));
  }
  if (axes.empty())
    throw std::runtime_error(schema_path.string() + ": no axes declared");
  std::size_t expected = 2 + 2 * axes.size();
  if (kv.entries().size() != expected)
    throw std::runtime_error(schema_path.string() +
                             ": unknown or non-contiguous keys (expected axis.<i>.name, "
                             "axis.<i>.cardinality, feature_dim, num_labels)");
  header.schema = AxisSchema(std::move(axes));
  return header;
}

void write_schema(const DatasetHeader& header, const std::filesystem::path& schema_path) {
  std::string body;
  for (int i = 0; i < header.schema.num_axes(); ++i) {
    body += "axis." + std::to_string(i) + ".name = " + header.schema.axis(i).name + "\n";
    body += "axis." + std::to_string(i) + ".cardinality = " +
            std::to_string(header.schema.axis(i).cardinality) + "\n";
  }
  body += "feature_dim = " + std::to_string(header.feature_dim) + "\n";
  body += "num_labels = " + std::to_string(header.num_labels) + "\n";
  write_text_file(schema_path, body);
}

Dataset load_dataset(const std::filesystem::path& data_path,
                     const std::filesystem::path& schema_path) {
  DatasetHeader header = load_schema(schema_path);
  std::ifstream in(data_path);
  if (!in)
    throw std::runtime_error("cannot open " + data_path.string());

  std::vector<Record> records;
  std::string line;
  int lineno = 0;
  const int p = header.schema.num_axes();
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv = trim(line);
    if (sv.empty())
      continue;
    auto where = [&](const std::string& msg) {
      return data_path.string() + ":" + std::to_string(lineno) + ": " + msg;
    };
    std::vector<std::string> fields = split(sv, '\t');
    if (fields.size() != 3)
      throw std::runtime_error(where("expected 3 tab-separated fields (label, attrs, "
                                     "features), got " + std::to_string(fields.size())));
    Record r;
    long long label = parse_int(fields[0], "label");
    if (label < 0 || label >= header.num_labels)
      throw std::runtime_error(where("label " + std::to_string(label) +
                                     " out of range [0, " +
                                     std::to_string(header.num_labels) + ")"));
    r.label = static_cast<int>(label);

    std::vector<std::string> attrs = split(fields[1], ',');
    if (static_cast<int>(attrs.size()) != p)
      throw std::runtime_error(where("expected " + std::to_string(p) +
                                     " attributes, got " + std::to_string(attrs.size())));
    r.group.values.resize(p);
    for (int i = 0; i < p; ++i) {
      long long v = parse_int(attrs[i], "attribute");
      if (v < 0 || v >= header.schema.axis(i).cardinality)
        throw std::runtime_error(where("attribute index " + std::to_string(v) +
                                       " out of range for axis " + std::to_string(i) +
                                       " ('" + header.schema.axis(i).name +
                                       "', cardinality " +
                                       std::to_string(header.schema.axis(i).cardinality) +
                                       ")"));
      r.group.values[i] = static_cast<int>(v);
    }

    std::vector<std::string> feats = split(fields[2], ',');
    if (static_cast<int>(feats.size()) != header.feature_dim)
      throw std::runtime_error(where("expected " + std::to_string(header.feature_dim) +
                                     " features, got " + std::to_string(feats.size())));
    r.features.resize(header.feature_dim);
    for (int i = 0; i < header.feature_dim; ++i) {
      double v = parse_double(feats[i], "feature");
      if (!std::isfinite(v))
        throw std::runtime_error(where("non-finite feature at position " +
                                       std::to_string(i)));
      r.features[i] = static_cast<float>(v);
    }
    records.push_back(std::move(r));
  }
  return Dataset(std::move(header.schema), header.feature_dim, header.num_labels,
                 std::move(records));
}

void write_dataset(const Dataset& ds, const std::filesystem::path& data_path,
                   const std::filesystem::path& schema_path) {
  write_schema({ds.schema(), ds.feature_dim(), ds.num_labels()}, schema_path);
  std::string body;
  for (const Record& r : ds.records()) {
    body += std::to_string(r.label);
    body += '\t';
    body += format_group(r.group);
    body += '\t';
    for (int i = 0; i < ds.feature_dim(); ++i) {
      if (i)
        body += ',';
      body += format_g9(r.features[i]);
    }
    body += '\n';
  }
  write_text_file(data_path, body);
}

std::vector<std::int64_t> sample_with_replacement(
    const std::vector<std::int64_t>& positions, std::size_t n, Rng& rng) {
  if (positions.empty())
    throw std::invalid_argument("cannot sample from an empty position list");
  if (n < 1)
    throw std::invalid_argument("sample count must be >= 1");
  std::vector<std::int64_t> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = positions[rng.uniform_index(positions.size())];
  return out;
}

Dataset equal_sample(const Dataset& ds, int n_per_cell, Rng& rng) {
  if (n_per_cell < 1)
    throw std::invalid_argument("n_per_cell must be >= 1");
  if (ds.num_nonempty_cells() == 0)
    throw std::invalid_argument("dataset has no nonempty (group, label) cells");

  std::vector<Record> out;
  const std::size_t n = static_cast<std::size_t>(n_per_cell);
  for (int code = 0; code < ds.schema().num_groups(); ++code) {
    for (int k = 0; k < ds.num_labels(); ++k) {
      const auto& cell = ds.cell_by_code(code, k);
      if (cell.empty())
        continue;
      if (cell.size() >= n) {
        // Partial Fisher-Yates: n distinct positions, uniform.
        std::vector<std::int64_t> pool = cell;
        for (std::size_t i = 0; i < n; ++i) {
          std::size_t j = i + rng.uniform_index(pool.size() - i);
          std::swap(pool[i], pool[j]);
          out.push_back(ds.record(pool[i]));
        }
      } else {
        for (std::size_t i = 0; i < n; ++i)
          out.push_back(ds.record(cell[rng.uniform_index(cell.size())]));
      }
    }
  }
  return Dataset(ds.schema(), ds.feature_dim(), ds.num_labels(), std::move(out));
}

Dataset restrict_axes(const Dataset& ds, const std::vector<int>& keep) {
  if (keep.empty())
    throw std::invalid_argument("keep set must be nonempty");
  std::vector<int> sorted = keep;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("keep set has duplicate axes");
  for (int i : sorted)
    if (i < 0 || i >= ds.schema().num_axes())
      throw std::invalid_argument("keep axis " + std::to_string(i) + " out of range");

  std::vector<Axis> axes;
  for (int i : sorted)
    axes.push_back(ds.schema().axis(i));
  AxisSchema schema(std::move(axes));

  std::vector<Record> records;
  records.reserve(ds.size());
  for (const Record& r : ds.records()) {
    Record nr;
    nr.features = r.features;
    nr.label = r.label;
    nr.group.values.reserve(sorted.size());
    for (int i : sorted)
      nr.group.values.push_back(r.group.values[i]);
    records.push_back(std::move(nr));
  }
  return Dataset(std::move(schema), ds.feature_dim(), ds.num_labels(),
                 std::move(records));
}

}  // namespace fairgen
