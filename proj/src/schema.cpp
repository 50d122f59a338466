#include "fairgen/schema.hpp"

#include <stdexcept>
#include <unordered_set>

#include "fairgen/rng.hpp"

namespace fairgen {

namespace {
constexpr int kMaxGroups = 1 << 20;
}

AxisSchema::AxisSchema(std::vector<Axis> axes) : axes_(std::move(axes)) {
  if (axes_.empty())
    throw std::invalid_argument("schema needs at least one sensitive axis");
  std::unordered_set<std::string> names;
  long long groups = 1;
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    const Axis& a = axes_[i];
    if (a.name.empty())
      throw std::invalid_argument("axis " + std::to_string(i) + " has an empty name");
    if (a.cardinality < 2)
      throw std::invalid_argument("axis '" + a.name + "' needs cardinality >= 2, got " +
                                  std::to_string(a.cardinality));
    if (!names.insert(a.name).second)
      throw std::invalid_argument("duplicate axis name '" + a.name + "'");
    groups *= a.cardinality;
    if (groups > kMaxGroups)
      throw std::invalid_argument("group lattice too large (> 2^20 groups)");
  }
  num_groups_ = static_cast<int>(groups);
}

bool AxisSchema::all_binary() const {
  for (const Axis& a : axes_)
    if (a.cardinality != 2)
      return false;
  return true;
}

void AxisSchema::validate(const GroupId& g) const {
  if (static_cast<int>(g.values.size()) != num_axes())
    throw std::invalid_argument("group has " + std::to_string(g.values.size()) +
                                " values, schema has " + std::to_string(num_axes()) +
                                " axes");
  for (int i = 0; i < num_axes(); ++i) {
    int v = g.values[i];
    if (v < 0 || v >= axes_[i].cardinality)
      throw std::invalid_argument("attribute index " + std::to_string(v) +
                                  " out of range for axis " + std::to_string(i) +
                                  " ('" + axes_[i].name + "', cardinality " +
                                  std::to_string(axes_[i].cardinality) + ")");
  }
}

int AxisSchema::group_code(const GroupId& g) const {
  validate(g);
  int code = 0;
  for (int i = 0; i < num_axes(); ++i)
    code = code * axes_[i].cardinality + g.values[i];
  return code;
}

GroupId AxisSchema::group_from_code(int code) const {
  if (code < 0 || code >= num_groups_)
    throw std::invalid_argument("group code out of range");
  GroupId g;
  g.values.resize(num_axes());
  for (int i = num_axes() - 1; i >= 0; --i) {
    g.values[i] = code % axes_[i].cardinality;
    code /= axes_[i].cardinality;
  }
  return g;
}

std::uint64_t AxisSchema::content_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0x1f;
    h *= 0x100000001b3ULL;
  };
  for (const Axis& a : axes_) {
    mix(a.name);
    mix(std::to_string(a.cardinality));
  }
  return h;
}

std::string format_group(const GroupId& g) {
  std::string s;
  for (std::size_t i = 0; i < g.values.size(); ++i) {
    if (i)
      s += ',';
    s += std::to_string(g.values[i]);
  }
  return s;
}

std::vector<ParentGroupId> parent_groups(const AxisSchema& schema, const GroupId& g) {
  schema.validate(g);
  std::vector<ParentGroupId> parents;
  parents.reserve(schema.num_axes());
  for (int i = 0; i < schema.num_axes(); ++i)
    parents.push_back({g, i});
  return parents;
}

std::vector<GroupPredicate> grandparent_groups(const AxisSchema& schema, const GroupId& g) {
  schema.validate(g);
  const int p = schema.num_axes();
  if (p < 2)
    throw std::invalid_argument("grandparent groups need at least two axes");
  const int masked = p >= 3 ? 2 : 1;  // always keep at least one axis pinned
  std::vector<GroupPredicate> preds;
  if (masked == 1) {
    for (int i = 0; i < p; ++i)
      preds.push_back({g, {i}});
    return preds;
  }
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j)
      preds.push_back({g, {i, j}});
  return preds;
}

GroupId adversarial_group(const AxisSchema& schema, const GroupId& g) {
  schema.validate(g);
  if (!schema.all_binary())
    throw std::invalid_argument("adversarial group requires all axes binary");
  GroupId out = g;
  for (int& v : out.values)
    v = 1 - v;
  return out;
}

bool matches(const AxisSchema& schema, const GroupId& sel, const GroupId& g) {
  schema.validate(sel);
  return sel == g;
}

bool matches(const AxisSchema& schema, const ParentGroupId& sel, const GroupId& g) {
  schema.validate(sel.base);
  if (sel.masked_axis < 0 || sel.masked_axis >= schema.num_axes())
    throw std::invalid_argument("masked axis out of range");
  for (int i = 0; i < schema.num_axes(); ++i)
    if (i != sel.masked_axis && sel.base.values[i] != g.values[i])
      return false;
  return true;
}

bool matches(const AxisSchema& schema, const GroupPredicate& sel, const GroupId& g) {
  schema.validate(sel.base);
  for (int axis : sel.masked_axes)
    if (axis < 0 || axis >= schema.num_axes())
      throw std::invalid_argument("masked axis out of range");
  for (int i = 0; i < schema.num_axes(); ++i) {
    bool is_masked = false;
    for (int axis : sel.masked_axes)
      if (axis == i)
        is_masked = true;
    if (!is_masked && sel.base.values[i] != g.values[i])
      return false;
  }
  return true;
}

}  // namespace fairgen
