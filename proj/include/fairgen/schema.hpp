#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fairgen {

struct Axis {
  std::string name;
  int cardinality = 0;
};

/// One attribute value per sensitive axis; a cell of the group lattice.
struct GroupId {
  std::vector<int> values;

  bool operator==(const GroupId&) const = default;
};

/// A group with one axis left unspecified. A record matches iff its group
/// agrees with `base` on every axis except `masked_axis`.
struct ParentGroupId {
  GroupId base;
  int masked_axis = 0;
};

/// Generalized selector with any set of masked axes (used for the
/// two-axes-masked sources of the abstract structure).
struct GroupPredicate {
  GroupId base;
  std::vector<int> masked_axes;  // sorted, distinct
};

class AxisSchema {
 public:
  AxisSchema() = default;
  explicit AxisSchema(std::vector<Axis> axes);

  int num_axes() const { return static_cast<int>(axes_.size()); }
  const Axis& axis(int i) const { return axes_.at(i); }
  const std::vector<Axis>& axes() const { return axes_; }
  bool all_binary() const;

  /// Number of full groups, the product of all cardinalities.
  int num_groups() const { return num_groups_; }

  void validate(const GroupId& g) const;

  /// Mixed-radix code in [0, num_groups()); axis 0 varies slowest.
  int group_code(const GroupId& g) const;
  GroupId group_from_code(int code) const;

  /// Stable content hash; written to generator suite files so a suite can be
  /// matched to the schema it was trained under.
  std::uint64_t content_hash() const;

  bool operator==(const AxisSchema&) const = default;

 private:
  std::vector<Axis> axes_;
  int num_groups_ = 0;
};

std::string format_group(const GroupId& g);

/// All p parents of g, one per masked axis, in axis order.
std::vector<ParentGroupId> parent_groups(const AxisSchema& schema, const GroupId& g);

/// Sources for the abstract structure: every predicate with min(2, p-1) axes
/// masked, enumerated by masked-axis combination in lexicographic order. For
/// p = 3 this is the three single-axis predicates; p = 2 degenerates to one
/// masked axis so each predicate still pins one axis value.
std::vector<GroupPredicate> grandparent_groups(const AxisSchema& schema, const GroupId& g);

/// Axiswise complement of g; requires every axis binary.
GroupId adversarial_group(const AxisSchema& schema, const GroupId& g);

bool matches(const AxisSchema& schema, const GroupId& sel, const GroupId& g);
bool matches(const AxisSchema& schema, const ParentGroupId& sel, const GroupId& g);
bool matches(const AxisSchema& schema, const GroupPredicate& sel, const GroupId& g);

}  // namespace fairgen
