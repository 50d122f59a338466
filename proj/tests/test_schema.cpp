#include <doctest.h>

#include "fairgen/rng.hpp"
#include "fairgen/schema.hpp"

using namespace fairgen;

namespace {

AxisSchema binary_schema(int p) {
  std::vector<Axis> axes;
  for (int i = 0; i < p; ++i)
    axes.push_back({"axis" + std::to_string(i), 2});
  return AxisSchema(std::move(axes));
}

}  // namespace

TEST_CASE("schema validation") {
  CHECK_THROWS(AxisSchema({}));
  CHECK_THROWS(AxisSchema({{"a", 1}}));
  CHECK_THROWS(AxisSchema({{"a", 2}, {"a", 2}}));

  AxisSchema s({{"gender", 2}, {"race", 3}});
  CHECK(s.num_groups() == 6);
  CHECK_FALSE(s.all_binary());
  CHECK_THROWS(s.validate(GroupId{{0, 3}}));
  CHECK_THROWS(s.validate(GroupId{{0}}));
  CHECK_NOTHROW(s.validate(GroupId{{1, 2}}));
}

TEST_CASE("group codes round trip") {
  AxisSchema s({{"a", 2}, {"b", 3}, {"c", 2}});
  for (int code = 0; code < s.num_groups(); ++code)
    CHECK(s.group_code(s.group_from_code(code)) == code);
}

TEST_CASE("parent groups: one per axis, in axis order") {
  // The three-axis example: (M, AA, U45) has parents (M,AA,.), (M,.,U45),
  // (.,AA,U45).
  AxisSchema s = binary_schema(3);
  GroupId g{{1, 1, 0}};
  auto parents = parent_groups(s, g);
  REQUIRE(parents.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(parents[i].masked_axis == i);
    CHECK(parents[i].base == g);
  }
  CHECK(matches(s, parents[0], GroupId{{0, 1, 0}}));
  CHECK(matches(s, parents[0], GroupId{{1, 1, 0}}));
  CHECK_FALSE(matches(s, parents[0], GroupId{{1, 0, 0}}));

  // p = 1 degenerates to one parent that matches every record.
  AxisSchema s1 = binary_schema(1);
  auto p1 = parent_groups(s1, GroupId{{0}});
  REQUIRE(p1.size() == 1);
  CHECK(matches(s1, p1[0], GroupId{{0}}));
  CHECK(matches(s1, p1[0], GroupId{{1}}));

  // p = 4: four parents with distinct masked axes.
  AxisSchema s4 = binary_schema(4);
  auto p4 = parent_groups(s4, GroupId{{1, 0, 1, 0}});
  REQUIRE(p4.size() == 4);
  for (int i = 0; i < 4; ++i)
    CHECK(p4[i].masked_axis == i);
}

TEST_CASE("grandparent groups") {
  // Paper example for p = 3: ({male}, {EA}, {U45}) — each predicate keeps
  // exactly one axis pinned.
  AxisSchema s3 = binary_schema(3);
  GroupId g{{1, 0, 1}};
  auto preds = grandparent_groups(s3, g);
  REQUIRE(preds.size() == 3);
  for (const GroupPredicate& pred : preds)
    CHECK(pred.masked_axes.size() == 2);
  // The first predicate masks axes 0 and 1, so it pins axis 2 only.
  CHECK(matches(s3, preds[0], GroupId{{0, 1, 1}}));
  CHECK_FALSE(matches(s3, preds[0], GroupId{{0, 1, 0}}));

  // p = 2 clips to one masked axis: predicates pin one axis value each.
  AxisSchema s2 = binary_schema(2);
  auto preds2 = grandparent_groups(s2, GroupId{{1, 0}});
  REQUIRE(preds2.size() == 2);
  CHECK(preds2[0].masked_axes == std::vector<int>{0});
  CHECK(matches(s2, preds2[0], GroupId{{0, 0}}));
  CHECK_FALSE(matches(s2, preds2[0], GroupId{{0, 1}}));

  // p = 4: C(4,2) = 6 predicates.
  AxisSchema s4 = binary_schema(4);
  CHECK(grandparent_groups(s4, GroupId{{0, 0, 0, 0}}).size() == 6);

  AxisSchema s1 = binary_schema(1);
  CHECK_THROWS(grandparent_groups(s1, GroupId{{0}}));
}

TEST_CASE("adversarial group") {
  AxisSchema s = binary_schema(3);
  CHECK(adversarial_group(s, GroupId{{1, 0, 1}}) == GroupId{{0, 1, 0}});
  CHECK(adversarial_group(s, GroupId{{0, 0, 0}}) == GroupId{{1, 1, 1}});

  // involution on random groups
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    GroupId g{{static_cast<int>(rng.uniform_index(2)),
               static_cast<int>(rng.uniform_index(2)),
               static_cast<int>(rng.uniform_index(2))}};
    CHECK(adversarial_group(s, adversarial_group(s, g)) == g);
  }

  AxisSchema mixed({{"a", 2}, {"b", 3}});
  CHECK_THROWS(adversarial_group(mixed, GroupId{{0, 0}}));
}
