#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <map>
#include <set>

#include "fairgen/dataset.hpp"
#include "fairgen/text_io.hpp"

using namespace fairgen;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  fs::path dir = fs::temp_directory_path() / "fairgen_dataset_test";
  fs::create_directories(dir);
  return dir;
}

void write_schema3(const fs::path& path, int d = 2) {
  std::string body;
  for (int i = 0; i < 3; ++i)
    body += "axis." + std::to_string(i) + ".name = a" + std::to_string(i) +
            "\naxis." + std::to_string(i) + ".cardinality = 2\n";
  body += "feature_dim = " + std::to_string(d) + "\nnum_labels = 2\n";
  write_text_file(path, body);
}

Dataset random_dataset(int p, int d, int per_cell_max, Rng& rng) {
  std::vector<Axis> axes;
  for (int i = 0; i < p; ++i)
    axes.push_back({"a" + std::to_string(i), 2});
  AxisSchema schema(std::move(axes));
  std::vector<Record> records;
  for (int code = 0; code < schema.num_groups(); ++code)
    for (int k = 0; k < 2; ++k) {
      std::size_t n = rng.uniform_index(per_cell_max + 1);  // may be empty
      for (std::size_t i = 0; i < n; ++i) {
        Record r;
        r.label = k;
        r.group = schema.group_from_code(code);
        r.features.resize(d);
        for (float& f : r.features)
          f = static_cast<float>(rng.normal());
        records.push_back(std::move(r));
      }
    }
  return Dataset(std::move(schema), d, 2, std::move(records));
}

}  // namespace

TEST_CASE("load_dataset parses valid files and indexes them") {
  fs::path dir = temp_dir();
  write_schema3(dir / "s.txt");
  write_text_file(dir / "d.tsv",
                  "0\t0,0,0\t1.5,-2\n"
                  "1\t0,1,0\t0,3.25\n"
                  "1\t1,1,1\t-1,0.5\n"
                  "0\t0,0,0\t2,2\n");
  Dataset ds = load_dataset(dir / "d.tsv", dir / "s.txt");
  CHECK(ds.size() == 4);
  CHECK(ds.num_nonempty_cells() <= 8);
  CHECK(ds.cell(GroupId{{0, 0, 0}}, 0).size() == 2);
  CHECK(ds.cell(GroupId{{1, 1, 1}}, 1).size() == 1);
}

TEST_CASE("load_dataset rejects malformed lines with position info") {
  fs::path dir = temp_dir();
  write_schema3(dir / "s.txt");

  write_text_file(dir / "bad_attr.tsv", "0\t0,0,0\t1,2\n0\t0,2,0\t1,2\n");
  try {
    load_dataset(dir / "bad_attr.tsv", dir / "s.txt");
    FAIL("expected error");
  } catch (const std::exception& ex) {
    std::string msg = ex.what();
    CHECK(msg.find(":2") != std::string::npos);      // line number
    CHECK(msg.find("axis 1") != std::string::npos);  // offending axis
  }

  write_text_file(dir / "bad_label.tsv", "3\t0,0,0\t1,2\n");
  CHECK_THROWS(load_dataset(dir / "bad_label.tsv", dir / "s.txt"));

  write_text_file(dir / "bad_dim.tsv", "0\t0,0,0\t1,2,3\n");
  CHECK_THROWS(load_dataset(dir / "bad_dim.tsv", dir / "s.txt"));

  CHECK_THROWS(load_dataset(dir / "missing.tsv", dir / "s.txt"));
}

TEST_CASE("write/load round trip is lossless") {
  Rng rng(5);
  Dataset ds = random_dataset(3, 4, 6, rng);
  fs::path dir = temp_dir();
  write_dataset(ds, dir / "rt.tsv", dir / "rt_schema.txt");
  Dataset back = load_dataset(dir / "rt.tsv", dir / "rt_schema.txt");
  REQUIRE(back.size() == ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i)
    CHECK(back.record(i) == ds.record(i));
}

TEST_CASE("members: parents contain the child, intersection recovers it") {
  Rng rng(7);
  Dataset ds = random_dataset(3, 2, 5, rng);
  for (int code = 0; code < ds.schema().num_groups(); ++code) {
    GroupId g = ds.schema().group_from_code(code);
    auto own = ds.members(g);
    std::set<std::int64_t> expect(own.begin(), own.end());

    std::set<std::int64_t> intersection;
    bool first = true;
    for (const ParentGroupId& parent : parent_groups(ds.schema(), g)) {
      auto mem = ds.members(parent);
      std::set<std::int64_t> mset(mem.begin(), mem.end());
      for (std::int64_t pos : own)
        CHECK(mset.count(pos) == 1);  // subset
      if (first) {
        intersection = mset;
        first = false;
      } else {
        std::set<std::int64_t> keep;
        for (std::int64_t pos : intersection)
          if (mset.count(pos))
            keep.insert(pos);
        intersection = std::move(keep);
      }
    }
    CHECK(intersection == expect);
  }
}

TEST_CASE("members label filter partitions the group") {
  Rng rng(9);
  Dataset ds = random_dataset(2, 2, 6, rng);
  for (int code = 0; code < ds.schema().num_groups(); ++code) {
    GroupId g = ds.schema().group_from_code(code);
    auto all = ds.members(g);
    std::vector<std::int64_t> unioned;
    for (int k = 0; k < ds.num_labels(); ++k) {
      auto part = ds.members(g, k);
      unioned.insert(unioned.end(), part.begin(), part.end());
    }
    std::sort(unioned.begin(), unioned.end());
    CHECK(unioned == all);
  }
}

TEST_CASE("sample_with_replacement basics") {
  std::vector<std::int64_t> one{42};
  Rng rng(3);
  auto out = sample_with_replacement(one, 5, rng);
  CHECK(out == std::vector<std::int64_t>(5, 42));

  std::vector<std::int64_t> pool{1, 2, 3, 4};
  Rng a(11), b(11);
  CHECK(sample_with_replacement(pool, 50, a) == sample_with_replacement(pool, 50, b));

  CHECK_THROWS(sample_with_replacement({}, 3, rng));
}

TEST_CASE("sample_with_replacement is uniform (chi-square)") {
  std::vector<std::int64_t> pool;
  for (int i = 0; i < 10; ++i)
    pool.push_back(i);
  Rng rng(123);
  const int n = 100000;
  auto draws = sample_with_replacement(pool, n, rng);
  std::vector<int> counts(10, 0);
  for (std::int64_t v : draws)
    ++counts[v];
  double expected = n / 10.0;
  double chi2 = 0.0;
  for (int c : counts)
    chi2 += (c - expected) * (c - expected) / expected;
  // df = 9, significance 0.001
  CHECK(chi2 < 27.877164871256568);
}

TEST_CASE("equal_sample produces exactly flat cells") {
  AxisSchema schema({{"a", 2}});
  std::vector<Record> recs;
  auto add = [&](int group, int label, int count) {
    for (int i = 0; i < count; ++i)
      recs.push_back({{static_cast<float>(i)}, label, GroupId{{group}}});
  };
  add(0, 0, 3);
  add(1, 0, 10);
  add(0, 1, 5);
  Dataset ds(schema, 1, 2, std::move(recs));

  Rng rng(21);
  Dataset out = equal_sample(ds, 5, rng);
  CHECK(out.cell(GroupId{{0}}, 0).size() == 5);
  CHECK(out.cell(GroupId{{1}}, 0).size() == 5);
  CHECK(out.cell(GroupId{{0}}, 1).size() == 5);
  CHECK(out.cell(GroupId{{1}}, 1).empty());  // empty cells stay skipped
  CHECK(out.size() == 15);
}

TEST_CASE("equal_sample at min cell size undersamples without duplicates") {
  AxisSchema schema({{"a", 2}});
  std::vector<Record> recs;
  for (int i = 0; i < 3; ++i)
    recs.push_back({{static_cast<float>(i)}, 0, GroupId{{0}}});
  for (int i = 0; i < 12; ++i)
    recs.push_back({{static_cast<float>(100 + i)}, 0, GroupId{{1}}});
  Dataset ds(schema, 1, 2, std::move(recs));

  Rng rng(33);
  Dataset out = equal_sample(ds, 3, rng);
  auto big = out.cell(GroupId{{1}}, 0);
  REQUIRE(big.size() == 3);
  std::set<float> values;
  for (std::int64_t pos : big)
    values.insert(out.record(pos).features[0]);
  CHECK(values.size() == 3);  // distinct records
}

TEST_CASE("equal_sample histogram is flat on a random dataset") {
  Rng rng(55);
  Dataset ds = random_dataset(3, 2, 9, rng);
  Rng sampler(56);
  Dataset out = equal_sample(ds, 4, sampler);
  for (int code = 0; code < ds.schema().num_groups(); ++code)
    for (int k = 0; k < 2; ++k) {
      std::size_t before = ds.cell_by_code(code, k).size();
      std::size_t after = out.cell_by_code(code, k).size();
      CHECK(after == (before == 0 ? 0u : 4u));
    }

  AxisSchema schema({{"a", 2}});
  CHECK_THROWS(equal_sample(Dataset(schema, 1, 2, {}), 3, sampler));
}

TEST_CASE("restrict_axes") {
  Rng rng(77);
  Dataset ds = random_dataset(4, 2, 4, rng);

  // keep-all is the identity
  Dataset same = restrict_axes(ds, {0, 1, 2, 3});
  CHECK(same.schema() == ds.schema());
  REQUIRE(same.size() == ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i)
    CHECK(same.record(i) == ds.record(i));

  // 4 -> 2 binary axes: 16 -> 4 groups
  Dataset half = restrict_axes(ds, {0, 1});
  CHECK(half.schema().num_groups() == 4);

  // restricted group sizes are sums of child group sizes
  for (int code = 0; code < half.schema().num_groups(); ++code) {
    GroupId g2 = half.schema().group_from_code(code);
    std::size_t sum = 0;
    for (int child = 0; child < ds.schema().num_groups(); ++child) {
      GroupId g4 = ds.schema().group_from_code(child);
      if (g4.values[0] == g2.values[0] && g4.values[1] == g2.values[1])
        sum += ds.members(g4).size();
    }
    CHECK(half.members(g2).size() == sum);
  }

  CHECK_THROWS(restrict_axes(ds, {}));
  CHECK_THROWS(restrict_axes(ds, {0, 0}));
  CHECK_THROWS(restrict_axes(ds, {7}));
}
