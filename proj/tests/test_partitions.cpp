#include <doctest.h>

#include <map>
#include <set>

#include "cvwit/partitions.hpp"

using namespace cvwit;

TEST_CASE("partition canonical form and helpers") {
  const auto p = Partition::from_blocks({{3, 1}, {0, 2}});
  CHECK(p.to_string() == "[[0,2],[1,3]]");
  CHECK(p.num_modes() == 4);
  CHECK(p.num_blocks() == 2);
  CHECK(p.block_of(0) == 0);
  CHECK(p.block_of(3) == 1);
  CHECK(p.splits_block({0, 1}));
  CHECK(!p.splits_block({0, 2}));
  CHECK(p.young() == std::vector<int>{2, 2});
  CHECK(p.young_string() == "2+2");

  CHECK(Partition::single_block(3).to_string() == "[[0,1,2]]");
  CHECK(Partition::singletons(3).to_string() == "[[0],[1],[2]]");

  CHECK_THROWS_AS(Partition::from_blocks({{0, 1}, {1, 2}}), ValidationError);
  CHECK_THROWS_AS(Partition::from_blocks({{0}, {2}}), ValidationError);
  CHECK_THROWS_AS(Partition::from_blocks({}), ValidationError);
}

TEST_CASE("parse round-trips to_string") {
  for (const auto& text :
       {"[[0,1],[2],[3]]", "[[0],[1],[2]]", "[[0,1,2,3]]", "[[0,2],[1,3]]"}) {
    CHECK(Partition::parse(text).to_string() == text);
  }
  CHECK(Partition::parse("[[2, 0], [1]]").to_string() == "[[0,2],[1]]");
  CHECK_THROWS_AS(Partition::parse("[[0,1],[1]]"), ValidationError);
  CHECK_THROWS_AS(Partition::parse("[[0,x]]"), ValidationError);
}

TEST_CASE("enumerate_partitions counts are the Bell numbers") {
  const int bell[] = {0, 1, 2, 5, 15, 52, 203};
  for (int n = 1; n <= 6; ++n) {
    const auto parts = enumerate_partitions(n);
    CHECK(static_cast<int>(parts.size()) == bell[n]);
    // All distinct and covering n modes.
    std::set<std::string> seen;
    for (const auto& p : parts) {
      CHECK(p.num_modes() == n);
      seen.insert(p.to_string());
    }
    CHECK(static_cast<int>(seen.size()) == bell[n]);
  }
  CHECK_THROWS_AS(enumerate_partitions(0), ValidationError);
  CHECK_THROWS_AS(enumerate_partitions(9), ValidationError);
}

TEST_CASE("N=4 Young class counts are 1,4,3,6,1") {
  std::map<std::string, int> counts;
  for (const auto& p : enumerate_partitions(4)) ++counts[p.young_string()];
  CHECK(counts.size() == 5);
  CHECK(counts["4"] == 1);
  CHECK(counts["3+1"] == 4);
  CHECK(counts["2+2"] == 3);
  CHECK(counts["2+1+1"] == 6);
  CHECK(counts["1+1+1+1"] == 1);
}

TEST_CASE("bipartitions count 2^(N-1)-1") {
  for (int n = 2; n <= 6; ++n) {
    const auto bs = bipartitions(n);
    CHECK(static_cast<int>(bs.size()) == (1 << (n - 1)) - 1);
    for (const auto& b : bs) {
      CHECK(b.num_blocks() == 2);
      CHECK(b.blocks.front().front() == 0);  // canonical: block 0 holds mode 0
    }
  }
  CHECK_THROWS_AS(bipartitions(1), ValidationError);
}

TEST_CASE("target partitions split some entangled block") {
  // Full 3-mode block: every bipartition splits it.
  CHECK(target_partitions(Partition::single_block(3)).size() == 3);
  // Full 4-mode block: all 7 bipartitions.
  CHECK(target_partitions(Partition::single_block(4)).size() == 7);
  // Two pairs: every bipartition except the structure itself.
  const auto pairs = Partition::parse("[[0,1],[2,3]]");
  const auto targets = target_partitions(pairs);
  CHECK(targets.size() == 6);
  for (const auto& t : targets) CHECK(t != pairs);
  // All singletons: nothing to certify.
  CHECK(target_partitions(Partition::singletons(4)).empty());

  // all_splitting mode includes multi-block partitions too.
  const auto all = target_partitions(Partition::single_block(3),
                                     TargetMode::all_splitting);
  CHECK(all.size() == 4);  // every non-single-block partition of 3 modes
}
