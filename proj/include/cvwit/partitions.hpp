#pragma once

#include <string>
#include <vector>

#include "cvwit/fock.hpp"

namespace cvwit {

// A set partition of the mode indices 0..N-1. Canonical form: each block
// sorted ascending, blocks ordered by their smallest element.
struct Partition {
  std::vector<std::vector<int>> blocks;

  static Partition from_blocks(std::vector<std::vector<int>> blocks);
  static Partition single_block(int num_modes);
  static Partition singletons(int num_modes);
  // Parses the serialized form, e.g. "[[0,1],[2],[3]]".
  static Partition parse(const std::string& text);

  int num_modes() const;
  int num_blocks() const { return static_cast<int>(blocks.size()); }
  int block_of(int mode) const;

  // True when the members of `block` land in at least two blocks of *this.
  bool splits_block(const std::vector<int>& block) const;

  // Descending multiset of block sizes (the Young class).
  std::vector<int> young() const;
  std::string young_string() const;  // e.g. "2+1+1"

  std::string to_string() const;
  bool operator==(const Partition&) const = default;
};

// All set partitions of N modes in canonical (restricted-growth-string
// lexicographic) order; count = Bell(N). Supported for 1 <= N <= 8.
std::vector<Partition> enumerate_partitions(int num_modes);

// All 2-block partitions; count = 2^(N-1) - 1. Requires N >= 2.
std::vector<Partition> bipartitions(int num_modes);

enum class TargetMode { bipartitions_splitting, all_splitting };

// Partitions K that split at least one block of `structure`. These are the
// falsifiable partitions for certifying the hypothesized structure; an
// all-singleton structure yields an empty list.
std::vector<Partition> target_partitions(
    const Partition& structure,
    TargetMode mode = TargetMode::bipartitions_splitting);

}  // namespace cvwit
