#include "cvwit/partitions.hpp"

#include <algorithm>
#include <sstream>

namespace cvwit {

Partition Partition::from_blocks(std::vector<std::vector<int>> blocks) {
  if (blocks.empty()) throw ValidationError("Partition: no blocks");
  for (auto& b : blocks) {
    if (b.empty()) throw ValidationError("Partition: empty block");
    std::sort(b.begin(), b.end());
  }
  std::sort(blocks.begin(), blocks.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });

  std::vector<int> all;
  for (const auto& b : blocks) all.insert(all.end(), b.begin(), b.end());
  std::sort(all.begin(), all.end());
  for (size_t i = 0; i < all.size(); ++i)
    if (all[i] != static_cast<int>(i))
      throw ValidationError("Partition: blocks must disjointly cover 0..N-1");

  return Partition{std::move(blocks)};
}

Partition Partition::single_block(int num_modes) {
  std::vector<int> b(num_modes);
  for (int i = 0; i < num_modes; ++i) b[i] = i;
  return Partition{{b}};
}

Partition Partition::singletons(int num_modes) {
  std::vector<std::vector<int>> blocks;
  for (int i = 0; i < num_modes; ++i) blocks.push_back({i});
  return Partition{std::move(blocks)};
}

int Partition::num_modes() const {
  int n = 0;
  for (const auto& b : blocks) n += static_cast<int>(b.size());
  return n;
}

int Partition::block_of(int mode) const {
  for (size_t i = 0; i < blocks.size(); ++i)
    if (std::binary_search(blocks[i].begin(), blocks[i].end(), mode))
      return static_cast<int>(i);
  throw ValidationError("Partition: mode not covered");
}

bool Partition::splits_block(const std::vector<int>& block) const {
  if (block.empty()) return false;
  const int first = block_of(block.front());
  for (int m : block)
    if (block_of(m) != first) return true;
  return false;
}

std::vector<int> Partition::young() const {
  std::vector<int> sizes;
  for (const auto& b : blocks) sizes.push_back(static_cast<int>(b.size()));
  std::sort(sizes.rbegin(), sizes.rend());
  return sizes;
}

std::string Partition::young_string() const {
  std::ostringstream os;
  const auto sizes = young();
  for (size_t i = 0; i < sizes.size(); ++i) {
    if (i) os << '+';
    os << sizes[i];
  }
  return os.str();
}

std::string Partition::to_string() const {
  std::ostringstream os;
  os << '[';
  for (size_t i = 0; i < blocks.size(); ++i) {
    if (i) os << ',';
    os << '[';
    for (size_t j = 0; j < blocks[i].size(); ++j) {
      if (j) os << ',';
      os << blocks[i][j];
    }
    os << ']';
  }
  os << ']';
  return os.str();
}

Partition Partition::parse(const std::string& text) {
  std::vector<std::vector<int>> blocks;
  std::vector<int> cur;
  int depth = 0;
  std::string num;
  auto flush_num = [&] {
    if (!num.empty()) {
      cur.push_back(std::stoi(num));
      num.clear();
    }
  };
  for (char ch : text) {
    if (ch == '[') {
      ++depth;
      if (depth == 2) cur.clear();
    } else if (ch == ']') {
      flush_num();
      if (depth == 2) blocks.push_back(cur);
      --depth;
    } else if (ch == ',') {
      flush_num();
    } else if (ch >= '0' && ch <= '9') {
      num.push_back(ch);
    } else if (ch != ' ') {
      throw ValidationError("Partition::parse: unexpected character");
    }
  }
  if (depth != 0) throw ValidationError("Partition::parse: unbalanced brackets");
  return from_blocks(std::move(blocks));
}

std::vector<Partition> enumerate_partitions(int num_modes) {
  if (num_modes < 1 || num_modes > 8)
    throw ValidationError("enumerate_partitions: N must be in 1..8");

  // Restricted growth strings in lexicographic order yield the canonical
  // ordering directly.
  std::vector<Partition> out;
  std::vector<int> rgs(num_modes, 0);
  while (true) {
    int max_label = 0;
    for (int v : rgs) max_label = std::max(max_label, v);
    std::vector<std::vector<int>> blocks(max_label + 1);
    for (int i = 0; i < num_modes; ++i) blocks[rgs[i]].push_back(i);
    out.push_back(Partition{std::move(blocks)});

    // Next RGS: rightmost position that can be incremented.
    int i = num_modes - 1;
    for (; i > 0; --i) {
      int prefix_max = 0;
      for (int j = 0; j < i; ++j) prefix_max = std::max(prefix_max, rgs[j]);
      if (rgs[i] <= prefix_max) break;
    }
    if (i == 0) break;
    ++rgs[i];
    std::fill(rgs.begin() + i + 1, rgs.end(), 0);
  }
  return out;
}

std::vector<Partition> bipartitions(int num_modes) {
  if (num_modes < 2)
    throw ValidationError("bipartitions: need at least two modes");
  std::vector<Partition> out;
  const unsigned full = (1u << num_modes) - 1;
  // Subsets containing mode 0, excluding the full set; each bipartition
  // appears exactly once.
  for (unsigned mask = 1; mask < full; mask += 2) {
    std::vector<int> a, b;
    for (int m = 0; m < num_modes; ++m)
      ((mask >> m) & 1u ? a : b).push_back(m);
    out.push_back(Partition::from_blocks({a, b}));
  }
  return out;
}

std::vector<Partition> target_partitions(const Partition& structure,
                                         TargetMode mode) {
  const int n = structure.num_modes();
  std::vector<Partition> candidates;
  if (mode == TargetMode::bipartitions_splitting) {
    if (n >= 2) candidates = bipartitions(n);
  } else {
    candidates = enumerate_partitions(n);
  }
  std::vector<Partition> out;
  for (auto& k : candidates) {
    bool splits = false;
    for (const auto& b : structure.blocks)
      if (b.size() >= 2 && k.splits_block(b)) {
        splits = true;
        break;
      }
    if (splits) out.push_back(std::move(k));
  }
  return out;
}

}  // namespace cvwit
