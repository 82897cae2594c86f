#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace vecsim {

// An ordered partition of the AP set into W non-empty, disjoint blocks whose
// union is the whole set. Block i serves the i-th scheduled CV.
struct VcConfiguration {
  std::vector<std::vector<int>> blocks;
  std::vector<int> block_of_ap;

  int size() const { return static_cast<int>(blocks.size()); }
  friend bool operator==(const VcConfiguration&, const VcConfiguration&) = default;
};

// Second-kind Stirling number by inclusion-exclusion over j = 0..W.
std::uint64_t stirling2(int n, int k);

// All W! * S(B, W) ordered partitions of {0..B-1}. Unordered partitions come
// in restricted-growth-string order; each is followed by its label
// permutations in lexicographic order. DomainError unless 1 <= W <= B.
std::vector<VcConfiguration> enumerate_partitions(int num_aps, int num_blocks);

// Memoises enumerate_partitions per (B, W) for the lifetime of a run.
class PartitionCache {
public:
  const std::vector<VcConfiguration>& get(int num_aps, int num_blocks);

private:
  std::map<std::pair<int, int>, std::vector<VcConfiguration>> cache_;
};

} // namespace vecsim
