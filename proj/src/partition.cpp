#include "vecsim/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "vecsim/errors.hpp"

namespace vecsim {

std::uint64_t stirling2(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  if (n == 0) return 1; // S(0, 0)
  if (k == 0) return 0;
  __int128 sum = 0;
  __int128 binom = 1; // C(k, j)
  for (int j = 0; j <= k; ++j) {
    __int128 power = 1;
    for (int i = 0; i < n; ++i) power *= (k - j);
    sum += (j % 2 == 0 ? 1 : -1) * binom * power;
    binom = binom * (k - j) / (j + 1);
  }
  __int128 factorial = 1;
  for (int i = 2; i <= k; ++i) factorial *= i;
  return static_cast<std::uint64_t>(sum / factorial);
}

namespace {

// Restricted growth strings a[0..n-1] with a[0] = 0, a[i] <= max(a[0..i-1]) + 1,
// using exactly k labels.
void rgs(int n, int k, int pos, int used, std::vector<int>& a,
         std::vector<std::vector<int>>& out) {
  if (n - pos < k - used) return; // not enough positions left to open blocks
  if (pos == n) {
    if (used == k) out.push_back(a);
    return;
  }
  for (int label = 0; label <= std::min(used, k - 1); ++label) {
    a[pos] = label;
    rgs(n, k, pos + 1, std::max(used, label + 1), a, out);
  }
}

} // namespace

std::vector<VcConfiguration> enumerate_partitions(int num_aps, int num_blocks) {
  if (num_blocks < 1 || num_blocks > num_aps) {
    throw DomainError("partition block count " + std::to_string(num_blocks) +
                      " outside [1, " + std::to_string(num_aps) + "]");
  }
  std::vector<std::vector<int>> strings;
  std::vector<int> a(num_aps, 0);
  rgs(num_aps, num_blocks, 0, 0, a, strings);

  std::vector<VcConfiguration> out;
  out.reserve(strings.size() * static_cast<std::size_t>(std::tgamma(num_blocks + 1) + 0.5));
  std::vector<int> perm(num_blocks);
  for (const auto& s : strings) {
    std::iota(perm.begin(), perm.end(), 0);
    do {
      // Ordered block i holds the unordered block perm[i].
      std::vector<int> slot_of_label(num_blocks);
      for (int i = 0; i < num_blocks; ++i) slot_of_label[perm[i]] = i;
      VcConfiguration cfg;
      cfg.blocks.assign(num_blocks, {});
      cfg.block_of_ap.resize(num_aps);
      for (int b = 0; b < num_aps; ++b) {
        int i = slot_of_label[s[b]];
        cfg.blocks[i].push_back(b);
        cfg.block_of_ap[b] = i;
      }
      out.push_back(std::move(cfg));
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return out;
}

const std::vector<VcConfiguration>& PartitionCache::get(int num_aps, int num_blocks) {
  auto key = std::make_pair(num_aps, num_blocks);
  auto it = cache_.find(key);
  if (it == cache_.end()) {
    it = cache_.emplace(key, enumerate_partitions(num_aps, num_blocks)).first;
  }
  return it->second;
}

} // namespace vecsim
