#include "vecsim/cache.hpp"

#include <algorithm>
#include <numeric>

#include "vecsim/csv.hpp"
#include "vecsim/errors.hpp"

namespace vecsim {

void CacheBudgets::validate() const {
  if (per_class_units < 0 || total_units < 0) throw ConfigError("cache budgets must be >= 0");
  if (per_class_units * classes > total_units) {
    throw ConfigError("per-class budgets exceed the total cache size");
  }
  if (per_class_units > per_class) throw ConfigError("per-class budget exceeds the class size");
}

CacheBudgets budgets_from(const SimConfig& config) {
  CacheBudgets b{config.per_class_units(), config.cache_size_units, config.num_classes,
                 config.contents_per_class};
  b.validate();
  return b;
}

CacheState::CacheState(const CacheBudgets& budgets, int epoch)
    : budgets_(budgets), epoch_(epoch),
      placement_(static_cast<std::size_t>(budgets.classes) * budgets.per_class, 0) {}

std::vector<int> CacheState::stored_in_class(int cls) const {
  std::vector<int> out;
  for (int f = 0; f < budgets_.per_class; ++f) {
    if (stored({cls, f})) out.push_back(f);
  }
  return out;
}

int CacheState::stored_count() const {
  return static_cast<int>(std::count(placement_.begin(), placement_.end(), 1));
}

bool CacheState::satisfies_budgets() const {
  for (int c = 0; c < budgets_.classes; ++c) {
    if (static_cast<int>(stored_in_class(c).size()) != budgets_.per_class_units) return false;
  }
  return stored_count() <= budgets_.total_units;
}

RequestHistory::RequestHistory(int num_cvs, int classes, int per_class)
    : cvs_(num_cvs), classes_(classes), per_class_(per_class),
      req_(static_cast<std::size_t>(num_cvs) * classes * per_class, 0),
      hit_(req_.size(), 0), agg_(static_cast<std::size_t>(classes) * per_class, 0),
      recency_(agg_.size(), -1) {}

void RequestHistory::record(const Request& r, bool hit, int slot) {
  ++req_[cv_index(r.cv_id, r.content)];
  if (hit) ++hit_[cv_index(r.cv_id, r.content)];
  ++agg_[content_index(r.content)];
  recency_[content_index(r.content)] = std::max(recency_[content_index(r.content)], slot);
}

void RequestHistory::clear() {
  std::fill(req_.begin(), req_.end(), 0);
  std::fill(hit_.begin(), hit_.end(), 0);
  std::fill(agg_.begin(), agg_.end(), 0);
  std::fill(recency_.begin(), recency_.end(), -1);
}

std::vector<int> top_k_by_count(const std::vector<int>& counts, int k) {
  std::vector<int> idx(counts.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return counts[a] > counts[b]; });
  idx.resize(std::min<std::size_t>(idx.size(), static_cast<std::size_t>(k)));
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::vector<int> top_k_by_value(const std::vector<double>& values, int k) {
  std::vector<int> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return values[a] > values[b]; });
  idx.resize(std::min<std::size_t>(idx.size(), static_cast<std::size_t>(k)));
  std::sort(idx.begin(), idx.end());
  return idx;
}

CacheState place_rcr(const CacheBudgets& budgets, Rng& rng) {
  budgets.validate();
  CacheState state(budgets);
  for (int c = 0; c < budgets.classes; ++c) {
    std::vector<int> pool(budgets.per_class);
    std::iota(pool.begin(), pool.end(), 0);
    // Partial Fisher-Yates: the first k entries form a uniform k-subset.
    for (int i = 0; i < budgets.per_class_units; ++i) {
      std::uniform_int_distribution<int> pick(i, budgets.per_class - 1);
      std::swap(pool[i], pool[pick(rng)]);
      state.set({c, pool[i]}, true);
    }
  }
  return state;
}

namespace {

std::vector<int> class_counts(const RequestHistory& h, int cls) {
  std::vector<int> counts(h.per_class());
  for (int f = 0; f < h.per_class(); ++f) counts[f] = h.aggregate({cls, f});
  return counts;
}

} // namespace

CacheState place_kpop(const RequestHistory& history, const CacheBudgets& budgets) {
  budgets.validate();
  CacheState state(budgets);
  for (int c = 0; c < budgets.classes; ++c) {
    for (int f : top_k_by_count(class_counts(history, c), budgets.per_class_units)) {
      state.set({c, f}, true);
    }
  }
  return state;
}

CacheState place_klru(const RequestHistory& history, const CacheBudgets& budgets, int swaps) {
  CacheState state = place_kpop(history, budgets);
  const int k = budgets.per_class_units;
  for (int c = 0; c < budgets.classes; ++c) {
    auto counts = class_counts(history, c);
    // K-PoP members, least popular first (ties: the later index is the one
    // K-PoP ranked last).
    std::vector<int> victims = state.stored_in_class(c);
    std::stable_sort(victims.begin(), victims.end(), [&](int a, int b) {
      if (counts[a] != counts[b]) return counts[a] < counts[b];
      return a > b;
    });
    // Recently used contents outside K-PoP, most recent first.
    std::vector<int> fresh;
    for (int f = 0; f < budgets.per_class; ++f) {
      if (!state.stored({c, f}) && history.last_used({c, f}) >= 0) fresh.push_back(f);
    }
    std::stable_sort(fresh.begin(), fresh.end(), [&](int a, int b) {
      return history.last_used({c, a}) > history.last_used({c, b});
    });
    const int n = std::min({swaps, k, static_cast<int>(fresh.size())});
    for (int i = 0; i < n; ++i) {
      state.set({c, victims[i]}, false);
      state.set({c, fresh[i]}, true);
    }
  }
  return state;
}

CacheState place_genie(const std::vector<int>& upcoming, const CacheBudgets& budgets) {
  budgets.validate();
  if (upcoming.size() != static_cast<std::size_t>(budgets.classes * budgets.per_class)) {
    throw ContractViolation("genie counts do not match the library size");
  }
  CacheState state(budgets);
  for (int c = 0; c < budgets.classes; ++c) {
    std::vector<int> counts(upcoming.begin() + c * budgets.per_class,
                            upcoming.begin() + (c + 1) * budgets.per_class);
    for (int f : top_k_by_count(counts, budgets.per_class_units)) state.set({c, f}, true);
  }
  return state;
}

std::optional<double> chr(int hits, int requests) {
  if (hits < 0 || hits > requests) throw ContractViolation("hits must lie in [0, requests]");
  if (requests == 0) return std::nullopt;
  return static_cast<double>(hits) / requests;
}

void write_placements(const std::string& path, const std::vector<PlacementRecord>& records,
                      const std::string& fingerprint) {
  CsvWriter w(path, fingerprint, {"epoch", "class", "content", "stored"});
  for (const auto& rec : records) {
    const auto& b = rec.state.budgets();
    for (int c = 0; c < b.classes; ++c) {
      for (int f = 0; f < b.per_class; ++f) {
        w.field(rec.epoch).field(c).field(f).field(rec.state.stored({c, f}) ? 1 : 0);
        w.end_row();
      }
    }
  }
}

} // namespace vecsim
