#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vecsim/content.hpp"
#include "vecsim/rng.hpp"

namespace vecsim {

// Storage budgets in units of the content size S.
struct CacheBudgets {
  int per_class_units = 0;
  int total_units = 0;
  int classes = 0;
  int per_class = 0;

  // ConfigError unless per_class_units * classes <= total_units and
  // per_class_units <= per_class.
  void validate() const;
};

CacheBudgets budgets_from(const SimConfig& config);

class CacheState {
public:
  CacheState() = default;
  explicit CacheState(const CacheBudgets& budgets, int epoch = 0);

  bool stored(ContentId id) const { return placement_[flat(id)] != 0; }
  void set(ContentId id, bool value) { placement_[flat(id)] = value ? 1 : 0; }

  const CacheBudgets& budgets() const { return budgets_; }
  int epoch() const { return epoch_; }
  void set_epoch(int n) { epoch_ = n; }

  std::vector<int> stored_in_class(int cls) const;
  int stored_count() const;

  // Per-class equality and total inequality on storage.
  bool satisfies_budgets() const;

  friend bool operator==(const CacheState& a, const CacheState& b) {
    return a.placement_ == b.placement_;
  }

private:
  int flat(ContentId id) const { return id.cls * budgets_.per_class + id.index; }

  CacheBudgets budgets_;
  int epoch_ = 0;
  std::vector<std::uint8_t> placement_;
};

// Request and hit counts of one DoI, per CV and aggregate, plus recency.
class RequestHistory {
public:
  RequestHistory() = default;
  RequestHistory(int num_cvs, int classes, int per_class);

  void record(const Request& r, bool hit, int slot);
  void clear();

  int num_cvs() const { return cvs_; }
  int classes() const { return classes_; }
  int per_class() const { return per_class_; }

  int requests(int cv, ContentId id) const { return req_[cv_index(cv, id)]; }
  int hits(int cv, ContentId id) const { return hit_[cv_index(cv, id)]; }
  int aggregate(ContentId id) const { return agg_[content_index(id)]; }
  // Last slot the content was requested in, or -1.
  int last_used(ContentId id) const { return recency_[content_index(id)]; }

private:
  std::size_t cv_index(int cv, ContentId id) const {
    return (static_cast<std::size_t>(cv) * classes_ + id.cls) * per_class_ + id.index;
  }
  std::size_t content_index(ContentId id) const {
    return static_cast<std::size_t>(id.cls) * per_class_ + id.index;
  }

  int cvs_ = 0;
  int classes_ = 0;
  int per_class_ = 0;
  std::vector<int> req_;
  std::vector<int> hit_;
  std::vector<int> agg_;
  std::vector<int> recency_;
};

// Indices of the k largest counts; ties go to the lower index.
std::vector<int> top_k_by_count(const std::vector<int>& counts, int k);
std::vector<int> top_k_by_value(const std::vector<double>& values, int k);

CacheState place_rcr(const CacheBudgets& budgets, Rng& rng);
CacheState place_kpop(const RequestHistory& history, const CacheBudgets& budgets);
CacheState place_klru(const RequestHistory& history, const CacheBudgets& budgets, int swaps = 1);
// `upcoming` holds per-content request counts of the coming DoI, class-major.
CacheState place_genie(const std::vector<int>& upcoming, const CacheBudgets& budgets);

// Hit ratio, or nullopt for a slot without requests.
std::optional<double> chr(int hits, int requests);

struct PlacementRecord {
  int epoch = 0;
  CacheState state;
};

void write_placements(const std::string& path, const std::vector<PlacementRecord>& records,
                      const std::string& fingerprint);

} // namespace vecsim
