#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "vecsim/config.hpp"
#include "vecsim/rng.hpp"

namespace vecsim {

struct ContentId {
  int cls = 0;
  int index = 0;
  friend bool operator==(const ContentId&, const ContentId&) = default;
};

class ContentLibrary {
public:
  ContentLibrary() = default;
  ContentLibrary(int classes, int per_class, int features, double content_size_bits,
                 std::vector<double> features_flat, std::vector<std::vector<double>> popularity);

  int classes() const { return classes_; }
  int per_class() const { return per_class_; }
  int features() const { return features_; }
  double content_size_bits() const { return size_bits_; }

  std::span<const double> feature(ContentId id) const;
  const std::vector<double>& popularity(int cls) const { return popularity_[cls]; }

  // Most cosine-similar other content of the same class (lowest index on ties).
  int most_similar(ContentId id) const { return nearest_[flat(id)]; }
  // Same-class contents other than `id`, most similar first, ties by index.
  const std::vector<int>& similarity_ranking(ContentId id) const { return ranking_[flat(id)]; }

  int flat(ContentId id) const { return id.cls * per_class_ + id.index; }

private:
  void index_similarity();

  int classes_ = 0;
  int per_class_ = 0;
  int features_ = 0;
  double size_bits_ = 0.0;
  std::vector<double> features_flat_;
  std::vector<std::vector<double>> popularity_;
  std::vector<int> nearest_;
  std::vector<std::vector<int>> ranking_;
};

ContentLibrary build_library(const SimConfig& config, Rng& rng);

void to_json(nlohmann::json& j, const ContentLibrary& lib);
ContentLibrary library_from_json(const nlohmann::json& j);

// Cosine similarity of two non-zero vectors; DomainError on a zero vector or
// a length mismatch.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

struct CvPreferenceState {
  double p_request = 1.0;
  double epsilon = 0.0;
  std::vector<double> class_prefs;
  std::optional<ContentId> last_request;
};

std::vector<CvPreferenceState> build_population(const SimConfig& config, int num_classes,
                                                Rng& rng);

struct Request {
  int cv_id = 0;
  ContentId content;
  int arrival_slot = 0;
  int server_deadline = 0;
  int remaining_deadline = 0;
  double remaining_payload = 0.0;
  bool cache_hit = false;
  int extraction_ready_slot = 0;
  std::optional<int> completion_slot;
  int served_slots = 0;
};

struct DeadlineParams {
  int doi_slots = 50;
  int max_delay_slots = 10;
};

// One Bernoulli trial for the CV in slot t. On emission the CV exploits (most
// similar content of its last class) with probability epsilon, otherwise it
// explores a different class and draws a content by global popularity.
// Updates `cv.last_request` on emission.
std::optional<Request> generate_request(CvPreferenceState& cv, int cv_id,
                                        const ContentLibrary& lib, Rng& rng, int slot,
                                        DeadlineParams timing);

// Requests of every slot of an episode, independent of caching and delivery.
using RequestStream = std::vector<std::vector<Request>>;

RequestStream generate_stream(std::vector<CvPreferenceState> population,
                              const ContentLibrary& lib, Rng& rng, int num_slots,
                              DeadlineParams timing);

DeadlineParams timing_from(const SimConfig& config);

// The fixed world every episode of a run shares: library and CV profiles.
struct Environment {
  ContentLibrary library;
  std::vector<CvPreferenceState> population;
};

// Draws the library and population from the config's environment seed.
Environment build_environment(const SimConfig& config);

// Request stream of one episode, keyed by (environment, stream name, index).
RequestStream episode_stream(const SimConfig& config, const Environment& env, std::uint64_t seed,
                             std::string_view name = "requests", std::uint64_t index = 0);

// Upper bound on Pr{sum of independent Bernoulli(p_u) >= xi} via the relative
// entropy of xi/U to the mean probability. Requires mean < xi < U.
double chernoff_bound(std::span<const double> p, double xi);

// Exact tail Pr{Bin(n, p) >= k}.
double binomial_tail(int n, double p, int k);

} // namespace vecsim
