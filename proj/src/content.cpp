#include "vecsim/content.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vecsim/deadline.hpp"
#include "vecsim/errors.hpp"

namespace vecsim {

ContentLibrary::ContentLibrary(int classes, int per_class, int features,
                               double content_size_bits, std::vector<double> features_flat,
                               std::vector<std::vector<double>> popularity)
    : classes_(classes), per_class_(per_class), features_(features),
      size_bits_(content_size_bits), features_flat_(std::move(features_flat)),
      popularity_(std::move(popularity)) {
  if (classes_ < 1 || per_class_ < 1 || features_ < 1) {
    throw ConfigError("library dimensions must be >= 1");
  }
  if (features_flat_.size() != static_cast<std::size_t>(classes_ * per_class_ * features_)) {
    throw ConfigError("feature matrix has the wrong size");
  }
  if (popularity_.size() != static_cast<std::size_t>(classes_)) {
    throw ConfigError("popularity needs one vector per class");
  }
  for (const auto& row : popularity_) {
    if (row.size() != static_cast<std::size_t>(per_class_)) {
      throw ConfigError("popularity vector has the wrong length");
    }
    double sum = std::accumulate(row.begin(), row.end(), 0.0);
    if (std::abs(sum - 1.0) > 1e-9 ||
        std::any_of(row.begin(), row.end(), [](double p) { return p < 0.0; })) {
      throw ConfigError("popularity vectors must be distributions");
    }
  }
  index_similarity();
}

std::span<const double> ContentLibrary::feature(ContentId id) const {
  return {features_flat_.data() + static_cast<std::size_t>(flat(id)) * features_,
          static_cast<std::size_t>(features_)};
}

void ContentLibrary::index_similarity() {
  const int n = classes_ * per_class_;
  nearest_.assign(n, -1);
  ranking_.assign(n, {});
  for (int c = 0; c < classes_; ++c) {
    for (int f = 0; f < per_class_; ++f) {
      std::vector<std::pair<double, int>> scored;
      for (int g = 0; g < per_class_; ++g) {
        if (g == f) continue;
        scored.emplace_back(cosine_similarity(feature({c, f}), feature({c, g})), g);
      }
      std::stable_sort(scored.begin(), scored.end(),
                       [](const auto& a, const auto& b) { return a.first > b.first; });
      auto& rank = ranking_[flat({c, f})];
      for (const auto& [s, g] : scored) rank.push_back(g);
      nearest_[flat({c, f})] = rank.empty() ? -1 : rank.front();
    }
  }
}

ContentLibrary build_library(const SimConfig& config, Rng& rng) {
  const int C = config.num_classes;
  const int F = config.contents_per_class;
  const int G = config.features_per_content;
  std::vector<double> features(static_cast<std::size_t>(C) * F * G);
  // (0, 1] keeps every vector non-zero.
  for (double& v : features) v = 1.0 - uniform01(rng);
  std::vector<std::vector<double>> popularity(C, std::vector<double>(F));
  for (int c = 0; c < C; ++c) {
    std::vector<int> rank(F);
    std::iota(rank.begin(), rank.end(), 0);
    std::shuffle(rank.begin(), rank.end(), rng);
    double total = 0.0;
    for (int f = 0; f < F; ++f) {
      popularity[c][f] = 1.0 / std::pow(static_cast<double>(rank[f] + 1), config.zipf_exponent);
      total += popularity[c][f];
    }
    for (double& p : popularity[c]) p /= total;
  }
  return ContentLibrary(C, F, G, config.content_size_bits, std::move(features),
                        std::move(popularity));
}

void to_json(nlohmann::json& j, const ContentLibrary& lib) {
  nlohmann::json feats = nlohmann::json::array();
  for (int c = 0; c < lib.classes(); ++c) {
    for (int f = 0; f < lib.per_class(); ++f) {
      auto v = lib.feature({c, f});
      feats.push_back(std::vector<double>(v.begin(), v.end()));
    }
  }
  nlohmann::json pop = nlohmann::json::array();
  for (int c = 0; c < lib.classes(); ++c) pop.push_back(lib.popularity(c));
  j = {{"classes", lib.classes()},
       {"per_class", lib.per_class()},
       {"features_per_content", lib.features()},
       {"content_size_bits", lib.content_size_bits()},
       {"features", feats},
       {"popularity", pop}};
}

ContentLibrary library_from_json(const nlohmann::json& j) {
  try {
    const int C = j.at("classes").get<int>();
    const int F = j.at("per_class").get<int>();
    const int G = j.at("features_per_content").get<int>();
    std::vector<double> flat;
    for (const auto& row : j.at("features")) {
      auto v = row.get<std::vector<double>>();
      if (v.size() != static_cast<std::size_t>(G)) throw ConfigError("feature row length");
      flat.insert(flat.end(), v.begin(), v.end());
    }
    return ContentLibrary(C, F, G, j.at("content_size_bits").get<double>(), std::move(flat),
                          j.at("popularity").get<std::vector<std::vector<double>>>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed library JSON: ") + e.what());
  }
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DomainError("cosine similarity of vectors of unequal length");
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw DomainError("cosine similarity of a zero vector");
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<CvPreferenceState> build_population(const SimConfig& config, int num_classes,
                                                Rng& rng) {
  std::vector<CvPreferenceState> out(config.num_cvs);
  std::exponential_distribution<double> expo(1.0);
  for (auto& cv : out) {
    cv.p_request = config.p_request_min +
                   (config.p_request_max - config.p_request_min) * (1.0 - uniform01(rng));
    cv.epsilon = config.epsilon_min_cv +
                 (config.epsilon_max_cv - config.epsilon_min_cv) * uniform01(rng);
    // Flat Dirichlet draw for the categorical class preference.
    cv.class_prefs.resize(num_classes);
    double total = 0.0;
    for (double& w : cv.class_prefs) {
      w = expo(rng) + 1e-12;
      total += w;
    }
    for (double& w : cv.class_prefs) w /= total;
  }
  return out;
}

namespace {

// Inverse-CDF draw over non-negative weights restricted to `allowed`.
int draw_categorical(const std::vector<double>& weights, double u,
                     const std::vector<bool>* allowed = nullptr) {
  double total = 0.0;
  int last = -1;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (allowed && !(*allowed)[i]) continue;
    total += weights[i];
    if (weights[i] > 0.0) last = static_cast<int>(i);
  }
  if (last < 0) {
    // No mass left: fall back to the first allowed entry.
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (!allowed || (*allowed)[i]) return static_cast<int>(i);
    }
    return 0;
  }
  double target = u * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (allowed && !(*allowed)[i]) continue;
    acc += weights[i];
    if (target < acc) return static_cast<int>(i);
  }
  return last;
}

} // namespace

std::optional<Request> generate_request(CvPreferenceState& cv, int cv_id,
                                        const ContentLibrary& lib, Rng& rng, int slot,
                                        DeadlineParams timing) {
  if (uniform01(rng) >= cv.p_request) return std::nullopt;

  ContentId chosen;
  bool exploit = false;
  if (cv.last_request) {
    exploit = uniform01(rng) < cv.epsilon;
    if (exploit && lib.most_similar(*cv.last_request) < 0) exploit = false;
  }
  if (exploit) {
    chosen = {cv.last_request->cls, lib.most_similar(*cv.last_request)};
  } else {
    std::vector<bool> allowed(lib.classes(), true);
    if (cv.last_request && lib.classes() > 1) allowed[cv.last_request->cls] = false;
    chosen.cls = draw_categorical(cv.class_prefs, uniform01(rng), &allowed);
    chosen.index = draw_categorical(lib.popularity(chosen.cls), uniform01(rng));
  }
  cv.last_request = chosen;

  Request r;
  r.cv_id = cv_id;
  r.content = chosen;
  r.arrival_slot = slot;
  r.server_deadline = server_deadline(slot, timing.doi_slots, timing.max_delay_slots);
  r.remaining_deadline = r.server_deadline;
  r.remaining_payload = lib.content_size_bits();
  r.extraction_ready_slot = slot;
  return r;
}

RequestStream generate_stream(std::vector<CvPreferenceState> population,
                              const ContentLibrary& lib, Rng& rng, int num_slots,
                              DeadlineParams timing) {
  RequestStream stream(num_slots);
  for (int t = 0; t < num_slots; ++t) {
    for (std::size_t u = 0; u < population.size(); ++u) {
      if (auto r = generate_request(population[u], static_cast<int>(u), lib, rng, t, timing)) {
        stream[t].push_back(*r);
      }
    }
  }
  return stream;
}

double chernoff_bound(std::span<const double> p, double xi) {
  if (p.empty()) throw DomainError("chernoff bound needs at least one probability");
  const double U = static_cast<double>(p.size());
  double mu = 0.0;
  for (double pu : p) {
    if (!(pu > 0.0 && pu <= 1.0)) throw DomainError("request probabilities must lie in (0, 1]");
    mu += pu;
  }
  if (!(xi > mu && xi < U)) {
    throw DomainError("chernoff bound requires mean < xi < U");
  }
  const double pbar = mu / U;
  const double chi = xi / U;
  const double d = chi * std::log(chi / pbar) + (1.0 - chi) * std::log((1.0 - chi) / (1.0 - pbar));
  return std::exp(-U * d);
}

double binomial_tail(int n, double p, int k) {
  if (k <= 0) return 1.0;
  if (k > n) return 0.0;
  // C(n, i) built multiplicatively; exact in double for the n used here.
  double coef = 1.0;
  for (int i = 0; i < k; ++i) coef = coef * (n - i) / (i + 1);
  double total = 0.0;
  for (int i = k; i <= n; ++i) {
    total += coef * std::pow(p, i) * std::pow(1.0 - p, n - i);
    coef = coef * (n - i) / (i + 1);
  }
  return total;
}

DeadlineParams timing_from(const SimConfig& config) {
  return {config.doi_slots, config.max_delay_slots};
}

Environment build_environment(const SimConfig& config) {
  Environment env;
  Rng lib_rng = substream(config.env_seed, "library");
  env.library = build_library(config, lib_rng);
  Rng pop_rng = substream(config.env_seed, "population");
  env.population = build_population(config, config.num_classes, pop_rng);
  return env;
}

RequestStream episode_stream(const SimConfig& config, const Environment& env, std::uint64_t seed,
                             std::string_view name, std::uint64_t index) {
  Rng rng = substream(seed, name, index);
  return generate_stream(env.population, env.library, rng, config.episode_slots,
                         timing_from(config));
}

} // namespace vecsim
