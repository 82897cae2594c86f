#include "vecsim/validate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

#include "vecsim/agent.hpp"
#include "vecsim/cache.hpp"
#include "vecsim/content.hpp"
#include "vecsim/hungarian.hpp"
#include "vecsim/partition.hpp"
#include "vecsim/qnet.hpp"
#include "vecsim/radio.hpp"
#include "vecsim/scheduler.hpp"

namespace vecsim {

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string matrix_text(const WeightMatrix& w) {
  std::ostringstream os;
  os.precision(17);
  os << "[";
  for (int r = 0; r < w.rows; ++r) {
    os << (r ? ", [" : "[");
    for (int c = 0; c < w.cols; ++c) os << (c ? ", " : "") << w(r, c);
    os << "]";
  }
  os << "]";
  return os.str();
}

SuiteResult timed(const std::string& name, const std::function<void(SuiteResult&)>& body) {
  SuiteResult r;
  r.name = name;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

// Best row-order sum over every assignment of rows to distinct columns or to
// nothing. Rows with no column add nothing, so the sum order matches the
// Hungarian weight of the same matching.
double brute_force_matching(const WeightMatrix& w) {
  std::vector<int> col(w.rows, -1);
  std::vector<char> taken(w.cols, 0);
  double best = 0.0;
  std::function<void(int)> rec = [&](int r) {
    if (r == w.rows) {
      double s = 0.0;
      for (int i = 0; i < w.rows; ++i) {
        if (col[i] >= 0) s += w(i, col[i]);
      }
      best = std::max(best, s);
      return;
    }
    col[r] = -1;
    rec(r + 1);
    for (int c = 0; c < w.cols; ++c) {
      if (taken[c]) continue;
      taken[c] = 1;
      col[r] = c;
      rec(r + 1);
      taken[c] = 0;
    }
    col[r] = -1;
  };
  rec(0);
  return best;
}

} // namespace

SuiteResult suite_hungarian(int matrices, int n, std::uint64_t seed) {
  return timed("hungarian-vs-permutations", [&](SuiteResult& r) {
    Rng rng = substream(seed, "validate-hungarian");
    std::uniform_real_distribution<double> u(0.0, 100.0);
    HungarianSolver solver;
    std::vector<int> assignment;
    std::vector<int> perm(n);
    for (int k = 0; k < matrices; ++k) {
      WeightMatrix w(n, n);
      for (double& x : w.data) x = u(rng);
      std::iota(perm.begin(), perm.end(), 0);
      double best = -1.0;
      do {
        best = std::max(best, matching_weight(w, perm));
      } while (std::next_permutation(perm.begin(), perm.end()));
      const double fast = solver.solve(w, assignment);
      const double canonical = hungarian(w).weight;
      if (fast != best || canonical != best) {
        r.passed = false;
        r.detail = "matrix " + std::to_string(k) + " " + matrix_text(w) + ": hungarian " +
                   fmt("%.17g", fast) + " / " + fmt("%.17g", canonical) + ", permutations " +
                   fmt("%.17g", best);
        return;
      }
    }
    r.passed = true;
    r.detail = std::to_string(matrices) + " random " + std::to_string(n) + "x" +
               std::to_string(n) + " matrices match exactly";
  });
}

SuiteResult suite_partitions(int max_aps, int max_blocks) {
  return timed("partition-counts", [&](SuiteResult& r) {
    long long checked = 0;
    for (int B = 1; B <= max_aps; ++B) {
      for (int W = 1; W <= std::min(B, max_blocks); ++W) {
        // Surjections {0..B-1} -> {0..W-1} are exactly the ordered partitions.
        long long surjections = 0;
        std::vector<int> label(B, 0);
        std::vector<int> used(W, 0);
        while (true) {
          std::fill(used.begin(), used.end(), 0);
          for (int b : label) used[b] = 1;
          if (std::all_of(used.begin(), used.end(), [](int x) { return x; })) ++surjections;
          int i = 0;
          while (i < B && ++label[i] == W) label[i++] = 0;
          if (i == B) break;
        }
        long long fact = 1;
        for (int i = 2; i <= W; ++i) fact *= i;
        const auto configs = enumerate_partitions(B, W);
        const long long formula = fact * static_cast<long long>(stirling2(B, W));
        auto fail = [&](const std::string& why) {
          r.passed = false;
          r.detail = "B=" + std::to_string(B) + " W=" + std::to_string(W) + ": " + why;
        };
        if (static_cast<long long>(configs.size()) != surjections || formula != surjections) {
          fail("enumerated " + std::to_string(configs.size()) + ", W!*S(B,W) " +
               std::to_string(formula) + ", brute force " + std::to_string(surjections));
          return;
        }
        std::set<std::vector<int>> distinct;
        for (const auto& cfg : configs) {
          std::vector<int> owner(B, -1);
          if (cfg.size() != W) return fail("configuration with wrong block count");
          for (int i = 0; i < W; ++i) {
            if (cfg.blocks[i].empty()) return fail("empty block");
            for (int b : cfg.blocks[i]) {
              if (b < 0 || b >= B || owner[b] != -1) return fail("blocks overlap or leave range");
              owner[b] = i;
            }
          }
          if (owner != cfg.block_of_ap) return fail("block_of_ap disagrees with blocks");
          if (std::count(owner.begin(), owner.end(), -1) != 0) return fail("AP left uncovered");
          distinct.insert(owner);
        }
        if (distinct.size() != configs.size()) return fail("duplicate configuration");
        ++checked;
      }
    }
    r.passed = true;
    r.detail = std::to_string(checked) + " (B, W) pairs exact";
  });
}

SuiteResult suite_vc_search(int trials_per_shape, int max_aps, int max_prbs, std::uint64_t seed) {
  return timed("vc-search-vs-exhaustive", [&](SuiteResult& r) {
    const SimConfig defaults;
    const LinkBudget budget = ap_link_budget(defaults);
    Rng rng = substream(seed, "validate-vc");
    std::uniform_real_distribution<double> dist(10.0, 300.0);
    std::uniform_int_distribution<int> deadline(1, 10);
    PartitionCache partitions;
    long long cases = 0;
    for (int B = 1; B <= max_aps; ++B) {
      for (int Z = 1; Z <= max_prbs; ++Z) {
        for (int W = 1; W <= std::min(B, defaults.max_vcs); ++W) {
          for (int k = 0; k < trials_per_shape; ++k) {
            std::vector<double> d(static_cast<std::size_t>(B) * W);
            for (double& x : d) x = dist(rng);
            const ChannelTable ch = draw_channel_table(rng, d, B, W, Z, defaults.antennas,
                                                       defaults.carrier_ghz,
                                                       defaults.shadow_sigma_db);
            std::vector<int> cvs(W);
            std::iota(cvs.begin(), cvs.end(), 0);
            std::shuffle(cvs.begin(), cvs.end(), rng);
            std::vector<int> deadlines(W);
            for (int& x : deadlines) x = deadline(rng);
            const auto phi = priorities(deadlines);

            const auto& configs = partitions.get(B, W);
            double best = -1.0;
            for (const auto& cfg : configs) {
              best = std::max(best, brute_force_matching(
                                        weighted_rate_matrix(cvs, cfg, phi, ch, budget)));
            }
            const VcDecision par = optimal_vc_and_prb(W, cvs, phi, ch, budget, partitions);
            const VcDecision ser = optimal_vc_and_prb_serial(W, cvs, phi, ch, budget, partitions);
            const double chosen = brute_force_matching(
                weighted_rate_matrix(cvs, par.config, phi, ch, budget));
            if (par.wsr != best || ser.wsr != best || chosen != best ||
                par.config_index != ser.config_index || par.prb_of_ap != ser.prb_of_ap) {
              r.passed = false;
              r.detail = "B=" + std::to_string(B) + " Z=" + std::to_string(Z) +
                         " W=" + std::to_string(W) + " trial " + std::to_string(k) +
                         ": search " + fmt("%.17g", par.wsr) + " (serial " +
                         fmt("%.17g", ser.wsr) + "), exhaustive " + fmt("%.17g", best) +
                         ", configs " + std::to_string(par.config_index) + "/" +
                         std::to_string(ser.config_index);
              return;
            }
            ++cases;
          }
        }
      }
    }
    r.passed = true;
    r.detail = std::to_string(cases) + " cases exact, serial and parallel identical";
  });
}

SuiteResult suite_chernoff(long slots, std::uint64_t seed) {
  return timed("chernoff-bound", [&](SuiteResult& r) {
    const double exact = binomial_tail(10, 0.5, 8);
    if (std::abs(exact - 56.0 / 1024.0) > 1e-12) {
      r.passed = false;
      r.detail = "Pr{Bin(10,0.5) >= 8} = " + fmt("%.17g", exact) + ", expected 56/1024";
      return;
    }
    const std::vector<double> half(10, 0.5);
    const double reference_bound = chernoff_bound(half, 8.0);
    if (!(exact <= reference_bound)) {
      r.passed = false;
      r.detail = "exact tail exceeds the bound in the reference case";
      return;
    }
    Rng rng = substream(seed, "validate-chernoff");
    double worst = 0.0;
    std::string worst_case;
    int cases = 0;
    for (int U : {5, 10, 20}) {
      std::vector<std::vector<double>> profiles;
      profiles.emplace_back(U, 0.5);
      std::vector<double> spread(U);
      for (int u = 0; u < U; ++u) spread[u] = 0.1 + 0.9 * u / std::max(1, U - 1);
      profiles.push_back(spread);
      std::vector<double> drawn(U);
      std::uniform_real_distribution<double> pu(0.1, 1.0);
      for (double& p : drawn) p = pu(rng);
      profiles.push_back(drawn);
      for (std::size_t pi = 0; pi < profiles.size(); ++pi) {
        const auto& p = profiles[pi];
        const double mu = std::accumulate(p.begin(), p.end(), 0.0);
        std::vector<long> tail(U + 2, 0);
        for (long s = 0; s < slots; ++s) {
          int count = 0;
          for (double q : p) count += uniform01(rng) < q;
          ++tail[count];
        }
        for (int x = U; x >= 0; --x) tail[x] += tail[x + 1];
        for (int xi = static_cast<int>(std::floor(mu)) + 1; xi < U; ++xi) {
          const double empirical = static_cast<double>(tail[xi]) / static_cast<double>(slots);
          const double bound = chernoff_bound(p, xi);
          ++cases;
          const std::string label = "U=" + std::to_string(U) + " profile " +
                                    std::to_string(pi) + " xi=" + std::to_string(xi);
          if (empirical > bound) {
            r.passed = false;
            r.detail = label + ": empirical " + fmt("%.6g", empirical) + " > bound " +
                       fmt("%.6g", bound);
            return;
          }
          if (bound > 0 && empirical / bound > worst) {
            worst = empirical / bound;
            worst_case = label;
          }
        }
      }
    }
    r.passed = true;
    r.detail = std::to_string(cases) + " tails below the bound (tightest " +
               fmt("%.3f", worst) + " of bound at " + worst_case + "); exact 56/1024 to 1e-12";
  });
}

SuiteResult suite_gradient(std::uint64_t seed, double step, double tolerance) {
  return timed("q-gradient-check", [&](SuiteResult& r) {
    Rng rng = substream(seed, "validate-gradient");
    const std::vector<int> dims{330, 16, 10};
    QNetworkParams online = init_params(dims, rng);
    const QNetworkParams target = init_params(dims, rng);
    std::normal_distribution<double> n01(0.0, 1.0);
    for (auto& b : online.biases) {
      for (double& x : b) x = 0.1 * n01(rng);
    }
    std::vector<Transition> ts(8);
    for (std::size_t i = 0; i < ts.size(); ++i) {
      ts[i].state.resize(dims.front());
      ts[i].next_state.resize(dims.front());
      for (double& x : ts[i].state) x = uniform01(rng);
      for (double& x : ts[i].next_state) x = uniform01(rng);
      ts[i].action = static_cast<int>(i * 3 % dims.back());
      ts[i].reward = n01(rng);
      ts[i].done = i % 4 == 3;
    }
    const Batch batch = make_batch(ts);
    const double gamma = 0.995;
    QLearner learner(online, 1e-3);
    learner.set_target(target);
    Gradients g;
    learner.loss_and_gradient(batch, gamma, g);

    double worst = 0.0;
    std::string where;
    long count = 0;
    auto check = [&](double analytic, double& param, const std::string& label) {
      const double saved = param;
      param = saved + step;
      const double up = q_loss(online, target, batch, gamma);
      param = saved - step;
      const double down = q_loss(online, target, batch, gamma);
      param = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-7});
      const double rel = std::abs(analytic - numeric) / scale;
      ++count;
      if (rel > worst) {
        worst = rel;
        where = label + " analytic " + fmt("%.10g", analytic) + " numeric " +
                fmt("%.10g", numeric);
      }
    };
    for (int l = 0; l < online.num_layers(); ++l) {
      for (std::size_t i = 0; i < online.weights[l].size(); ++i) {
        check(g.weights[l][i], online.weights[l][i],
              "W" + std::to_string(l) + "[" + std::to_string(i) + "]");
      }
      for (std::size_t i = 0; i < online.biases[l].size(); ++i) {
        check(g.biases[l][i], online.biases[l][i],
              "b" + std::to_string(l) + "[" + std::to_string(i) + "]");
      }
    }
    r.passed = worst < tolerance;
    r.detail = std::to_string(count) + " parameters, max relative error " + fmt("%.3g", worst) +
               " at " + where;
  });
}

SuiteResult suite_codec() {
  return timed("action-codec-bijection", [&](SuiteResult& r) {
    long long checked = 0;
    for (int per_class : {1, 2, 3, 4, 5}) {
      CacheBudgets budgets{per_class, 3 * per_class, 3, 5};
      const ActionCodec codec(budgets);
      if (codec.total() != static_cast<long long>(std::pow(binomial(5, per_class), 3))) {
        r.passed = false;
        r.detail = "per-class budget " + std::to_string(per_class) + ": " +
                   std::to_string(codec.total()) + " actions";
        return;
      }
      std::set<std::vector<int>> seen;
      for (long long a = 0; a < codec.total(); ++a) {
        const CacheState s = codec.decode(a);
        std::vector<int> key;
        for (int c = 0; c < 3; ++c) {
          const auto members = s.stored_in_class(c);
          key.insert(key.end(), members.begin(), members.end());
          key.push_back(-1);
        }
        if (!s.satisfies_budgets() || codec.encode(s) != a || !seen.insert(key).second) {
          r.passed = false;
          r.detail = "per-class budget " + std::to_string(per_class) + ": action " +
                     std::to_string(a) + " does not round-trip";
          return;
        }
        ++checked;
      }
    }
    r.passed = true;
    r.detail = std::to_string(checked) + " actions round-trip";
  });
}

SuiteResult suite_eligibility() {
  return timed("eligibility-trace", [&](SuiteResult& r) {
    auto req = [](int cv, int arrival, bool hit, int ready, int deadline, double payload) {
      Request q;
      q.cv_id = cv;
      q.arrival_slot = arrival;
      q.cache_hit = hit;
      q.extraction_ready_slot = ready;
      q.server_deadline = deadline;
      q.remaining_deadline = deadline;
      q.remaining_payload = payload;
      return q;
    };
    auto fail = [&](const std::string& why) {
      r.passed = false;
      r.detail = why;
    };
    {
      const auto e = eligible_cvs(soi(20, 10), {}, 20);
      if (!e.valid_cvs.empty() || !e.min_deadlines.empty() || !e.payloads.empty()) {
        return fail("empty ledger produced eligible CVs");
      }
    }
    {
      const std::vector<Request> miss{req(3, 10, false, 15, 10, 500.0)};
      for (int t = 10; t <= 16; ++t) {
        const auto e = eligible_cvs(soi(t, 10), miss, t);
        const bool expected = t >= 15;
        if (e.valid_cvs.empty() == expected) {
          return fail("miss extracted at slot 15 has eligibility " +
                      std::to_string(!e.valid_cvs.empty()) + " at slot " + std::to_string(t));
        }
      }
    }
    {
      const std::vector<Request> two{req(1, 30, true, 30, 7, 100.0), req(1, 31, true, 31, 4, 250.0)};
      const auto e = eligible_cvs(soi(32, 10), two, 32);
      if (e.valid_cvs != std::vector<int>{1} || e.min_deadlines != std::vector<int>{4} ||
          e.payloads != std::vector<double>{250.0}) {
        return fail("CV with deadlines 7 and 4 not reported as deadline 4 with its payload");
      }
    }
    {
      // Outside the SoI, drained, expired and not yet extracted requests never count.
      const std::vector<Request> mixed{
          req(0, 5, true, 5, 3, 100.0),   // arrived before the SoI of slot 20
          req(1, 15, true, 15, 3, 0.0),   // nothing left to send
          req(2, 16, true, 16, 0, 100.0), // deadline exhausted
          req(3, 18, false, 23, 5, 100.0), // still in the cloud
          req(4, 19, true, 19, 6, 80.0),
          req(5, 12, false, 17, 2, 60.0),
      };
      const auto e = eligible_cvs(soi(20, 10), mixed, 20);
      if (e.valid_cvs != std::vector<int>{4, 5} || e.min_deadlines != std::vector<int>{6, 2} ||
          e.payloads != std::vector<double>{80.0, 60.0}) {
        return fail("mixed ledger at slot 20 gave the wrong eligible set");
      }
      const auto phi = priorities(e.min_deadlines);
      const auto order = top_priority(e, vc_count(2, 5));
      if (order != std::vector<int>{1, 0} || !(phi[1] > phi[0])) {
        return fail("shortest deadline not ranked first");
      }
    }
    r.passed = true;
    r.detail = "empty ledger, extraction delay, minimum deadline and exclusion traces hold";
  });
}

std::vector<SuiteResult> run_all_suites() {
  return {suite_hungarian(), suite_partitions(), suite_vc_search(), suite_chernoff(),
          suite_gradient(),  suite_codec(),      suite_eligibility()};
}

std::string format_suite(const SuiteResult& r) {
  return std::string(r.passed ? "PASS " : "FAIL ") + r.name + " (" + fmt("%.2f", r.seconds) +
         " s): " + r.detail;
}

} // namespace vecsim
