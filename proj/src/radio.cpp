#include "vecsim/radio.hpp"

#include <cmath>
#include <numeric>

#include "vecsim/errors.hpp"

namespace vecsim {

LinkBudget ap_link_budget(const SimConfig& config) {
  return {config.ap_tx_dbm,       config.tx_gain_dbi, config.rx_gain_dbi,
          config.noise_figure_db, config.prb_hz,      config.noise_psd_dbm_hz};
}

double path_loss_db(double d3d_m, double fc_ghz, int* clamped) {
  if (d3d_m < 1.0) {
    d3d_m = 1.0;
    if (clamped) ++*clamped;
  }
  return 28.0 + 22.0 * std::log10(d3d_m) + 20.0 * std::log10(fc_ghz);
}

LinkChannel draw_channel(Rng& rng, int antennas, double path_loss, double shadow_sigma_db) {
  LinkChannel ch;
  ch.path_loss_db = path_loss;
  std::normal_distribution<double> half(0.0, std::sqrt(0.5));
  ch.fast_fading.resize(antennas);
  for (auto& h : ch.fast_fading) {
    double re = half(rng);
    double im = half(rng);
    h = {re, im};
  }
  if (shadow_sigma_db > 0.0) {
    ch.shadowing_db = std::normal_distribution<double>(0.0, shadow_sigma_db)(rng);
  }
  return ch;
}

double mrt_gain(const LinkChannel& channel) {
  double norm2 = 0.0;
  for (const auto& h : channel.fast_fading) norm2 += std::norm(h);
  if (norm2 == 0.0) return 0.0;
  return norm2 * db_to_linear(-(channel.path_loss_db + channel.shadowing_db));
}

ChannelTable::ChannelTable(int aps, int cvs, int prbs)
    : aps_(aps), cvs_(cvs), prbs_(prbs),
      gains_(static_cast<std::size_t>(aps) * cvs * prbs, 0.0) {}

ChannelTable draw_channel_table(Rng& rng, std::span<const double> distances_m, int aps, int cvs,
                                int prbs, int antennas, double fc_ghz, double shadow_sigma_db,
                                int* clamped) {
  if (distances_m.size() != static_cast<std::size_t>(aps) * cvs) {
    throw ContractViolation("distance table does not match the link count");
  }
  ChannelTable table(aps, cvs, prbs);
  for (int b = 0; b < aps; ++b) {
    for (int u = 0; u < cvs; ++u) {
      const double pl = path_loss_db(distances_m[static_cast<std::size_t>(b) * cvs + u], fc_ghz,
                                     clamped);
      const double shadow =
          shadow_sigma_db > 0.0 ? std::normal_distribution<double>(0.0, shadow_sigma_db)(rng)
                                : 0.0;
      for (int z = 0; z < prbs; ++z) {
        LinkChannel ch = draw_channel(rng, antennas, pl, 0.0);
        ch.ap_id = b;
        ch.cv_id = u;
        ch.prb_id = z;
        ch.shadowing_db = shadow;
        table.gain(b, u, z) = mrt_gain(ch);
      }
    }
  }
  return table;
}

std::vector<double> snr_per_prb(std::span<const int> vc, int cv, std::span<const PrbGrant> grants,
                                const ChannelTable& channels, const LinkBudget& budget) {
  std::vector<int> seen;
  for (const auto& g : grants) {
    bool member = false;
    for (int b : vc) member = member || b == g.ap;
    if (!member) {
      throw ContractViolation("pRB granted to AP " + std::to_string(g.ap) +
                              " outside the serving virtual cell");
    }
    for (int b : seen) {
      if (b == g.ap) throw ContractViolation("AP " + std::to_string(g.ap) + " holds two pRBs");
    }
    seen.push_back(g.ap);
  }
  std::vector<double> snr(channels.prbs(), 0.0);
  const double noise = budget.noise_power_mw() * static_cast<double>(vc.size());
  const double scale = budget.tx_scale_mw();
  for (const auto& g : grants) snr[g.prb] += scale * channels.gain(g.ap, cv, g.prb);
  for (double& s : snr) s /= noise;
  return snr;
}

double rate_bps(std::span<const double> snrs, double prb_hz) {
  double r = 0.0;
  for (double s : snrs) r += prb_hz * std::log2(1.0 + s);
  return r;
}

double tx_bits(double rate, double slot_seconds) {
  // Guard against 0.001 not being representable: 720 kbit/s over 1 ms is 720.
  return std::floor(rate * slot_seconds + 1e-9);
}

} // namespace vecsim
