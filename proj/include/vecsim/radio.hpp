#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <utility>
#include <vector>

#include "vecsim/config.hpp"
#include "vecsim/rng.hpp"

namespace vecsim {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

struct LinkBudget {
  double tx_power_dbm = 30.0;
  double tx_gain_dbi = 8.0;
  double rx_gain_dbi = 3.0;
  double noise_figure_db = 9.0;
  double prb_hz = 180e3;
  double noise_psd_dbm_hz = -174.0;

  // Transmit EIRP plus receive gain, in mW.
  double tx_scale_mw() const { return db_to_linear(tx_power_dbm + tx_gain_dbi + rx_gain_dbi); }
  // Receiver noise density including the noise figure, in mW/Hz.
  double noise_density_mw_hz() const { return db_to_linear(noise_psd_dbm_hz + noise_figure_db); }
  double noise_power_mw() const { return prb_hz * noise_density_mw_hz(); }
};

LinkBudget ap_link_budget(const SimConfig& config);

struct LinkChannel {
  int ap_id = 0;
  int cv_id = 0;
  int prb_id = 0;
  std::vector<std::complex<double>> fast_fading;
  double shadowing_db = 0.0;
  double path_loss_db = 0.0;
};

// UMa line-of-sight path loss below the breakpoint distance. Distances under
// 1 m are clamped to 1 m and counted in `clamped` when given.
double path_loss_db(double d3d_m, double fc_ghz, int* clamped = nullptr);

// Unit-variance circular Gaussian fast fading on L antennas and a log-normal
// shadowing draw (in dB).
LinkChannel draw_channel(Rng& rng, int antennas, double path_loss_db, double shadow_sigma_db);

// Beamforming power gain of a maximal-ratio precoder, including large-scale
// fading and shadowing. Zero for an all-zero fading vector.
double mrt_gain(const LinkChannel& channel);

// Linear channel power gains of every (AP, CV, pRB) link in one slot.
class ChannelTable {
public:
  ChannelTable() = default;
  ChannelTable(int aps, int cvs, int prbs);

  int aps() const { return aps_; }
  int cvs() const { return cvs_; }
  int prbs() const { return prbs_; }

  double gain(int ap, int cv, int prb) const { return gains_[index(ap, cv, prb)]; }
  double& gain(int ap, int cv, int prb) { return gains_[index(ap, cv, prb)]; }

private:
  std::size_t index(int ap, int cv, int prb) const {
    return (static_cast<std::size_t>(ap) * cvs_ + cv) * prbs_ + prb;
  }

  int aps_ = 0;
  int cvs_ = 0;
  int prbs_ = 0;
  std::vector<double> gains_;
};

// Draws an independent channel for every link from the transmitter positions
// to the CV positions.
ChannelTable draw_channel_table(Rng& rng, std::span<const double> distances_m, int aps, int cvs,
                                int prbs, int antennas, double fc_ghz, double shadow_sigma_db,
                                int* clamped = nullptr);

struct PrbGrant {
  int ap = 0;
  int prb = 0;
};

// Per-pRB SNR at `cv` served by the virtual cell `vc`. The numerator adds the
// received power of every VC AP granted pRB z; the denominator is the noise
// of all VC APs over one pRB. ContractViolation if a grant names an AP outside
// the cell or an AP holds more than one pRB.
std::vector<double> snr_per_prb(std::span<const int> vc, int cv, std::span<const PrbGrant> grants,
                                const ChannelTable& channels, const LinkBudget& budget);

// Sum over pRBs of bandwidth times log2(1 + SNR).
double rate_bps(std::span<const double> snrs, double prb_hz);

// Whole bits transmittable in one slot of `slot_seconds` at `rate`.
double tx_bits(double rate_bps, double slot_seconds);

} // namespace vecsim
