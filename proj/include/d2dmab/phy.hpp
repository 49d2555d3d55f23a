#pragma once

// BS-side arbitration and link-level math: collision resolution, the
// SINR-constrained power allocation, D2D throughput, and the two reward
// models (normalized throughput for the index policies, thresholded
// Bernoulli for Exp3).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "d2dmab/channel.hpp"

namespace d2dmab {

struct PhyConfig {
    double cu_power_w = 0.25;       // P_c
    double max_d2d_power_w = 0.2;   // P_max, LTE UE class-3 cap
    double sinr_target = 10.0;      // gamma_tgt, linear
    double bandwidth_hz = 180e3;    // B
    double noise_bs_w = 0.0;        // sigma^2 at the BS
    double noise_d2d_w = 0.0;       // sigma^2 at a D2D receiver
    double reward_norm_bps = 0.0;   // throughput mapped to reward 1 at this rate
    double rate_threshold_bps = 64e3;  // r' for the Bernoulli reward

    void validate() const {
        auto positive = [](double v, const char* name) {
            if (!(v > 0.0))
                throw std::invalid_argument(std::string("PhyConfig: ") + name +
                                            " must be positive");
        };
        positive(cu_power_w, "cu_power_w");
        positive(max_d2d_power_w, "max_d2d_power_w");
        positive(sinr_target, "sinr_target");
        positive(bandwidth_hz, "bandwidth_hz");
        positive(noise_bs_w, "noise_bs_w");
        positive(noise_d2d_w, "noise_d2d_w");
        positive(reward_norm_bps, "reward_norm_bps");
        positive(rate_threshold_bps, "rate_threshold_bps");
        if (reward_norm_bps < rate_threshold_bps)
            throw std::invalid_argument(
                "PhyConfig: reward_norm_bps must be >= rate_threshold_bps");
    }
};

// Default PHY: 250 mW CU power, 10 dB target, 180 kHz, BS/UE noise
// figures 5/9 dB over -174 dBm/Hz, reward normalization at 40 dB SINR.
inline PhyConfig make_phy_config(double cu_power_mw = 250.0,
                                 double max_d2d_power_mw = 200.0,
                                 double sinr_target_db = 10.0,
                                 double bandwidth_hz = 180e3,
                                 double bs_noise_figure_db = 5.0,
                                 double d2d_noise_figure_db = 9.0,
                                 double noise_density_dbm = -174.0,
                                 double rate_threshold_bps = 64e3,
                                 double reward_norm_sinr_cap_db = 40.0) {
    PhyConfig cfg;
    cfg.cu_power_w = cu_power_mw * 1e-3;
    cfg.max_d2d_power_w = max_d2d_power_mw * 1e-3;
    cfg.sinr_target = std::pow(10.0, sinr_target_db / 10.0);
    cfg.bandwidth_hz = bandwidth_hz;
    cfg.noise_bs_w = noise_power_w(bandwidth_hz, bs_noise_figure_db, noise_density_dbm);
    cfg.noise_d2d_w = noise_power_w(bandwidth_hz, d2d_noise_figure_db, noise_density_dbm);
    cfg.reward_norm_bps =
        bandwidth_hz * std::log2(1.0 + std::pow(10.0, reward_norm_sinr_cap_db / 10.0));
    cfg.rate_threshold_bps = rate_threshold_bps;
    cfg.validate();
    return cfg;
}

// Perfect collision model: every player that shares a CU is marked, nobody
// captures. Selections are 1-based CU indices.
inline std::vector<char> resolve_collisions(const std::vector<int>& selections,
                                            int n_cu) {
    std::vector<int> count(n_cu, 0);
    for (int c : selections) {
        if (c < 1 || c > n_cu)
            throw std::out_of_range("resolve_collisions: selection outside [1, N_C]");
        ++count[c - 1];
    }
    std::vector<char> collided(selections.size());
    for (std::size_t d = 0; d < selections.size(); ++d)
        collided[d] = count[selections[d] - 1] >= 2;
    return collided;
}

// SINR seen by a CU with gain g_cb while a D2D player with gain g_db to the
// BS transmits at p_d on its resource block.
inline double cu_sinr(double g_cb, double g_db, double p_d, const PhyConfig& cfg) {
    return cfg.cu_power_w * g_cb / (cfg.noise_bs_w + p_d * g_db);
}

inline double cu_sinr(int c, int d, double p_d, const ChannelDraw& ch,
                      const PhyConfig& cfg) {
    return cu_sinr(ch.g_cb(c), ch.g_db(d), p_d, cfg);
}

// Largest power that keeps the CU at its target SINR, zero if the CU's own
// SNR cannot support any reuse, capped at P_max. The uncapped value is
// nudged down by ulps when rounding would leave the realized SINR a hair
// under the target, so the protection invariant holds exactly.
inline double allocate_power(double g_cb, double g_db, const PhyConfig& cfg) {
    double p = (cfg.cu_power_w * g_cb / cfg.sinr_target - cfg.noise_bs_w) / g_db;
    if (!(p > 0.0)) return 0.0;
    if (p >= cfg.max_d2d_power_w) return cfg.max_d2d_power_w;
    for (int i = 0; i < 64 && cu_sinr(g_cb, g_db, p, cfg) < cfg.sinr_target; ++i) {
        p = std::nextafter(p, 0.0);
        if (p <= 0.0) return 0.0;
    }
    return p;
}

inline double allocate_power(int c, int d, const ChannelDraw& ch, bool collided,
                             const PhyConfig& cfg) {
    if (collided) return 0.0;
    return allocate_power(ch.g_cb(c), ch.g_db(d), cfg);
}

// Shannon rate of the D2D link under CU interference.
inline double d2d_throughput(double p_d, double g_d, double g_cd,
                             const PhyConfig& cfg) {
    if (p_d <= 0.0) return 0.0;
    const double sinr = p_d * g_d / (cfg.noise_d2d_w + cfg.cu_power_w * g_cd);
    return cfg.bandwidth_hz * std::log2(1.0 + sinr);
}

inline double d2d_throughput(int c, int d, double p_d, const ChannelDraw& ch,
                             const PhyConfig& cfg) {
    return d2d_throughput(p_d, ch.g_d(d), ch.g_cd(c, d), cfg);
}

// Rate a reused CU is pinned at when the target SINR binds.
inline double cu_target_rate(const PhyConfig& cfg) {
    return cfg.bandwidth_hz * std::log2(1.0 + cfg.sinr_target);
}

inline double reward_normalized(double throughput_bps, const PhyConfig& cfg) {
    return std::min(throughput_bps / cfg.reward_norm_bps, 1.0);
}

inline double reward_bernoulli(double throughput_bps, const PhyConfig& cfg) {
    return throughput_bps >= cfg.rate_threshold_bps ? 1.0 : 0.0;
}

enum class RewardModel { normalized, bernoulli };

inline double reward_of(RewardModel model, double throughput_bps,
                        const PhyConfig& cfg) {
    return model == RewardModel::normalized ? reward_normalized(throughput_bps, cfg)
                                            : reward_bernoulli(throughput_bps, cfg);
}

// Everything the BS and players produced in one subframe. Per-player vectors
// are indexed by player id - 1.
struct SubframeOutcome {
    std::int64_t subframe = 0;
    std::vector<int> selection;    // chosen CU, 1-based
    std::vector<char> collided;
    std::vector<int> rank;         // K for ranked policies, 0 otherwise
    std::vector<double> power_w;   // P_d
    std::vector<double> cu_sinr;   // SINR of the selected CU
    std::vector<double> throughput_bps;  // r_d
    std::vector<double> reward;
    double sum_tput_d2d_bps = 0.0;
    double sum_tput_cu_bps = 0.0;  // over the distinct selected CUs
};

}  // namespace d2dmab
