#pragma once

// Channel gains for every link the simulator cares about:
//   g_cB  CU -> BS            (N_C)
//   g_dB  D2D tx -> BS        (N_D)
//   g_d   D2D tx -> D2D rx    (N_D)
//   g_cd  CU -> D2D rx        (N_C x N_D)
//
// Large scale (path loss + lognormal shadowing) is drawn once per topology;
// fast fading is a unit-mean exponential multiplier redrawn every subframe,
// computed as a pure function of (fading seed, subframe, link id).

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "d2dmab/rng.hpp"
#include "d2dmab/topology.hpp"

namespace d2dmab {

struct ChannelConfig {
    double shadowing_std_db = 8.0;
    double min_link_distance_m = 3.0;  // clamp against near-singular gains
    bool fading_enabled = true;
};

// 3GPP macrocell model at 2 GHz; d in km, log base 10.
inline double path_loss_db(double distance_m, double min_distance_m = 3.0) {
    if (!(distance_m > 0.0))
        throw std::domain_error("path_loss_db: distance must be positive");
    const double d_km = std::max(distance_m, min_distance_m) * 1e-3;
    return 128.1 + 37.6 * std::log10(d_km);
}

// Thermal noise power in watts for a given bandwidth and receiver noise figure.
inline double noise_power_w(double bandwidth_hz, double noise_figure_db,
                            double density_dbm_per_hz = -174.0) {
    if (!(bandwidth_hz > 0.0))
        throw std::domain_error("noise_power_w: bandwidth must be positive");
    const double dbm = density_dbm_per_hz + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
    return std::pow(10.0, (dbm - 30.0) / 10.0);
}

// Per-link attenuation on linear scale, fixed for the topology's lifetime.
struct LargeScaleGains {
    std::vector<double> cu_to_bs;    // N_C
    std::vector<double> d2d_to_bs;   // N_D
    std::vector<double> d2d_link;    // N_D
    std::vector<double> cu_to_d2d;   // N_C x N_D, row-major in c

    int n_cu = 0;
    int n_d2d = 0;

    double g_cb(int c) const { return cu_to_bs[c - 1]; }
    double g_db(int d) const { return d2d_to_bs[d - 1]; }
    double g_d(int d) const { return d2d_link[d - 1]; }
    double g_cd(int c, int d) const { return cu_to_d2d[(c - 1) * n_d2d + (d - 1)]; }
};

namespace detail {

inline double linear_gain(double pl_db, double shadow_db) {
    return std::pow(10.0, -(pl_db + shadow_db) / 10.0);
}

}  // namespace detail

// Shadowing stream is branched off the topology seed, so the large-scale
// state is part of the topology draw and identical across runs.
inline LargeScaleGains draw_large_scale(const Topology& topo,
                                        const ChannelConfig& cfg = {}) {
    LargeScaleGains ls;
    ls.n_cu = topo.n_cu();
    ls.n_d2d = topo.n_d2d();

    rng::Stream s(rng::split(topo.seed, rng::kTagShadowing));
    auto gain = [&](double dist) {
        const double pl = path_loss_db(dist, cfg.min_link_distance_m);
        const double sh = cfg.shadowing_std_db * s.normal();
        return detail::linear_gain(pl, sh);
    };

    ls.cu_to_bs.reserve(ls.n_cu);
    for (int c = 0; c < ls.n_cu; ++c)
        ls.cu_to_bs.push_back(gain(distance(topo.cu_positions[c], topo.bs_position)));
    ls.d2d_to_bs.reserve(ls.n_d2d);
    ls.d2d_link.reserve(ls.n_d2d);
    for (int d = 0; d < ls.n_d2d; ++d) {
        ls.d2d_to_bs.push_back(gain(distance(topo.d2d_tx_positions[d], topo.bs_position)));
        ls.d2d_link.push_back(gain(distance(topo.d2d_tx_positions[d], topo.d2d_rx_positions[d])));
    }
    ls.cu_to_d2d.reserve(static_cast<std::size_t>(ls.n_cu) * ls.n_d2d);
    for (int c = 0; c < ls.n_cu; ++c)
        for (int d = 0; d < ls.n_d2d; ++d)
            ls.cu_to_d2d.push_back(gain(distance(topo.cu_positions[c], topo.d2d_rx_positions[d])));
    return ls;
}

// One subframe's realized gains. Indices are 1-based to match the model.
struct ChannelDraw {
    std::vector<double> cu_to_bs;
    std::vector<double> d2d_to_bs;
    std::vector<double> d2d_link;
    std::vector<double> cu_to_d2d;
    int n_cu = 0;
    int n_d2d = 0;
    std::int64_t subframe = 0;

    double g_cb(int c) const { return cu_to_bs[c - 1]; }
    double g_db(int d) const { return d2d_to_bs[d - 1]; }
    double g_d(int d) const { return d2d_link[d - 1]; }
    double g_cd(int c, int d) const { return cu_to_d2d[(c - 1) * n_d2d + (d - 1)]; }
};

namespace detail {

// Stable link ids: CU->BS first, then D2D->BS, D2D link, CU->D2D rows.
inline std::uint64_t link_count(int n_cu, int n_d2d) {
    return static_cast<std::uint64_t>(n_cu) + 2 * n_d2d +
           static_cast<std::uint64_t>(n_cu) * n_d2d;
}

inline double fading_mult(std::uint64_t fading_seed, std::int64_t subframe,
                          std::uint64_t link_id, std::uint64_t links_per_subframe) {
    const std::uint64_t counter =
        static_cast<std::uint64_t>(subframe) * links_per_subframe + link_id;
    return rng::exponential_at(fading_seed, counter);
}

}  // namespace detail

inline void draw_channel(const LargeScaleGains& ls, const ChannelConfig& cfg,
                         std::uint64_t fading_seed, std::int64_t subframe,
                         ChannelDraw& out) {
    if (subframe < 0)
        throw std::invalid_argument("draw_channel: subframe must be >= 0");
    const int n_cu = ls.n_cu;
    const int n_d2d = ls.n_d2d;
    out.n_cu = n_cu;
    out.n_d2d = n_d2d;
    out.subframe = subframe;
    out.cu_to_bs.resize(n_cu);
    out.d2d_to_bs.resize(n_d2d);
    out.d2d_link.resize(n_d2d);
    out.cu_to_d2d.resize(static_cast<std::size_t>(n_cu) * n_d2d);

    if (!cfg.fading_enabled) {
        out.cu_to_bs = ls.cu_to_bs;
        out.d2d_to_bs = ls.d2d_to_bs;
        out.d2d_link = ls.d2d_link;
        out.cu_to_d2d = ls.cu_to_d2d;
        return;
    }

    const std::uint64_t links = detail::link_count(n_cu, n_d2d);
    std::uint64_t link_id = 0;
    for (int c = 0; c < n_cu; ++c, ++link_id)
        out.cu_to_bs[c] = ls.cu_to_bs[c] * detail::fading_mult(fading_seed, subframe, link_id, links);
    for (int d = 0; d < n_d2d; ++d, ++link_id)
        out.d2d_to_bs[d] = ls.d2d_to_bs[d] * detail::fading_mult(fading_seed, subframe, link_id, links);
    for (int d = 0; d < n_d2d; ++d, ++link_id)
        out.d2d_link[d] = ls.d2d_link[d] * detail::fading_mult(fading_seed, subframe, link_id, links);
    for (std::size_t i = 0; i < out.cu_to_d2d.size(); ++i, ++link_id)
        out.cu_to_d2d[i] = ls.cu_to_d2d[i] * detail::fading_mult(fading_seed, subframe, link_id, links);
}

inline ChannelDraw draw_channel(const LargeScaleGains& ls, const ChannelConfig& cfg,
                                std::uint64_t fading_seed, std::int64_t subframe) {
    ChannelDraw out;
    draw_channel(ls, cfg, fading_seed, subframe, out);
    return out;
}

}  // namespace d2dmab
