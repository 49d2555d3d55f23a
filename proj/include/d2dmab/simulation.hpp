#pragma once

// The time-slotted loop. One subframe runs the barrier sequence: every
// player selects, the BS resolves collisions and allocates power, rewards
// are realized, every player updates. A run is T subframes over one fixed
// topology with fading and policy streams branched off the run seed, so a
// (topology seed, run seed) pair replays bit-exactly.

#include <bit>
#include <chrono>
#include <cstdint>
#include <vector>

#include "d2dmab/channel.hpp"
#include "d2dmab/config.hpp"
#include "d2dmab/metrics.hpp"
#include "d2dmab/phy.hpp"
#include "d2dmab/policies.hpp"
#include "d2dmab/topology.hpp"

namespace d2dmab {

struct RunRecord {
    PolicyKind policy = PolicyKind::mp_ucb1;
    std::uint64_t topology_seed = 0;
    std::uint64_t run_seed = 0;
    RunMetrics metrics;
    std::vector<SubframeOutcome> outcome_log;  // first N_C subframes + grid
    std::uint64_t gain_checksum = 0;
    double wall_seconds = 0.0;
};

namespace detail {

inline void checksum_gains(std::uint64_t& h, const ChannelDraw& ch) {
    auto fold = [&h](const std::vector<double>& v) {
        for (double g : v) h = rng::avalanche(h ^ std::bit_cast<std::uint64_t>(g));
    };
    fold(ch.cu_to_bs);
    fold(ch.d2d_to_bs);
    fold(ch.d2d_link);
    fold(ch.cu_to_d2d);
}

}  // namespace detail

inline SubframeOutcome run_subframe(std::vector<Player>& players, std::int64_t n,
                                    const ChannelDraw& ch, const PhyConfig& phy,
                                    RewardModel model) {
    const int n_d2d = static_cast<int>(players.size());
    SubframeOutcome o;
    o.subframe = n;
    o.selection.resize(n_d2d);
    o.rank.resize(n_d2d);
    o.power_w.resize(n_d2d);
    o.cu_sinr.resize(n_d2d);
    o.throughput_bps.resize(n_d2d);
    o.reward.resize(n_d2d);

    // 1. all players select
    for (int d = 1; d <= n_d2d; ++d) {
        o.selection[d - 1] = players[d - 1].select(n);
        o.rank[d - 1] = is_ranked(players[d - 1].kind()) ? players[d - 1].state().rank : 0;
    }

    // 2. BS arbitration, 3. power allocation, 4. rates and rewards
    o.collided = resolve_collisions(o.selection, ch.n_cu);
    for (int d = 1; d <= n_d2d; ++d) {
        const int c = o.selection[d - 1];
        const double p = allocate_power(c, d, ch, o.collided[d - 1], phy);
        o.power_w[d - 1] = p;
        o.cu_sinr[d - 1] = cu_sinr(c, d, p, ch, phy);
        o.throughput_bps[d - 1] = d2d_throughput(c, d, p, ch, phy);
        o.reward[d - 1] =
            o.collided[d - 1] ? 0.0 : reward_of(model, o.throughput_bps[d - 1], phy);
        o.sum_tput_d2d_bps += o.throughput_bps[d - 1];
    }

    // CU side: each distinct selected CU counted once. A collided CU carries
    // no D2D interference, so its rate is the plain SNR rate.
    for (int d = 1; d <= n_d2d; ++d) {
        const int c = o.selection[d - 1];
        bool first = true;
        for (int e = 1; e < d; ++e)
            if (o.selection[e - 1] == c) { first = false; break; }
        if (first)
            o.sum_tput_cu_bps +=
                phy.bandwidth_hz * std::log2(1.0 + o.cu_sinr[d - 1]);
    }

    // 5. all players observe
    for (int d = 1; d <= n_d2d; ++d)
        players[d - 1].observe(o.selection[d - 1], o.reward[d - 1]);

    return o;
}

// Rewards each (player, arm) pair would have earned as sole selector;
// player-major, written into `out` (n_d2d * n_cu).
inline void counterfactual_rewards(const ChannelDraw& ch, const PhyConfig& phy,
                                   RewardModel model, std::vector<double>& out) {
    out.resize(static_cast<std::size_t>(ch.n_d2d) * ch.n_cu);
    for (int d = 1; d <= ch.n_d2d; ++d) {
        const double g_db = ch.g_db(d);
        const double g_d = ch.g_d(d);
        for (int c = 1; c <= ch.n_cu; ++c) {
            const double p = allocate_power(ch.g_cb(c), g_db, phy);
            out[(d - 1) * ch.n_cu + (c - 1)] =
                reward_of(model, d2d_throughput(p, g_d, ch.g_cd(c, d), phy), phy);
        }
    }
}

inline RunRecord run_simulation(const ExperimentConfig& cfg, const Topology& topo,
                                const LargeScaleGains& ls,
                                const ArmMeansOracle& oracle,
                                std::uint64_t topology_seed,
                                std::uint64_t run_seed) {
    const auto t0 = std::chrono::steady_clock::now();
    if (topo.n_cu() != cfg.n_cu || topo.n_d2d() != cfg.n_d2d ||
        ls.n_cu != cfg.n_cu || ls.n_d2d != cfg.n_d2d)
        throw std::invalid_argument("run_simulation: topology does not match config");
    const PhyConfig phy = cfg.make_phy();
    const ChannelConfig channel = cfg.make_channel();
    const RewardModel model = reward_model_for(cfg.policy.kind);
    const std::uint64_t fading_seed = rng::split(run_seed, rng::kTagFading);

    std::vector<Player> players;
    players.reserve(cfg.n_d2d);
    for (int d = 1; d <= cfg.n_d2d; ++d)
        players.emplace_back(cfg.policy, d, cfg.n_cu, cfg.n_d2d,
                             rng::split(run_seed, rng::kTagPolicy, d));

    RunRecord rec;
    rec.policy = cfg.policy.kind;
    rec.topology_seed = topology_seed;
    rec.run_seed = run_seed;

    MetricsAccumulator acc(cfg.policy.kind, oracle, phy, cfg.horizon, cfg.log_every);
    ChannelDraw ch;
    std::vector<double> cf;
    for (std::int64_t n = 1; n <= cfg.horizon; ++n) {
        draw_channel(ls, channel, fading_seed, n, ch);
        detail::checksum_gains(rec.gain_checksum, ch);
        const SubframeOutcome o = run_subframe(players, n, ch, phy, model);
        counterfactual_rewards(ch, phy, model, cf);
        acc.add(o, cf);
        if (n <= cfg.n_cu || n % cfg.log_every == 0 || n == cfg.horizon)
            rec.outcome_log.push_back(o);
    }
    rec.metrics = acc.finish();
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

// Convenience form that derives everything from the two seeds.
inline RunRecord run_simulation(const ExperimentConfig& cfg,
                                std::uint64_t topology_seed,
                                std::uint64_t run_seed) {
    cfg.validate();
    const Topology topo = generate_topology(cfg.n_cu, cfg.n_d2d, cfg.cell_radius,
                                            cfg.d2d_range, topology_seed);
    const LargeScaleGains ls = draw_large_scale(topo, cfg.make_channel());
    const ArmMeansOracle oracle = estimate_arm_means(
        topo, ls, cfg.make_phy(), cfg.oracle_samples,
        rng::split(topology_seed, rng::kTagOracle),
        reward_model_for(cfg.policy.kind), cfg.fading_enabled);
    return run_simulation(cfg, topo, ls, oracle, topology_seed, run_seed);
}

}  // namespace d2dmab
