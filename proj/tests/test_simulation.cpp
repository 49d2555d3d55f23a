#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "d2dmab/simulation.hpp"

using namespace d2dmab;

namespace {

ExperimentConfig small_config(PolicyKind kind) {
    ExperimentConfig cfg;
    cfg.n_cu = 5;
    cfg.n_d2d = 2;
    cfg.horizon = 3000;
    cfg.log_every = 50;
    cfg.oracle_samples = 10000;
    cfg.mc_runs_per_topology = 1;
    cfg.mc_topologies = 1;
    cfg.policy.kind = kind;
    return cfg;
}

// Round-number phy for hand arithmetic.
PhyConfig hand_phy() {
    PhyConfig cfg;
    cfg.cu_power_w = 1.0;
    cfg.max_d2d_power_w = 4.0;
    cfg.sinr_target = 2.0;
    cfg.bandwidth_hz = 1e3;
    cfg.noise_bs_w = 1e-3;
    cfg.noise_d2d_w = 1e-3;
    cfg.reward_norm_bps = 1e4;
    cfg.rate_threshold_bps = 1e3;
    cfg.validate();
    return cfg;
}

ChannelDraw hand_draw() {
    ChannelDraw ch;
    ch.n_cu = 3;
    ch.n_d2d = 2;
    ch.cu_to_bs = {0.01, 0.02, 0.04};
    ch.d2d_to_bs = {0.05, 0.1};
    ch.d2d_link = {0.2, 0.3};
    ch.cu_to_d2d.assign(6, 1e-4);
    return ch;
}

}  // namespace

TEST_CASE("scripted first subframe matches the hand trace") {
    // init round robin puts player 1 on CU 3 and player 2 on CU 1
    const PhyConfig phy = hand_phy();
    const ChannelDraw ch = hand_draw();
    std::vector<Player> players;
    for (int d = 1; d <= 2; ++d)
        players.emplace_back(PolicyConfig{PolicyKind::mp_ucb1}, d, 3, 2, 0);

    const SubframeOutcome o = run_subframe(players, 1, ch, phy, RewardModel::normalized);
    CHECK(o.selection == std::vector<int>{3, 1});
    CHECK(o.collided == std::vector<char>{0, 0});
    CHECK(o.power_w[0] == doctest::Approx(0.37999999999999995).epsilon(1e-12));
    CHECK(o.power_w[1] == doctest::Approx(0.04).epsilon(1e-12));
    CHECK(o.cu_sinr[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(o.cu_sinr[1] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(o.throughput_bps[0] == doctest::Approx(6131.155431277737).epsilon(1e-12));
    CHECK(o.throughput_bps[1] == doctest::Approx(3573.991382900153).epsilon(1e-12));
    CHECK(o.reward[0] == doctest::Approx(0.6131155431277737).epsilon(1e-12));
    CHECK(o.reward[1] == doctest::Approx(0.3573991382900153).epsilon(1e-12));
    CHECK(o.sum_tput_d2d_bps == doctest::Approx(9705.14681417789).epsilon(1e-12));
    CHECK(o.sum_tput_cu_bps == doctest::Approx(3169.9250014423124).epsilon(1e-12));
}

TEST_CASE("a full collision zeroes power and rewards for everyone") {
    // two players with the same id select the same init CU
    const PhyConfig phy = hand_phy();
    const ChannelDraw ch = hand_draw();
    std::vector<Player> players;
    players.emplace_back(PolicyConfig{PolicyKind::mp_ucb1}, 1, 3, 2, 0);
    players.emplace_back(PolicyConfig{PolicyKind::mp_ucb1}, 1, 3, 2, 1);

    const SubframeOutcome o = run_subframe(players, 1, ch, phy, RewardModel::normalized);
    CHECK(o.selection == std::vector<int>{3, 3});
    CHECK(o.collided == std::vector<char>{1, 1});
    CHECK(o.power_w == std::vector<double>{0.0, 0.0});
    CHECK(o.reward == std::vector<double>{0.0, 0.0});
    CHECK(o.sum_tput_d2d_bps == 0.0);
    // the shared CU is counted once, at its interference-free rate
    CHECK(o.sum_tput_cu_bps ==
          doctest::Approx(1e3 * std::log2(1.0 + 0.04 / 1e-3)).epsilon(1e-12));
}

TEST_CASE("counterfactual reward equals the realized reward for sole selectors") {
    for (PolicyKind kind : {PolicyKind::mp_ucb1, PolicyKind::exp3}) {
        const ExperimentConfig cfg = small_config(kind);
        const RewardModel model = reward_model_for(kind);
        const PhyConfig phy = cfg.make_phy();
        const Topology topo = generate_topology(cfg.n_cu, cfg.n_d2d, cfg.cell_radius,
                                                cfg.d2d_range, 5);
        const LargeScaleGains ls = draw_large_scale(topo, cfg.make_channel());
        std::vector<Player> players;
        for (int d = 1; d <= cfg.n_d2d; ++d)
            players.emplace_back(cfg.policy, d, cfg.n_cu, cfg.n_d2d, 40 + d);
        ChannelDraw ch;
        std::vector<double> cf;
        for (std::int64_t n = 1; n <= 500; ++n) {
            draw_channel(ls, cfg.make_channel(), 99, n, ch);
            const SubframeOutcome o = run_subframe(players, n, ch, phy, model);
            counterfactual_rewards(ch, phy, model, cf);
            for (int d = 1; d <= cfg.n_d2d; ++d)
                if (!o.collided[d - 1])
                    REQUIRE(o.reward[d - 1] ==
                            cf[(d - 1) * cfg.n_cu + (o.selection[d - 1] - 1)]);
        }
    }
}

TEST_CASE("identical seeds reproduce a run bit-exactly") {
    const ExperimentConfig cfg = small_config(PolicyKind::kth_ucb1);
    const RunRecord a = run_simulation(cfg, 11, 22);
    const RunRecord b = run_simulation(cfg, 11, 22);
    CHECK(a.gain_checksum == b.gain_checksum);
    REQUIRE(a.metrics.regret_def2.size() == b.metrics.regret_def2.size());
    for (std::size_t i = 0; i < a.metrics.regret_def2.size(); ++i) {
        CHECK(a.metrics.regret_def2[i] == b.metrics.regret_def2[i]);
        CHECK(a.metrics.regret_def3[i] == b.metrics.regret_def3[i]);
    }
    REQUIRE(a.outcome_log.size() == b.outcome_log.size());
    for (std::size_t i = 0; i < a.outcome_log.size(); ++i) {
        CHECK(a.outcome_log[i].selection == b.outcome_log[i].selection);
        CHECK(a.outcome_log[i].power_w == b.outcome_log[i].power_w);
        CHECK(a.outcome_log[i].reward == b.outcome_log[i].reward);
    }
    const RunRecord c = run_simulation(cfg, 11, 23);
    CHECK(a.gain_checksum != c.gain_checksum);
}

TEST_CASE("the channel stream does not depend on the policy kind") {
    ExperimentConfig a = small_config(PolicyKind::mp_ucb1);
    ExperimentConfig b = small_config(PolicyKind::exp3);
    a.horizon = b.horizon = 400;
    CHECK(run_simulation(a, 3, 4).gain_checksum == run_simulation(b, 3, 4).gain_checksum);
}

TEST_CASE("horizon equal to N_C leaves only the initialization phase") {
    ExperimentConfig cfg = small_config(PolicyKind::mp_ucb1);
    cfg.horizon = cfg.n_cu;
    const RunRecord rec = run_simulation(cfg, 7, 8);
    CHECK(rec.outcome_log.size() == static_cast<std::size_t>(cfg.n_cu));
    CHECK(rec.metrics.init_collisions == 0);
    CHECK(rec.metrics.grid == std::vector<std::int64_t>{cfg.n_cu});
}

TEST_CASE("full runs keep every invariant the BS promises") {
    for (PolicyKind kind : {PolicyKind::mp_ucb1, PolicyKind::dlf,
                            PolicyKind::kth_ucb1, PolicyKind::exp3}) {
        const ExperimentConfig cfg = small_config(kind);
        const RunRecord rec = run_simulation(cfg, 13, 14);
        CHECK(rec.metrics.protection_violations == 0);
        CHECK(rec.metrics.rank_violations == 0);
        if (kind != PolicyKind::exp3) CHECK(rec.metrics.init_collisions == 0);

        const PhyConfig phy = cfg.make_phy();
        const double r_tgt = cu_target_rate(phy);
        for (const SubframeOutcome& o : rec.outcome_log) {
            int reuses = 0;
            for (int d = 0; d < cfg.n_d2d; ++d) {
                if (o.collided[d]) {
                    CHECK(o.power_w[d] == 0.0);
                    CHECK(o.reward[d] == 0.0);
                }
                if (o.power_w[d] > 0.0) {
                    CHECK(o.cu_sinr[d] >= phy.sinr_target);
                    CHECK(o.power_w[d] <= phy.max_d2d_power_w);
                    ++reuses;
                }
                CHECK(o.reward[d] >= 0.0);
                CHECK(o.reward[d] <= 1.0);
            }
            // every power-allocated reuse pins its CU at or above r_tgt
            CHECK(o.sum_tput_cu_bps >= reuses * r_tgt - 1e-6);
        }
    }
}

TEST_CASE("ranked policies report ranks that rotate as a permutation") {
    const ExperimentConfig cfg = small_config(PolicyKind::dlf);
    const RunRecord rec = run_simulation(cfg, 2, 9);
    for (const SubframeOutcome& o : rec.outcome_log) {
        std::vector<char> seen(cfg.n_d2d, 0);
        for (int k : o.rank) {
            REQUIRE(k >= 1);
            REQUIRE(k <= cfg.n_d2d);
            seen[k - 1] = 1;
        }
        for (char s : seen) REQUIRE(s == 1);
    }
}

TEST_CASE("metrics from the run match a recomputation from its full log") {
    // log_every = 1 keeps the full outcome stream in the record
    ExperimentConfig cfg = small_config(PolicyKind::dlf);
    cfg.horizon = 300;
    cfg.log_every = 1;
    const RunRecord rec = run_simulation(cfg, 21, 22);

    const Topology topo = generate_topology(cfg.n_cu, cfg.n_d2d, cfg.cell_radius,
                                            cfg.d2d_range, 21);
    const LargeScaleGains ls = draw_large_scale(topo, cfg.make_channel());
    const ArmMeansOracle oracle = estimate_arm_means(
        topo, ls, cfg.make_phy(), cfg.oracle_samples,
        rng::split(21, rng::kTagOracle), RewardModel::normalized, true);

    const std::vector<double> def2 = regret_def2_series(rec.outcome_log, oracle);
    const std::vector<double> def3 = regret_def3_series(rec.outcome_log, oracle);
    REQUIRE(rec.metrics.regret_def2.size() == def2.size());
    for (std::size_t i = 0; i < def2.size(); ++i) {
        REQUIRE(rec.metrics.regret_def2[i] == def2[i]);
        REQUIRE(rec.metrics.regret_def3[i] == def3[i]);
    }
    CHECK(rec.metrics.collision_pct == collision_percentage(rec.outcome_log));
}
