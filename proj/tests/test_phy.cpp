#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "d2dmab/phy.hpp"
#include "d2dmab/rng.hpp"

using namespace d2dmab;

namespace {

PhyConfig default_phy() { return make_phy_config(); }

// Single-link draw with explicit gains, 1 CU and 1 player.
ChannelDraw gains(double g_cb, double g_db, double g_d = 1e-8, double g_cd = 1e-12) {
    ChannelDraw ch;
    ch.n_cu = 1;
    ch.n_d2d = 1;
    ch.cu_to_bs = {g_cb};
    ch.d2d_to_bs = {g_db};
    ch.d2d_link = {g_d};
    ch.cu_to_d2d = {g_cd};
    return ch;
}

// Independent oracle for the power rule: bisect for the largest p in
// [0, P_max] with cu_sinr(p) >= target.
double bisect_power(double g_cb, double g_db, const PhyConfig& cfg) {
    if (cu_sinr(g_cb, g_db, 0.0, cfg) < cfg.sinr_target) return 0.0;
    if (cu_sinr(g_cb, g_db, cfg.max_d2d_power_w, cfg) >= cfg.sinr_target)
        return cfg.max_d2d_power_w;
    double lo = 0.0, hi = cfg.max_d2d_power_w;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (cu_sinr(g_cb, g_db, mid, cfg) >= cfg.sinr_target)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

}  // namespace

TEST_CASE("config factory fills the reference defaults") {
    const PhyConfig cfg = default_phy();
    CHECK(cfg.cu_power_w == doctest::Approx(0.25));
    CHECK(cfg.max_d2d_power_w == doctest::Approx(0.2));
    CHECK(cfg.sinr_target == doctest::Approx(10.0));
    CHECK(cfg.noise_bs_w == doctest::Approx(2.266065741229501e-15).epsilon(1e-12));
    CHECK(cfg.noise_d2d_w == doctest::Approx(5.692099788303088e-15).epsilon(1e-12));
    CHECK(cfg.reward_norm_bps == doctest::Approx(2391814.195531298).epsilon(1e-12));
    CHECK(cfg.rate_threshold_bps == doctest::Approx(64e3));
    CHECK_THROWS_AS(make_phy_config(250, 200, 10, 180e3, 5, 9, -174, 64e3, -40),
                    std::invalid_argument);  // r_norm below r'
}

TEST_CASE("collision resolution marks every sharer and nobody else") {
    CHECK(resolve_collisions({3, 3, 7}, 10) == std::vector<char>{1, 1, 0});
    CHECK(resolve_collisions({1, 2, 3}, 3) == std::vector<char>{0, 0, 0});
    CHECK(resolve_collisions({5, 5, 5, 5, 5}, 5) == std::vector<char>{1, 1, 1, 1, 1});
    CHECK_THROWS_AS(resolve_collisions({0, 1}, 3), std::out_of_range);
    CHECK_THROWS_AS(resolve_collisions({4}, 3), std::out_of_range);
}

TEST_CASE("power allocation follows the closed form and the cap") {
    PhyConfig cfg = default_phy();
    cfg.noise_bs_w = 1e-13;

    // P_c*g_cB = 1e-10 W, g_dB = 1e-12: raw power 9.9 W, capped at 0.2 W
    const ChannelDraw ch = gains(1e-10 / cfg.cu_power_w, 1e-12);
    CHECK(allocate_power(1, 1, ch, false, cfg) == doctest::Approx(0.2));

    // uncapped branch: raw power below the cap comes out of the formula
    PhyConfig big = cfg;
    big.max_d2d_power_w = 100.0;
    CHECK(allocate_power(1, 1, ch, false, big) == doctest::Approx(9.9).epsilon(1e-9));

    // CU SNR exactly at target: nothing left to allocate
    const double g_cb_at_target = cfg.sinr_target * cfg.noise_bs_w / cfg.cu_power_w;
    CHECK(allocate_power(1, 1, gains(g_cb_at_target, 1e-12), false, cfg) == 0.0);
    // below target as well
    CHECK(allocate_power(1, 1, gains(g_cb_at_target * 0.5, 1e-12), false, cfg) == 0.0);

    // collision always zeroes the power
    CHECK(allocate_power(1, 1, ch, true, cfg) == 0.0);
}

TEST_CASE("cu_sinr reduces to plain SNR without D2D power") {
    const PhyConfig cfg = default_phy();
    const ChannelDraw ch = gains(1e-9, 1e-12);
    CHECK(cu_sinr(1, 1, 0.0, ch, cfg) ==
          doctest::Approx(cfg.cu_power_w * 1e-9 / cfg.noise_bs_w));
}

TEST_CASE("uncapped allocation pins the CU at the target SINR") {
    const PhyConfig cfg = default_phy();
    rng::Stream s(404);
    int uncapped_cases = 0;
    while (uncapped_cases < 1000) {
        const double g_cb = std::pow(10.0, -12.0 + 5.0 * s.uniform());
        const double g_db = std::pow(10.0, -13.0 + 5.0 * s.uniform());
        const ChannelDraw ch = gains(g_cb, g_db);
        const double p = allocate_power(1, 1, ch, false, cfg);
        if (p <= 0.0 || p == cfg.max_d2d_power_w) continue;
        ++uncapped_cases;
        const double sinr = cu_sinr(1, 1, p, ch, cfg);
        REQUIRE(sinr >= cfg.sinr_target);  // protection is exact, not approximate
        REQUIRE(sinr == doctest::Approx(cfg.sinr_target).epsilon(1e-12));
    }
}

TEST_CASE("capped allocation leaves the CU above target") {
    const PhyConfig cfg = default_phy();
    const ChannelDraw ch = gains(1e-7, 1e-12);  // huge CU SNR, tiny D2D leakage
    const double p = allocate_power(1, 1, ch, false, cfg);
    CHECK(p == cfg.max_d2d_power_w);
    CHECK(cu_sinr(1, 1, p, ch, cfg) > cfg.sinr_target);
}

TEST_CASE("allocation matches the bisection oracle on random gains") {
    const PhyConfig cfg = default_phy();
    rng::Stream s(2024);
    for (int i = 0; i < 2000; ++i) {
        const double g_cb = std::pow(10.0, -16.0 + 10.0 * s.uniform());
        const double g_db = std::pow(10.0, -16.0 + 10.0 * s.uniform());
        const double a = allocate_power(gains(g_cb, g_db).g_cb(1), g_db, cfg);
        const double b = bisect_power(g_cb, g_db, cfg);
        REQUIRE(std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b)) + 1e-18);
    }
}

TEST_CASE("throughput follows Shannon on the D2D link") {
    PhyConfig cfg = default_phy();
    // D2D SINR of exactly 1 -> B bits/s
    const double g_cd = 1e-12;
    const double denom = cfg.noise_d2d_w + cfg.cu_power_w * g_cd;
    const double p = 0.1;
    ChannelDraw ch = gains(1e-9, 1e-12, denom / p, g_cd);
    CHECK(d2d_throughput(1, 1, p, ch, cfg) == doctest::Approx(180e3).epsilon(1e-12));
    // SINR 3 -> 2B
    ch.d2d_link = {3.0 * denom / p};
    CHECK(d2d_throughput(1, 1, p, ch, cfg) == doctest::Approx(360e3).epsilon(1e-12));
    CHECK(d2d_throughput(1, 1, 0.0, ch, cfg) == 0.0);
}

TEST_CASE("throughput is monotone in the gains and the power") {
    const PhyConfig cfg = default_phy();
    rng::Stream s(7);
    for (int i = 0; i < 2000; ++i) {
        const double p = 0.001 + s.uniform();
        const double g_d = std::pow(10.0, -10.0 + 4.0 * s.uniform());
        const double g_cd = std::pow(10.0, -13.0 + 4.0 * s.uniform());
        const double base = d2d_throughput(p, g_d, g_cd, cfg);
        REQUIRE(d2d_throughput(p * 1.01, g_d, g_cd, cfg) > base);
        REQUIRE(d2d_throughput(p, g_d * 1.01, g_cd, cfg) > base);
        REQUIRE(d2d_throughput(p, g_d, g_cd * 1.01, cfg) < base);
    }
}

TEST_CASE("normalized reward is linear below the cap and clipped at 1") {
    const PhyConfig cfg = default_phy();
    CHECK(reward_normalized(0.0, cfg) == 0.0);
    CHECK(reward_normalized(cfg.reward_norm_bps, cfg) == 1.0);
    CHECK(reward_normalized(0.5 * cfg.reward_norm_bps, cfg) == doctest::Approx(0.5));
    CHECK(reward_normalized(10.0 * cfg.reward_norm_bps, cfg) == 1.0);
}

TEST_CASE("Bernoulli reward thresholds inclusively at r'") {
    const PhyConfig cfg = default_phy();
    CHECK(reward_bernoulli(64e3, cfg) == 1.0);
    CHECK(reward_bernoulli(0.0, cfg) == 0.0);
    CHECK(reward_bernoulli(63.9e3, cfg) == 0.0);
    CHECK(reward_bernoulli(1e9, cfg) == 1.0);
}

TEST_CASE("CU target rate is B log2(1 + gamma)") {
    CHECK(cu_target_rate(default_phy()) ==
          doctest::Approx(622697.6913547135).epsilon(1e-12));
}
