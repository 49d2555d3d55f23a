#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "d2dmab/channel.hpp"
#include "d2dmab/topology.hpp"

using namespace d2dmab;

namespace {

// Two-sample Kolmogorov-Smirnov distance.
double ks_distance(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / a.size() -
                                 static_cast<double>(j) / b.size()));
    }
    return d;
}

}  // namespace

TEST_CASE("path loss matches the 3GPP macrocell curve") {
    CHECK(path_loss_db(100.0) == doctest::Approx(90.5).epsilon(1e-12));
    CHECK(path_loss_db(1000.0) == doctest::Approx(128.1).epsilon(1e-12));
    CHECK(path_loss_db(250.0) == doctest::Approx(105.46254432606861).epsilon(1e-12));
}

TEST_CASE("path loss clamps short links and rejects non-positive distance") {
    CHECK(path_loss_db(0.5) == path_loss_db(3.0));
    CHECK(path_loss_db(0.5, 1.0) == path_loss_db(1.0, 1.0));
    CHECK_THROWS_AS(path_loss_db(0.0), std::domain_error);
    CHECK_THROWS_AS(path_loss_db(-5.0), std::domain_error);
}

TEST_CASE("noise power matches the thermal-floor formula") {
    // -174 dBm/Hz over 180 kHz with 5 / 9 dB noise figures
    CHECK(noise_power_w(180e3, 5.0) ==
          doctest::Approx(2.266065741229501e-15).epsilon(1e-12));
    CHECK(10.0 * std::log10(noise_power_w(180e3, 5.0)) + 30.0 ==
          doctest::Approx(-116.44727494896694).epsilon(1e-12));
    CHECK(10.0 * std::log10(noise_power_w(180e3, 9.0)) + 30.0 ==
          doctest::Approx(-112.44727494896694).epsilon(1e-12));
    CHECK(10.0 * std::log10(noise_power_w(1.0, 0.0)) + 30.0 ==
          doctest::Approx(-174.0).epsilon(1e-12));
    CHECK_THROWS_AS(noise_power_w(0.0, 5.0), std::domain_error);
}

TEST_CASE("zero shadowing variance reduces to pure path loss") {
    const Topology topo = generate_topology(4, 2, 250.0, 50.0, 3);
    ChannelConfig cfg;
    cfg.shadowing_std_db = 0.0;
    const LargeScaleGains ls = draw_large_scale(topo, cfg);
    for (int c = 1; c <= 4; ++c) {
        const double pl = path_loss_db(distance(topo.cu_positions[c - 1], topo.bs_position),
                                       cfg.min_link_distance_m);
        CHECK(ls.g_cb(c) == doctest::Approx(std::pow(10.0, -pl / 10.0)).epsilon(1e-14));
    }
}

TEST_CASE("shadowing standard deviation is the configured 8 dB") {
    // pool the shadowing offsets of many topologies' CU->BS links
    double sum = 0.0, sumsq = 0.0;
    std::int64_t n = 0;
    for (std::uint64_t seed = 0; seed < 5000; ++seed) {
        const Topology topo = generate_topology(20, 1, 250.0, 50.0, seed);
        const LargeScaleGains ls = draw_large_scale(topo, ChannelConfig{});
        for (int c = 1; c <= 20; ++c) {
            const double pl = path_loss_db(
                distance(topo.cu_positions[c - 1], topo.bs_position), 3.0);
            const double shadow_db = -10.0 * std::log10(ls.g_cb(c)) - pl;
            sum += shadow_db;
            sumsq += shadow_db * shadow_db;
            ++n;
        }
    }
    const double mean = sum / n;
    const double std = std::sqrt(sumsq / n - mean * mean);
    CHECK(std == doctest::Approx(8.0).epsilon(0.2 / 8.0));  // 8 dB +/- 0.2 dB
    CHECK(mean == doctest::Approx(0.0).epsilon(0.1));
}

TEST_CASE("large-scale gains are reproducible from the topology seed") {
    const Topology topo = generate_topology(20, 5, 250.0, 50.0, 11);
    const LargeScaleGains a = draw_large_scale(topo, ChannelConfig{});
    const LargeScaleGains b = draw_large_scale(topo, ChannelConfig{});
    CHECK(a.cu_to_bs == b.cu_to_bs);
    CHECK(a.cu_to_d2d == b.cu_to_d2d);
}

TEST_CASE("fading disabled returns the large-scale gains exactly") {
    const Topology topo = generate_topology(5, 2, 250.0, 50.0, 4);
    ChannelConfig cfg;
    cfg.fading_enabled = false;
    const LargeScaleGains ls = draw_large_scale(topo, cfg);
    const ChannelDraw ch = draw_channel(ls, cfg, 123, 17);
    CHECK(ch.cu_to_bs == ls.cu_to_bs);
    CHECK(ch.d2d_link == ls.d2d_link);
    CHECK(ch.cu_to_d2d == ls.cu_to_d2d);
}

TEST_CASE("fading multipliers have unit mean") {
    const Topology topo = generate_topology(1, 1, 250.0, 50.0, 4);
    const LargeScaleGains ls = draw_large_scale(topo, ChannelConfig{});
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const ChannelDraw ch = draw_channel(ls, ChannelConfig{}, 5, i);
        sum += ch.g_d(1) / ls.g_d(1);
    }
    CHECK(sum / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("channel draws are bit-identical at the same (seed, subframe)") {
    const Topology topo = generate_topology(20, 5, 250.0, 50.0, 4);
    const LargeScaleGains ls = draw_large_scale(topo, ChannelConfig{});
    const ChannelDraw a = draw_channel(ls, ChannelConfig{}, 77, 12345);
    const ChannelDraw b = draw_channel(ls, ChannelConfig{}, 77, 12345);
    CHECK(a.cu_to_bs == b.cu_to_bs);
    CHECK(a.d2d_to_bs == b.d2d_to_bs);
    CHECK(a.d2d_link == b.d2d_link);
    CHECK(a.cu_to_d2d == b.cu_to_d2d);
    const ChannelDraw c = draw_channel(ls, ChannelConfig{}, 77, 12346);
    CHECK(a.d2d_link != c.d2d_link);
}

TEST_CASE("all gains stay positive and finite under a long fuzz") {
    const Topology topo = generate_topology(20, 5, 250.0, 50.0, 21);
    const LargeScaleGains ls = draw_large_scale(topo, ChannelConfig{});
    for (double g : ls.cu_to_d2d) {
        REQUIRE(g > 0.0);
        REQUIRE(std::isfinite(g));
    }
    ChannelDraw ch;
    std::int64_t checked = 0;
    for (std::int64_t n = 0; checked < 1000000; ++n) {
        draw_channel(ls, ChannelConfig{}, 8, n, ch);
        for (double g : ch.cu_to_bs) {
            REQUIRE(g > 0.0);
            REQUIRE(std::isfinite(g));
        }
        for (double g : ch.cu_to_d2d) {
            REQUIRE(g > 0.0);
            REQUIRE(std::isfinite(g));
        }
        checked += 20 + 100;
    }
}

TEST_CASE("gain stream is stationary across disjoint windows") {
    // two-sample KS on g_d over subframes [0,1e4) and [5e4,6e4), alpha=0.01
    const Topology topo = generate_topology(1, 1, 250.0, 50.0, 31);
    const LargeScaleGains ls = draw_large_scale(topo, ChannelConfig{});
    std::vector<double> w1, w2;
    ChannelDraw ch;
    for (int n = 0; n < 10000; ++n) {
        draw_channel(ls, ChannelConfig{}, 9, n, ch);
        w1.push_back(ch.g_d(1));
        draw_channel(ls, ChannelConfig{}, 9, 50000 + n, ch);
        w2.push_back(ch.g_d(1));
    }
    const double d = ks_distance(w1, w2);
    const double critical = 1.6276 * std::sqrt(2.0 / 10000.0);
    CHECK(d < critical);
}
