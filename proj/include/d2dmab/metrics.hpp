#pragma once

// Regret, collision, fairness and throughput accounting.
//
// Players never see the quantities computed here: the oracle arm means come
// from fresh collision-free channel draws that only the simulator can make,
// and the counterfactual log records the reward every (player, arm) pair
// would have earned each subframe had the player been the sole selector.
//
// Three regret definitions are supported:
//   def2  vs the per-player best-mean arm,
//   def3  vs the rank-K-best arm, |mu_K - x| summed per subframe (ranked
//         policies only),
//   adversarial  vs the best fixed arm in hindsight on the counterfactual
//         log, summed over players.
//
// Everything consumes the outcome log only, never policy internals.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "d2dmab/phy.hpp"
#include "d2dmab/policies.hpp"
#include "d2dmab/rng.hpp"
#include "d2dmab/topology.hpp"

namespace d2dmab {

// True mean rewards per (player, arm), estimated by Monte Carlo over fresh
// collision-free draws. N_D x N_C matrices are row-major per player.
struct ArmMeansOracle {
    RewardModel model = RewardModel::normalized;
    int n_cu = 0;
    int n_d2d = 0;
    std::vector<double> mean;          // mu_{d,c}
    std::vector<double> stderr_;       // estimation standard error per (d,c)
    std::vector<double> sorted_means;  // descending per player
    std::vector<double> best_mean;     // mu_{d,c*}
    std::vector<int> best_arm;         // c_d*, 1-based, ties to the lowest CU
    std::int64_t estimation_samples = 0;

    double mu(int d, int c) const { return mean[(d - 1) * n_cu + (c - 1)]; }
    double stderr_of(int d, int c) const { return stderr_[(d - 1) * n_cu + (c - 1)]; }
    // K-th largest expected reward for player d.
    double kth_largest(int d, int k) const {
        return sorted_means[(d - 1) * n_cu + (k - 1)];
    }
    double sum_best_means() const {
        double s = 0.0;
        for (double v : best_mean) s += v;
        return s;
    }
};

// Reward of one collision-free transmission with all four fading multipliers
// drawn from `s`.
inline double sample_sole_reward(double ls_cb, double ls_db, double ls_d,
                                 double ls_cd, const PhyConfig& phy,
                                 RewardModel model, rng::Stream& s) {
    const double g_cb = ls_cb * s.exponential();
    const double g_db = ls_db * s.exponential();
    const double g_d = ls_d * s.exponential();
    const double g_cd = ls_cd * s.exponential();
    const double p = allocate_power(g_cb, g_db, phy);
    return reward_of(model, d2d_throughput(p, g_d, g_cd, phy), phy);
}

inline ArmMeansOracle estimate_arm_means(const Topology& topo,
                                         const LargeScaleGains& ls,
                                         const PhyConfig& phy,
                                         std::int64_t samples,
                                         std::uint64_t seed,
                                         RewardModel model = RewardModel::normalized,
                                         bool fading = true) {
    if (samples < 10000)
        throw std::invalid_argument("estimate_arm_means: samples must be >= 1e4");
    ArmMeansOracle o;
    o.model = model;
    o.n_cu = topo.n_cu();
    o.n_d2d = topo.n_d2d();
    o.estimation_samples = samples;
    o.mean.assign(static_cast<std::size_t>(o.n_cu) * o.n_d2d, 0.0);
    o.stderr_.assign(o.mean.size(), 0.0);

    for (int d = 1; d <= o.n_d2d; ++d) {
        for (int c = 1; c <= o.n_cu; ++c) {
            const std::size_t idx = static_cast<std::size_t>(d - 1) * o.n_cu + (c - 1);
            rng::Stream s(rng::split(seed, rng::kTagOracle, idx));
            double sum = 0.0, sumsq = 0.0;
            if (fading) {
                for (std::int64_t i = 0; i < samples; ++i) {
                    const double x = sample_sole_reward(ls.g_cb(c), ls.g_db(d),
                                                        ls.g_d(d), ls.g_cd(c, d),
                                                        phy, model, s);
                    sum += x;
                    sumsq += x * x;
                }
            } else {
                const double p = allocate_power(ls.g_cb(c), ls.g_db(d), phy);
                const double x =
                    reward_of(model, d2d_throughput(p, ls.g_d(d), ls.g_cd(c, d), phy), phy);
                sum = x * static_cast<double>(samples);
                sumsq = x * x * static_cast<double>(samples);
            }
            const double n = static_cast<double>(samples);
            const double m = sum / n;
            const double var = std::max(0.0, (sumsq - n * m * m) / (n - 1.0));
            o.mean[idx] = m;
            o.stderr_[idx] = std::sqrt(var / n);
        }
    }

    o.sorted_means = o.mean;
    o.best_mean.resize(o.n_d2d);
    o.best_arm.resize(o.n_d2d);
    for (int d = 1; d <= o.n_d2d; ++d) {
        auto row = o.sorted_means.begin() + static_cast<std::size_t>(d - 1) * o.n_cu;
        std::sort(row, row + o.n_cu, std::greater<>());
        int best = 1;
        for (int c = 2; c <= o.n_cu; ++c)
            if (o.mu(d, c) > o.mu(d, best)) best = c;
        o.best_arm[d - 1] = best;
        o.best_mean[d - 1] = o.mu(d, best);
    }
    return o;
}

// Reward every (player, arm) pair would have earned as the sole selector.
// reward(n, d, c); n is 1-based like subframes.
struct CounterfactualLog {
    int n_cu = 0;
    int n_d2d = 0;
    std::vector<double> reward;

    double at(std::int64_t n, int d, int c) const {
        return reward[((n - 1) * n_d2d + (d - 1)) * n_cu + (c - 1)];
    }
};

// --- whole-log metric functions ----------------------------------------------

inline std::vector<double> regret_def2_series(
    const std::vector<SubframeOutcome>& log, const ArmMeansOracle& oracle) {
    const double best_sum = oracle.sum_best_means();
    std::vector<double> out(log.size());
    double cum = 0.0;
    for (std::size_t i = 0; i < log.size(); ++i) {
        for (double x : log[i].reward) cum += x;
        out[i] = static_cast<double>(i + 1) * best_sum - cum;
    }
    return out;
}

inline std::vector<double> regret_def3_series(
    const std::vector<SubframeOutcome>& log, const ArmMeansOracle& oracle) {
    std::vector<double> out(log.size());
    double cum = 0.0;
    for (std::size_t i = 0; i < log.size(); ++i) {
        const SubframeOutcome& o = log[i];
        for (int d = 1; d <= oracle.n_d2d; ++d) {
            if (o.rank[d - 1] < 1)
                throw std::logic_error("regret_def3_series: outcome has no ranks");
            const double target = oracle.kth_largest(d, o.rank[d - 1]);
            const double x = o.collided[d - 1] ? 0.0 : o.reward[d - 1];
            cum += std::abs(target - x);
        }
        out[i] = cum;
    }
    return out;
}

inline std::vector<double> regret_adversarial_series(
    const std::vector<SubframeOutcome>& log, const CounterfactualLog& cf) {
    std::vector<double> out(log.size());
    std::vector<double> cf_cum(static_cast<std::size_t>(cf.n_d2d) * cf.n_cu, 0.0);
    std::vector<double> actual(cf.n_d2d, 0.0);
    for (std::size_t i = 0; i < log.size(); ++i) {
        const auto n = static_cast<std::int64_t>(i + 1);
        double regret = 0.0;
        for (int d = 1; d <= cf.n_d2d; ++d) {
            actual[d - 1] += log[i].reward[d - 1];
            double best = 0.0;
            for (int c = 1; c <= cf.n_cu; ++c) {
                double& cum = cf_cum[(d - 1) * cf.n_cu + (c - 1)];
                cum += cf.at(n, d, c);
                best = std::max(best, cum);
            }
            regret += best - actual[d - 1];
        }
        out[i] = regret;
    }
    return out;
}

inline std::vector<double> collision_percentage(
    const std::vector<SubframeOutcome>& log) {
    if (log.empty()) return {};
    std::vector<double> pct(log.front().collided.size(), 0.0);
    for (const auto& o : log)
        for (std::size_t d = 0; d < pct.size(); ++d)
            if (o.collided[d]) pct[d] += 1.0;
    for (double& v : pct) v = 100.0 * v / static_cast<double>(log.size());
    return pct;
}

// Share of subframes a player sole-selected `target_arm[d-1]`.
inline std::vector<double> fairness_percentage(
    const std::vector<SubframeOutcome>& log, const std::vector<int>& target_arm) {
    std::vector<double> pct(target_arm.size(), 0.0);
    for (const auto& o : log)
        for (std::size_t d = 0; d < pct.size(); ++d)
            if (!o.collided[d] && o.selection[d] == target_arm[d]) pct[d] += 1.0;
    for (double& v : pct) v = 100.0 * v / static_cast<double>(log.size());
    return pct;
}

// --- incremental accumulator used by the simulation loop ----------------------

// Scalar summaries plus time series sampled on the logging grid.
struct RunMetrics {
    std::vector<std::int64_t> grid;     // logged subframes
    std::vector<double> regret_def2;
    std::vector<double> regret_def3;    // empty for unranked policies
    std::vector<double> regret_adv;
    std::vector<double> sum_tput_d2d;   // instantaneous, at grid
    std::vector<double> sum_tput_cu;

    std::vector<double> collision_pct;  // per player
    std::vector<double> fairness_pct;   // per player
    std::vector<double> counterfactual_best_return;  // G*(T) per player
    std::vector<int> fairness_arm;      // the arm fairness was measured on

    double mean_tput_d2d_bps = 0.0;     // time average over the full horizon
    double mean_tput_cu_bps = 0.0;
    double tail_mean_tput_d2d_bps = 0.0;  // over the second half of the horizon
    double tail_mean_tput_cu_bps = 0.0;

    std::int64_t horizon = 0;
    std::int64_t protection_violations = 0;  // P_d > 0 with CU SINR below target
    std::int64_t init_collisions = 0;        // collisions inside the init window
    std::int64_t rank_violations = 0;        // subframes whose ranks are not a permutation

    double final_regret_def2() const { return regret_def2.empty() ? 0.0 : regret_def2.back(); }
    double final_regret_def3() const { return regret_def3.empty() ? 0.0 : regret_def3.back(); }
    double final_regret_adv() const { return regret_adv.empty() ? 0.0 : regret_adv.back(); }
};

class MetricsAccumulator {
public:
    MetricsAccumulator(PolicyKind kind, const ArmMeansOracle& oracle,
                       const PhyConfig& phy, std::int64_t horizon,
                       std::int64_t log_every)
        : kind_(kind), oracle_(oracle), phy_(phy), horizon_(horizon),
          log_every_(std::max<std::int64_t>(log_every, 1)) {
        const std::size_t cells = static_cast<std::size_t>(oracle.n_d2d) * oracle.n_cu;
        cf_cum_.assign(cells, 0.0);
        sole_select_.assign(cells, 0);
        actual_return_.assign(oracle.n_d2d, 0.0);
        collisions_.assign(oracle.n_d2d, 0);
        ranked_ = is_ranked(kind);
    }

    // counterfactual: n_d2d * n_cu rewards for this subframe, player-major.
    void add(const SubframeOutcome& o, const std::vector<double>& counterfactual) {
        const std::int64_t n = o.subframe;
        const int n_cu = oracle_.n_cu;
        const int n_d2d = oracle_.n_d2d;

        for (int d = 1; d <= n_d2d; ++d) {
            const double x = o.reward[d - 1];
            reward_cum_ += x;
            actual_return_[d - 1] += x;
            if (o.collided[d - 1]) {
                ++collisions_[d - 1];
                if (n <= n_cu && is_index_based(kind_)) ++init_collisions_;
            } else {
                ++sole_select_[(d - 1) * n_cu + (o.selection[d - 1] - 1)];
            }
            if (ranked_)
                def3_cum_ += std::abs(oracle_.kth_largest(d, o.rank[d - 1]) -
                                      (o.collided[d - 1] ? 0.0 : x));
            if (o.power_w[d - 1] > 0.0 && o.cu_sinr[d - 1] < phy_.sinr_target)
                ++protection_violations_;
            for (int c = 1; c <= n_cu; ++c)
                cf_cum_[(d - 1) * n_cu + (c - 1)] +=
                    counterfactual[(d - 1) * n_cu + (c - 1)];
        }

        if (ranked_ && !is_rank_permutation(o.rank)) ++rank_violations_;

        tput_d2d_sum_ += o.sum_tput_d2d_bps;
        tput_cu_sum_ += o.sum_tput_cu_bps;
        if (n > horizon_ / 2) {
            tail_tput_d2d_sum_ += o.sum_tput_d2d_bps;
            tail_tput_cu_sum_ += o.sum_tput_cu_bps;
            ++tail_count_;
        }

        if (n % log_every_ == 0 || n == horizon_) {
            metrics_.grid.push_back(n);
            metrics_.regret_def2.push_back(
                static_cast<double>(n) * oracle_.sum_best_means() - reward_cum_);
            if (ranked_) metrics_.regret_def3.push_back(def3_cum_);
            double adv = 0.0;
            for (int d = 1; d <= n_d2d; ++d) {
                double best = 0.0;
                for (int c = 1; c <= n_cu; ++c)
                    best = std::max(best, cf_cum_[(d - 1) * n_cu + (c - 1)]);
                adv += best - actual_return_[d - 1];
            }
            metrics_.regret_adv.push_back(adv);
            metrics_.sum_tput_d2d.push_back(o.sum_tput_d2d_bps);
            metrics_.sum_tput_cu.push_back(o.sum_tput_cu_bps);
        }
        last_subframe_ = n;
    }

    RunMetrics finish() {
        const int n_cu = oracle_.n_cu;
        const int n_d2d = oracle_.n_d2d;
        const double t = static_cast<double>(last_subframe_);

        metrics_.horizon = last_subframe_;
        metrics_.collision_pct.resize(n_d2d);
        metrics_.fairness_pct.resize(n_d2d);
        metrics_.fairness_arm.resize(n_d2d);
        metrics_.counterfactual_best_return.resize(n_d2d);
        for (int d = 1; d <= n_d2d; ++d) {
            metrics_.collision_pct[d - 1] = 100.0 * collisions_[d - 1] / t;
            int arm = oracle_.best_arm[d - 1];
            if (kind_ == PolicyKind::exp3) {
                arm = 1;
                for (int c = 2; c <= n_cu; ++c)
                    if (cf_cum_[(d - 1) * n_cu + (c - 1)] >
                        cf_cum_[(d - 1) * n_cu + (arm - 1)])
                        arm = c;
            }
            metrics_.fairness_arm[d - 1] = arm;
            metrics_.fairness_pct[d - 1] =
                100.0 * sole_select_[(d - 1) * n_cu + (arm - 1)] / t;
            double best = 0.0;
            for (int c = 1; c <= n_cu; ++c)
                best = std::max(best, cf_cum_[(d - 1) * n_cu + (c - 1)]);
            metrics_.counterfactual_best_return[d - 1] = best;
        }
        metrics_.mean_tput_d2d_bps = tput_d2d_sum_ / t;
        metrics_.mean_tput_cu_bps = tput_cu_sum_ / t;
        if (tail_count_ > 0) {
            metrics_.tail_mean_tput_d2d_bps = tail_tput_d2d_sum_ / tail_count_;
            metrics_.tail_mean_tput_cu_bps = tail_tput_cu_sum_ / tail_count_;
        }
        metrics_.protection_violations = protection_violations_;
        metrics_.init_collisions = init_collisions_;
        metrics_.rank_violations = rank_violations_;
        return std::move(metrics_);
    }

private:
    static bool is_rank_permutation(const std::vector<int>& rank) {
        std::vector<char> seen(rank.size(), 0);
        for (int k : rank) {
            if (k < 1 || k > static_cast<int>(rank.size()) || seen[k - 1]) return false;
            seen[k - 1] = 1;
        }
        return true;
    }

    PolicyKind kind_;
    const ArmMeansOracle& oracle_;
    const PhyConfig& phy_;
    std::int64_t horizon_;
    std::int64_t log_every_;
    bool ranked_ = false;

    RunMetrics metrics_;
    std::vector<double> cf_cum_;
    std::vector<std::int64_t> sole_select_;
    std::vector<double> actual_return_;
    std::vector<std::int64_t> collisions_;
    double reward_cum_ = 0.0;
    double def3_cum_ = 0.0;
    double tput_d2d_sum_ = 0.0;
    double tput_cu_sum_ = 0.0;
    double tail_tput_d2d_sum_ = 0.0;
    double tail_tput_cu_sum_ = 0.0;
    std::int64_t tail_count_ = 0;
    std::int64_t last_subframe_ = 0;
    std::int64_t protection_violations_ = 0;
    std::int64_t init_collisions_ = 0;
    std::int64_t rank_violations_ = 0;
};

}  // namespace d2dmab
