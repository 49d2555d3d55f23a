#pragma once

// The five learning policies behind one per-player interface.
//
// Index family (UCB1, MP-UCB1, DLF, kth-UCB1): round-robin initialization
// over the first N_C subframes, then selection driven by the UCB1 index
// mu_hat + sqrt(2 ln n / y). DLF and kth-UCB1 rotate a rank K per subframe
// and work inside O_K, the set of the K largest-index arms.
//
// Exp3: exponential weights with an alpha/N_C exploration floor; no
// initialization phase, weights start uniform.
//
// Subframes are 1-based. Players and CUs are 1-based, matching the model's
// formulas; tie-breaks everywhere go to the lowest CU index so runs are
// reproducible.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "d2dmab/rng.hpp"

namespace d2dmab {

enum class PolicyKind { ucb1, mp_ucb1, dlf, kth_ucb1, exp3 };

inline bool is_ranked(PolicyKind k) {
    return k == PolicyKind::dlf || k == PolicyKind::kth_ucb1;
}

inline bool is_index_based(PolicyKind k) { return k != PolicyKind::exp3; }

inline std::string to_string(PolicyKind k) {
    switch (k) {
        case PolicyKind::ucb1: return "ucb1";
        case PolicyKind::mp_ucb1: return "mp_ucb1";
        case PolicyKind::dlf: return "dlf";
        case PolicyKind::kth_ucb1: return "kth_ucb1";
        case PolicyKind::exp3: return "exp3";
    }
    throw std::logic_error("to_string: bad PolicyKind");
}

inline PolicyKind parse_policy_kind(const std::string& s) {
    if (s == "ucb1") return PolicyKind::ucb1;
    if (s == "mp_ucb1") return PolicyKind::mp_ucb1;
    if (s == "dlf") return PolicyKind::dlf;
    if (s == "kth_ucb1") return PolicyKind::kth_ucb1;
    if (s == "exp3") return PolicyKind::exp3;
    throw std::invalid_argument("unknown policy '" + s +
                                "' (expected ucb1|mp_ucb1|dlf|kth_ucb1|exp3)");
}

struct PolicyConfig {
    PolicyKind kind = PolicyKind::mp_ucb1;
    double alpha = 0.01;  // Exp3 exploration share, in (0,1]
    double beta = 50.0;   // kth-UCB1 schedule eps_n = min(beta/n, 1)

    void validate() const {
        if (!(alpha > 0.0 && alpha <= 1.0))
            throw std::invalid_argument("PolicyConfig: alpha must be in (0,1]");
        if (!(beta > 0.0))
            throw std::invalid_argument("PolicyConfig: beta must be positive");
    }
};

// --- building blocks ----------------------------------------------------------

// Round-robin initialization: in subframe n of [1, N_C] player d takes
// CU ((n+d) mod N_C) + 1; distinct players get distinct CUs.
inline int init_selection(int d, std::int64_t n, int n_cu) {
    if (n < 1 || n > n_cu)
        throw std::logic_error("init_selection: subframe outside init window");
    return static_cast<int>((n + d) % n_cu) + 1;
}

// Exact running mean after the y_new-th observation.
inline double update_mean(double mu_prev, std::int64_t y_new, double x) {
    return (static_cast<double>(y_new - 1) * mu_prev + x) / static_cast<double>(y_new);
}

inline double ucb1_index(double mu_hat, std::int64_t y, std::int64_t n) {
    if (y < 1) throw std::logic_error("ucb1_index: arm never sampled");
    return mu_hat + std::sqrt(2.0 * std::log(static_cast<double>(n)) /
                              static_cast<double>(y));
}

inline double lcb_index(double mu_hat, std::int64_t y, std::int64_t n) {
    if (y < 1) throw std::logic_error("lcb_index: arm never sampled");
    return mu_hat - std::sqrt(2.0 * std::log(static_cast<double>(n)) /
                              static_cast<double>(y));
}

inline int select_ucb1(const std::vector<double>& mu_hat,
                       const std::vector<std::int64_t>& y, std::int64_t n) {
    int best = 1;
    double best_index = ucb1_index(mu_hat[0], y[0], n);
    for (int c = 2; c <= static_cast<int>(mu_hat.size()); ++c) {
        const double index = ucb1_index(mu_hat[c - 1], y[c - 1], n);
        if (index > best_index) {
            best_index = index;
            best = c;
        }
    }
    return best;
}

// Rank rotation: for fixed n the map d -> K is a bijection onto {1..N_D}.
inline int assign_rank(int d, std::int64_t n, int n_d2d) {
    return static_cast<int>((n + d) % n_d2d) + 1;
}

// O_K: the K arms with the largest UCB1 indices, stable on (index desc, CU asc).
inline std::vector<int> top_k_by_ucb1(const std::vector<double>& mu_hat,
                                      const std::vector<std::int64_t>& y,
                                      std::int64_t n, int k) {
    const int n_cu = static_cast<int>(mu_hat.size());
    if (k < 1 || k > n_cu)
        throw std::logic_error("top_k_by_ucb1: rank outside [1, N_C]");
    std::vector<int> order(n_cu);
    std::iota(order.begin(), order.end(), 1);
    std::vector<double> index(n_cu);
    for (int c = 1; c <= n_cu; ++c) index[c - 1] = ucb1_index(mu_hat[c - 1], y[c - 1], n);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return index[a - 1] > index[b - 1];
    });
    order.resize(k);
    return order;
}

// DLF: within O_K, take the arm with the smallest lower confidence bound.
inline int select_dlf(const std::vector<double>& mu_hat,
                      const std::vector<std::int64_t>& y, std::int64_t n, int k) {
    const std::vector<int> pool = top_k_by_ucb1(mu_hat, y, n, k);
    int best = 0;
    double best_index = 0.0;
    for (int c : pool) {
        const double index = lcb_index(mu_hat[c - 1], y[c - 1], n);
        if (best == 0 || index < best_index || (index == best_index && c < best)) {
            best_index = index;
            best = c;
        }
    }
    return best;
}

// Fair kth-UCB1: the minimum-UCB1 arm of O_K, except with probability
// eps_n = min(beta/n, 1) a uniform member of O_K.
inline int select_kth_ucb1(const std::vector<double>& mu_hat,
                           const std::vector<std::int64_t>& y, std::int64_t n,
                           int k, double beta, rng::Stream& rng) {
    const std::vector<int> pool = top_k_by_ucb1(mu_hat, y, n, k);
    const double eps = std::min(beta / static_cast<double>(n), 1.0);
    if (rng.uniform() < eps)
        return pool[rng.uniform_int(static_cast<std::uint32_t>(pool.size()))];
    int best = 0;
    double best_index = 0.0;
    for (int c : pool) {
        const double index = ucb1_index(mu_hat[c - 1], y[c - 1], n);
        if (best == 0 || index < best_index || (index == best_index && c < best)) {
            best_index = index;
            best = c;
        }
    }
    return best;
}

// p_c = (1-alpha) w_c / sum(w) + alpha / N_C
inline std::vector<double> exp3_probabilities(const std::vector<double>& weights,
                                              double alpha) {
    const int n_cu = static_cast<int>(weights.size());
    double sum = 0.0;
    for (double w : weights) {
        if (!(w > 0.0) || !std::isfinite(w))
            throw std::logic_error("exp3_probabilities: weights must be positive finite");
        sum += w;
    }
    std::vector<double> p(n_cu);
    for (int c = 0; c < n_cu; ++c)
        p[c] = (1.0 - alpha) * weights[c] / sum + alpha / n_cu;
    return p;
}

// Importance-weighted exponential update; unchosen arms see reward 0 and
// keep their weights.
inline void exp3_update(std::vector<double>& weights, int chosen,
                        double reward, const std::vector<double>& p,
                        double alpha) {
    const int n_cu = static_cast<int>(weights.size());
    weights[chosen - 1] *=
        std::exp(alpha * reward / (n_cu * p[chosen - 1]));
}

// --- per-player state machine ------------------------------------------------

struct PolicyState {
    int player_id = 1;                    // d, 1-based
    std::int64_t subframes_done = 0;      // observations incorporated so far
    std::vector<std::int64_t> pull_count;  // y
    std::vector<double> mean_reward;       // mu_hat (index family)
    std::vector<double> weight;            // w (Exp3)
    std::vector<double> prob;              // p (Exp3, as of the last selection)
    int rank = 0;                          // K used for the last selection
};

class Player {
public:
    Player(const PolicyConfig& cfg, int player_id, int n_cu, int n_d2d,
           std::uint64_t seed)
        : cfg_(cfg), n_cu_(n_cu), n_d2d_(n_d2d), rng_(seed) {
        cfg.validate();
        if (player_id < 1 || player_id > n_d2d)
            throw std::invalid_argument("Player: player_id outside [1, N_D]");
        st_.player_id = player_id;
        st_.pull_count.assign(n_cu, 0);
        if (is_index_based(cfg.kind)) {
            st_.mean_reward.assign(n_cu, 0.0);
        } else {
            st_.weight.assign(n_cu, 1.0);
            st_.prob.assign(n_cu, 1.0 / n_cu);
        }
    }

    // Pick the CU for subframe n. Must be followed by observe() before the
    // next select(); the harness enforces the select/observe barrier.
    int select(std::int64_t n) {
        if (n != st_.subframes_done + 1)
            throw std::logic_error("Player::select: subframes must be stepped in order");
        if (is_ranked(cfg_.kind))
            st_.rank = assign_rank(st_.player_id, n, n_d2d_);
        switch (cfg_.kind) {
            case PolicyKind::exp3: {
                st_.prob = exp3_probabilities(st_.weight, cfg_.alpha);
                return sample_from(st_.prob);
            }
            case PolicyKind::ucb1:
            case PolicyKind::mp_ucb1:
                if (n <= n_cu_) return init_selection(st_.player_id, n, n_cu_);
                return select_ucb1(st_.mean_reward, st_.pull_count, n);
            case PolicyKind::dlf:
                if (n <= n_cu_) return init_selection(st_.player_id, n, n_cu_);
                return select_dlf(st_.mean_reward, st_.pull_count, n, st_.rank);
            case PolicyKind::kth_ucb1:
                if (n <= n_cu_) return init_selection(st_.player_id, n, n_cu_);
                return select_kth_ucb1(st_.mean_reward, st_.pull_count, n,
                                       st_.rank, cfg_.beta, rng_);
        }
        throw std::logic_error("Player::select: bad PolicyKind");
    }

    // Incorporate the reward for the CU chosen this subframe. Collisions
    // arrive as reward 0 and advance the counters like any other sample.
    void observe(int chosen, double reward) {
        ++st_.subframes_done;
        ++st_.pull_count[chosen - 1];
        if (is_index_based(cfg_.kind)) {
            st_.mean_reward[chosen - 1] =
                update_mean(st_.mean_reward[chosen - 1],
                            st_.pull_count[chosen - 1], reward);
        } else {
            exp3_update(st_.weight, chosen, reward, st_.prob, cfg_.alpha);
            // Rescale before the weights can overflow; probabilities are
            // invariant under a common factor.
            const double wmax = *std::max_element(st_.weight.begin(), st_.weight.end());
            if (wmax > 1e100)
                for (double& w : st_.weight) w /= wmax;
        }
    }

    const PolicyState& state() const { return st_; }
    PolicyKind kind() const { return cfg_.kind; }

private:
    int sample_from(const std::vector<double>& p) {
        const double u = rng_.uniform();
        double cum = 0.0;
        for (int c = 1; c <= n_cu_; ++c) {
            cum += p[c - 1];
            if (u < cum) return c;
        }
        return n_cu_;
    }

    PolicyConfig cfg_;
    int n_cu_;
    int n_d2d_;
    PolicyState st_;
    rng::Stream rng_;
};

}  // namespace d2dmab
