#pragma once

// Nested Monte Carlo: mc_topologies topology seeds, each with
// mc_runs_per_topology runs. Seeds derive from the master seed as
//   topology_seed[k] = split(master, "topology", k)
//   run_seed[k][j]   = split(topology_seed[k], "run", j)
// so one integer reproduces an entire experiment. Runs execute on a small
// worker pool; records land in preassigned slots and aggregation walks them
// in a fixed order, so results do not depend on the worker count.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "d2dmab/config.hpp"
#include "d2dmab/simulation.hpp"

namespace d2dmab {

struct SeriesStats {
    std::vector<double> mean;
    std::vector<double> stderr_;
};

// Mean and standard error across runs at each grid point; `get` maps a
// record to its series.
template <typename Getter>
SeriesStats aggregate_series(const std::vector<RunRecord>& records, Getter get) {
    SeriesStats out;
    if (records.empty()) return out;
    const std::size_t points = get(records.front()).size();
    out.mean.assign(points, 0.0);
    out.stderr_.assign(points, 0.0);
    const double n = static_cast<double>(records.size());
    for (const RunRecord& r : records) {
        const std::vector<double>& s = get(r);
        if (s.size() != points)
            throw std::logic_error("aggregate_series: inconsistent grids");
        for (std::size_t i = 0; i < points; ++i) out.mean[i] += s[i];
    }
    for (double& m : out.mean) m /= n;
    if (records.size() > 1) {
        for (const RunRecord& r : records) {
            const std::vector<double>& s = get(r);
            for (std::size_t i = 0; i < points; ++i) {
                const double d = s[i] - out.mean[i];
                out.stderr_[i] += d * d;
            }
        }
        for (double& se : out.stderr_) se = std::sqrt(se / (n - 1.0) / n);
    }
    return out;
}

struct ScalarStats {
    double mean = 0.0;
    double stderr_ = 0.0;
};

template <typename Getter>
ScalarStats aggregate_scalar(const std::vector<RunRecord>& records, Getter get) {
    ScalarStats out;
    const double n = static_cast<double>(records.size());
    for (const RunRecord& r : records) out.mean += get(r);
    out.mean /= n;
    if (records.size() > 1) {
        double ss = 0.0;
        for (const RunRecord& r : records) {
            const double d = get(r) - out.mean;
            ss += d * d;
        }
        out.stderr_ = std::sqrt(ss / (n - 1.0) / n);
    }
    return out;
}

// One policy's full Monte Carlo sweep plus its aggregate curves.
struct ExperimentResult {
    ExperimentConfig config;
    std::vector<std::uint64_t> topology_seeds;
    std::vector<Topology> topologies;
    std::vector<RunRecord> records;  // topology-major, run-minor
    std::vector<std::int64_t> grid;

    SeriesStats regret_def2;
    SeriesStats regret_def3;  // ranked policies only
    SeriesStats regret_adv;
    SeriesStats sum_tput_d2d;
    SeriesStats sum_tput_cu;

    std::vector<ScalarStats> collision_pct;  // per player
    std::vector<ScalarStats> fairness_pct;

    PolicyKind policy() const { return config.policy.kind; }

    std::vector<RunRecord> records_for_topology(int k) const {
        const auto per = static_cast<std::size_t>(config.mc_runs_per_topology);
        return {records.begin() + k * per, records.begin() + (k + 1) * per};
    }
};

namespace detail {

template <typename Task>
void parallel_for(std::int64_t count, int workers, Task task) {
    workers = std::max(1, std::min<int>(workers, static_cast<int>(count)));
    if (workers == 1) {
        for (std::int64_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::int64_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    task(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace detail

inline ExperimentResult run_experiment(const ExperimentConfig& cfg, int workers = 1) {
    cfg.validate();
    ExperimentResult res;
    res.config = cfg;

    const int n_topo = static_cast<int>(cfg.mc_topologies);
    const int runs_per = static_cast<int>(cfg.mc_runs_per_topology);
    const RewardModel model = reward_model_for(cfg.policy.kind);

    res.topology_seeds.resize(n_topo);
    res.topologies.resize(n_topo);
    std::vector<LargeScaleGains> large_scale(n_topo);
    std::vector<ArmMeansOracle> oracles(n_topo);
    for (int k = 0; k < n_topo; ++k)
        res.topology_seeds[k] = rng::split(cfg.master_seed, rng::kTagTopology, k);

    detail::parallel_for(n_topo, workers, [&](std::int64_t k) {
        res.topologies[k] = generate_topology(cfg.n_cu, cfg.n_d2d, cfg.cell_radius,
                                              cfg.d2d_range, res.topology_seeds[k]);
        large_scale[k] = draw_large_scale(res.topologies[k], cfg.make_channel());
        oracles[k] = estimate_arm_means(
            res.topologies[k], large_scale[k], cfg.make_phy(), cfg.oracle_samples,
            rng::split(res.topology_seeds[k], rng::kTagOracle), model,
            cfg.fading_enabled);
    });

    res.records.resize(static_cast<std::size_t>(n_topo) * runs_per);
    detail::parallel_for(static_cast<std::int64_t>(res.records.size()), workers,
                         [&](std::int64_t i) {
        const int k = static_cast<int>(i / runs_per);
        const int j = static_cast<int>(i % runs_per);
        const std::uint64_t run_seed = rng::split(res.topology_seeds[k], rng::kTagRun, j);
        try {
            res.records[i] = run_simulation(cfg, res.topologies[k], large_scale[k],
                                            oracles[k], res.topology_seeds[k], run_seed);
        } catch (const std::exception& e) {
            throw std::runtime_error(
                "run failed (topology_seed=" + std::to_string(res.topology_seeds[k]) +
                ", run_seed=" + std::to_string(run_seed) + "): " + e.what());
        }
    });

    res.grid = res.records.front().metrics.grid;
    res.regret_def2 = aggregate_series(res.records, [](const RunRecord& r) -> const std::vector<double>& {
        return r.metrics.regret_def2;
    });
    if (is_ranked(cfg.policy.kind))
        res.regret_def3 = aggregate_series(res.records, [](const RunRecord& r) -> const std::vector<double>& {
            return r.metrics.regret_def3;
        });
    res.regret_adv = aggregate_series(res.records, [](const RunRecord& r) -> const std::vector<double>& {
        return r.metrics.regret_adv;
    });
    res.sum_tput_d2d = aggregate_series(res.records, [](const RunRecord& r) -> const std::vector<double>& {
        return r.metrics.sum_tput_d2d;
    });
    res.sum_tput_cu = aggregate_series(res.records, [](const RunRecord& r) -> const std::vector<double>& {
        return r.metrics.sum_tput_cu;
    });

    res.collision_pct.resize(cfg.n_d2d);
    res.fairness_pct.resize(cfg.n_d2d);
    for (int d = 0; d < cfg.n_d2d; ++d) {
        res.collision_pct[d] = aggregate_scalar(res.records, [d](const RunRecord& r) {
            return r.metrics.collision_pct[d];
        });
        res.fairness_pct[d] = aggregate_scalar(res.records, [d](const RunRecord& r) {
            return r.metrics.fairness_pct[d];
        });
    }
    return res;
}

}  // namespace d2dmab
