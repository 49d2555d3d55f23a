#pragma once

// File emission: per-policy regret and throughput CSVs, the per-player
// collision/fairness bar table, a manifest that replays the experiment, and
// optional SVG line/bar plots. All numeric formatting goes through one
// snprintf wrapper so repeated invocations are byte-identical.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "d2dmab/experiment.hpp"
#include "d2dmab/topology.hpp"

namespace d2dmab {

inline std::string fmt(double v, int precision = 10) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    return buf;
}

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);  // LF line endings everywhere
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    return os;
}

inline void write_regret_csv(const ExperimentResult& res,
                             const std::vector<RunRecord>& records,
                             const std::filesystem::path& path) {
    auto def2 = aggregate_series(records, [](const RunRecord& r) -> const std::vector<double>& {
        return r.metrics.regret_def2;
    });
    const bool ranked = is_ranked(res.policy());
    const bool adversarial = res.policy() == PolicyKind::exp3;
    SeriesStats def3, adv;
    if (ranked)
        def3 = aggregate_series(records, [](const RunRecord& r) -> const std::vector<double>& {
            return r.metrics.regret_def3;
        });
    if (adversarial)
        adv = aggregate_series(records, [](const RunRecord& r) -> const std::vector<double>& {
            return r.metrics.regret_adv;
        });

    std::ofstream os = open_out(path);
    os << "subframe,mean_regret_def2,stderr_def2";
    if (ranked) os << ",mean_regret_def3,stderr_def3";
    if (adversarial) os << ",mean_regret_adv,stderr_adv";
    os << "\n";
    const std::vector<std::int64_t>& grid = records.front().metrics.grid;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        os << grid[i] << "," << fmt(def2.mean[i]) << "," << fmt(def2.stderr_[i]);
        if (ranked) os << "," << fmt(def3.mean[i]) << "," << fmt(def3.stderr_[i]);
        if (adversarial) os << "," << fmt(adv.mean[i]) << "," << fmt(adv.stderr_[i]);
        os << "\n";
    }
}

inline void write_throughput_csv(const ExperimentResult& res,
                                 const std::filesystem::path& path) {
    const double r_tgt = cu_target_rate(res.config.make_phy());
    std::ofstream os = open_out(path);
    os << "subframe,sum_tput_d2d_mean,sum_tput_cu_mean,r_tgt\n";
    for (std::size_t i = 0; i < res.grid.size(); ++i)
        os << res.grid[i] << "," << fmt(res.sum_tput_d2d.mean[i]) << ","
           << fmt(res.sum_tput_cu.mean[i]) << "," << fmt(r_tgt) << "\n";
}

}  // namespace detail

// Writes the aggregate CSVs for a set of single-policy experiments sharing
// one config (apart from the policy), plus per-topology regret CSVs and the
// manifest. Grid and seeds must match across results.
inline void emit_outputs(const std::vector<ExperimentResult>& results,
                         const std::string& output_dir) {
    if (results.empty())
        throw std::invalid_argument("emit_outputs: no experiment results");
    namespace fs = std::filesystem;
    const fs::path dir(output_dir);
    fs::create_directories(dir / "per_topology");

    for (const ExperimentResult& res : results) {
        const std::string name = to_string(res.policy());
        detail::write_regret_csv(res, res.records, dir / ("regret_" + name + ".csv"));
        detail::write_throughput_csv(res, dir / ("throughput_" + name + ".csv"));
        for (int k = 0; k < static_cast<int>(res.config.mc_topologies); ++k)
            detail::write_regret_csv(
                res, res.records_for_topology(k),
                dir / "per_topology" /
                    ("regret_" + name + "_topo" + std::to_string(k) + ".csv"));
    }

    {
        std::ofstream os = detail::open_out(dir / "bars.csv");
        os << "policy,player,collision_pct,fairness_pct\n";
        for (const ExperimentResult& res : results)
            for (int d = 1; d <= res.config.n_d2d; ++d)
                os << to_string(res.policy()) << "," << d << ","
                   << fmt(res.collision_pct[d - 1].mean) << ","
                   << fmt(res.fairness_pct[d - 1].mean) << "\n";
    }

    for (int k = 0; k < static_cast<int>(results.front().config.mc_topologies); ++k)
        save_topology(results.front().topologies[k],
                      (dir / ("topology_" + std::to_string(k) + ".txt")).string());

    {
        std::ofstream os = detail::open_out(dir / "manifest.txt");
        os << "# d2dmab experiment manifest; replay with: d2dmab replay --manifest <this file>\n";
        os << "code_version = " << kCodeVersion << "\n";
        std::string policies;
        for (const ExperimentResult& res : results) {
            if (!policies.empty()) policies += ",";
            policies += to_string(res.policy());
        }
        os << "policies = " << policies << "\n";
        write_config(results.front().config, os);
        os << "# derived topology seeds\n";
        for (std::size_t k = 0; k < results.front().topology_seeds.size(); ++k)
            os << "# topology " << k << " seed " << results.front().topology_seeds[k]
               << "\n";
    }
}

// --- minimal SVG plotting ------------------------------------------------

namespace svg {

struct Series {
    std::string label;
    std::string color;
    std::vector<double> x;
    std::vector<double> y;
};

// A single line chart; axes are linear with simple min/max framing.
inline void write_line_chart(const std::string& title, const std::string& x_label,
                             const std::string& y_label,
                             const std::vector<Series>& series,
                             const std::filesystem::path& path) {
    const double width = 760, height = 480;
    const double ml = 80, mr = 20, mt = 40, mb = 55;
    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool first = true;
    for (const Series& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (first) {
                xmin = xmax = s.x[i];
                ymin = ymax = s.y[i];
                first = false;
            }
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    ymin = std::min(ymin, 0.0);
    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr); };
    auto py = [&](double y) { return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb); };

    std::ofstream os = detail::open_out(path);
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='"
       << height << "'>\n<rect width='100%' height='100%' fill='white'/>\n";
    os << "<text x='" << width / 2 << "' y='22' text-anchor='middle' font-size='16'>"
       << title << "</text>\n";
    // axes
    os << "<line x1='" << ml << "' y1='" << py(ymin) << "' x2='" << width - mr
       << "' y2='" << py(ymin) << "' stroke='black'/>\n";
    os << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='"
       << py(ymin) << "' stroke='black'/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double xv = xmin + (xmax - xmin) * t / 4.0;
        const double yv = ymin + (ymax - ymin) * t / 4.0;
        os << "<text x='" << px(xv) << "' y='" << height - mb + 18
           << "' text-anchor='middle' font-size='11'>" << fmt(xv, 4) << "</text>\n";
        os << "<text x='" << ml - 6 << "' y='" << py(yv) + 4
           << "' text-anchor='end' font-size='11'>" << fmt(yv, 4) << "</text>\n";
    }
    os << "<text x='" << (ml + width - mr) / 2 << "' y='" << height - 12
       << "' text-anchor='middle' font-size='13'>" << x_label << "</text>\n";
    os << "<text x='18' y='" << (mt + height - mb) / 2
       << "' text-anchor='middle' font-size='13' transform='rotate(-90 18 "
       << (mt + height - mb) / 2 << ")'>" << y_label << "</text>\n";
    int legend_y = static_cast<int>(mt) + 8;
    for (const Series& s : series) {
        os << "<polyline fill='none' stroke='" << s.color << "' stroke-width='1.5' points='";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            os << fmt(px(s.x[i]), 6) << "," << fmt(py(s.y[i]), 6) << " ";
        os << "'/>\n";
        os << "<line x1='" << ml + 12 << "' y1='" << legend_y << "' x2='" << ml + 36
           << "' y2='" << legend_y << "' stroke='" << s.color << "' stroke-width='2'/>\n";
        os << "<text x='" << ml + 42 << "' y='" << legend_y + 4 << "' font-size='12'>"
           << s.label << "</text>\n";
        legend_y += 18;
    }
    os << "</svg>\n";
}

// Grouped bars: one group per player, one bar per (policy, measure).
inline void write_bar_chart(const std::string& title,
                            const std::vector<std::string>& group_labels,
                            const std::vector<Series>& bar_sets,
                            const std::filesystem::path& path) {
    const double width = 760, height = 420;
    const double ml = 70, mr = 20, mt = 40, mb = 60;
    double ymax = 1.0;
    for (const Series& s : bar_sets)
        for (double v : s.y) ymax = std::max(ymax, v);
    ymax *= 1.1;
    const std::size_t groups = group_labels.size();
    const double group_w = (width - ml - mr) / groups;
    const double bar_w = group_w / (bar_sets.size() + 1);
    auto py = [&](double y) { return height - mb - y / ymax * (height - mt - mb); };

    std::ofstream os = detail::open_out(path);
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='"
       << height << "'>\n<rect width='100%' height='100%' fill='white'/>\n";
    os << "<text x='" << width / 2 << "' y='22' text-anchor='middle' font-size='16'>"
       << title << "</text>\n";
    os << "<line x1='" << ml << "' y1='" << py(0) << "' x2='" << width - mr << "' y2='"
       << py(0) << "' stroke='black'/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double yv = ymax * t / 4.0;
        os << "<text x='" << ml - 6 << "' y='" << py(yv) + 4
           << "' text-anchor='end' font-size='11'>" << fmt(yv, 4) << "</text>\n";
    }
    for (std::size_t g = 0; g < groups; ++g) {
        os << "<text x='" << ml + (g + 0.5) * group_w << "' y='" << height - mb + 18
           << "' text-anchor='middle' font-size='12'>" << group_labels[g] << "</text>\n";
        for (std::size_t b = 0; b < bar_sets.size(); ++b) {
            const double v = bar_sets[b].y[g];
            const double x = ml + g * group_w + (b + 0.5) * bar_w;
            os << "<rect x='" << fmt(x, 6) << "' y='" << fmt(py(v), 6) << "' width='"
               << fmt(bar_w * 0.9, 6) << "' height='" << fmt(py(0) - py(v), 6)
               << "' fill='" << bar_sets[b].color << "'/>\n";
        }
    }
    int legend_y = static_cast<int>(mt) + 8;
    for (const Series& s : bar_sets) {
        os << "<rect x='" << width - mr - 170 << "' y='" << legend_y - 9
           << "' width='14' height='12' fill='" << s.color << "'/>\n";
        os << "<text x='" << width - mr - 150 << "' y='" << legend_y + 2
           << "' font-size='12'>" << s.label << "</text>\n";
        legend_y += 18;
    }
    os << "</svg>\n";
}

}  // namespace svg

inline void emit_plots(const std::vector<ExperimentResult>& results,
                       const std::string& output_dir) {
    namespace fs = std::filesystem;
    const fs::path dir(output_dir);
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b"};
    for (const ExperimentResult& res : results) {
        const std::string name = to_string(res.policy());
        std::vector<double> x(res.grid.begin(), res.grid.end());
        std::vector<svg::Series> regret;
        regret.push_back({"regret (best-mean arm)", palette[0], x, res.regret_def2.mean});
        if (is_ranked(res.policy()))
            regret.push_back({"regret (rank-K arm)", palette[1], x, res.regret_def3.mean});
        if (res.policy() == PolicyKind::exp3)
            regret.push_back({"regret (hindsight)", palette[2], x, res.regret_adv.mean});
        svg::write_line_chart("Regret over subframes, " + name, "subframe", "regret",
                              regret, dir / ("regret_" + name + ".svg"));

        const double r_tgt = cu_target_rate(res.config.make_phy());
        std::vector<svg::Series> tput;
        tput.push_back({"sum D2D throughput", palette[0], x, res.sum_tput_d2d.mean});
        tput.push_back({"sum CU throughput", palette[1], x, res.sum_tput_cu.mean});
        tput.push_back({"r_tgt per CU", palette[3], x,
                        std::vector<double>(x.size(), r_tgt)});
        svg::write_line_chart("Sum throughput, " + name, "subframe", "bit/s", tput,
                              dir / ("throughput_" + name + ".svg"));
    }

    const int n_d2d = results.front().config.n_d2d;
    std::vector<std::string> players;
    for (int d = 1; d <= n_d2d; ++d) players.push_back("player " + std::to_string(d));
    std::vector<svg::Series> collision_bars, fairness_bars;
    for (std::size_t i = 0; i < results.size(); ++i) {
        svg::Series cb{to_string(results[i].policy()), palette[i % 6], {}, {}};
        svg::Series fb = cb;
        for (int d = 0; d < n_d2d; ++d) {
            cb.y.push_back(results[i].collision_pct[d].mean);
            fb.y.push_back(results[i].fairness_pct[d].mean);
        }
        collision_bars.push_back(cb);
        fairness_bars.push_back(fb);
    }
    svg::write_bar_chart("Collision percentage per player", players, collision_bars,
                         dir / "collisions.svg");
    svg::write_bar_chart("Fairness percentage per player", players, fairness_bars,
                         dir / "fairness.svg");
}

}  // namespace d2dmab
