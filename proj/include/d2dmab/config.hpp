#pragma once

// Experiment configuration and its on-disk form: flat `key = value` lines
// with '#' comments. Keys match the field names below; dB-valued fields are
// suffixed _db, powers in milliwatts _mw. Unknown keys are errors so typos
// do not silently fall back to defaults.

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "d2dmab/channel.hpp"
#include "d2dmab/phy.hpp"
#include "d2dmab/policies.hpp"

namespace d2dmab {

inline constexpr const char* kCodeVersion = "0.1.0";

struct ExperimentConfig {
    // topology
    int n_cu = 20;
    int n_d2d = 5;
    double cell_radius = 250.0;  // m
    double d2d_range = 50.0;     // m

    // run shape
    std::int64_t horizon = 100000;  // subframes per run
    std::int64_t log_every = 100;   // series sampling stride
    std::int64_t mc_runs_per_topology = 50;
    std::int64_t mc_topologies = 10;
    std::uint64_t master_seed = 1;
    std::int64_t oracle_samples = 100000;  // per (player, CU)
    std::string output_dir = "out";

    // policy
    PolicyConfig policy;

    // phy, in config-file units
    double cu_power_mw = 250.0;
    double max_d2d_power_mw = 200.0;
    double sinr_target_db = 10.0;
    double bandwidth_hz = 180e3;
    double bs_noise_figure_db = 5.0;
    double d2d_noise_figure_db = 9.0;
    double noise_density_dbm = -174.0;
    double rate_threshold_bps = 64e3;
    double reward_norm_sinr_cap_db = 40.0;

    // channel
    double shadowing_std_db = 8.0;
    double min_link_distance = 3.0;  // m
    bool fading_enabled = true;

    PhyConfig make_phy() const {
        return make_phy_config(cu_power_mw, max_d2d_power_mw, sinr_target_db,
                               bandwidth_hz, bs_noise_figure_db,
                               d2d_noise_figure_db, noise_density_dbm,
                               rate_threshold_bps, reward_norm_sinr_cap_db);
    }

    ChannelConfig make_channel() const {
        return ChannelConfig{shadowing_std_db, min_link_distance, fading_enabled};
    }

    void validate() const {
        auto fail = [](const std::string& msg) {
            throw std::invalid_argument("config: " + msg);
        };
        if (n_d2d < 1) fail("n_d2d must be >= 1");
        if (n_cu < n_d2d) fail("n_cu must be >= n_d2d");
        if (!(cell_radius > 0.0)) fail("cell_radius must be positive");
        if (!(d2d_range > 0.0)) fail("d2d_range must be positive");
        if (horizon < n_cu) fail("horizon must be >= n_cu so initialization completes");
        if (log_every < 1) fail("log_every must be >= 1");
        if (mc_runs_per_topology < 1) fail("mc_runs_per_topology must be >= 1");
        if (mc_topologies < 1) fail("mc_topologies must be >= 1");
        if (oracle_samples < 10000) fail("oracle_samples must be >= 10000");
        if (!(min_link_distance > 0.0)) fail("min_link_distance must be positive");
        if (shadowing_std_db < 0.0) fail("shadowing_std_db must be >= 0");
        policy.validate();
        make_phy();  // throws with the offending phy field
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("config: " + key + " must be true or false");
}

template <typename T>
T parse_num(const std::string& v, const std::string& key) {
    std::istringstream is(v);
    T out;
    is >> out;
    if (is.fail() || !is.eof())
        throw std::invalid_argument("config: cannot parse value '" + v +
                                    "' for key '" + key + "'");
    return out;
}

}  // namespace detail

// Reads `key = value` lines into a map; '#' starts a comment.
inline std::map<std::string, std::string> read_kv_file(std::istream& is) {
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                        " is not 'key = value': " + line);
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (kv.count(key))
            throw std::invalid_argument("config: duplicate key '" + key + "'");
        kv[key] = value;
    }
    return kv;
}

// `extra` receives keys the config struct does not own (used by manifests).
inline ExperimentConfig config_from_kv(std::map<std::string, std::string> kv,
                                       std::map<std::string, std::string>* extra = nullptr) {
    ExperimentConfig cfg;
    auto take = [&](const char* key) -> const std::string* {
        auto it = kv.find(key);
        if (it == kv.end()) return nullptr;
        return &it->second;
    };
    using detail::parse_num;

    if (auto* v = take("n_cu")) cfg.n_cu = parse_num<int>(*v, "n_cu");
    if (auto* v = take("n_d2d")) cfg.n_d2d = parse_num<int>(*v, "n_d2d");
    if (auto* v = take("cell_radius")) cfg.cell_radius = parse_num<double>(*v, "cell_radius");
    if (auto* v = take("d2d_range")) cfg.d2d_range = parse_num<double>(*v, "d2d_range");
    if (auto* v = take("horizon")) cfg.horizon = parse_num<std::int64_t>(*v, "horizon");
    if (auto* v = take("log_every")) cfg.log_every = parse_num<std::int64_t>(*v, "log_every");
    if (auto* v = take("mc_runs_per_topology"))
        cfg.mc_runs_per_topology = parse_num<std::int64_t>(*v, "mc_runs_per_topology");
    if (auto* v = take("mc_topologies"))
        cfg.mc_topologies = parse_num<std::int64_t>(*v, "mc_topologies");
    if (auto* v = take("master_seed"))
        cfg.master_seed = parse_num<std::uint64_t>(*v, "master_seed");
    if (auto* v = take("oracle_samples"))
        cfg.oracle_samples = parse_num<std::int64_t>(*v, "oracle_samples");
    if (auto* v = take("output_dir")) cfg.output_dir = *v;
    if (auto* v = take("policy")) cfg.policy.kind = parse_policy_kind(*v);
    if (auto* v = take("alpha")) cfg.policy.alpha = parse_num<double>(*v, "alpha");
    if (auto* v = take("beta")) cfg.policy.beta = parse_num<double>(*v, "beta");
    if (auto* v = take("cu_power_mw")) cfg.cu_power_mw = parse_num<double>(*v, "cu_power_mw");
    if (auto* v = take("max_d2d_power_mw"))
        cfg.max_d2d_power_mw = parse_num<double>(*v, "max_d2d_power_mw");
    if (auto* v = take("sinr_target_db"))
        cfg.sinr_target_db = parse_num<double>(*v, "sinr_target_db");
    if (auto* v = take("bandwidth_hz")) cfg.bandwidth_hz = parse_num<double>(*v, "bandwidth_hz");
    if (auto* v = take("bs_noise_figure_db"))
        cfg.bs_noise_figure_db = parse_num<double>(*v, "bs_noise_figure_db");
    if (auto* v = take("d2d_noise_figure_db"))
        cfg.d2d_noise_figure_db = parse_num<double>(*v, "d2d_noise_figure_db");
    if (auto* v = take("noise_density_dbm"))
        cfg.noise_density_dbm = parse_num<double>(*v, "noise_density_dbm");
    if (auto* v = take("rate_threshold_bps"))
        cfg.rate_threshold_bps = parse_num<double>(*v, "rate_threshold_bps");
    if (auto* v = take("reward_norm_sinr_cap_db"))
        cfg.reward_norm_sinr_cap_db = parse_num<double>(*v, "reward_norm_sinr_cap_db");
    if (auto* v = take("shadowing_std_db"))
        cfg.shadowing_std_db = parse_num<double>(*v, "shadowing_std_db");
    if (auto* v = take("min_link_distance"))
        cfg.min_link_distance = parse_num<double>(*v, "min_link_distance");
    if (auto* v = take("fading_enabled"))
        cfg.fading_enabled = detail::parse_bool(*v, "fading_enabled");

    static const char* known[] = {
        "n_cu", "n_d2d", "cell_radius", "d2d_range", "horizon", "log_every",
        "mc_runs_per_topology", "mc_topologies", "master_seed", "oracle_samples",
        "output_dir", "policy", "alpha", "beta", "cu_power_mw", "max_d2d_power_mw",
        "sinr_target_db", "bandwidth_hz", "bs_noise_figure_db", "d2d_noise_figure_db",
        "noise_density_dbm", "rate_threshold_bps", "reward_norm_sinr_cap_db",
        "shadowing_std_db", "min_link_distance", "fading_enabled"};
    for (const char* k : known) kv.erase(k);
    if (extra) {
        *extra = std::move(kv);
    } else if (!kv.empty()) {
        throw std::invalid_argument("config: unknown key '" + kv.begin()->first + "'");
    }

    cfg.validate();
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path,
                                    std::map<std::string, std::string>* extra = nullptr) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("config: cannot open " + path);
    return config_from_kv(read_kv_file(is), extra);
}

// Canonical form; parsing it back reproduces the config exactly.
inline void write_config(const ExperimentConfig& cfg, std::ostream& os) {
    os.precision(17);
    os << "n_cu = " << cfg.n_cu << "\n"
       << "n_d2d = " << cfg.n_d2d << "\n"
       << "cell_radius = " << cfg.cell_radius << "\n"
       << "d2d_range = " << cfg.d2d_range << "\n"
       << "horizon = " << cfg.horizon << "\n"
       << "log_every = " << cfg.log_every << "\n"
       << "mc_runs_per_topology = " << cfg.mc_runs_per_topology << "\n"
       << "mc_topologies = " << cfg.mc_topologies << "\n"
       << "master_seed = " << cfg.master_seed << "\n"
       << "oracle_samples = " << cfg.oracle_samples << "\n"
       << "output_dir = " << cfg.output_dir << "\n"
       << "policy = " << to_string(cfg.policy.kind) << "\n"
       << "alpha = " << cfg.policy.alpha << "\n"
       << "beta = " << cfg.policy.beta << "\n"
       << "cu_power_mw = " << cfg.cu_power_mw << "\n"
       << "max_d2d_power_mw = " << cfg.max_d2d_power_mw << "\n"
       << "sinr_target_db = " << cfg.sinr_target_db << "\n"
       << "bandwidth_hz = " << cfg.bandwidth_hz << "\n"
       << "bs_noise_figure_db = " << cfg.bs_noise_figure_db << "\n"
       << "d2d_noise_figure_db = " << cfg.d2d_noise_figure_db << "\n"
       << "noise_density_dbm = " << cfg.noise_density_dbm << "\n"
       << "rate_threshold_bps = " << cfg.rate_threshold_bps << "\n"
       << "reward_norm_sinr_cap_db = " << cfg.reward_norm_sinr_cap_db << "\n"
       << "shadowing_std_db = " << cfg.shadowing_std_db << "\n"
       << "min_link_distance = " << cfg.min_link_distance << "\n"
       << "fading_enabled = " << (cfg.fading_enabled ? "true" : "false") << "\n";
}

// The reward model a policy learns on: Exp3 plays thresholded Bernoulli
// rewards, the index policies play normalized throughput.
inline RewardModel reward_model_for(PolicyKind kind) {
    return kind == PolicyKind::exp3 ? RewardModel::bernoulli
                                    : RewardModel::normalized;
}

// "all" expands to the four multi-player policies.
inline std::vector<PolicyKind> parse_policy_list(const std::string& s) {
    if (s == "all")
        return {PolicyKind::mp_ucb1, PolicyKind::dlf, PolicyKind::kth_ucb1,
                PolicyKind::exp3};
    std::vector<PolicyKind> kinds;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        kinds.push_back(parse_policy_kind(detail::trim(item)));
    if (kinds.empty()) throw std::invalid_argument("empty policy list");
    return kinds;
}

}  // namespace d2dmab
