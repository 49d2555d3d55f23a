#pragma once

// Network geometry: one macrocell with N_C cellular users and N_D D2D pairs.
// Positions are drawn once per topology seed and stay fixed; the channel
// module layers path loss, shadowing and fading on top of them.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "d2dmab/rng.hpp"

namespace d2dmab {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

inline double distance(const Point2& a, const Point2& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

struct Topology {
    double cell_radius_m = 250.0;
    double d2d_range_m = 50.0;
    Point2 bs_position;                  // cell center
    std::vector<Point2> cu_positions;    // N_C
    std::vector<Point2> d2d_tx_positions;  // N_D
    std::vector<Point2> d2d_rx_positions;  // N_D
    std::uint64_t seed = 0;

    int n_cu() const { return static_cast<int>(cu_positions.size()); }
    int n_d2d() const { return static_cast<int>(d2d_tx_positions.size()); }
};

namespace detail {

// Area-uniform point in a disc: r = R*sqrt(u) so equal areas get equal mass.
inline Point2 uniform_in_disc(const Point2& center, double radius, rng::Stream& s) {
    const double r = radius * std::sqrt(s.uniform());
    const double theta = 2.0 * std::numbers::pi * s.uniform();
    return {center.x + r * std::cos(theta), center.y + r * std::sin(theta)};
}

}  // namespace detail

inline Topology generate_topology(int n_cu, int n_d2d, double cell_radius_m,
                                  double d2d_range_m, std::uint64_t seed) {
    if (n_d2d < 1)
        throw std::invalid_argument("generate_topology: n_d2d must be >= 1");
    if (n_cu < n_d2d)
        throw std::invalid_argument(
            "generate_topology: n_cu must be >= n_d2d (collision-free "
            "initialization needs one CU per player)");
    if (!(cell_radius_m > 0.0) || !(d2d_range_m > 0.0))
        throw std::invalid_argument("generate_topology: radii must be positive");

    Topology topo;
    topo.cell_radius_m = cell_radius_m;
    topo.d2d_range_m = d2d_range_m;
    topo.bs_position = {0.0, 0.0};
    topo.seed = seed;

    rng::Stream s(rng::split(seed, rng::kTagTopology));
    topo.cu_positions.reserve(n_cu);
    for (int c = 0; c < n_cu; ++c)
        topo.cu_positions.push_back(detail::uniform_in_disc(topo.bs_position, cell_radius_m, s));
    topo.d2d_tx_positions.reserve(n_d2d);
    topo.d2d_rx_positions.reserve(n_d2d);
    for (int d = 0; d < n_d2d; ++d) {
        const Point2 tx = detail::uniform_in_disc(topo.bs_position, cell_radius_m, s);
        topo.d2d_tx_positions.push_back(tx);
        topo.d2d_rx_positions.push_back(detail::uniform_in_disc(tx, d2d_range_m, s));
    }
    return topo;
}

// --- text serialization -----------------------------------------------------
//
// Line format, full double precision so a reloaded topology is bit-identical:
//   seed = <u64>
//   cell_radius = <m>
//   d2d_range = <m>
//   bs = <x> <y>
//   cu <i> = <x> <y>            (i = 1..N_C)
//   d2d <i> = <txx> <txy> <rxx> <rxy>

inline void save_topology(const Topology& topo, std::ostream& os) {
    os.precision(17);
    os << "# d2dmab topology\n";
    os << "seed = " << topo.seed << "\n";
    os << "cell_radius = " << topo.cell_radius_m << "\n";
    os << "d2d_range = " << topo.d2d_range_m << "\n";
    os << "bs = " << topo.bs_position.x << " " << topo.bs_position.y << "\n";
    for (int c = 1; c <= topo.n_cu(); ++c)
        os << "cu " << c << " = " << topo.cu_positions[c - 1].x << " "
           << topo.cu_positions[c - 1].y << "\n";
    for (int d = 1; d <= topo.n_d2d(); ++d)
        os << "d2d " << d << " = " << topo.d2d_tx_positions[d - 1].x << " "
           << topo.d2d_tx_positions[d - 1].y << " "
           << topo.d2d_rx_positions[d - 1].x << " "
           << topo.d2d_rx_positions[d - 1].y << "\n";
}

inline void save_topology(const Topology& topo, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("save_topology: cannot open " + path);
    save_topology(topo, os);
}

inline Topology load_topology(std::istream& is) {
    Topology topo;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "seed") {
            std::string eq; ls >> eq >> topo.seed;
        } else if (key == "cell_radius") {
            std::string eq; ls >> eq >> topo.cell_radius_m;
        } else if (key == "d2d_range") {
            std::string eq; ls >> eq >> topo.d2d_range_m;
        } else if (key == "bs") {
            std::string eq; ls >> eq >> topo.bs_position.x >> topo.bs_position.y;
        } else if (key == "cu") {
            int i; std::string eq; Point2 p;
            ls >> i >> eq >> p.x >> p.y;
            if (i != static_cast<int>(topo.cu_positions.size()) + 1)
                throw std::runtime_error("load_topology: cu entries out of order");
            topo.cu_positions.push_back(p);
        } else if (key == "d2d") {
            int i; std::string eq; Point2 tx, rx;
            ls >> i >> eq >> tx.x >> tx.y >> rx.x >> rx.y;
            if (i != static_cast<int>(topo.d2d_tx_positions.size()) + 1)
                throw std::runtime_error("load_topology: d2d entries out of order");
            topo.d2d_tx_positions.push_back(tx);
            topo.d2d_rx_positions.push_back(rx);
        } else {
            throw std::runtime_error("load_topology: unknown key '" + key + "'");
        }
        if (ls.fail())
            throw std::runtime_error("load_topology: malformed line '" + line + "'");
    }
    if (topo.n_cu() < 1 || topo.n_d2d() < 1)
        throw std::runtime_error("load_topology: missing cu/d2d entries");
    return topo;
}

inline Topology load_topology(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("load_topology: cannot open " + path);
    return load_topology(is);
}

}  // namespace d2dmab
