#pragma once

#include <vector>

#include "rallnet/topology.hpp"

namespace rallnet {

// Weights and constants of the scalarized objective. p_const = 0 means
// "use |V| of the topology", the paper's default scale for the hop term.
struct CostParams {
    double w_p = 0.5;  // hop-count weight
    double w_l = 0.5;  // link-quality weight; w_p + w_l must be 1
    int th_lqi = 200;  // links with LQI below this are penalized
    int p_const = 0;

    bool valid() const {
        return w_p >= 0.0 && w_l >= 0.0 && std::abs(w_p + w_l - 1.0) < 1e-9 && th_lqi > 0 &&
               th_lqi <= 255 && p_const >= 0;
    }
};

// Integer core of the quality penalty: th - lqi when below threshold, else 0.
// Exact arithmetic for objective comparisons; normalize_lqi is units/th.
inline int lqi_penalty_units(int lqi, int th_lqi) {
    return lqi >= th_lqi ? 0 : th_lqi - lqi;
}

// Eq-style normalization of LQI into [0, 1): 0 for acceptable links,
// 1 - lqi/th for weak ones.
inline double normalize_lqi(int lqi, int th_lqi) {
    return static_cast<double>(lqi_penalty_units(lqi, th_lqi)) / static_cast<double>(th_lqi);
}

// Static base costs plus the load-adjusted working costs the greedy loop
// searches on. Indexed by link index of the owning topology.
// Invariant: working[e] = base[e] + node_load[links[e].src].
struct EdgeCosts {
    const Topology* topology = nullptr;
    std::vector<double> base;
    std::vector<double> working;
    std::vector<int> node_load;  // flows currently forwarded per node
};

// Weighted-sum base cost per link: p_const*w_p + w_l*(l_sd * p_const).
// The quality term is rescaled by p_const so both objectives share one
// magnitude. working starts equal to base, loads at zero.
EdgeCosts sum_weights(const Topology& t, const CostParams& params);

// Quality-plus-load costs (no hop constant, no weights): base = l_sd * p_const.
EdgeCosts quality_load_costs(const Topology& t, int th_lqi);

// Account one routed flow: every non-sink node on the path gains one unit of
// load, and all out-edges of affected nodes get working = base + load.
void update_edges(const std::vector<DirectedLink>& path, EdgeCosts& costs);

}  // namespace rallnet
