#include "rallnet/costs.hpp"

#include <cmath>

namespace rallnet {

namespace {

EdgeCosts init_costs(const Topology& t) {
    EdgeCosts c;
    c.topology = &t;
    c.base.resize(t.link_count());
    c.node_load.assign(t.node_count(), 0);
    return c;
}

}  // namespace

EdgeCosts sum_weights(const Topology& t, const CostParams& params) {
    EdgeCosts c = init_costs(t);
    const double p_const = params.p_const > 0 ? params.p_const : t.node_count();
    for (int i = 0; i < t.link_count(); ++i) {
        const double l = normalize_lqi(t.links[i].lqi, params.th_lqi);
        c.base[i] = p_const * params.w_p + params.w_l * (l * p_const);
    }
    c.working = c.base;
    return c;
}

EdgeCosts quality_load_costs(const Topology& t, int th_lqi) {
    EdgeCosts c = init_costs(t);
    const double p_const = t.node_count();
    for (int i = 0; i < t.link_count(); ++i)
        c.base[i] = normalize_lqi(t.links[i].lqi, th_lqi) * p_const;
    c.working = c.base;
    return c;
}

void update_edges(const std::vector<DirectedLink>& path, EdgeCosts& costs) {
    const Topology& t = *costs.topology;
    for (size_t i = 0; i + 1 < path.size(); ++i)
        if (path[i].dst != path[i + 1].src)
            throw InvalidPath("links do not chain head-to-tail");

    // Every transmitting node on the path carries the new flow; the sink
    // (final dst) receives only.
    for (const DirectedLink& hop : path) {
        const NodeId j = hop.src;
        costs.node_load[j] += 1;
        for (int e : t.out_links(j)) costs.working[e] = costs.base[e] + costs.node_load[j];
    }
}

}  // namespace rallnet
