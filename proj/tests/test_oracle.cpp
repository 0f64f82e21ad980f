#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "rallnet/oracle.hpp"
#include "test_helpers.hpp"

using namespace rallnet;
using namespace rallnet::testing;

namespace {

// Unpruned exhaustive bottleneck search, the independent reference for the
// branch-and-bound solver. Returns -1 when the cross product exceeds the
// budget (the caller skips such instances).
int exhaustive_bottleneck(const Topology& t, long budget = 300000) {
    std::vector<std::vector<std::vector<NodeId>>> choices;
    long combos = 1;
    for (NodeId v = 0; v < t.node_count(); ++v) {
        if (v == t.sink) continue;
        choices.push_back(all_simple_paths(t, v, 0));
        REQUIRE(!choices.back().empty());
        combos *= static_cast<long>(choices.back().size());
        if (combos > budget) return -1;
    }
    std::vector<size_t> pick(choices.size(), 0);
    int best = std::numeric_limits<int>::max();
    for (;;) {
        std::vector<int> load(t.node_count(), 0);
        for (size_t f = 0; f < choices.size(); ++f) {
            const auto& seq = choices[f][pick[f]];
            for (size_t i = 0; i + 1 < seq.size(); ++i) load[seq[i]] += 1;
        }
        best = std::min(best, *std::max_element(load.begin(), load.end()));
        size_t f = 0;
        while (f < pick.size() && ++pick[f] == choices[f].size()) pick[f++] = 0;
        if (f == pick.size()) break;
    }
    return best;
}

long brute_force_min_hops(const Topology& t) {
    long total = 0;
    for (NodeId v = 1; v < t.node_count(); ++v) {
        size_t best = SIZE_MAX;
        for (const auto& seq : all_simple_paths(t, v, 0)) best = std::min(best, seq.size() - 1);
        REQUIRE(best != SIZE_MAX);
        total += static_cast<long>(best);
    }
    return total;
}

long brute_force_min_units(const Topology& t, int th) {
    long total = 0;
    for (NodeId v = 1; v < t.node_count(); ++v) {
        long best = std::numeric_limits<long>::max();
        for (const auto& seq : all_simple_paths(t, v, 0)) {
            long units = 0;
            for (size_t i = 0; i + 1 < seq.size(); ++i)
                units += lqi_penalty_units(t.lqi_at(seq[i], seq[i + 1]), th);
            best = std::min(best, units);
        }
        total += best;
    }
    return total;
}

}  // namespace

TEST_CASE("min_total_hops on a line and a star") {
    CHECK(min_total_hops(line_topology(4)).objective_value == 6.0);  // 1+2+3
    CHECK(min_total_hops(star_topology(7)).objective_value == 6.0);  // 6 sources
}

TEST_CASE("min_total_hops matches brute force and is feasible") {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
        const Topology t = generate_topology(8, 50.0, 25.0, {}, seed);
        const OracleResult r = min_total_hops(t);
        CHECK(r.objective_value == static_cast<double>(brute_force_min_hops(t)));
        REQUIRE(r.assignment.has_value());
        CHECK(assignment_feasible(t, *r.assignment));
        long assigned = 0;
        for (const auto& [src, path] : *r.assignment) assigned += path.length();
        CHECK(static_cast<double>(assigned) == r.objective_value);
    }
}

TEST_CASE("min_lqi_cost is zero when all links are strong") {
    const Topology t = star_topology(5, 240);
    CHECK(min_lqi_cost(t, 200).objective_value == 0.0);
    CHECK(min_lqi_units(t, 200) == 0);
}

TEST_CASE("min_lqi_cost with one mandatory weak link") {
    // All three flows must cross 1 -> 0 with l = 1 - 120/200 = 0.4.
    const Topology t = make_topology(4, {{1, 0, 120}, {2, 1, 255}, {3, 2, 255}});
    const OracleResult r = min_lqi_cost(t, 200);
    CHECK(r.objective_value == 3 * 80 / 200.0);  // 1.2
    CHECK(min_lqi_units(t, 200) == 240);
    CHECK(assignment_feasible(t, *r.assignment));
}

TEST_CASE("min_lqi_cost matches brute force") {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
        const Topology t = generate_topology(8, 50.0, 25.0, {}, seed);
        CHECK(min_lqi_units(t, 200) == brute_force_min_units(t, 200));
        CHECK(assignment_feasible(t, *min_lqi_cost(t, 200).assignment));
    }
}

TEST_CASE("min_bottleneck_exact on hand instances") {
    // Star: each source only loads itself.
    CHECK(min_bottleneck_exact(star_topology(6)).objective_value == 1.0);
    // Two sources forced through one relay: relay carries both.
    const Topology forced = make_topology(4, {{2, 1, 255}, {3, 1, 255}, {1, 0, 255}});
    CHECK(min_bottleneck_exact(forced).objective_value == 3.0);  // relay 1: own + 2 transits
}

TEST_CASE("min_bottleneck_exact matches unpruned search") {
    int checked = 0;
    for (std::uint64_t seed = 0; checked < 50 && seed < 500; ++seed) {
        const Topology t = generate_topology(7, 50.0, 18.0, {}, seed);
        const int naive = exhaustive_bottleneck(t);
        if (naive < 0) continue;  // cross product too large for the naive side
        ++checked;
        const OracleResult r = min_bottleneck_exact(t);
        CHECK(r.objective_value == static_cast<double>(naive));
        REQUIRE(r.assignment.has_value());
        CHECK(assignment_feasible(t, *r.assignment));
        // The witness achieves the reported objective.
        std::vector<int> load(t.node_count(), 0);
        for (const auto& [src, path] : *r.assignment)
            for (const DirectedLink& hop : path.hops) load[hop.src] += 1;
        CHECK(*std::max_element(load.begin(), load.end()) ==
              static_cast<int>(r.objective_value));
    }
    CHECK(checked == 50);
}

TEST_CASE("min_bottleneck_exact refuses big instances") {
    const Topology t = generate_topology(12, 50.0, 20.0, {}, 1);
    CHECK_THROWS_AS(min_bottleneck_exact(t), TooLarge);
}

TEST_CASE("oracle values never exceed heuristic objectives") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Topology t = generate_topology(8, 50.0, 25.0, {}, seed);
        const long hops_opt = static_cast<long>(min_total_hops(t).objective_value);
        const long units_opt = min_lqi_units(t, 200);
        const int bottleneck_opt = static_cast<int>(min_bottleneck_exact(t).objective_value);
        for (const RoutingTable& rt :
             {rall(t, {0.5, 0.5, 200, 0}, {}), path_baseline(t), lqi_baseline(t, 200),
              balanced_lqi(t, 200, {}), bpr(t, 5, {})}) {
            CHECK(hops_opt <= eval_total_hops(rt));
            CHECK(units_opt <= eval_lqi_units(rt, 200));
            CHECK(bottleneck_opt <= eval_bottleneck(rt));
        }
        CHECK(hops_opt == eval_total_hops(path_baseline(t)));
        CHECK(units_opt == eval_lqi_units(lqi_baseline(t, 200), 200));
    }
}

TEST_CASE("enumerate_simple_paths is sorted and complete") {
    const Topology t = generate_topology(7, 50.0, 28.0, {}, 9);
    for (NodeId s = 1; s < t.node_count(); ++s) {
        const std::vector<Path> got = enumerate_simple_paths(t, s, 0);
        auto want = all_simple_paths(t, s, 0);
        std::sort(want.begin(), want.end(),
                  [](const std::vector<NodeId>& a, const std::vector<NodeId>& b) {
                      if (a.size() != b.size()) return a.size() < b.size();
                      return a < b;
                  });
        REQUIRE(got.size() == want.size());
        for (size_t i = 0; i < got.size(); ++i) CHECK(got[i].node_sequence() == want[i]);
    }
}
