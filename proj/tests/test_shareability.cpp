#include <doctest.h>

#include <set>

#include "sbrp/metric.hpp"
#include "sbrp/shareability.hpp"
#include "sbrp/trips.hpp"

#include "support/builders.hpp"

using namespace sbrp;
using sbrp::testing::PlanarSpec;
using sbrp::testing::planar_instance;
using sbrp::testing::Rng;

namespace {

// students strung along the x axis with the school at the origin
Instance axis_instance(const std::vector<double>& xs) {
    PlanarSpec spec;
    spec.school = {0.0, 0.0};
    for (double x : xs) spec.students.push_back({x, 0.0});
    spec.delay = {0.0, 0.0};
    return planar_instance(spec);
}

using Edge = std::pair<std::int32_t, std::int32_t>;

std::set<Edge> edge_set(const ShareabilityNetwork& net) {
    return {net.edges().begin(), net.edges().end()};
}

}  // namespace

TEST_CASE("adjusted travel time follows the detour factor") {
    PlanarSpec spec;
    spec.school = {0.0, 0.0};
    spec.students = {{0.0, 10.0}, {0.0, 5.0}, {10.0, 0.0}, {-10.0, 0.0}};
    const Instance ins = planar_instance(spec);
    const Metric m = compute_metric(ins);
    const NodeId on_ray_far = ins.students[0].home;   // (0,10)
    const NodeId on_ray_near = ins.students[1].home;  // (0,5)
    const NodeId east = ins.students[2].home;         // (10,0)
    const NodeId west = ins.students[3].home;         // (-10,0)

    // j on i's ray to school: no detour at all
    CHECK(adjusted_travel_time(on_ray_far, on_ray_near, m, ins.school) == doctest::Approx(5.0));
    // opposite sides of the school: detour factor 3
    CHECK(adjusted_travel_time(east, west, m, ins.school) == doctest::Approx(60.0));
    // coincident nodes
    CHECK(adjusted_travel_time(east, east, m, ins.school) == 0.0);
    // a node sitting at the school ranks everyone at infinity
    CHECK(adjusted_travel_time(ins.school, east, m, ins.school) == kInfinity);
}

TEST_CASE("pair feasibility decides the network's edges") {
    Instance ins = axis_instance({10.0, 12.0, 2000.0});
    ins.t_max_s = 100.0;
    const Metric m = compute_metric(ins);
    const StopPlan plan = door_to_door_plan(ins);
    const ShareabilityNetwork net =
        build_network(ins, m, plan, default_pair_check(ins, m));
    CHECK(net.node_count() == 3);
    CHECK(net.adjacent(0, 1));   // 12 + 2 of backtracking fits in 100
    CHECK(!net.adjacent(0, 2));  // the far node can't pair with anyone
    CHECK(!net.adjacent(1, 2));
    CHECK(net.node(0).weight == 1);
}

TEST_CASE("an injected feasibility oracle is honored verbatim") {
    Instance ins = axis_instance({1.0, 2.0, 3.0});
    const Metric m = compute_metric(ins);
    const StopPlan plan = door_to_door_plan(ins);
    const PairFeasibility only_01 = [](const ShareNode& a, const ShareNode& b) {
        return a.id + b.id == 1;  // just the (0,1) pair
    };
    const ShareabilityNetwork net = build_network(ins, m, plan, only_01);
    CHECK(net.edge_count() == 1);
    CHECK(net.adjacent(0, 1));
}

TEST_CASE("pruning keeps the adjusted-nearest prefix per node") {
    // five unit-load nodes on a line at x = 10, 11, 12, 14, 18; school at 0.
    // With a two-student budget each node keeps its two adjusted-nearest
    // neighbors; the union rule then retains 7 of the 10 edges.
    const Instance ins = axis_instance({10.0, 11.0, 12.0, 14.0, 18.0});
    const Metric m = compute_metric(ins);
    std::vector<ShareNode> nodes;
    for (int i = 0; i < 5; ++i)
        nodes.push_back(ShareNode{i + 1, ins.students[i].home, 1, 0.0, 0.0});
    std::vector<Edge> all_pairs;
    for (int a = 1; a <= 5; ++a)
        for (int b = a + 1; b <= 5; ++b) all_pairs.push_back({a, b});
    const ShareabilityNetwork net(nodes, all_pairs);

    const ShareabilityNetwork pruned = prune_edges(net, m, ins.school, /*beta=*/2.0,
                                                   /*capacity=*/1);
    const std::set<Edge> expected = {{1, 2}, {1, 3}, {2, 3}, {2, 4}, {3, 4}, {3, 5}, {4, 5}};
    CHECK(edge_set(pruned) == expected);
}

TEST_CASE("a loose budget leaves the network unchanged") {
    const Instance ins = axis_instance({10.0, 11.0, 12.0, 14.0, 18.0});
    const Metric m = compute_metric(ins);
    const StopPlan plan = door_to_door_plan(ins);
    const ShareabilityNetwork net =
        build_network(ins, m, plan, default_pair_check(ins, m));
    const ShareabilityNetwork pruned = prune_edges(net, m, ins.school, 100.0, 72);
    CHECK(edge_set(pruned) == edge_set(net));
}

TEST_CASE("the budget counts students, not nodes") {
    // center node 0 with three neighbors of weights 100, 44, 1; beta * C =
    // 2 * 72 = 144 admits exactly the first two by cumulative load.
    PlanarSpec spec;
    spec.school = {0.0, 0.0};
    spec.students = {{10.0, 0.0}, {10.0, 1.0}, {10.0, 2.0}, {10.0, 3.0}};
    const Instance ins = planar_instance(spec);
    const Metric m = compute_metric(ins);
    std::vector<ShareNode> nodes = {
        ShareNode{0, ins.students[0].home, 1, 0.0, 0.0},
        ShareNode{1, ins.students[1].home, 100, 0.0, 0.0},
        ShareNode{2, ins.students[2].home, 44, 0.0, 0.0},
        ShareNode{3, ins.students[3].home, 1, 0.0, 0.0},
    };
    // star around node 0 only: the kept set is exactly node 0's prefix
    const ShareabilityNetwork net(nodes, {{0, 1}, {0, 2}, {0, 3}});
    const ShareabilityNetwork pruned = prune_edges(net, m, ins.school, 2.0, 72);
    // leaf nodes keep their only neighbor (weight 1 fits), so the union
    // keeps every edge whose far end fits node 0's 144-student budget
    CHECK(edge_set(pruned) == std::set<Edge>{{0, 1}, {0, 2}, {0, 3}});

    // drop the leaves' votes by exceeding their budgets too: weight the hub
    std::vector<ShareNode> heavy = nodes;
    heavy[0].weight = 200;  // leaves can no longer afford the hub
    const ShareabilityNetwork net2(heavy, {{0, 1}, {0, 2}, {0, 3}});
    const ShareabilityNetwork pruned2 = prune_edges(net2, m, ins.school, 2.0, 72);
    CHECK(edge_set(pruned2) == std::set<Edge>{{0, 1}, {0, 2}});
}

TEST_CASE("pruned edge sets grow with beta") {
    Rng rng(8080);
    for (int round = 0; round < 15; ++round) {
        PlanarSpec spec;
        spec.school = {50.0, 50.0};
        const int n = rng.uniform_int(6, 14);
        for (int i = 0; i < n; ++i)
            spec.students.push_back({rng.uniform(0.0, 100.0), rng.uniform(0.0, 100.0)});
        spec.capacity = 4;
        spec.t_max = 500.0;
        const Instance ins = planar_instance(spec);
        const Metric m = compute_metric(ins);
        const ShareabilityNetwork net =
            build_network(ins, m, door_to_door_plan(ins), default_pair_check(ins, m));
        std::set<Edge> prev;
        bool first = true;
        for (double beta : {1.1, 1.5, 2.0, 3.0, 8.0}) {
            const auto pruned = edge_set(prune_edges(net, m, ins.school, beta, ins.capacity));
            // always a subgraph of the input
            for (const Edge& e : pruned) CHECK(edge_set(net).count(e));
            if (!first)
                for (const Edge& e : prev) CHECK(pruned.count(e));
            prev = pruned;
            first = false;
        }
    }
}

TEST_CASE("exports carry every node and edge") {
    const Instance ins = axis_instance({10.0, 11.0, 12.0});
    const Metric m = compute_metric(ins);
    const ShareabilityNetwork net =
        build_network(ins, m, door_to_door_plan(ins), default_pair_check(ins, m));
    const std::string edges = network_to_edge_list(net);
    CHECK(edges.find("node 0 1") != std::string::npos);
    CHECK(edges.find("edge 0 1") != std::string::npos);
    const std::string graphml = network_to_graphml(net);
    CHECK(graphml.find("<graphml") != std::string::npos);
    CHECK(graphml.find("<node id=\"n2\">") != std::string::npos);
    CHECK(graphml.find("</graphml>") != std::string::npos);
}
