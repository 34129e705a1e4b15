#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "sbrp/errors.hpp"
#include "sbrp/instance.hpp"
#include "sbrp/instance_io.hpp"
#include "sbrp/metric.hpp"

#include "support/builders.hpp"

using namespace sbrp;

namespace {

std::string data_path(const std::string& name) { return std::string(SBRP_TEST_DATA) + "/" + name; }

}  // namespace

TEST_CASE("euclidean text loader reads the sample benchmark file") {
    const Instance ins = load_instance(std::string(SBRP_SAMPLE_DATA) + "/euclidean_40x200.txt",
                                       InstanceFormat::kEuclideanSchittekat);
    CHECK(ins.candidate_stops.size() == 40);
    CHECK(ins.students.size() == 200);
    CHECK(ins.capacity == 25);
    CHECK(ins.students.front().max_walk_m == doctest::Approx(5.0));
    CHECK(ins.network.euclidean());
    CHECK(ins.t_max_s == kInfinity);
    CHECK(ins.cost.bus_fixed == 0.0);
    CHECK(ins.cost_unit_m == 1.0);
    CHECK(ins.cost.alt_modes.empty());
    // first coordinate line is the school
    CHECK(ins.school != ins.candidate_stops.front());
}

TEST_CASE("bps csv loader reproduces the fixture's counts") {
    const Instance ins = load_instance(data_path("bps_small.csv"), InstanceFormat::kBpsCsv);
    CHECK(ins.students.size() == 51);
    CHECK(ins.door_to_door_count() == 7);
    CHECK(ins.candidate_stops.size() == 15);
    CHECK(ins.network.euclidean());  // point cloud, flat speed
    for (const Student& s : ins.students)
        CHECK(s.door_to_door == (s.max_walk_m == 0.0));
}

TEST_CASE("native json rejects an empty student set") {
    const char* text = R"({
      "points": [{"id": 0, "x": 0, "y": 0}],
      "students": [], "stops": [], "school": 0, "depot": 0
    })";
    CHECK_THROWS_WITH_AS(instance_from_json(text), "empty student set", ValidationError);
}

TEST_CASE("native json round-trips to an identical instance") {
    const Instance a = load_instance(data_path("line3.json"));
    const std::string tmp = "/tmp/sbrp_roundtrip_test.json";
    save_instance(a, tmp);
    const Instance b = load_instance(tmp);
    CHECK(a == b);
    std::remove(tmp.c_str());

    // a planar one as well
    testing::PlanarSpec spec;
    spec.stops = {{1.5, 2.25}, {3.0, 4.0}};
    spec.students = {{0.1, 0.9}, {2.7, 3.3}};
    spec.max_walk = 5.0;
    const Instance c = testing::planar_instance(spec);
    const Instance d = instance_from_json(instance_to_json(c));
    CHECK(c == d);
}

TEST_CASE("validation names the violated invariant") {
    testing::PlanarSpec spec;
    spec.students = {{1.0, 1.0}};
    Instance ins = testing::planar_instance(spec);

    SUBCASE("capacity") {
        ins.capacity = 0;
        CHECK_THROWS_AS(validate(ins), ValidationError);
    }
    SUBCASE("t_max") {
        ins.t_max_s = 0.0;
        CHECK_THROWS_AS(validate(ins), ValidationError);
    }
    SUBCASE("door-to-door flag must match max_walk") {
        ins.students[0].door_to_door = false;  // max_walk is 0
        CHECK_THROWS_AS(validate(ins), ValidationError);
    }
    SUBCASE("edges must reference declared nodes") {
        ins.network.edges.push_back({0, 99, 1.0, 1.0});
        CHECK_THROWS_AS(validate(ins), ValidationError);
    }
    SUBCASE("edge lengths must be positive") {
        ins.network.edges.push_back({0, 1, 0.0, 1.0});
        CHECK_THROWS_AS(validate(ins), ValidationError);
    }
}

TEST_CASE("euclidean metric matches plane geometry") {
    testing::PlanarSpec spec;
    spec.school = {0.0, 0.0};
    spec.students = {{0.0, 0.0}, {3.0, 4.0}};
    const Instance ins = testing::planar_instance(spec);
    const Metric m = compute_metric(ins);
    const NodeId i = ins.students[0].home, j = ins.students[1].home;
    CHECK(m.dist(i, j) == doctest::Approx(5.0));
    CHECK(m.time(i, j) == doctest::Approx(5.0));
    CHECK(m.dist(i, i) == 0.0);
    CHECK(m.time(j, j) == 0.0);
    CHECK(m.kind() == MetricKind::kEuclidean);
}

TEST_CASE("road metric sums shortest-path legs") {
    const Instance ins = load_instance(data_path("line3.json"));
    const Metric m = compute_metric(ins);
    CHECK(m.kind() == MetricKind::kShortestPath);
    CHECK(m.time(0, 2) == doctest::Approx(5.0));
    CHECK(m.dist(0, 2) == doctest::Approx(500.0));
    CHECK(m.time(2, 0) == doctest::Approx(5.0));
    CHECK(m.time(1, 1) == 0.0);
}

TEST_CASE("road metric reports unreachable nodes by name") {
    Instance ins = load_instance(data_path("line3.json"));
    // cut the 1 -> 2 direction: node 0 and stop 1 can no longer reach school
    ins.network.edges.erase(
        std::remove_if(ins.network.edges.begin(), ins.network.edges.end(),
                       [](const RoadEdge& e) { return e.from == 1 && e.to == 2; }),
        ins.network.edges.end());
    CHECK_THROWS_WITH_AS(compute_metric(ins), "node 0 cannot reach the school", InfeasibleError);
}

TEST_CASE("shortest-path times satisfy the triangle inequality") {
    // random strongly connected digraph
    testing::Rng rng(411);
    Instance ins;
    ins.name = "tri";
    const int n = 8;
    for (int i = 0; i < n; ++i)
        ins.network.nodes.push_back({i, rng.uniform(0, 100), rng.uniform(0, 100)});
    for (int i = 0; i < n; ++i)  // ring keeps everything reachable
        ins.network.edges.push_back({i, (i + 1) % n, rng.uniform(1, 10), rng.uniform(1, 10)});
    for (int k = 0; k < 12; ++k) {
        const int a = rng.uniform_int(0, n - 1), b = rng.uniform_int(0, n - 1);
        if (a != b) ins.network.edges.push_back({a, b, rng.uniform(1, 10), rng.uniform(1, 10)});
    }
    Student s;
    s.id = 0;
    s.home = 3;
    s.door_to_door = true;
    ins.students = {s};
    ins.candidate_stops = {1, 2, 4, 5, 6, 7};
    ins.school = 0;
    ins.depot = 0;
    const Metric m = compute_metric(ins);
    for (NodeId i : m.nodes())
        for (NodeId j : m.nodes())
            for (NodeId k : m.nodes())
                CHECK(m.time(i, k) <= m.time(i, j) + m.time(j, k) + 1e-9);
}
