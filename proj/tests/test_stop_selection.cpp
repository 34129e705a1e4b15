#include <doctest.h>

#include <set>

#include "sbrp/errors.hpp"
#include "sbrp/metric.hpp"
#include "sbrp/stop_selection.hpp"

#include "support/builders.hpp"
#include "support/oracles.hpp"

using namespace sbrp;
using sbrp::testing::PlanarSpec;
using sbrp::testing::planar_instance;
using sbrp::testing::Rng;

namespace {

struct RandomCoverCase {
    Instance instance;
    Metric metric;
    std::vector<std::uint32_t> reach_masks;  // per candidate stop (sorted id order)
};

RandomCoverCase random_cover_case(Rng& rng, int max_stops) {
    PlanarSpec spec;
    const int n_students = rng.uniform_int(2, 12);
    const int n_stops = rng.uniform_int(2, max_stops);
    spec.school = {50.0, 50.0};
    spec.max_walk = 1.0;  // placeholder; per-student walk set below
    for (int i = 0; i < n_stops; ++i)
        spec.stops.push_back({rng.uniform(0.0, 100.0), rng.uniform(0.0, 100.0)});
    for (int i = 0; i < n_students; ++i)
        spec.students.push_back({rng.uniform(0.0, 100.0), rng.uniform(0.0, 100.0)});
    RandomCoverCase out{planar_instance(spec), {}, {}};
    Instance& ins = out.instance;
    out.metric = compute_metric(ins);
    // draw a walking radius that reaches at least one stop
    for (Student& s : ins.students) {
        double nearest = kInfinity;
        for (NodeId m : ins.candidate_stops)
            nearest = std::min(nearest, out.metric.dist(s.home, m));
        s.max_walk_m = nearest + rng.uniform(0.0, 40.0);
        s.door_to_door = false;
    }
    out.reach_masks.assign(ins.candidate_stops.size(), 0);
    for (std::size_t m = 0; m < ins.candidate_stops.size(); ++m)
        for (std::size_t s = 0; s < ins.students.size(); ++s)
            if (out.metric.dist(ins.students[s].home, ins.candidate_stops[m]) <=
                ins.students[s].max_walk_m)
                out.reach_masks[m] |= 1u << s;
    return out;
}

}  // namespace

TEST_CASE("one student and one reachable stop forces that stop") {
    PlanarSpec spec;
    spec.stops = {{10.0, 0.0}};
    spec.students = {{12.0, 0.0}};
    spec.max_walk = 5.0;
    const Instance ins = planar_instance(spec);
    const Metric metric = compute_metric(ins);
    const StopPlan plan = select_stops(ins, metric, 0.0);
    REQUIRE(plan.stops.size() == 1);
    CHECK(plan.stops[0].id == ins.candidate_stops[0]);
    CHECK(plan.stops[0].load == 1);
    CHECK(plan.assignment.at(0) == ins.candidate_stops[0]);
}

TEST_CASE("students outside every stop are listed in the error") {
    PlanarSpec spec;
    spec.stops = {{10.0, 0.0}};
    spec.students = {{90.0, 90.0}, {11.0, 0.0}};
    spec.max_walk = 5.0;
    const Instance ins = planar_instance(spec);
    const Metric metric = compute_metric(ins);
    try {
        select_stops(ins, metric, 0.0);
        FAIL("expected InfeasibleError");
    } catch (const InfeasibleError& e) {
        CHECK(std::string(e.what()).find("student 0") != std::string::npos);
    }
}

TEST_CASE("selected stop count matches the exhaustive minimum") {
    Rng rng(424242);
    for (int round = 0; round < 60; ++round) {
        RandomCoverCase c = random_cover_case(rng, 10);
        const std::uint32_t full = (1u << c.instance.students.size()) - 1;
        const auto oracle = sbrp::testing::exhaustive_min_cover(c.reach_masks, full);
        REQUIRE(oracle.has_value());
        const StopPlan plan = select_stops(c.instance, c.metric, 0.0);
        CHECK(plan.stops.size() == oracle->size());
    }
}

TEST_CASE("minimum covers break ties toward the smallest stop ids") {
    // two stops, both covering both students: the lower id must win
    PlanarSpec spec;
    spec.stops = {{10.0, 0.0}, {10.0, 1.0}};
    spec.students = {{11.0, 0.0}, {9.0, 0.5}};
    spec.max_walk = 50.0;
    const Instance ins = planar_instance(spec);
    const Metric metric = compute_metric(ins);
    const StopPlan plan = select_stops(ins, metric, 0.0);
    REQUIRE(plan.stops.size() == 1);
    CHECK(plan.stops[0].id == ins.candidate_stops[0]);

    // and in general: equal to the exhaustive lexicographic choice
    Rng rng(7);
    for (int round = 0; round < 25; ++round) {
        RandomCoverCase c = random_cover_case(rng, 8);
        const std::uint32_t full = (1u << c.instance.students.size()) - 1;
        const auto oracle = sbrp::testing::exhaustive_min_cover(c.reach_masks, full);
        REQUIRE(oracle.has_value());
        std::vector<NodeId> expected;
        for (int idx : *oracle) expected.push_back(c.instance.candidate_stops[idx]);
        const StopPlan plan = select_stops(c.instance, c.metric, 0.0);
        std::vector<NodeId> got;
        for (const PlannedStop& s : plan.stops) got.push_back(s.id);
        CHECK(got == expected);
    }
}

TEST_CASE("every selected stop serves somebody and loads sum to the student count") {
    Rng rng(99);
    for (int round = 0; round < 20; ++round) {
        RandomCoverCase c = random_cover_case(rng, 12);
        const StopPlan plan = select_stops(c.instance, c.metric, 0.0);
        int total = 0;
        for (const PlannedStop& s : plan.stops) {
            CHECK(s.load >= 1);
            total += s.load;
        }
        CHECK(total == static_cast<int>(c.instance.students.size()));
        // nearest reachable selected stop, ties by id
        for (const Student& st : c.instance.students) {
            const NodeId assigned = plan.assignment.at(st.id);
            const double got = c.metric.dist(st.home, assigned);
            CHECK(got <= st.max_walk_m);
            for (const PlannedStop& s : plan.stops) {
                if (c.metric.dist(st.home, s.id) > st.max_walk_m) continue;
                const double d = c.metric.dist(st.home, s.id);
                CHECK(got <= d + 1e-12);
                if (d == got) CHECK(assigned <= s.id);
            }
        }
    }
}

TEST_CASE("door-to-door students join their nearest selected stop with a round-trip penalty") {
    PlanarSpec spec;
    spec.school = {0.0, 0.0};
    spec.stops = {{10.0, 0.0}, {40.0, 0.0}};
    spec.students = {{12.0, 0.0}, {38.0, 0.0}, {41.0, 0.0}};
    spec.max_walk = 5.0;
    Instance ins = planar_instance(spec);
    ins.students[2].max_walk_m = 0.0;  // door-to-door, home at (41, 0)
    ins.students[2].door_to_door = true;
    const Metric metric = compute_metric(ins);
    const StopPlan plan = select_stops(ins, metric, /*virtual_walk_m=*/10.0);
    REQUIRE(plan.stops.size() == 2);
    const NodeId far_stop = ins.candidate_stops[1];
    CHECK(plan.assignment.at(2) == far_stop);
    const PlannedStop* ps = plan.find(far_stop);
    REQUIRE(ps != nullptr);
    CHECK(ps->load == 2);
    CHECK(ps->extra_time_s == doctest::Approx(2.0));  // 1 out + 1 back at unit speed
    CHECK(ps->extra_dist_m == doctest::Approx(2.0));
    CHECK(plan.d2d_round_trip.at(2).dist_m == doctest::Approx(2.0));
}
