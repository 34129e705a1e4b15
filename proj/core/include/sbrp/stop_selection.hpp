#ifndef SBRP_STOP_SELECTION_HPP
#define SBRP_STOP_SELECTION_HPP

#include <map>
#include <vector>

#include "sbrp/instance.hpp"
#include "sbrp/metric.hpp"

namespace sbrp {

struct PlannedStop {
    NodeId id = -1;        // stop id; equals location except for split clones
    NodeId location = -1;  // metric node
    int load = 0;          // students assigned here
    double extra_time_s = 0.0;  // door-to-door round trips served from here
    double extra_dist_m = 0.0;

    bool operator==(const PlannedStop&) const = default;
};

struct RoundTrip {
    double time_s = 0.0;
    double dist_m = 0.0;

    bool operator==(const RoundTrip&) const = default;
};

// Output of node compression: the selected stops and the student→stop map.
struct StopPlan {
    std::vector<PlannedStop> stops;          // sorted by id
    std::map<StudentId, NodeId> assignment;  // student -> stop id
    // Stop↔home round trip per door-to-door student; per-stop extras are
    // the sums of these over the stop's assigned students.
    std::map<StudentId, RoundTrip> d2d_round_trip;

    const PlannedStop* find(NodeId stop_id) const;
    std::vector<StudentId> students_at(NodeId stop_id) const;
    int total_load() const;
};

// Picks a minimum-cardinality subset of the candidate stops so that every
// student has a selected stop within walking range (door-to-door students
// use virtual_walk_m instead), then assigns each student to the nearest
// selected reachable stop (ties to the lowest stop id). Door-to-door
// students carry a stop↔home round-trip penalty on their stop. Among
// minimum covers the lexicographically smallest stop-id set is returned.
// Throws InfeasibleError listing students no candidate stop can cover.
StopPlan select_stops(const Instance& instance, const Metric& metric, double virtual_walk_m);

// One stop per student at their home, no walking: the uncompressed plan.
StopPlan door_to_door_plan(const Instance& instance);

}  // namespace sbrp

#endif
