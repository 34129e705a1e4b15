#ifndef SBRP_INSTANCE_HPP
#define SBRP_INSTANCE_HPP

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace sbrp {

using NodeId = std::int32_t;
using StudentId = std::int32_t;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Meters per mile; cost rates quoted per mile are converted with this.
inline constexpr double kMetersPerMile = 1609.344;

struct RoadNode {
    NodeId id = -1;
    double x = 0.0;  // meters (planar)
    double y = 0.0;
};

struct RoadEdge {
    NodeId from = -1;
    NodeId to = -1;
    double length_m = 0.0;  // > 0
    double time_s = 0.0;    // > 0
};

// Location graph behind the travel metric. When `edges` is empty the node
// set is interpreted as a planar point cloud (Euclidean metric).
struct RoadNetwork {
    std::vector<RoadNode> nodes;  // sorted by id, ids unique
    std::vector<RoadEdge> edges;  // directed

    bool euclidean() const { return edges.empty(); }
    const RoadNode* find(NodeId id) const;
    const RoadNode& at(NodeId id) const;  // throws ValidationError if absent

    bool operator==(const RoadNetwork&) const = default;
};

struct Student {
    StudentId id = -1;
    NodeId home = -1;
    double max_walk_m = 0.0;     // 0 means door-to-door
    bool door_to_door = false;   // holds iff max_walk_m == 0

    bool operator==(const Student&) const = default;
};

struct AlternateMode {
    std::string mode;        // e.g. "dedicated"
    double per_mile = 0.0;   // kInfinity disables the mode

    bool operator==(const AlternateMode&) const = default;
};

struct CostModel {
    double bus_fixed = 200.0;    // currency per bus per day
    double bus_per_mile = 1.0;   // currency per mile driven
    std::vector<AlternateMode> alt_modes;

    bool operator==(const CostModel&) const = default;
};

struct StopDelay {
    double base_s = 15.0;
    double per_student_s = 5.0;

    double at_load(int students) const { return base_s + per_student_s * students; }
    bool operator==(const StopDelay&) const = default;
};

// One routing problem: students to carry to a single school, a candidate
// stop set, a fleet description and the cost rates.
struct Instance {
    std::string name;
    RoadNetwork network;
    std::vector<Student> students;       // sorted by id
    std::vector<NodeId> candidate_stops; // sorted, unique
    NodeId school = -1;
    NodeId depot = -1;
    int capacity = 72;
    double t_max_s = 3600.0;             // kInfinity when unbounded
    int fleet_limit = kUnlimitedFleet;
    CostModel cost;
    StopDelay stop_delay;
    double speed_m_s = 1.0;              // point-cloud instances only
    double cost_unit_m = kMetersPerMile; // meters per costed distance unit

    static constexpr int kUnlimitedFleet = std::numeric_limits<int>::max();

    const Student* find_student(StudentId id) const;
    int door_to_door_count() const;

    bool operator==(const Instance&) const = default;
};

// Throws ValidationError naming the violated invariant. Checks structural
// invariants only; metric-dependent ones (reachability, stop coverage) are
// verified where the metric is available.
void validate(const Instance& instance);

}  // namespace sbrp

#endif
