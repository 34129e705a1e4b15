#include "sbrp/instance.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "sbrp/errors.hpp"

namespace sbrp {

const RoadNode* RoadNetwork::find(NodeId id) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), id,
                               [](const RoadNode& n, NodeId v) { return n.id < v; });
    if (it == nodes.end() || it->id != id) return nullptr;
    return &*it;
}

const RoadNode& RoadNetwork::at(NodeId id) const {
    const RoadNode* n = find(id);
    if (!n) throw ValidationError("unknown node id " + std::to_string(id));
    return *n;
}

const Student* Instance::find_student(StudentId id) const {
    auto it = std::lower_bound(students.begin(), students.end(), id,
                               [](const Student& s, StudentId v) { return s.id < v; });
    if (it == students.end() || it->id != id) return nullptr;
    return &*it;
}

int Instance::door_to_door_count() const {
    int n = 0;
    for (const Student& s : students)
        if (s.door_to_door) ++n;
    return n;
}

void validate(const Instance& instance) {
    const RoadNetwork& net = instance.network;
    if (net.nodes.empty()) throw ValidationError("empty node set");
    for (std::size_t i = 1; i < net.nodes.size(); ++i)
        if (net.nodes[i - 1].id >= net.nodes[i].id)
            throw ValidationError("node ids must be unique and sorted");

    for (const RoadEdge& e : net.edges) {
        if (!net.find(e.from) || !net.find(e.to))
            throw ValidationError("edge (" + std::to_string(e.from) + "," +
                                  std::to_string(e.to) + ") references undeclared node");
        if (!(e.length_m > 0.0) || !(e.time_s > 0.0))
            throw ValidationError("edge (" + std::to_string(e.from) + "," +
                                  std::to_string(e.to) + ") must have positive length and time");
    }

    if (instance.students.empty()) throw ValidationError("empty student set");
    std::set<StudentId> seen;
    for (const Student& s : instance.students) {
        if (!seen.insert(s.id).second)
            throw ValidationError("duplicate student id " + std::to_string(s.id));
        if (!net.find(s.home))
            throw ValidationError("student " + std::to_string(s.id) +
                                  " home node " + std::to_string(s.home) + " not declared");
        if (s.max_walk_m < 0.0)
            throw ValidationError("student " + std::to_string(s.id) + " has negative max_walk");
        if (s.door_to_door != (s.max_walk_m == 0.0))
            throw ValidationError("student " + std::to_string(s.id) +
                                  ": door_to_door must hold exactly when max_walk is 0");
    }

    for (NodeId m : instance.candidate_stops)
        if (!net.find(m))
            throw ValidationError("candidate stop " + std::to_string(m) + " not declared");
    for (std::size_t i = 1; i < instance.candidate_stops.size(); ++i)
        if (instance.candidate_stops[i - 1] >= instance.candidate_stops[i])
            throw ValidationError("candidate stops must be unique and sorted");

    if (!net.find(instance.school)) throw ValidationError("school node not declared");
    if (!net.find(instance.depot)) throw ValidationError("depot node not declared");

    if (instance.capacity < 1) throw ValidationError("capacity must be >= 1");
    if (!(instance.t_max_s > 0.0)) throw ValidationError("t_max must be > 0");
    if (instance.fleet_limit < 1) throw ValidationError("fleet_limit must be >= 1");
    if (instance.cost.bus_fixed < 0.0 || instance.cost.bus_per_mile < 0.0)
        throw ValidationError("bus cost rates must be >= 0");
    for (const AlternateMode& a : instance.cost.alt_modes)
        if (a.per_mile < 0.0)
            throw ValidationError("alternate mode '" + a.mode + "' rate must be >= 0");
    if (instance.stop_delay.base_s < 0.0 || instance.stop_delay.per_student_s < 0.0)
        throw ValidationError("stop delay parameters must be >= 0");
    if (!(instance.speed_m_s > 0.0)) throw ValidationError("speed must be > 0");
    if (!(instance.cost_unit_m > 0.0)) throw ValidationError("cost_unit_m must be > 0");
}

}  // namespace sbrp
