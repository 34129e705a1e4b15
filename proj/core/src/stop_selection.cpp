#include "sbrp/stop_selection.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "sbrp/errors.hpp"
#include "sbrp/set_cover.hpp"

namespace sbrp {

const PlannedStop* StopPlan::find(NodeId stop_id) const {
    auto it = std::lower_bound(stops.begin(), stops.end(), stop_id,
                               [](const PlannedStop& s, NodeId v) { return s.id < v; });
    if (it == stops.end() || it->id != stop_id) return nullptr;
    return &*it;
}

std::vector<StudentId> StopPlan::students_at(NodeId stop_id) const {
    std::vector<StudentId> out;
    for (const auto& [student, stop] : assignment)
        if (stop == stop_id) out.push_back(student);
    return out;
}

int StopPlan::total_load() const {
    int n = 0;
    for (const PlannedStop& s : stops) n += s.load;
    return n;
}

namespace {

double walk_radius(const Student& s, double virtual_walk_m) {
    return s.door_to_door ? virtual_walk_m : s.max_walk_m;
}

}  // namespace

StopPlan select_stops(const Instance& instance, const Metric& metric, double virtual_walk_m) {
    const std::vector<Student>& students = instance.students;
    const std::vector<NodeId>& stops = instance.candidate_stops;

    // Reachable candidate stops per student.
    std::vector<std::vector<NodeId>> reach(students.size());
    std::vector<StudentId> uncovered;
    for (std::size_t s = 0; s < students.size(); ++s) {
        const double radius = walk_radius(students[s], virtual_walk_m);
        for (NodeId m : stops)
            if (metric.dist(students[s].home, m) <= radius) reach[s].push_back(m);
        if (reach[s].empty()) uncovered.push_back(students[s].id);
    }
    if (!uncovered.empty()) {
        std::ostringstream msg;
        msg << "no candidate stop within walking range of student";
        msg << (uncovered.size() > 1 ? "s" : "");
        for (StudentId id : uncovered) msg << " " << id;
        throw InfeasibleError(msg.str());
    }

    // Stops that reach nobody cannot be in a minimum cover; drop them.
    std::set<NodeId> useful;
    for (const auto& r : reach) useful.insert(r.begin(), r.end());

    CoverProblem cover;
    cover.num_elements = static_cast<int>(students.size());
    for (const Student& s : students)
        cover.element_names.push_back("student " + std::to_string(s.id));
    {
        std::map<NodeId, CoverSet> by_stop;
        for (NodeId m : useful) by_stop[m] = CoverSet{static_cast<int>(m), {}, 1.0};
        for (std::size_t s = 0; s < students.size(); ++s)
            for (NodeId m : reach[s]) by_stop[m].elements.push_back(static_cast<int>(s));
        for (auto& [m, set] : by_stop) cover.sets.push_back(std::move(set));
    }

    CoverSolution best = solve_cover(cover);
    if (best.status == CoverStatus::kInfeasible) throw InfeasibleError(best.message);
    const double k_star = best.objective;

    // Lexicographic tightening: fix selected ids smallest-first, each time
    // asking whether a size-k* cover exists with all skipped ids excluded.
    std::vector<int> fixed_in;
    std::vector<int> fixed_out;
    std::vector<int> candidates;
    for (const CoverSet& s : cover.sets) candidates.push_back(s.id);
    std::size_t pos = 0;
    while (fixed_in.size() < static_cast<std::size_t>(k_star + 0.5) && pos < candidates.size()) {
        const int m = candidates[pos];
        SolveCoverOptions opts;
        opts.forced_in = fixed_in;
        opts.forced_in.push_back(m);
        opts.forced_out = fixed_out;
        opts.target_objective = k_star;
        CoverSolution probe = solve_cover(cover, opts);
        if (probe.status != CoverStatus::kInfeasible && probe.objective <= k_star + 1e-9) {
            fixed_in.push_back(m);
        } else {
            fixed_out.push_back(m);
        }
        ++pos;
    }
    std::vector<NodeId> selected(fixed_in.begin(), fixed_in.end());
    std::sort(selected.begin(), selected.end());

    // Assignment: nearest selected reachable stop, ties to the lowest id.
    StopPlan plan;
    std::map<NodeId, PlannedStop> planned;
    for (NodeId m : selected) planned[m] = PlannedStop{m, m, 0, 0.0, 0.0};
    for (std::size_t s = 0; s < students.size(); ++s) {
        NodeId best_stop = -1;
        double best_dist = kInfinity;
        for (NodeId m : reach[s]) {
            if (!planned.count(m)) continue;
            const double d = metric.dist(students[s].home, m);
            if (d < best_dist || (d == best_dist && m < best_stop)) {
                best_dist = d;
                best_stop = m;
            }
        }
        if (best_stop < 0)
            throw InfeasibleError("selected stops do not cover student " +
                                  std::to_string(students[s].id));
        plan.assignment[students[s].id] = best_stop;
        PlannedStop& ps = planned[best_stop];
        ps.load += 1;
        if (students[s].door_to_door) {
            const RoundTrip rt{metric.time(best_stop, students[s].home) +
                                   metric.time(students[s].home, best_stop),
                               metric.dist(best_stop, students[s].home) +
                                   metric.dist(students[s].home, best_stop)};
            plan.d2d_round_trip[students[s].id] = rt;
            ps.extra_time_s += rt.time_s;
            ps.extra_dist_m += rt.dist_m;
        }
    }
    for (auto& [m, ps] : planned) plan.stops.push_back(ps);
    return plan;
}

StopPlan door_to_door_plan(const Instance& instance) {
    StopPlan plan;
    for (const Student& s : instance.students) {
        plan.stops.push_back(PlannedStop{s.id, s.home, 1, 0.0, 0.0});
        plan.assignment[s.id] = s.id;
    }
    std::sort(plan.stops.begin(), plan.stops.end(),
              [](const PlannedStop& a, const PlannedStop& b) { return a.id < b.id; });
    return plan;
}

}  // namespace sbrp
