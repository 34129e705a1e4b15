#include "sbrp/pipeline.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <map>
#include <sstream>

#include "sbrp/errors.hpp"
#include "sbrp/shareability.hpp"

namespace sbrp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double bus_trip_cost(const TripConfiguration& t, const Instance& ins) {
    return ins.cost.bus_fixed + ins.cost.bus_per_mile * (t.distance_m / ins.cost_unit_m);
}

double alt_rate(const Instance& ins, const std::string& mode) {
    for (const AlternateMode& a : ins.cost.alt_modes)
        if (a.mode == mode) return a.per_mile;
    throw ValidationError("unknown alternate mode '" + mode + "'");
}

double alt_trip_cost(const TripConfiguration& t, const Instance& ins) {
    return alt_rate(ins, t.mode) * (t.distance_m / ins.cost_unit_m);
}

std::string status_string(const CoverSolution& s) {
    switch (s.status) {
        case CoverStatus::kOptimal: return "optimal";
        case CoverStatus::kFeasibleGap: {
            char buf[64];
            std::snprintf(buf, sizeof buf, "feasible(gap=%.4g)", s.gap);
            return buf;
        }
        case CoverStatus::kInfeasible: return "infeasible";
    }
    return "unknown";
}

}  // namespace

StopPlan split_stops(const StopPlan& plan, int n_max) {
    if (n_max < 1) throw ValidationError("n_max must be >= 1");
    NodeId next_id = 0;
    for (const PlannedStop& s : plan.stops) next_id = std::max(next_id, s.id);
    ++next_id;

    StopPlan out;
    out.d2d_round_trip = plan.d2d_round_trip;
    for (const PlannedStop& s : plan.stops) {
        const std::vector<StudentId> studs = plan.students_at(s.id);  // ascending ids
        if (s.load <= n_max) {
            out.stops.push_back(s);
            for (StudentId st : studs) out.assignment[st] = s.id;
            continue;
        }
        const int chunks = (s.load + n_max - 1) / n_max;
        for (int c = 0; c < chunks; ++c) {
            PlannedStop clone{c == 0 ? s.id : next_id++, s.location, 0, 0.0, 0.0};
            const int lo = c * n_max;
            const int hi = std::min((c + 1) * n_max, s.load);
            for (int k = lo; k < hi; ++k) {
                const StudentId st = studs[k];
                out.assignment[st] = clone.id;
                clone.load += 1;
                auto it = plan.d2d_round_trip.find(st);
                if (it != plan.d2d_round_trip.end()) {
                    clone.extra_time_s += it->second.time_s;
                    clone.extra_dist_m += it->second.dist_m;
                }
            }
            out.stops.push_back(clone);
        }
    }
    std::sort(out.stops.begin(), out.stops.end(),
              [](const PlannedStop& a, const PlannedStop& b) { return a.id < b.id; });
    return out;
}

Solution solve(const Instance& instance, const SolveParams& params) {
    validate(instance);
    if (params.beta && !(*params.beta > 1.0)) throw ValidationError("beta must be > 1");
    if (params.gamma && (*params.gamma < 0.0 || *params.gamma >= 1.0))
        throw ValidationError("gamma must lie in [0, 1)");

    Solution sol;
    Diagnostics& diag = sol.diagnostics;
    diag.instance = instance.name;
    diag.students = static_cast<int>(instance.students.size());
    diag.door_to_door = instance.door_to_door_count();
    diag.beta = params.beta;
    diag.gamma = params.gamma;

    const auto t_all = Clock::now();
    auto t_stage = Clock::now();

    const Metric metric = compute_metric(instance);
    diag.times.metric_s = seconds_since(t_stage);
    t_stage = Clock::now();

    StopPlan plan = params.node_compression
                        ? select_stops(instance, metric, params.virtual_walk_m)
                        : door_to_door_plan(instance);
    if (params.split_cap) plan = split_stops(plan, *params.split_cap);
    diag.stops = static_cast<int>(plan.stops.size());
    diag.times.stops_s = seconds_since(t_stage);
    t_stage = Clock::now();

    ShareabilityNetwork net =
        build_network(instance, metric, plan, default_pair_check(instance, metric));
    if (params.beta)
        net = prune_edges(net, metric, instance.school, *params.beta, instance.capacity);
    diag.times.network_s = seconds_since(t_stage);
    t_stage = Clock::now();

    EnumerateOptions eo;
    eo.gamma = params.gamma;
    eo.tsp = TspOptions{params.exact_tsp, params.exact_tsp_limit};
    eo.trip_cap = params.trip_cap;
    const TripList list = enumerate_trips(net, instance, metric, eo);
    diag.bus_trips = list.bus_trip_count;
    diag.times.trips_s = seconds_since(t_stage);
    t_stage = Clock::now();

    // Students become cover elements in id order.
    const std::vector<Student>& students = instance.students;
    std::map<StudentId, int> elem_of;
    for (std::size_t i = 0; i < students.size(); ++i)
        elem_of[students[i].id] = static_cast<int>(i);
    std::map<std::int32_t, std::vector<int>> node_elements;  // network node -> elements
    for (const auto& [student, stop] : plan.assignment)
        node_elements[stop].push_back(elem_of.at(student));

    CoverProblem problem;
    problem.num_elements = static_cast<int>(students.size());
    for (const Student& s : students)
        problem.element_names.push_back("student " + std::to_string(s.id));
    for (std::size_t i = 0; i < list.trips.size(); ++i) {
        const TripConfiguration& t = list.trips[i];
        CoverSet set;
        set.id = static_cast<int>(i);
        if (t.kind == TripKind::kBus) {
            for (std::int32_t node : t.node_set) {
                const auto& es = node_elements.at(node);
                set.elements.insert(set.elements.end(), es.begin(), es.end());
            }
            std::sort(set.elements.begin(), set.elements.end());
            set.weight = bus_trip_cost(t, instance);
        } else {
            set.elements = {elem_of.at(t.student)};
            set.weight = alt_trip_cost(t, instance);
        }
        problem.sets.push_back(std::move(set));
    }

    CoverSolution cover;
    if (params.solver == "internal") {
        cover = solve_cover(problem, params.time_limit_s, params.gap_limit);
    } else if (params.solver.rfind("external:", 0) == 0) {
        cover = solve_cover_external(problem, params.solver.substr(9));
    } else {
        throw ValidationError("unknown solver '" + params.solver +
                              "' (want internal or external:<command>)");
    }
    if (cover.status == CoverStatus::kInfeasible)
        throw InfeasibleError("assignment infeasible: " + cover.message);

    // Shrink callback for the partition repair: look the reduced stop set up
    // in the stored trips when the remaining students fill their stops, else
    // re-evaluate with actual loads (cheaper of the shortcut of the original
    // order and a fresh evaluation).
    struct ExtraTrip {
        TripConfiguration trip;
        std::vector<int> elements;
    };
    std::map<int, ExtraTrip> extra_trips;
    int next_set_id = static_cast<int>(list.trips.size());
    std::map<std::pair<int, std::vector<int>>, std::optional<std::pair<int, double>>> memo;

    const auto resolve_trip = [&](int id) -> const TripConfiguration& {
        if (id < static_cast<int>(list.trips.size())) return list.trips[id];
        return extra_trips.at(id).trip;
    };

    const ShrinkFn shrink = [&](int set_id,
                                const std::vector<int>& remaining)
        -> std::optional<std::pair<int, double>> {
        const auto memo_key = std::make_pair(set_id, remaining);
        if (auto it = memo.find(memo_key); it != memo.end()) return it->second;
        const TripConfiguration& orig = resolve_trip(set_id);
        if (orig.kind == TripKind::kAlternate) return memo[memo_key] = std::nullopt;

        std::map<std::int32_t, std::vector<int>> per_node;
        for (int e : remaining) {
            const StudentId sid = students[e].id;
            per_node[plan.assignment.at(sid)].push_back(e);
        }
        std::vector<std::int32_t> node_set;
        bool full_loads = true;
        for (const auto& [nid, es] : per_node) {
            node_set.push_back(nid);
            if (es.size() != node_elements.at(nid).size()) full_loads = false;
        }

        if (full_loads) {
            if (auto idx = list.bus_index(node_set)) {
                const auto result = std::make_pair(
                    static_cast<int>(*idx), bus_trip_cost(list.trips[*idx], instance));
                return memo[memo_key] = result;
            }
        }

        const auto stop_for = [&](std::int32_t nid) {
            const ShareNode& n = net.node(nid);
            const auto& es = per_node.at(nid);
            double extra_t = 0.0, extra_d = 0.0;
            for (int e : es) {
                auto it = plan.d2d_round_trip.find(students[e].id);
                if (it != plan.d2d_round_trip.end()) {
                    extra_t += it->second.time_s;
                    extra_d += it->second.dist_m;
                }
            }
            return RouteStop{nid, n.location,
                             instance.stop_delay.at_load(static_cast<int>(es.size())) + extra_t,
                             extra_d};
        };

        std::vector<RouteStop> shortcut;
        for (std::int32_t id : orig.route)
            if (per_node.count(id)) shortcut.push_back(stop_for(id));
        RoutePlan best = fixed_order_path(shortcut, metric, instance.school);

        std::vector<RouteStop> sorted_stops;
        for (std::int32_t nid : node_set) sorted_stops.push_back(stop_for(nid));
        RoutePlan fresh =
            (params.exact_tsp &&
             static_cast<int>(sorted_stops.size()) <= params.exact_tsp_limit)
                ? exact_path_tsp(sorted_stops, metric, instance.school, params.exact_tsp_limit)
                : chain_insertion_path(sorted_stops, metric, instance.school);
        const bool best_ok = best.time_s <= instance.t_max_s;
        const bool fresh_ok = fresh.time_s <= instance.t_max_s;
        if (fresh_ok && (!best_ok || fresh.dist_m < best.dist_m ||
                         (fresh.dist_m == best.dist_m && fresh.time_s < best.time_s)))
            best = fresh;
        else if (!best_ok)
            return memo[memo_key] = std::nullopt;

        TripConfiguration reduced;
        reduced.route = best.order;
        reduced.node_set = node_set;
        reduced.travel_time_s = best.time_s;
        reduced.distance_m = best.dist_m;
        reduced.students = static_cast<int>(remaining.size());
        const double weight = bus_trip_cost(reduced, instance);
        const int id = next_set_id++;
        extra_trips.emplace(id, ExtraTrip{std::move(reduced), remaining});
        return memo[memo_key] = std::make_pair(id, weight);
    };

    const PartitionRepair repair = repair_to_partition(problem, cover, shrink);
    diag.times.cover_s = seconds_since(t_stage);

    diag.solver_status = status_string(cover);
    diag.cover_objective = cover.objective;
    diag.lower_bound = cover.lower_bound;
    diag.gap = cover.gap;

    // Assemble the final assignment.
    std::map<int, std::vector<int>> members;  // chosen set id -> elements
    for (int e = 0; e < problem.num_elements; ++e)
        members[repair.element_set[e]].push_back(e);

    for (const auto& [set_id, elems] : members) {
        const TripConfiguration& trip = resolve_trip(set_id);
        if (trip.kind == TripKind::kAlternate) {
            sol.alt_assignments.emplace_back(students[elems[0]].id, trip.mode);
            continue;
        }
        BusRoute route;
        route.trip = trip;
        std::map<std::int32_t, std::vector<StudentId>> at_node;
        for (int e : elems) at_node[plan.assignment.at(students[e].id)].push_back(students[e].id);
        for (std::int32_t node : trip.route) {
            ManifestEntry entry;
            entry.stop = node;
            entry.location = net.node(node).location;
            entry.students = at_node.at(node);
            route.manifest.push_back(std::move(entry));
        }
        sol.bus_routes.push_back(std::move(route));
    }
    std::sort(sol.alt_assignments.begin(), sol.alt_assignments.end());

    sol.total_cost = repair.solution.objective;
    sol.bus_count = static_cast<int>(sol.bus_routes.size());
    sol.students_alt = static_cast<int>(sol.alt_assignments.size());
    if (instance.fleet_limit != Instance::kUnlimitedFleet &&
        sol.bus_count > instance.fleet_limit)
        throw InfeasibleError("solution needs " + std::to_string(sol.bus_count) +
                              " buses but the fleet limit is " +
                              std::to_string(instance.fleet_limit));

    diag.times.total_s = seconds_since(t_all);
    return sol;
}

Solution brute_force_oracle(const Instance& instance, const TspOptions& tsp) {
    validate(instance);
    const std::size_t n = instance.students.size();
    if (n > 10)
        throw Error("brute-force oracle is limited to 10 students (got " + std::to_string(n) +
                    ")");
    const auto t_all = Clock::now();
    const Metric metric = compute_metric(instance);
    const std::vector<Student>& students = instance.students;

    const auto stop_of = [&](std::size_t i) {
        return RouteStop{students[i].id, students[i].home, instance.stop_delay.at_load(1), 0.0};
    };

    const std::size_t full = (std::size_t{1} << n) - 1;
    std::vector<double> part_cost(full + 1, kInfinity);
    std::vector<RoutePlan> part_plan(full + 1);
    std::vector<int> part_alt_mode(full + 1, -1);  // >= 0: singleton alternate ride

    for (std::size_t mask = 1; mask <= full; ++mask) {
        const int size = std::popcount(mask);
        if (size <= instance.capacity) {
            std::vector<RouteStop> stops;
            for (std::size_t i = 0; i < n; ++i)
                if (mask & (std::size_t{1} << i)) stops.push_back(stop_of(i));
            RoutePlan plan =
                (tsp.exact && size <= tsp.exact_limit)
                    ? exact_path_tsp(stops, metric, instance.school, tsp.exact_limit)
                    : chain_insertion_path(stops, metric, instance.school);
            if (plan.time_s <= instance.t_max_s) {
                part_cost[mask] = instance.cost.bus_fixed +
                                  instance.cost.bus_per_mile * (plan.dist_m / instance.cost_unit_m);
                part_plan[mask] = std::move(plan);
            }
        }
        if (size == 1) {
            const std::size_t i = static_cast<std::size_t>(std::countr_zero(mask));
            for (std::size_t a = 0; a < instance.cost.alt_modes.size(); ++a) {
                const AlternateMode& mode = instance.cost.alt_modes[a];
                if (std::isinf(mode.per_mile)) continue;
                const double c = mode.per_mile *
                                 (metric.dist(students[i].home, instance.school) /
                                  instance.cost_unit_m);
                if (c < part_cost[mask]) {
                    part_cost[mask] = c;
                    part_alt_mode[mask] = static_cast<int>(a);
                }
            }
        }
    }

    // Optimal partition by subset DP over the uncovered students.
    std::vector<double> dp(full + 1, kInfinity);
    std::vector<std::size_t> choice(full + 1, 0);
    dp[0] = 0.0;
    for (std::size_t mask = 1; mask <= full; ++mask) {
        const std::size_t low = mask & (~mask + 1);
        for (std::size_t sub = mask; sub; sub = (sub - 1) & mask) {
            if (!(sub & low)) continue;
            if (part_cost[sub] == kInfinity) continue;
            const double c = part_cost[sub] + dp[mask ^ sub];
            if (c < dp[mask]) {
                dp[mask] = c;
                choice[mask] = sub;
            }
        }
    }
    if (dp[full] == kInfinity)
        throw InfeasibleError("no feasible assignment exists for this instance");

    Solution sol;
    sol.total_cost = dp[full];
    for (std::size_t mask = full; mask;) {
        const std::size_t sub = choice[mask];
        if (part_alt_mode[sub] >= 0) {
            const std::size_t i = static_cast<std::size_t>(std::countr_zero(sub));
            sol.alt_assignments.emplace_back(students[i].id,
                                             instance.cost.alt_modes[part_alt_mode[sub]].mode);
        } else {
            BusRoute route;
            route.trip.route = part_plan[sub].order;
            route.trip.travel_time_s = part_plan[sub].time_s;
            route.trip.distance_m = part_plan[sub].dist_m;
            route.trip.students = std::popcount(sub);
            for (std::size_t i = 0; i < n; ++i)
                if (sub & (std::size_t{1} << i)) route.trip.node_set.push_back(students[i].id);
            for (std::int32_t id : part_plan[sub].order) {
                const Student* st = instance.find_student(id);
                route.manifest.push_back(ManifestEntry{id, st->home, {id}});
            }
            sol.bus_routes.push_back(std::move(route));
        }
        mask ^= sub;
    }
    std::sort(sol.alt_assignments.begin(), sol.alt_assignments.end());
    std::sort(sol.bus_routes.begin(), sol.bus_routes.end(),
              [](const BusRoute& a, const BusRoute& b) {
                  return a.trip.node_set < b.trip.node_set;
              });
    sol.bus_count = static_cast<int>(sol.bus_routes.size());
    sol.students_alt = static_cast<int>(sol.alt_assignments.size());

    Diagnostics& diag = sol.diagnostics;
    diag.instance = instance.name;
    diag.students = static_cast<int>(n);
    diag.door_to_door = instance.door_to_door_count();
    diag.solver_status = "oracle";
    diag.cover_objective = sol.total_cost;
    diag.lower_bound = sol.total_cost;
    diag.times.total_s = seconds_since(t_all);
    return sol;
}

std::vector<SweepRow> sweep(const Instance& instance, SweepParam param,
                            const std::vector<double>& grid, SolveParams base) {
    std::vector<SweepRow> rows;
    for (double value : grid) {
        SolveParams p = base;
        if (param == SweepParam::kBeta) p.beta = value;
        else p.gamma = value;
        const auto t0 = Clock::now();
        const Solution s = solve(instance, p);
        SweepRow row;
        row.value = value;
        row.objective = s.total_cost;
        row.buses = s.bus_count;
        row.bus_trips = s.diagnostics.bus_trips;
        row.runtime_s = seconds_since(t0);
        rows.push_back(row);
    }
    return rows;
}

std::string sweep_to_text(const std::vector<SweepRow>& rows, SweepParam param) {
    std::ostringstream out;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-8s %14s %7s %12s %10s\n",
                  param == SweepParam::kBeta ? "beta" : "gamma", "objective", "buses",
                  "bus_trips", "time_s");
    out << buf;
    for (const SweepRow& r : rows) {
        std::snprintf(buf, sizeof buf, "%-8.3g %14.2f %7d %12zu %10.2f\n", r.value, r.objective,
                      r.buses, r.bus_trips, r.runtime_s);
        out << buf;
    }
    return out.str();
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows, SweepParam param) {
    std::ostringstream out;
    out << (param == SweepParam::kBeta ? "beta" : "gamma")
        << ",objective,buses,bus_trips,runtime_s\n";
    char buf[160];
    for (const SweepRow& r : rows) {
        std::snprintf(buf, sizeof buf, "%.10g,%.10g,%d,%zu,%.3f\n", r.value, r.objective, r.buses,
                      r.bus_trips, r.runtime_s);
        out << buf;
    }
    return out.str();
}

}  // namespace sbrp
