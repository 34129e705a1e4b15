#include "sbrp/trips.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <sstream>

#include "sbrp/errors.hpp"

namespace sbrp {

RoutePlan fixed_order_path(const std::vector<RouteStop>& route, const Metric& metric,
                           NodeId school) {
    RoutePlan plan;
    for (std::size_t i = 0; i < route.size(); ++i) {
        plan.order.push_back(route[i].id);
        plan.time_s += route[i].service_time_s;
        plan.dist_m += route[i].service_dist_m;
        if (i + 1 < route.size()) {
            plan.time_s += metric.time(route[i].location, route[i + 1].location);
            plan.dist_m += metric.dist(route[i].location, route[i + 1].location);
        }
    }
    if (!route.empty()) {
        plan.time_s += metric.time(route.back().location, school);
        plan.dist_m += metric.dist(route.back().location, school);
    }
    return plan;
}

RoutePlan insertion_path_tsp(const std::vector<RouteStop>& route, double route_time_s,
                             double route_dist_m, const RouteStop& added, const Metric& metric,
                             NodeId school) {
    RoutePlan plan;
    if (route.empty()) {
        plan.order = {added.id};
        plan.time_s = metric.time(added.location, school) + added.service_time_s;
        plan.dist_m = metric.dist(added.location, school) + added.service_dist_m;
        return plan;
    }

    const std::size_t n = route.size();
    std::size_t best_pos = 0;
    double best_dt = kInfinity, best_dd = kInfinity;
    for (std::size_t p = 0; p <= n; ++p) {
        double dt, dd;
        if (p == 0) {
            dt = metric.time(added.location, route.front().location);
            dd = metric.dist(added.location, route.front().location);
        } else if (p == n) {
            dt = metric.time(route.back().location, added.location) +
                 metric.time(added.location, school) -
                 metric.time(route.back().location, school);
            dd = metric.dist(route.back().location, added.location) +
                 metric.dist(added.location, school) -
                 metric.dist(route.back().location, school);
        } else {
            dt = metric.time(route[p - 1].location, added.location) +
                 metric.time(added.location, route[p].location) -
                 metric.time(route[p - 1].location, route[p].location);
            dd = metric.dist(route[p - 1].location, added.location) +
                 metric.dist(added.location, route[p].location) -
                 metric.dist(route[p - 1].location, route[p].location);
        }
        if (dt < best_dt) {
            best_dt = dt;
            best_dd = dd;
            best_pos = p;
        }
    }

    plan.order.reserve(n + 1);
    for (std::size_t i = 0; i < best_pos; ++i) plan.order.push_back(route[i].id);
    plan.order.push_back(added.id);
    for (std::size_t i = best_pos; i < n; ++i) plan.order.push_back(route[i].id);
    plan.time_s = route_time_s + best_dt + added.service_time_s;
    plan.dist_m = route_dist_m + best_dd + added.service_dist_m;
    return plan;
}

RoutePlan chain_insertion_path(const std::vector<RouteStop>& stops, const Metric& metric,
                               NodeId school) {
    RoutePlan plan;
    std::vector<RouteStop> route;
    std::unordered_map<std::int32_t, const RouteStop*> by_id;
    for (const RouteStop& s : stops) by_id[s.id] = &s;
    for (const RouteStop& s : stops) {
        plan = insertion_path_tsp(route, plan.time_s, plan.dist_m, s, metric, school);
        route.clear();
        for (std::int32_t id : plan.order) route.push_back(*by_id.at(id));
    }
    return plan;
}

RoutePlan exact_path_tsp(const std::vector<RouteStop>& stops, const Metric& metric,
                         NodeId school, int limit) {
    const std::size_t n = stops.size();
    if (n == 0) return {};
    if (static_cast<int>(n) > limit || n > 20)
        throw Error("exact path evaluation capped at " +
                    std::to_string(std::min<std::size_t>(limit, 20)) +
                    " stops; use the insertion heuristic for larger trips");

    const std::size_t full = (std::size_t{1} << n) - 1;
    const double inf = kInfinity;
    std::vector<double> dp((full + 1) * n, inf);
    std::vector<std::int8_t> parent((full + 1) * n, -1);

    for (std::size_t i = 0; i < n; ++i)
        dp[(std::size_t{1} << i) * n + i] = stops[i].service_time_s;

    for (std::size_t mask = 1; mask <= full; ++mask) {
        for (std::size_t last = 0; last < n; ++last) {
            if (!(mask & (std::size_t{1} << last))) continue;
            const double t = dp[mask * n + last];
            if (t == inf) continue;
            for (std::size_t next = 0; next < n; ++next) {
                if (mask & (std::size_t{1} << next)) continue;
                const std::size_t nmask = mask | (std::size_t{1} << next);
                const double nt = t + metric.time(stops[last].location, stops[next].location) +
                                  stops[next].service_time_s;
                if (nt < dp[nmask * n + next]) {
                    dp[nmask * n + next] = nt;
                    parent[nmask * n + next] = static_cast<std::int8_t>(last);
                }
            }
        }
    }

    std::size_t best_last = 0;
    double best = inf;
    for (std::size_t last = 0; last < n; ++last) {
        const double t = dp[full * n + last] + metric.time(stops[last].location, school);
        if (t < best) {
            best = t;
            best_last = last;
        }
    }

    std::vector<std::size_t> order_idx;
    std::size_t mask = full, last = best_last;
    while (true) {
        order_idx.push_back(last);
        const std::int8_t p = parent[mask * n + last];
        mask ^= std::size_t{1} << last;
        if (p < 0) break;
        last = static_cast<std::size_t>(p);
    }
    std::reverse(order_idx.begin(), order_idx.end());

    std::vector<RouteStop> ordered;
    for (std::size_t i : order_idx) ordered.push_back(stops[i]);
    return fixed_order_path(ordered, metric, school);
}

bool clique_check(const std::vector<std::int32_t>& trip, std::int32_t candidate,
                  const ShareabilityNetwork& network) {
    for (std::int32_t member : trip)
        if (!network.adjacent(candidate, member)) return false;
    return true;
}

bool quasi_clique_check(const std::vector<std::int32_t>& trip, std::int32_t candidate,
                        const ShareabilityNetwork& network, double gamma) {
    int missing = 0;
    for (std::int32_t member : trip)
        if (!network.adjacent(candidate, member)) ++missing;
    return !(missing > gamma * static_cast<double>(trip.size()));
}

std::string TripList::key_of(const std::vector<std::int32_t>& sorted_set) {
    std::string key(sorted_set.size() * sizeof(std::int32_t), '\0');
    std::memcpy(key.data(), sorted_set.data(), key.size());
    return key;
}

std::optional<std::size_t> TripList::bus_index(const std::vector<std::int32_t>& sorted_set) const {
    auto it = set_index_.find(key_of(sorted_set));
    if (it == set_index_.end()) return std::nullopt;
    return it->second;
}

const std::vector<std::size_t>& TripList::trips_containing(std::int32_t node) const {
    static const std::vector<std::size_t> empty;
    auto it = by_node_.find(node);
    return it == by_node_.end() ? empty : it->second;
}

std::size_t TripList::add_bus(TripConfiguration trip) {
    const std::string key = key_of(trip.node_set);
    auto it = set_index_.find(key);
    if (it != set_index_.end()) {
        TripConfiguration& existing = trips[it->second];
        if (trip.travel_time_s < existing.travel_time_s) {
            existing.route = trip.route;
            existing.travel_time_s = trip.travel_time_s;
            existing.distance_m = trip.distance_m;
        }
        return it->second;
    }
    const std::size_t idx = trips.size();
    for (std::int32_t node : trip.node_set) by_node_[node].push_back(idx);
    set_index_.emplace(key, idx);
    trips.push_back(std::move(trip));
    ++bus_trip_count;
    return idx;
}

void TripList::add_alternate(TripConfiguration trip) { trips.push_back(std::move(trip)); }

RouteStop route_stop_for(const ShareNode& node, const StopDelay& delay) {
    return RouteStop{node.id, node.location, delay.at_load(node.weight) + node.extra_time_s,
                     node.extra_dist_m};
}

namespace {

// Subsets of `set` in ascending lexicographic order of their sorted id
// sequences are produced by dropping elements from the largest id down.
bool is_canonical_parent(const std::vector<std::int32_t>& parent,
                         const std::vector<std::int32_t>& child_set, const TripList& list) {
    for (std::size_t drop = child_set.size(); drop-- > 0;) {
        std::vector<std::int32_t> subset;
        subset.reserve(child_set.size() - 1);
        for (std::size_t i = 0; i < child_set.size(); ++i)
            if (i != drop) subset.push_back(child_set[i]);
        if (list.bus_index(subset)) return subset == parent;
    }
    return false;
}

}  // namespace

TripList enumerate_trips(const ShareabilityNetwork& network, const Instance& instance,
                         const Metric& metric, const EnumerateOptions& opts) {
    if (opts.gamma && (*opts.gamma < 0.0 || *opts.gamma >= 1.0))
        throw ValidationError("gamma must lie in [0, 1)");

    TripList list;
    const StopDelay delay = instance.stop_delay;
    const double t_max = instance.t_max_s;
    const int capacity = instance.capacity;

    const auto stop_of = [&](std::int32_t id) {
        return route_stop_for(network.node(id), delay);
    };
    const auto check_cap = [&] {
        if (list.bus_trip_count > opts.trip_cap)
            throw Error("bus trip count exceeded the cap of " + std::to_string(opts.trip_cap) +
                        "; use a smaller beta or gamma, or raise the cap");
    };
    const auto evaluate_extension = [&](const TripConfiguration& parent, std::int32_t cand,
                                        const std::vector<std::int32_t>& child_set) {
        if (opts.tsp.exact && static_cast<int>(child_set.size()) <= opts.tsp.exact_limit) {
            std::vector<RouteStop> stops;
            stops.reserve(child_set.size());
            for (std::int32_t id : child_set) stops.push_back(stop_of(id));
            return exact_path_tsp(stops, metric, instance.school, opts.tsp.exact_limit);
        }
        std::vector<RouteStop> route;
        route.reserve(parent.route.size());
        for (std::int32_t id : parent.route) route.push_back(stop_of(id));
        return insertion_path_tsp(route, parent.travel_time_s, parent.distance_m, stop_of(cand),
                                  metric, instance.school);
    };

    // Level 1: every node whose own trip fits.
    list.level_begin.push_back(0);
    for (const ShareNode& n : network.nodes()) {
        if (n.weight > capacity) continue;
        const RouteStop stop = stop_of(n.id);
        RoutePlan plan = insertion_path_tsp({}, 0.0, 0.0, stop, metric, instance.school);
        if (plan.time_s > t_max) continue;
        TripConfiguration trip;
        trip.route = plan.order;
        trip.node_set = {n.id};
        trip.travel_time_s = plan.time_s;
        trip.distance_m = plan.dist_m;
        trip.students = n.weight;
        list.add_bus(std::move(trip));
        check_cap();
    }

    // Level k from level k-1.
    while (true) {
        const std::size_t lo = list.level_begin.back();
        const std::size_t hi = list.bus_trip_count;
        if (lo == hi) break;
        list.level_begin.push_back(hi);
        for (std::size_t t = lo; t < hi; ++t) {
            // trips vector may reallocate while extending; copy the parent
            const TripConfiguration parent = list.trips[t];
            if (!opts.gamma) {
                // Each set grows only from its maximal element; visiting
                // candidates above it yields every set exactly once.
                const std::int32_t max_id = parent.node_set.back();
                for (std::int32_t cand : network.neighbors(max_id)) {
                    if (cand <= max_id) continue;
                    if (!clique_check(parent.node_set, cand, network)) continue;
                    const int students = parent.students + network.node(cand).weight;
                    if (students > capacity) continue;
                    std::vector<std::int32_t> child_set = parent.node_set;
                    child_set.push_back(cand);
                    RoutePlan plan = evaluate_extension(parent, cand, child_set);
                    if (plan.time_s > t_max) continue;
                    TripConfiguration trip;
                    trip.route = plan.order;
                    trip.node_set = std::move(child_set);
                    trip.travel_time_s = plan.time_s;
                    trip.distance_m = plan.dist_m;
                    trip.students = students;
                    list.add_bus(std::move(trip));
                    check_cap();
                }
            } else {
                for (const ShareNode& n : network.nodes()) {
                    const std::int32_t cand = n.id;
                    if (std::binary_search(parent.node_set.begin(), parent.node_set.end(), cand))
                        continue;
                    if (!quasi_clique_check(parent.node_set, cand, network, *opts.gamma))
                        continue;
                    std::vector<std::int32_t> child_set = parent.node_set;
                    child_set.insert(
                        std::upper_bound(child_set.begin(), child_set.end(), cand), cand);
                    if (!is_canonical_parent(parent.node_set, child_set, list)) continue;
                    const int students = parent.students + n.weight;
                    if (students > capacity) continue;
                    RoutePlan plan = evaluate_extension(parent, cand, child_set);
                    if (plan.time_s > t_max) continue;
                    TripConfiguration trip;
                    trip.route = plan.order;
                    trip.node_set = std::move(child_set);
                    trip.travel_time_s = plan.time_s;
                    trip.distance_m = plan.dist_m;
                    trip.students = students;
                    list.add_bus(std::move(trip));
                    check_cap();
                }
            }
        }
    }
    if (list.level_begin.back() == list.bus_trip_count && !list.level_begin.empty())
        list.level_begin.pop_back();

    // Alternate-mode singletons, one per student and enabled mode.
    for (const Student& s : instance.students) {
        for (const AlternateMode& mode : instance.cost.alt_modes) {
            if (std::isinf(mode.per_mile)) continue;
            TripConfiguration trip;
            trip.kind = TripKind::kAlternate;
            trip.mode = mode.mode;
            trip.student = s.id;
            trip.node_set = {s.id};
            trip.travel_time_s = metric.time(s.home, instance.school);
            trip.distance_m = metric.dist(s.home, instance.school);
            trip.students = 1;
            list.add_alternate(std::move(trip));
        }
    }
    return list;
}

std::string dump_trips(const TripList& list) {
    std::vector<const TripConfiguration*> bus, alt;
    for (const TripConfiguration& t : list.trips)
        (t.kind == TripKind::kBus ? bus : alt).push_back(&t);
    std::sort(bus.begin(), bus.end(), [](const TripConfiguration* a, const TripConfiguration* b) {
        return a->node_set < b->node_set;
    });
    std::sort(alt.begin(), alt.end(), [](const TripConfiguration* a, const TripConfiguration* b) {
        if (a->mode != b->mode) return a->mode < b->mode;
        return a->student < b->student;
    });
    std::ostringstream out;
    char buf[64];
    for (const TripConfiguration* t : bus) {
        out << "bus ";
        for (std::size_t i = 0; i < t->node_set.size(); ++i)
            out << (i ? "," : "") << t->node_set[i];
        std::snprintf(buf, sizeof buf, " %.6f %.6f\n", t->travel_time_s, t->distance_m);
        out << buf;
    }
    for (const TripConfiguration* t : alt) {
        out << "alt " << t->mode << " " << t->student;
        std::snprintf(buf, sizeof buf, " %.6f %.6f\n", t->travel_time_s, t->distance_m);
        out << buf;
    }
    return out.str();
}

}  // namespace sbrp
