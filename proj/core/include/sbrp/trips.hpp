#ifndef SBRP_TRIPS_HPP
#define SBRP_TRIPS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "sbrp/instance.hpp"
#include "sbrp/metric.hpp"
#include "sbrp/shareability.hpp"

namespace sbrp {

// A stop to route through: its location plus the fixed cost of serving it
// (stop delay at its load plus any door-to-door round trips).
struct RouteStop {
    std::int32_t id = -1;
    NodeId location = -1;
    double service_time_s = 0.0;
    double service_dist_m = 0.0;
};

// An evaluated pickup order; the school is the implicit terminal.
struct RoutePlan {
    std::vector<std::int32_t> order;  // RouteStop ids in visit order
    double time_s = 0.0;
    double dist_m = 0.0;
};

// Time/distance of a fixed pickup order, including service costs and the
// final leg to the school.
RoutePlan fixed_order_path(const std::vector<RouteStop>& route, const Metric& metric,
                           NodeId school);

// Best single-position insertion of `added` into `route`, holding the
// existing order fixed. The three insertion deltas (prepend, interior,
// append before the school leg) are each O(1); the whole call is linear.
// An empty route yields the direct stop→school trip.
RoutePlan insertion_path_tsp(const std::vector<RouteStop>& route, double route_time_s,
                             double route_dist_m, const RouteStop& added, const Metric& metric,
                             NodeId school);

// Inserts the stops one at a time in the given order; the incremental
// counterpart of evaluating a set from scratch.
RoutePlan chain_insertion_path(const std::vector<RouteStop>& stops, const Metric& metric,
                               NodeId school);

// Optimal open path over the stops ending at the school, by subset dynamic
// programming over the visit order. Throws Error for more than `limit`
// stops, pointing the caller at the insertion heuristic.
RoutePlan exact_path_tsp(const std::vector<RouteStop>& stops, const Metric& metric,
                         NodeId school, int limit = 12);

// True iff `candidate` is adjacent to every member of `trip` (vacuously
// true for an empty trip).
bool clique_check(const std::vector<std::int32_t>& trip, std::int32_t candidate,
                  const ShareabilityNetwork& network);

// Relaxed membership test: rejects only when the number of trip members
// not adjacent to `candidate` exceeds gamma · |trip|. gamma = 0 matches
// clique_check exactly.
bool quasi_clique_check(const std::vector<std::int32_t>& trip, std::int32_t candidate,
                        const ShareabilityNetwork& network, double gamma);

enum class TripKind { kBus, kAlternate };

struct TripConfiguration {
    std::vector<std::int32_t> route;     // bus: node ids in pickup order
    std::vector<std::int32_t> node_set;  // bus: sorted node ids; alternate: {student id}
    double travel_time_s = 0.0;          // includes service costs
    double distance_m = 0.0;
    int students = 0;
    TripKind kind = TripKind::kBus;
    std::string mode;                    // alternate only
    StudentId student = -1;              // alternate only

    bool operator==(const TripConfiguration&) const = default;
};

// All feasible trips: bus trips in level order (size 1 first), then one
// alternate-mode trip per student and enabled mode.
class TripList {
public:
    std::vector<TripConfiguration> trips;
    std::vector<std::size_t> level_begin;  // trips index where each size-k level starts
    std::size_t bus_trip_count = 0;

    std::optional<std::size_t> bus_index(const std::vector<std::int32_t>& sorted_set) const;
    const std::vector<std::size_t>& trips_containing(std::int32_t node) const;

    // Registers a bus trip; on a duplicate node_set keeps the lower-time
    // route. Returns the trip's index.
    std::size_t add_bus(TripConfiguration trip);
    void add_alternate(TripConfiguration trip);

private:
    std::unordered_map<std::string, std::size_t> set_index_;
    std::unordered_map<std::int32_t, std::vector<std::size_t>> by_node_;
    static std::string key_of(const std::vector<std::int32_t>& sorted_set);
};

struct TspOptions {
    bool exact = false;   // subset DP for small trips instead of insertion
    int exact_limit = 12;
};

struct EnumerateOptions {
    std::optional<double> gamma;  // quasi-clique growth when set
    TspOptions tsp;
    std::size_t trip_cap = 5'000'000;
};

// Builds the RouteStop for a network node under the instance's delay model.
RouteStop route_stop_for(const ShareNode& node, const StopDelay& delay);

// Level-wise growth of the feasible bus-trip list over the shareability
// network, followed by the alternate-mode singletons. Deterministic;
// duplicate node sets keep the lowest-time route. Throws Error when the
// bus-trip count exceeds opts.trip_cap (use a smaller beta/gamma).
TripList enumerate_trips(const ShareabilityNetwork& network, const Instance& instance,
                         const Metric& metric, const EnumerateOptions& opts = {});

// Sorted text form (one line per trip) for diffing.
std::string dump_trips(const TripList& trips);

}  // namespace sbrp

#endif
