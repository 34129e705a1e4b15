#ifndef SBRP_SHAREABILITY_HPP
#define SBRP_SHAREABILITY_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sbrp/instance.hpp"
#include "sbrp/metric.hpp"
#include "sbrp/stop_selection.hpp"

namespace sbrp {

// Node of the shareability network: a selected stop, or a student when the
// network is built without node compression.
struct ShareNode {
    std::int32_t id = -1;
    NodeId location = -1;       // metric node
    int weight = 0;             // students aggregated here
    double extra_time_s = 0.0;  // door-to-door round trips attached here
    double extra_dist_m = 0.0;

    bool operator==(const ShareNode&) const = default;
};

// Undirected graph whose edges mark pairs that can share one bus.
class ShareabilityNetwork {
public:
    ShareabilityNetwork() = default;
    ShareabilityNetwork(std::vector<ShareNode> nodes,
                        std::vector<std::pair<std::int32_t, std::int32_t>> edges);

    const std::vector<ShareNode>& nodes() const { return nodes_; }
    const std::vector<std::pair<std::int32_t, std::int32_t>>& edges() const { return edges_; }
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edges_.size(); }

    const ShareNode& node(std::int32_t id) const;
    bool adjacent(std::int32_t a, std::int32_t b) const;
    const std::vector<std::int32_t>& neighbors(std::int32_t id) const;  // ascending ids

private:
    std::vector<ShareNode> nodes_;                              // sorted by id
    std::vector<std::pair<std::int32_t, std::int32_t>> edges_;  // a < b, sorted
    std::unordered_map<std::int32_t, std::size_t> index_;
    std::vector<std::vector<std::int32_t>> adj_;
};

// Detour-weighted travel time t̄(i,j) = δ(i,j) · t(i,j) with
// δ(i,j) = (t(i,j) + t(j,school)) / t(i,school). Not symmetric. Returns 0
// when i == j and +inf when i sits at the school (such nodes rank every
// neighbor last and never prune others ahead of them).
double adjusted_travel_time(NodeId i, NodeId j, const Metric& metric, NodeId school);

// Decides whether two nodes can ride one bus together.
using PairFeasibility = std::function<bool(const ShareNode&, const ShareNode&)>;

// Default check: best two-stop route time (including stop delays and
// door-to-door penalties) within t_max and combined students within C.
PairFeasibility default_pair_check(const Instance& instance, const Metric& metric);

// One node per planned stop (weight = load, door-to-door penalties
// attached); an edge wherever trip_check accepts the pair.
ShareabilityNetwork build_network(const Instance& instance, const Metric& metric,
                                  const StopPlan& plan, const PairFeasibility& trip_check);

// Keeps, per node, the ascending-t̄ neighbor prefix whose student count fits
// the beta·C budget; an edge survives if either endpoint keeps it.
ShareabilityNetwork prune_edges(const ShareabilityNetwork& network, const Metric& metric,
                                NodeId school, double beta, int capacity);

std::string network_to_edge_list(const ShareabilityNetwork& network);
std::string network_to_graphml(const ShareabilityNetwork& network);

}  // namespace sbrp

#endif
