#include "sbrp/shareability.hpp"

#include <algorithm>
#include <sstream>

#include "sbrp/errors.hpp"

namespace sbrp {

ShareabilityNetwork::ShareabilityNetwork(
    std::vector<ShareNode> nodes, std::vector<std::pair<std::int32_t, std::int32_t>> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
    std::sort(nodes_.begin(), nodes_.end(),
              [](const ShareNode& a, const ShareNode& b) { return a.id < b.id; });
    index_.reserve(nodes_.size());
    adj_.resize(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (!index_.emplace(nodes_[i].id, i).second)
            throw ValidationError("duplicate shareability node id " +
                                  std::to_string(nodes_[i].id));
    }
    for (auto& [a, b] : edges_) {
        if (a == b) throw ValidationError("self-loop on node " + std::to_string(a));
        if (a > b) std::swap(a, b);
        if (!index_.count(a) || !index_.count(b))
            throw ValidationError("edge (" + std::to_string(a) + "," + std::to_string(b) +
                                  ") references unknown node");
    }
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
    for (const auto& [a, b] : edges_) {
        adj_[index_.at(a)].push_back(b);
        adj_[index_.at(b)].push_back(a);
    }
    for (auto& nb : adj_) std::sort(nb.begin(), nb.end());
}

const ShareNode& ShareabilityNetwork::node(std::int32_t id) const {
    auto it = index_.find(id);
    if (it == index_.end())
        throw ValidationError("unknown shareability node " + std::to_string(id));
    return nodes_[it->second];
}

bool ShareabilityNetwork::adjacent(std::int32_t a, std::int32_t b) const {
    if (a == b) return false;
    const auto& nb = neighbors(a);
    return std::binary_search(nb.begin(), nb.end(), b);
}

const std::vector<std::int32_t>& ShareabilityNetwork::neighbors(std::int32_t id) const {
    auto it = index_.find(id);
    if (it == index_.end())
        throw ValidationError("unknown shareability node " + std::to_string(id));
    return adj_[it->second];
}

double adjusted_travel_time(NodeId i, NodeId j, const Metric& metric, NodeId school) {
    if (i == j) return 0.0;
    const double t_i_school = metric.time(i, school);
    if (t_i_school == 0.0) return kInfinity;
    const double t_ij = metric.time(i, j);
    const double detour = (t_ij + metric.time(j, school)) / t_i_school;
    return detour * t_ij;
}

PairFeasibility default_pair_check(const Instance& instance, const Metric& metric) {
    const NodeId school = instance.school;
    const double t_max = instance.t_max_s;
    const int capacity = instance.capacity;
    const StopDelay delay = instance.stop_delay;
    return [school, t_max, capacity, delay, &metric](const ShareNode& a, const ShareNode& b) {
        if (a.weight + b.weight > capacity) return false;
        const double service = delay.at_load(a.weight) + a.extra_time_s +
                               delay.at_load(b.weight) + b.extra_time_s;
        const double ab = metric.time(a.location, b.location) + metric.time(b.location, school);
        const double ba = metric.time(b.location, a.location) + metric.time(a.location, school);
        return std::min(ab, ba) + service <= t_max;
    };
}

ShareabilityNetwork build_network(const Instance& instance, const Metric& metric,
                                  const StopPlan& plan, const PairFeasibility& trip_check) {
    (void)metric;
    std::vector<ShareNode> nodes;
    nodes.reserve(plan.stops.size());
    for (const PlannedStop& s : plan.stops) {
        if (s.load < 1)
            throw ValidationError("planned stop " + std::to_string(s.id) + " has no students");
        nodes.push_back(ShareNode{s.id, s.location, s.load, s.extra_time_s, s.extra_dist_m});
    }
    std::sort(nodes.begin(), nodes.end(),
              [](const ShareNode& a, const ShareNode& b) { return a.id < b.id; });
    std::vector<std::pair<std::int32_t, std::int32_t>> edges;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        for (std::size_t j = i + 1; j < nodes.size(); ++j)
            if (trip_check(nodes[i], nodes[j])) edges.emplace_back(nodes[i].id, nodes[j].id);
    return ShareabilityNetwork(std::move(nodes), std::move(edges));
}

ShareabilityNetwork prune_edges(const ShareabilityNetwork& network, const Metric& metric,
                                NodeId school, double beta, int capacity) {
    if (!(beta > 1.0)) throw ValidationError("beta must be > 1");
    const double budget = beta * capacity;

    std::vector<std::pair<std::int32_t, std::int32_t>> kept;
    for (const ShareNode& n : network.nodes()) {
        std::vector<std::int32_t> nb = network.neighbors(n.id);
        std::stable_sort(nb.begin(), nb.end(), [&](std::int32_t a, std::int32_t b) {
            const double ta = adjusted_travel_time(n.location, network.node(a).location,
                                                   metric, school);
            const double tb = adjusted_travel_time(n.location, network.node(b).location,
                                                   metric, school);
            if (ta != tb) return ta < tb;
            return a < b;
        });
        double students = 0.0;
        for (std::int32_t other : nb) {
            students += network.node(other).weight;
            if (students > budget) break;
            kept.emplace_back(std::min(n.id, other), std::max(n.id, other));
        }
    }
    std::sort(kept.begin(), kept.end());
    kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
    std::vector<ShareNode> nodes = network.nodes();
    return ShareabilityNetwork(std::move(nodes), std::move(kept));
}

std::string network_to_edge_list(const ShareabilityNetwork& network) {
    std::ostringstream out;
    out << "# nodes " << network.node_count() << " edges " << network.edge_count() << "\n";
    out << "# node id weight extra_time_s extra_dist_m\n";
    for (const ShareNode& n : network.nodes()) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "node %d %d %.6f %.6f\n", n.id, n.weight, n.extra_time_s,
                      n.extra_dist_m);
        out << buf;
    }
    for (const auto& [a, b] : network.edges()) out << "edge " << a << " " << b << "\n";
    return out.str();
}

std::string network_to_graphml(const ShareabilityNetwork& network) {
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
        << "  <key id=\"w\" for=\"node\" attr.name=\"students\" attr.type=\"int\"/>\n"
        << "  <graph id=\"shareability\" edgedefault=\"undirected\">\n";
    for (const ShareNode& n : network.nodes())
        out << "    <node id=\"n" << n.id << "\"><data key=\"w\">" << n.weight
            << "</data></node>\n";
    std::size_t e = 0;
    for (const auto& [a, b] : network.edges())
        out << "    <edge id=\"e" << e++ << "\" source=\"n" << a << "\" target=\"n" << b
            << "\"/>\n";
    out << "  </graph>\n</graphml>\n";
    return out.str();
}

}  // namespace sbrp
