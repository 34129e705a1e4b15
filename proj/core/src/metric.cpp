#include "sbrp/metric.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>

#include "sbrp/errors.hpp"

namespace sbrp {

Metric::Metric(MetricKind kind, std::vector<NodeId> nodes,
               std::vector<double> dist, std::vector<double> time)
    : kind_(kind), n_(nodes.size()), nodes_(std::move(nodes)),
      dist_(std::move(dist)), time_(std::move(time)) {
    index_.reserve(n_);
    for (std::size_t i = 0; i < n_; ++i) index_.emplace(nodes_[i], i);
}

std::size_t Metric::idx(NodeId id) const {
    auto it = index_.find(id);
    if (it == index_.end())
        throw ValidationError("node " + std::to_string(id) + " is outside the metric's node set");
    return it->second;
}

namespace {

std::vector<NodeId> restricted_nodes(const Instance& ins) {
    std::set<NodeId> set;
    for (const Student& s : ins.students) set.insert(s.home);
    for (NodeId m : ins.candidate_stops) set.insert(m);
    set.insert(ins.depot);
    set.insert(ins.school);
    return {set.begin(), set.end()};
}

Metric euclidean_metric(const Instance& ins, const std::vector<NodeId>& nodes) {
    const std::size_t n = nodes.size();
    std::vector<double> dist(n * n, 0.0), time(n * n, 0.0);
    std::vector<const RoadNode*> pts(n);
    for (std::size_t i = 0; i < n; ++i) pts[i] = &ins.network.at(nodes[i]);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = pts[i]->x - pts[j]->x;
            const double dy = pts[i]->y - pts[j]->y;
            const double d = std::sqrt(dx * dx + dy * dy);
            dist[i * n + j] = dist[j * n + i] = d;
            time[i * n + j] = time[j * n + i] = d / ins.speed_m_s;
        }
    }
    return Metric(MetricKind::kEuclidean, nodes, std::move(dist), std::move(time));
}

struct AdjArc {
    std::size_t to;
    double time;
    double dist;
};

// Dijkstra by time from one source; dist carried along the time-optimal
// path, ties resolved toward (smaller dist, smaller node id).
void shortest_from(std::size_t src, const std::vector<std::vector<AdjArc>>& adj,
                   std::vector<double>& time_out, std::vector<double>& dist_out) {
    const std::size_t n = adj.size();
    time_out.assign(n, kInfinity);
    dist_out.assign(n, kInfinity);
    using Item = std::pair<double, std::size_t>;  // (time, node)
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    time_out[src] = 0.0;
    dist_out[src] = 0.0;
    pq.emplace(0.0, src);
    while (!pq.empty()) {
        auto [t, u] = pq.top();
        pq.pop();
        if (t > time_out[u]) continue;
        for (const AdjArc& arc : adj[u]) {
            const double nt = t + arc.time;
            const double nd = dist_out[u] + arc.dist;
            if (nt < time_out[arc.to] ||
                (nt == time_out[arc.to] && nd < dist_out[arc.to])) {
                time_out[arc.to] = nt;
                dist_out[arc.to] = nd;
                pq.emplace(nt, arc.to);
            }
        }
    }
}

Metric road_metric(const Instance& ins, const std::vector<NodeId>& nodes) {
    const RoadNetwork& net = ins.network;
    const std::size_t v = net.nodes.size();
    std::unordered_map<NodeId, std::size_t> full_index;
    full_index.reserve(v);
    for (std::size_t i = 0; i < v; ++i) full_index.emplace(net.nodes[i].id, i);

    std::vector<std::vector<AdjArc>> adj(v);
    for (const RoadEdge& e : net.edges)
        adj[full_index.at(e.from)].push_back({full_index.at(e.to), e.time_s, e.length_m});
    for (auto& arcs : adj)
        std::sort(arcs.begin(), arcs.end(),
                  [](const AdjArc& a, const AdjArc& b) { return a.to < b.to; });

    const std::size_t n = nodes.size();
    std::vector<double> dist(n * n, kInfinity), time(n * n, kInfinity);
    std::vector<double> t_buf, d_buf;
    for (std::size_t i = 0; i < n; ++i) {
        shortest_from(full_index.at(nodes[i]), adj, t_buf, d_buf);
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t tgt = full_index.at(nodes[j]);
            time[i * n + j] = t_buf[tgt];
            dist[i * n + j] = d_buf[tgt];
        }
    }
    return Metric(MetricKind::kShortestPath, nodes, std::move(dist), std::move(time));
}

}  // namespace

Metric compute_metric(const Instance& instance) {
    const std::vector<NodeId> nodes = restricted_nodes(instance);
    Metric m = instance.network.euclidean() ? euclidean_metric(instance, nodes)
                                            : road_metric(instance, nodes);
    // Every pickup-relevant node must reach the school and the depot.
    std::set<NodeId> relevant;
    for (const Student& s : instance.students) relevant.insert(s.home);
    for (NodeId stop : instance.candidate_stops) relevant.insert(stop);
    for (NodeId id : relevant) {
        if (std::isinf(m.time(id, instance.school)))
            throw InfeasibleError("node " + std::to_string(id) + " cannot reach the school");
        if (std::isinf(m.time(id, instance.depot)))
            throw InfeasibleError("node " + std::to_string(id) + " cannot reach the depot");
    }
    return m;
}

}  // namespace sbrp
