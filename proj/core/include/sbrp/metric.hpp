#ifndef SBRP_METRIC_HPP
#define SBRP_METRIC_HPP

#include <unordered_map>
#include <vector>

#include "sbrp/instance.hpp"

namespace sbrp {

enum class MetricKind { kShortestPath, kEuclidean };

// Pairwise distance/time table over the restricted node set
// N = homes ∪ candidate stops ∪ {depot, school}.
class Metric {
public:
    Metric() = default;
    Metric(MetricKind kind, std::vector<NodeId> nodes,
           std::vector<double> dist, std::vector<double> time);

    MetricKind kind() const { return kind_; }
    const std::vector<NodeId>& nodes() const { return nodes_; }

    double dist(NodeId i, NodeId j) const { return dist_[idx(i) * n_ + idx(j)]; }
    double time(NodeId i, NodeId j) const { return time_[idx(i) * n_ + idx(j)]; }

    bool covers(NodeId id) const { return index_.count(id) != 0; }

private:
    std::size_t idx(NodeId id) const;

    MetricKind kind_ = MetricKind::kEuclidean;
    std::size_t n_ = 0;
    std::vector<NodeId> nodes_;
    std::unordered_map<NodeId, std::size_t> index_;
    std::vector<double> dist_;  // row-major n×n, meters
    std::vector<double> time_;  // row-major n×n, seconds
};

// Builds the metric for the instance's restricted node set. Point-cloud
// instances get the Euclidean metric with time = dist / speed. Road
// networks get directed time-shortest paths per source, with dist taken
// along the time-optimal path (ties broken toward shorter distance).
// Throws InfeasibleError naming any node that cannot reach the school or
// the depot.
Metric compute_metric(const Instance& instance);

}  // namespace sbrp

#endif
