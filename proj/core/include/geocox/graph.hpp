#pragma once

#include <Eigen/Core>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace geocox {

struct GraphNode {
    std::string label;
    std::optional<double> latitude;  // decimal degrees
    std::optional<double> longitude; // decimal degrees
};

/// Areal adjacency graph: one node per location, undirected deduplicated
/// edges, no self-loops. Immutable after construction.
class SpatialGraph {
public:
    int size() const { return static_cast<int>(nodes_.size()); }
    const std::vector<GraphNode>& nodes() const { return nodes_; }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    const std::vector<std::vector<int>>& neighbors() const { return neighbors_; }

    const std::string& label(int i) const { return nodes_[i].label; }
    std::vector<std::string> labels() const;

    /// Index of a label, or -1.
    int index_of(const std::string& label) const;

    friend SpatialGraph build_graph(const std::vector<GraphNode>& nodes,
                                    const std::vector<std::pair<std::string, std::string>>& edges);

private:
    std::vector<GraphNode> nodes_;
    std::vector<std::pair<int, int>> edges_;     // a < b, sorted, unique
    std::vector<std::vector<int>> neighbors_;
};

/// Validates labels, rejects self-loops and unknown endpoints, deduplicates
/// undirected edges.
SpatialGraph build_graph(const std::vector<GraphNode>& nodes,
                         const std::vector<std::pair<std::string, std::string>>& edges);

enum class DistanceSource { graph, great_circle, normalized };

/// Dense symmetric location-by-location distances with a zero diagonal.
/// Disconnected pairs carry +infinity.
struct DistanceMatrix {
    Eigen::MatrixXd values;
    DistanceSource source = DistanceSource::graph;
    std::vector<std::string> labels;

    int size() const { return static_cast<int>(values.rows()); }
    double max_finite() const;
};

/// Shortest-path hop counts by per-source BFS; +infinity for disconnected
/// pairs, zero on the diagonal.
DistanceMatrix graph_distance_matrix(const SpatialGraph& graph);

/// IUGG mean Earth radius.
inline constexpr double kEarthRadiusKm = 6371.0088;

/// Haversine distance between two (latitude, longitude) points, in km.
double haversine_km(double lat1, double lon1, double lat2, double lon2);

/// Pairwise haversine distances between node centroids, in km. Every node
/// must carry a centroid.
DistanceMatrix great_circle_matrix(const SpatialGraph& graph);

/// Rescales all finite entries so the maximum finite entry equals target.
/// Requires at least one positive finite entry.
DistanceMatrix normalize_to_max(const DistanceMatrix& matrix, double target);

/// Reorders a distance matrix to a new label order (e.g. a cohort's location
/// registry). Every requested label must be present.
DistanceMatrix reindex(const DistanceMatrix& matrix, const std::vector<std::string>& labels);

} // namespace geocox
