#include "geocox/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <unordered_map>

#include "geocox/errors.hpp"

namespace geocox {

std::vector<std::string> SpatialGraph::labels() const {
    std::vector<std::string> out;
    out.reserve(nodes_.size());
    for (const auto& n : nodes_) out.push_back(n.label);
    return out;
}

int SpatialGraph::index_of(const std::string& label) const {
    for (int i = 0; i < size(); ++i)
        if (nodes_[i].label == label) return i;
    return -1;
}

SpatialGraph build_graph(const std::vector<GraphNode>& nodes,
                         const std::vector<std::pair<std::string, std::string>>& edges) {
    SpatialGraph g;
    std::unordered_map<std::string, int> index;
    for (const auto& node : nodes) {
        if (node.label.empty()) throw data_error("empty node label");
        if (node.latitude.has_value() != node.longitude.has_value())
            throw data_error("node '" + node.label + "' has only one coordinate");
        auto [it, inserted] = index.try_emplace(node.label, static_cast<int>(g.nodes_.size()));
        if (!inserted) throw data_error("duplicate node label '" + node.label + "'");
        g.nodes_.push_back(node);
        (void)it;
    }

    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(edges.size());
    for (const auto& [a, b] : edges) {
        const auto ia = index.find(a);
        if (ia == index.end()) throw data_error("edge references unknown label '" + a + "'");
        const auto ib = index.find(b);
        if (ib == index.end()) throw data_error("edge references unknown label '" + b + "'");
        if (ia->second == ib->second) throw data_error("self-loop at '" + a + "'");
        pairs.emplace_back(std::min(ia->second, ib->second), std::max(ia->second, ib->second));
    }
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    g.edges_ = std::move(pairs);

    g.neighbors_.resize(g.nodes_.size());
    for (const auto& [a, b] : g.edges_) {
        g.neighbors_[a].push_back(b);
        g.neighbors_[b].push_back(a);
    }
    for (auto& nbrs : g.neighbors_) std::sort(nbrs.begin(), nbrs.end());
    return g;
}

double DistanceMatrix::max_finite() const {
    double m = 0.0;
    for (int i = 0; i < values.rows(); ++i)
        for (int j = 0; j < values.cols(); ++j)
            if (std::isfinite(values(i, j)) && values(i, j) > m) m = values(i, j);
    return m;
}

DistanceMatrix graph_distance_matrix(const SpatialGraph& graph) {
    const int n = graph.size();
    const double inf = std::numeric_limits<double>::infinity();
    DistanceMatrix out;
    out.values = Eigen::MatrixXd::Constant(n, n, inf);
    out.source = DistanceSource::graph;
    out.labels = graph.labels();

    std::vector<int> dist(n);
    std::deque<int> queue;
    for (int src = 0; src < n; ++src) {
        std::fill(dist.begin(), dist.end(), -1);
        dist[src] = 0;
        queue.clear();
        queue.push_back(src);
        while (!queue.empty()) {
            const int u = queue.front();
            queue.pop_front();
            for (int v : graph.neighbors()[u]) {
                if (dist[v] < 0) {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        for (int v = 0; v < n; ++v)
            if (dist[v] >= 0) out.values(src, v) = dist[v];
    }
    return out;
}

double haversine_km(double lat1, double lon1, double lat2, double lon2) {
    constexpr double deg = 0.017453292519943295; // pi / 180
    const double phi1 = lat1 * deg, phi2 = lat2 * deg;
    const double dphi = (lat2 - lat1) * deg, dlam = (lon2 - lon1) * deg;
    const double s1 = std::sin(0.5 * dphi), s2 = std::sin(0.5 * dlam);
    const double a = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
    return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(a)));
}

DistanceMatrix great_circle_matrix(const SpatialGraph& graph) {
    const int n = graph.size();
    for (int i = 0; i < n; ++i)
        if (!graph.nodes()[i].latitude)
            throw data_error("node '" + graph.label(i) + "' is missing a centroid");

    DistanceMatrix out;
    out.values = Eigen::MatrixXd::Zero(n, n);
    out.source = DistanceSource::great_circle;
    out.labels = graph.labels();
    for (int i = 0; i < n; ++i) {
        const auto& a = graph.nodes()[i];
        for (int j = i + 1; j < n; ++j) {
            const auto& b = graph.nodes()[j];
            const double d = haversine_km(*a.latitude, *a.longitude, *b.latitude, *b.longitude);
            out.values(i, j) = d;
            out.values(j, i) = d;
        }
    }
    return out;
}

DistanceMatrix normalize_to_max(const DistanceMatrix& matrix, double target) {
    if (target <= 0.0) throw data_error("normalization target must be positive");
    const double maxv = matrix.max_finite();
    if (maxv <= 0.0) throw data_error("matrix has no positive finite entry");

    DistanceMatrix out;
    out.source = DistanceSource::normalized;
    out.labels = matrix.labels;
    out.values = matrix.values;
    for (int i = 0; i < out.values.rows(); ++i)
        for (int j = 0; j < out.values.cols(); ++j) {
            const double v = out.values(i, j);
            // v/maxv is exactly 1 when v == maxv, so the maximum lands on
            // target without rounding residue.
            if (std::isfinite(v)) out.values(i, j) = v / maxv * target;
        }
    return out;
}

DistanceMatrix reindex(const DistanceMatrix& matrix, const std::vector<std::string>& labels) {
    std::unordered_map<std::string, int> index;
    for (int i = 0; i < static_cast<int>(matrix.labels.size()); ++i) index[matrix.labels[i]] = i;

    const int m = static_cast<int>(labels.size());
    std::vector<int> map(m);
    for (int i = 0; i < m; ++i) {
        const auto it = index.find(labels[i]);
        if (it == index.end()) throw data_error("location '" + labels[i] + "' not present in distance matrix");
        map[i] = it->second;
    }
    DistanceMatrix out;
    out.source = matrix.source;
    out.labels = labels;
    out.values.resize(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) out.values(i, j) = matrix.values(map[i], map[j]);
    return out;
}

} // namespace geocox
