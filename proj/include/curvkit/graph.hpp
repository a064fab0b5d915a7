#pragma once

#include "curvkit/distance_matrix.hpp"

#include <string>
#include <utility>
#include <vector>

namespace curvkit {

/// Undirected weighted graph; adjacency lists are kept sorted by neighbor
/// index and stored on both endpoints. Immutable after construction.
struct weighted_graph {
    std::size_t n_nodes = 0;
    std::vector<std::vector<std::pair<std::size_t, double>>> adjacency;

    std::size_t edge_count() const;
};

/// Symmetrized (union) k-nearest-neighbor graph: edge (i,j) exists iff j is
/// among i's k nearest (ties broken by lower index) or vice versa. Edge
/// weight is d(i,j). Every node has degree >= k after symmetrization.
weighted_graph build_knn_graph(const distance_matrix& d, std::size_t k);

/// Exact single-source Dijkstra distances from every source, run
/// concurrently across sources. Throws if the graph is disconnected,
/// naming an unreachable pair.
distance_matrix shortest_path_distances(const weighted_graph& g);

/// Rows of the all-pairs matrix restricted to the given sources
/// (row-major, sources.size() x n_nodes).
struct distance_rows {
    std::vector<std::size_t> sources;
    std::size_t n_points = 0;
    std::vector<double> values;

    const double* row(std::size_t s) const { return values.data() + s * n_points; }
};

distance_rows shortest_path_distances(const weighted_graph& g, const evaluation_set& sources);

/// Parses an edge-list file: lines "i j w" with 0-based indices and w >= 0.
/// The graph is symmetrized. Throws on malformed lines, negative weights,
/// self-loops, or duplicate edges with differing weights.
weighted_graph load_graph(const std::string& path);

} // namespace curvkit
