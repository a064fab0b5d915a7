#include "curvkit/graph.hpp"

#include "curvkit/common.hpp"
#include "curvkit/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <queue>

namespace curvkit {

namespace {

constexpr double INF = std::numeric_limits<double>::infinity();

/// Single-source Dijkstra with a lazy-deletion binary heap; writes the full
/// distance row for `source` into dist (length n_nodes).
void dijkstra_row(const weighted_graph& g, std::size_t source, std::vector<double>& dist) {
    dist.assign(g.n_nodes, INF);
    dist[source] = 0.0;
    using entry = std::pair<double, std::size_t>;
    std::priority_queue<entry, std::vector<entry>, std::greater<entry>> heap;
    heap.emplace(0.0, source);
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (d > dist[u]) continue;
        for (const auto& [v, w] : g.adjacency[u]) {
            const double candidate = d + w;
            if (candidate < dist[v]) {
                dist[v] = candidate;
                heap.emplace(candidate, v);
            }
        }
    }
}

void require_connected(const weighted_graph& g) {
    if (g.n_nodes == 0) throw error("shortest_path_distances: empty graph");
    std::vector<bool> seen(g.n_nodes, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
        const std::size_t u = stack.back();
        stack.pop_back();
        for (const auto& [v, w] : g.adjacency[u])
            if (!seen[v]) {
                seen[v] = true;
                stack.push_back(v);
            }
    }
    for (std::size_t v = 0; v < g.n_nodes; ++v)
        if (!seen[v])
            throw error("graph is disconnected: no path between 0 and " + std::to_string(v) +
                        " (for k-NN graphs, increase k)");
}

} // namespace

std::size_t weighted_graph::edge_count() const {
    std::size_t total = 0;
    for (const auto& nbrs : adjacency) total += nbrs.size();
    return total / 2;
}

weighted_graph build_knn_graph(const distance_matrix& d, std::size_t k) {
    const std::size_t n = d.size();
    if (k < 1 || k > n - 1) throw error("build_knn_graph: k must be in [1, N-1]");

    // k nearest per node, ties broken by lower index
    std::vector<std::vector<std::size_t>> nearest(n);
    parallel_for(0, n, [&](std::size_t i) {
        std::vector<double> row(n);
        d.copy_row(i, row);
        std::vector<std::size_t> order;
        order.reserve(n - 1);
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) order.push_back(j);
        std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k - 1),
                         order.end(), [&](std::size_t a, std::size_t b) {
                             return row[a] != row[b] ? row[a] < row[b] : a < b;
                         });
        nearest[i].assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
    });

    weighted_graph g;
    g.n_nodes = n;
    g.adjacency.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j : nearest[i]) {
            g.adjacency[i].emplace_back(j, d(i, j));
            g.adjacency[j].emplace_back(i, d(i, j));
        }
    for (auto& nbrs : g.adjacency) {
        std::sort(nbrs.begin(), nbrs.end());
        nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    }
    return g;
}

distance_matrix shortest_path_distances(const weighted_graph& g) {
    require_connected(g);
    distance_matrix m(g.n_nodes);
    auto& tri = m.mutable_lower_triangle();
    parallel_for(1, g.n_nodes, [&](std::size_t i) {
        thread_local std::vector<double> dist;
        dijkstra_row(g, i, dist);
        double* row = tri.data() + distance_matrix::tri_index(i, 0);
        for (std::size_t j = 0; j < i; ++j) row[j] = dist[j];
    });
    return m;
}

distance_rows shortest_path_distances(const weighted_graph& g, const evaluation_set& sources) {
    require_connected(g);
    sources.validate(g.n_nodes);
    distance_rows out;
    out.sources = sources.indices;
    out.n_points = g.n_nodes;
    out.values.resize(sources.size() * g.n_nodes);
    parallel_for(0, sources.size(), [&](std::size_t s) {
        thread_local std::vector<double> dist;
        dijkstra_row(g, out.sources[s], dist);
        std::copy(dist.begin(), dist.end(), out.values.begin() + static_cast<std::ptrdiff_t>(s * g.n_nodes));
    });
    return out;
}

weighted_graph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error("cannot open " + path);

    struct edge {
        std::size_t a, b;
        double w;
    };
    std::vector<edge> edges;
    std::size_t max_index = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        long long i = -1, j = -1;
        double w = NAN;
        if (std::sscanf(line.c_str(), "%lld %lld %lf", &i, &j, &w) != 3 || i < 0 || j < 0)
            throw error(path + ":" + std::to_string(line_no) + ": expected 'i j w'");
        if (!std::isfinite(w) || w < 0.0)
            throw error(path + ":" + std::to_string(line_no) + ": weight must be >= 0");
        if (i == j)
            throw error(path + ":" + std::to_string(line_no) + ": self-loop rejected");
        const auto a = static_cast<std::size_t>(std::min(i, j));
        const auto b = static_cast<std::size_t>(std::max(i, j));
        edges.push_back({a, b, w});
        max_index = std::max(max_index, b);
    }
    if (edges.empty()) throw error(path + ": no edges");

    std::sort(edges.begin(), edges.end(), [](const edge& x, const edge& y) {
        return x.a != y.a ? x.a < y.a : (x.b != y.b ? x.b < y.b : x.w < y.w);
    });
    for (std::size_t e = 1; e < edges.size(); ++e)
        if (edges[e].a == edges[e - 1].a && edges[e].b == edges[e - 1].b &&
            edges[e].w != edges[e - 1].w)
            throw error(path + ": duplicate edge " + std::to_string(edges[e].a) + "-" +
                        std::to_string(edges[e].b) + " with differing weights");
    edges.erase(std::unique(edges.begin(), edges.end(),
                            [](const edge& x, const edge& y) {
                                return x.a == y.a && x.b == y.b;
                            }),
                edges.end());

    weighted_graph g;
    g.n_nodes = max_index + 1;
    g.adjacency.resize(g.n_nodes);
    for (const auto& e : edges) {
        g.adjacency[e.a].emplace_back(e.b, e.w);
        g.adjacency[e.b].emplace_back(e.a, e.w);
    }
    for (auto& nbrs : g.adjacency) std::sort(nbrs.begin(), nbrs.end());
    return g;
}

} // namespace curvkit
