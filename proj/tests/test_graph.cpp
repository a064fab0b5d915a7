#include "curvkit/common.hpp"
#include "curvkit/graph.hpp"
#include "curvkit/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

using namespace curvkit;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    const std::string path = "/tmp/curvkit_test_" + name;
    std::ofstream out(path);
    out << content;
    return path;
}

point_cloud random_cloud(std::size_t n, std::uint64_t seed) {
    rng gen(seed);
    point_cloud cloud;
    cloud.n_points = n;
    cloud.ambient_dim = 2;
    cloud.coordinates.resize(2 * n);
    for (auto& v : cloud.coordinates) v = gen.uniform();
    return cloud;
}

// O(V^3) oracle, independent of the Dijkstra implementation
std::vector<double> floyd_warshall_oracle(const weighted_graph& g) {
    const std::size_t n = g.n_nodes;
    std::vector<double> dist(n * n, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i) dist[i * n + i] = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (const auto& [j, w] : g.adjacency[i]) dist[i * n + j] = w;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                dist[i * n + j] = std::min(dist[i * n + j], dist[i * n + k] + dist[k * n + j]);
    return dist;
}

bool has_edge(const weighted_graph& g, std::size_t a, std::size_t b) {
    return std::any_of(g.adjacency[a].begin(), g.adjacency[a].end(),
                       [&](const auto& e) { return e.first == b; });
}

} // namespace

TEST_SUITE("geodesic_graph") {

TEST_CASE("knn graph on collinear points, k=1") {
    point_cloud cloud;
    cloud.n_points = 3;
    cloud.ambient_dim = 1;
    cloud.coordinates = {0.0, 1.0, 2.0};
    const auto g = build_knn_graph(pairwise_euclidean(cloud), 1);
    CHECK(g.edge_count() == 2);
    CHECK(has_edge(g, 0, 1));
    CHECK(has_edge(g, 1, 2));
    CHECK(!has_edge(g, 0, 2));
    // the 1-2 tie at point 1 broke to the lower index, but symmetrization
    // keeps 1-2 through point 2's own nearest neighbor
    CHECK(has_edge(g, 1, 0));
}

TEST_CASE("knn graph with k = N-1 is complete") {
    const auto d = pairwise_euclidean(random_cloud(12, 3));
    const auto g = build_knn_graph(d, 11);
    for (std::size_t i = 0; i < 12; ++i) CHECK(g.adjacency[i].size() == 11);
}

TEST_CASE("knn degree >= k after symmetrization, weights match the matrix") {
    for (std::uint64_t t = 0; t < 10; ++t) {
        const auto d = pairwise_euclidean(random_cloud(40, 100 + t));
        const std::size_t k = 3 + t % 5;
        const auto g = build_knn_graph(d, k);
        for (std::size_t i = 0; i < 40; ++i) {
            REQUIRE(g.adjacency[i].size() >= k);
            for (const auto& [j, w] : g.adjacency[i]) REQUIRE(w == d(i, j));
        }
    }
    const auto d = pairwise_euclidean(random_cloud(5, 1));
    CHECK_THROWS_AS(build_knn_graph(d, 0), error);
    CHECK_THROWS_AS(build_knn_graph(d, 5), error);
}

TEST_CASE("path graph shortest distances") {
    const auto path = write_temp("path.txt", "0 1 1\n1 2 1\n");
    const auto g = load_graph(path);
    const auto d = shortest_path_distances(g);
    CHECK(d(0, 2) == 2.0);
    CHECK(d(0, 1) == 1.0);
}

TEST_CASE("dijkstra matches floyd-warshall on random graphs") {
    for (std::uint64_t t = 0; t < 10; ++t) {
        const auto cloud = random_cloud(50, 300 + t);
        const auto g = build_knn_graph(pairwise_euclidean(cloud), 5);
        const auto via_dijkstra = shortest_path_distances(g);
        const auto oracle = floyd_warshall_oracle(g);
        for (std::size_t i = 0; i < 50; ++i)
            for (std::size_t j = 0; j < 50; ++j)
                REQUIRE(via_dijkstra(i, j) ==
                        doctest::Approx(oracle[i * 50 + j]).epsilon(1e-12));
    }
}

TEST_CASE("source-rows view matches the full matrix") {
    const auto g = build_knn_graph(pairwise_euclidean(random_cloud(60, 8)), 6);
    const auto full = shortest_path_distances(g);
    const evaluation_set sources{{3, 17, 42}};
    const auto rows = shortest_path_distances(g, sources);
    for (std::size_t s = 0; s < sources.size(); ++s)
        for (std::size_t j = 0; j < 60; ++j)
            REQUIRE(rows.row(s)[j] == doctest::Approx(full(sources.indices[s], j)).epsilon(1e-12));
}

TEST_CASE("circle geodesics: shortest paths track arc length within 2%") {
    const std::size_t n = 1000;
    rng gen(71);
    std::vector<double> angles(n);
    for (auto& a : angles) a = gen.uniform(0.0, 2.0 * M_PI);
    point_cloud cloud;
    cloud.n_points = n;
    cloud.ambient_dim = 2;
    cloud.coordinates.resize(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        cloud.coordinates[2 * i] = std::cos(angles[i]);
        cloud.coordinates[2 * i + 1] = std::sin(angles[i]);
    }
    const auto g = build_knn_graph(pairwise_euclidean(cloud), 10);
    const auto d = shortest_path_distances(g);
    double worst_rel = 0.0;
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) {
            double arc = std::abs(angles[i] - angles[j]);
            arc = std::min(arc, 2.0 * M_PI - arc);
            if (arc < 1e-9) continue;
            worst_rel = std::max(worst_rel, std::abs(d(i, j) - arc) / arc);
        }
    CHECK(worst_rel < 0.02);
}

TEST_CASE("edge list parsing") {
    const auto g = load_graph(write_temp("single.txt", "0 1 1.5\n"));
    REQUIRE(g.n_nodes == 2);
    REQUIRE(g.adjacency[0].size() == 1);
    CHECK(g.adjacency[0][0] == std::pair<std::size_t, double>{1, 1.5});
    CHECK(g.adjacency[1][0] == std::pair<std::size_t, double>{0, 1.5});

    // duplicates with the same weight collapse; differing weights are an error
    CHECK(load_graph(write_temp("dup_same.txt", "0 1 2\n1 0 2\n")).edge_count() == 1);
    CHECK_THROWS_AS(load_graph(write_temp("dup_diff.txt", "0 1 2\n1 0 3\n")), error);
    CHECK_THROWS_AS(load_graph(write_temp("neg.txt", "0 1 -2\n")), error);
    CHECK_THROWS_AS(load_graph(write_temp("self.txt", "1 1 2\n")), error);
    CHECK_THROWS_AS(load_graph(write_temp("malformed.txt", "0 1\n")), error);
    CHECK_THROWS_AS(load_graph(write_temp("empty.txt", "# nothing\n")), error);
}

TEST_CASE("triangle graph: direct edges win when weights satisfy the triangle inequality") {
    const auto g = load_graph(write_temp("triangle.txt", "0 1 1\n1 2 1\n0 2 1.5\n"));
    const auto d = shortest_path_distances(g);
    const auto oracle = floyd_warshall_oracle(g);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            REQUIRE(d(i, j) == doctest::Approx(oracle[i * 3 + j]));
    CHECK(d(0, 2) == 1.5);
}

TEST_CASE("shortest-path output is a metric on small instances") {
    const auto g = build_knn_graph(pairwise_euclidean(random_cloud(150, 5)), 8);
    const auto d = shortest_path_distances(g);
    const double slack = 1e-12 * d.max_entry();
    for (std::size_t i = 0; i < 150; ++i) {
        REQUIRE(d(i, i) == 0.0);
        for (std::size_t j = 0; j < 150; ++j) {
            REQUIRE(d(i, j) == d(j, i));
            for (std::size_t k = 0; k < 150; k += 7)
                REQUIRE(d(i, j) <= d(i, k) + d(k, j) + slack);
        }
    }
}

TEST_CASE("graph distances dominate the underlying euclidean distances") {
    const auto cloud = random_cloud(120, 6);
    const auto euclid = pairwise_euclidean(cloud);
    const auto d = shortest_path_distances(build_knn_graph(euclid, 6));
    for (std::size_t i = 1; i < 120; ++i)
        for (std::size_t j = 0; j < i; ++j)
            REQUIRE(d(i, j) >= euclid(i, j) - 1e-12);
}

TEST_CASE("increasing k never lengthens a shortest path") {
    const auto euclid = pairwise_euclidean(random_cloud(100, 7));
    const auto d5 = shortest_path_distances(build_knn_graph(euclid, 5));
    const auto d9 = shortest_path_distances(build_knn_graph(euclid, 9));
    for (std::size_t i = 1; i < 100; ++i)
        for (std::size_t j = 0; j < i; ++j) REQUIRE(d9(i, j) <= d5(i, j) + 1e-12);
}

TEST_CASE("disconnected graphs are rejected with a pointer at larger k") {
    // two far-apart clusters, k=1 keeps them apart
    point_cloud cloud;
    cloud.n_points = 4;
    cloud.ambient_dim = 1;
    cloud.coordinates = {0.0, 0.1, 100.0, 100.1};
    const auto g = build_knn_graph(pairwise_euclidean(cloud), 1);
    CHECK_THROWS_WITH_AS(static_cast<void>(shortest_path_distances(g)),
                         doctest::Contains("increase k"), error);
}

} // TEST_SUITE
