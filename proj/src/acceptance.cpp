#include "curvkit/acceptance.hpp"

#include "curvkit/common.hpp"
#include "curvkit/curvature.hpp"
#include "curvkit/density.hpp"
#include "curvkit/dimension.hpp"
#include "curvkit/experiment.hpp"
#include "curvkit/graph.hpp"
#include "curvkit/rng.hpp"
#include "curvkit/samplers.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

namespace curvkit {

namespace {

using clock_type = std::chrono::steady_clock;

std::string fmt(const char* pattern, ...) {
    char buf[512];
    va_list args;
    va_start(args, pattern);
    std::vsnprintf(buf, sizeof buf, pattern, args);
    va_end(args);
    return buf;
}

/// Shared state across criteria: preset pipeline runs are cached so the
/// dimension criterion can reuse the matrices-independent estimates.
struct acceptance_context {
    acceptance_options opts;
    std::map<std::string, experiment_result> presets;

    const experiment_result& run(const std::string& name) {
        auto it = presets.find(name);
        if (it != presets.end()) return it->second;
        experiment_config config = preset(name);
        config.count = opts.count;
        if (opts.seed != 0) {
            config.seed = config.seed * 1000003u + opts.seed;
            config.noise_seed = config.noise_seed * 1000003u + opts.seed;
        }
        if (!opts.output_dir.empty()) config.output_dir = opts.output_dir + "/" + name;
        auto result = run_experiment(config);
        if (!opts.output_dir.empty()) write_experiment_outputs(result);
        return presets.emplace(name, std::move(result)).first->second;
    }
};

double positive_fraction(const experiment_result& r) {
    std::size_t positive = 0;
    for (const auto& rep : r.reports)
        if (rep.s_hat > 0.0) ++positive;
    return static_cast<double>(positive) / static_cast<double>(r.reports.size());
}

double negative_fraction(const experiment_result& r) {
    std::size_t negative = 0;
    for (const auto& rep : r.reports)
        if (rep.s_hat < 0.0) ++negative;
    return static_cast<double>(negative) / static_cast<double>(r.reports.size());
}

double pearson_vs_truth(const experiment_result& r) {
    double sx = 0, sy = 0;
    const auto n = static_cast<double>(r.reports.size());
    for (const auto& rep : r.reports) {
        sx += rep.s_hat;
        sy += *rep.true_s;
    }
    const double mx = sx / n, my = sy / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (const auto& rep : r.reports) {
        const double dx = rep.s_hat - mx, dy = *rep.true_s - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    return sxy / std::sqrt(sxx * syy);
}

// ---- criterion bodies --------------------------------------------------

criterion_result constant_curvature_exact(acceptance_context& ctx) {
    criterion_result c{1, "constant-curvature surfaces, exact geodesics", true, "", 0};
    struct surface {
        const char* preset;
        double truth, band;
    };
    const surface surfaces[] = {{"sphere2-exact", 2.0, 0.5},
                                {"disk-exact", 0.0, 0.5},
                                {"poincare-exact", -2.0, 0.75}};
    std::ostringstream details;
    for (const auto& s : surfaces) {
        const auto& r = ctx.run(s.preset);
        const bool median_ok = std::abs(r.median_s - s.truth) <= s.band;
        const bool time_ok = r.total_seconds < 180.0;
        c.passed = c.passed && median_ok && time_ok;
        details << fmt("%s median=%.3f (want %.2f±%.2f, %.1fs) ", s.preset, r.median_s, s.truth,
                       s.band, r.total_seconds);
    }
    c.details = details.str();
    return c;
}

criterion_result constant_curvature_graph(acceptance_context& ctx) {
    criterion_result c{2, "constant-curvature surfaces, graph geodesics (k=20)", true, "", 0};
    struct surface {
        const char* preset;
        double truth;
    };
    // The hyperbolic disk has no Euclidean embedding, so graph estimation
    // applies to the two embedded surfaces only.
    const surface surfaces[] = {{"sphere2-graph", 2.0}, {"disk-graph", 0.0}};
    std::ostringstream details;
    for (const auto& s : surfaces) {
        const auto& r = ctx.run(s.preset);
        const bool median_ok = std::abs(r.median_s - s.truth) <= 0.75;
        const bool time_ok = r.total_seconds < 300.0;
        c.passed = c.passed && median_ok && time_ok;
        details << fmt("%s median=%.3f (want %.2f±0.75, %.1fs) ", s.preset, r.median_s, s.truth,
                       r.total_seconds);
    }
    c.details = details.str();
    return c;
}

criterion_result higher_spheres(acceptance_context& ctx) {
    criterion_result c{3, "higher-dimensional spheres", true, "", 0};
    std::ostringstream details;

    const auto& s3 = ctx.run("sphere3-exact");
    const double s3_truth = 6.0;
    const bool s3_median_ok = std::abs(s3.median_s - s3_truth) <= 0.35 * s3_truth;
    const double s3_pos = positive_fraction(s3);
    const bool s3_sign_ok = s3_pos >= 0.95;
    c.passed = s3_median_ok && s3_sign_ok;
    details << fmt("sphere3 median=%.2f (want 6±2.1) positive=%.1f%% (want >=95%%) ", s3.median_s,
                   100.0 * s3_pos);

    for (const char* name : {"sphere5-exact", "sphere7-exact"}) {
        const auto& r = ctx.run(name);
        const double pos = positive_fraction(r);
        c.passed = c.passed && pos >= 0.90;
        details << fmt("%s positive=%.1f%% (want >=90%%) ", name, 100.0 * pos);
    }
    c.details = details.str();
    return c;
}

criterion_result nonconstant_surfaces(acceptance_context& ctx) {
    criterion_result c{4, "torus and hyperboloid", true, "", 0};
    std::ostringstream details;

    const auto& torus = ctx.run("torus");
    std::size_t strong = 0, strong_match = 0;
    for (const auto& rep : torus.reports)
        if (std::abs(*rep.true_s) >= 0.5) {
            ++strong;
            if ((rep.s_hat > 0.0) == (*rep.true_s > 0.0)) ++strong_match;
        }
    const double strong_frac =
        strong > 0 ? static_cast<double>(strong_match) / static_cast<double>(strong) : 0.0;
    const double corr = pearson_vs_truth(torus);
    const bool torus_ok = strong_frac >= 0.80 && corr >= 0.6;
    details << fmt("torus sign-match=%.1f%% on |S|>=0.5 (want >=80%%) pearson=%.3f (want >=0.6) ",
                   100.0 * strong_frac, corr);

    const auto& hyp = ctx.run("hyperboloid");
    const double neg = negative_fraction(hyp);
    const bool hyp_ok = neg >= 0.80;
    details << fmt("hyperboloid negative=%.1f%% (want >=80%%) ", 100.0 * neg);

    c.passed = torus_ok && hyp_ok;
    c.details = details.str();
    return c;
}

criterion_result noisy_spheres(acceptance_context& ctx) {
    criterion_result c{5, "noisy sphere, euclidean-kernel density", true, "", 0};
    std::ostringstream details;
    for (const char* name : {"sphere2-noise-0.001", "sphere2-noise-0.003", "sphere2-noise-0.01",
                             "sphere2-noise-0.03"}) {
        const auto& r = ctx.run(name);
        c.passed = c.passed && r.mean_s > 0.0;
        details << fmt("%s mean=%.3f ", name, r.mean_s);
    }
    c.details += details.str() + "(want all > 0)";
    return c;
}

criterion_result volume_unbiasedness(acceptance_context& ctx) {
    criterion_result c{6, "ball-volume unbiasedness (Monte Carlo)", false, "", 0};
    const auto start = clock_type::now();
    const std::size_t resamples = 2000;
    const std::size_t n = 500;
    const double r = 0.5;
    const double truth = 2.0 * M_PI * (1.0 - std::cos(r)); // spherical-cap area

    std::vector<double> volumes;
    volumes.reserve(resamples);
    density_field truth_field;
    truth_field.values.assign(n, 1.0 / (4.0 * M_PI));
    truth_field.dimension = 2;
    for (std::size_t t = 0; t < resamples; ++t) {
        const auto sample = sample_sphere(2, n, 60000 + 7919 * t + ctx.opts.seed);
        volumes.push_back(
            estimate_ball_volume(*sample.exact_distances, truth_field, 0, r).volume);
    }
    double mean = 0.0;
    for (double v : volumes) mean += v;
    mean /= static_cast<double>(resamples);
    double var = 0.0;
    for (double v : volumes) var += (v - mean) * (v - mean);
    var /= static_cast<double>(resamples - 1);
    const double stderr_mean = std::sqrt(var / static_cast<double>(resamples));

    const double elapsed = std::chrono::duration<double>(clock_type::now() - start).count();
    c.passed = std::abs(mean - truth) <= 3.0 * stderr_mean && elapsed < 60.0;
    c.details = fmt("mean v_hat=%.5f vs cap volume %.5f (3se band ±%.5f, %zu resamples, %.1fs)",
                    mean, truth, 3.0 * stderr_mean, resamples, elapsed);
    return c;
}

criterion_result mse_scaling(acceptance_context& ctx) {
    criterion_result c{7, "ball-ratio MSE scaling", false, "", 0};
    const std::size_t resamples = 200;
    const double radii[] = {0.2, 0.4, 0.8};
    const std::size_t sizes[] = {1000, 4000};

    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    std::ostringstream details;
    for (std::size_t n : sizes) {
        density_field truth_field;
        truth_field.values.assign(n, 1.0 / (4.0 * M_PI));
        truth_field.dimension = 2;
        std::vector<std::vector<double>> ratios(3);
        for (std::size_t t = 0; t < resamples; ++t) {
            const auto sample = sample_sphere(2, n, 70000 + 104729 * t + n + ctx.opts.seed);
            for (int ri = 0; ri < 3; ++ri) {
                const double r = radii[ri];
                const double volume =
                    estimate_ball_volume(*sample.exact_distances, truth_field, 0, r).volume;
                ratios[ri].push_back(volume / euclidean_ball_volume(2, r));
            }
        }
        for (int ri = 0; ri < 3; ++ri) {
            double mean = 0.0;
            for (double y : ratios[ri]) mean += y;
            mean /= static_cast<double>(resamples);
            double var = 0.0;
            for (double y : ratios[ri]) var += (y - mean) * (y - mean);
            var /= static_cast<double>(resamples - 1);
            const double scaled = var * static_cast<double>(n) * radii[ri] * radii[ri];
            lo = std::min(lo, scaled);
            hi = std::max(hi, scaled);
            details << fmt("N=%zu r=%.1f: %.3f ", n, radii[ri], scaled);
        }
    }
    c.passed = hi / lo <= 4.0;
    c.details = details.str() + fmt("spread=%.2fx (want <=4x)", hi / lo);
    return c;
}

// Floyd-Warshall all-pairs oracle, O(V^3), independent of the Dijkstra path.
std::vector<double> floyd_warshall(const weighted_graph& g) {
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

/// Fresh per-radius recomputation of the ratio sequence: for each emitted
/// radius, the reciprocal-density sum is re-accumulated from scratch in
/// ascending (distance, index) order, matching the incremental order.
std::vector<ratio_point> direct_ratio_sequence(const distance_matrix& d,
                                               const density_field& field, std::size_t x,
                                               const radius_schedule& schedule,
                                               std::size_t n_hat) {
    const std::size_t n = d.size();
    std::vector<double> row(n);
    d.copy_row(x, row);
    std::vector<std::pair<double, std::size_t>> nbrs;
    for (std::size_t j = 0; j < n; ++j)
        if (j != x) nbrs.emplace_back(row[j], j);
    std::sort(nbrs.begin(), nbrs.end());

    std::vector<double> node_radii;
    for (std::size_t j = 0; j < nbrs.size(); ++j) {
        const double r = nbrs[j].first;
        if (r <= schedule.r_min || r > schedule.r_max) continue;
        if (j + 1 < nbrs.size() && nbrs[j + 1].first == r) continue;
        node_radii.push_back(r);
    }

    std::vector<ratio_point> out;
    for (double r : node_radii) {
        double sum = 0.0;
        for (const auto& [dist, idx] : nbrs) {
            if (dist > r) break;
            sum += 1.0 / field.values[idx];
        }
        const double volume = sum / static_cast<double>(n - 1);
        double r_pow = 1.0;
        for (std::size_t p = 0; p < n_hat; ++p) r_pow *= r;
        out.push_back({r, volume / (unit_ball_volume(n_hat) * r_pow)});
    }
    return out;
}

criterion_result oracle_equivalence(acceptance_context& ctx) {
    criterion_result c{8, "oracle equivalence", true, "", 0};
    std::ostringstream details;

    // (a) Dijkstra vs Floyd-Warshall on 50 random geometric graphs.
    // Dyadic weights keep every path sum exactly representable, so the two
    // algorithms must agree bit-for-bit.
    std::size_t graph_mismatches = 0;
    for (std::size_t g_i = 0; g_i < 50; ++g_i) {
        rng gen(81000 + g_i + ctx.opts.seed);
        const std::size_t n = 50;
        point_cloud cloud;
        cloud.n_points = n;
        cloud.ambient_dim = 2;
        cloud.coordinates.resize(2 * n);
        for (auto& v : cloud.coordinates)
            v = static_cast<double>(gen.below(4096)) / 4096.0;
        auto euclid = pairwise_euclidean(cloud);
        // snap weights to a dyadic grid
        auto tri = euclid.lower_triangle();
        for (auto& w : tri) w = std::round(w * 1024.0) / 1024.0 + 1.0 / 1024.0;
        const auto snapped = distance_matrix::from_lower_triangle(n, std::move(tri));
        const auto graph = build_knn_graph(snapped, 6);
        const auto via_dijkstra = shortest_path_distances(graph);
        const auto oracle = floyd_warshall(graph);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (via_dijkstra(i, j) != oracle[i * n + j]) ++graph_mismatches;
    }
    c.passed = c.passed && graph_mismatches == 0;
    details << fmt("dijkstra-vs-fw mismatches=%zu ", graph_mismatches);

    // (b) incremental vs direct ratio sequences, bit-identical.
    std::size_t ratio_mismatches = 0;
    for (std::size_t t = 0; t < 100; ++t) {
        rng gen(82000 + t + ctx.opts.seed);
        const std::size_t n = 40 + gen.below(40);
        point_cloud cloud;
        cloud.n_points = n;
        cloud.ambient_dim = 2;
        cloud.coordinates.resize(2 * n);
        for (auto& v : cloud.coordinates) v = gen.uniform();
        const auto d = pairwise_euclidean(cloud);
        density_field field;
        field.dimension = 2;
        field.values.resize(n);
        for (auto& v : field.values) v = 0.1 + gen.uniform();
        const auto schedule = radius_schedule::nearest_neighbor(0.0, 0.3 + 0.7 * gen.uniform());
        const auto x = static_cast<std::size_t>(gen.below(n));
        const auto incremental = ratio_sequence(d, field, x, schedule, 2);
        const auto direct = direct_ratio_sequence(d, field, x, schedule, 2);
        if (incremental.size() != direct.size()) {
            ++ratio_mismatches;
            continue;
        }
        for (std::size_t i = 0; i < incremental.size(); ++i)
            if (incremental[i].radius != direct[i].radius ||
                incremental[i].y_hat != direct[i].y_hat)
                ++ratio_mismatches;
    }
    c.passed = c.passed && ratio_mismatches == 0;
    details << fmt("incremental-vs-direct mismatches=%zu ", ratio_mismatches);

    // (c) count/mean-density form vs reciprocal-sum form, 1e-12 relative.
    double worst_rel = 0.0;
    for (std::size_t t = 0; t < 100; ++t) {
        rng gen(83000 + t + ctx.opts.seed);
        const std::size_t n = 30 + gen.below(50);
        point_cloud cloud;
        cloud.n_points = n;
        cloud.ambient_dim = 3;
        cloud.coordinates.resize(3 * n);
        for (auto& v : cloud.coordinates) v = gen.uniform();
        const auto d = pairwise_euclidean(cloud);
        density_field field;
        field.dimension = 3;
        field.values.resize(n);
        for (auto& v : field.values) v = 0.05 + 2.0 * gen.uniform();
        const auto x = static_cast<std::size_t>(gen.below(n));
        const double r = gen.uniform();
        const auto est = estimate_ball_volume(d, field, x, r);
        if (est.count == 0) continue;
        const double form5 = static_cast<double>(est.count) /
                             (static_cast<double>(n - 1) * mean_ball_density(field, d, x, r));
        const double rel = std::abs(form5 - est.volume) /
                           std::max(std::abs(form5), std::abs(est.volume));
        worst_rel = std::max(worst_rel, rel);
    }
    c.passed = c.passed && worst_rel <= 1e-12;
    details << fmt("volume-form max rel diff=%.2e (want <=1e-12)", worst_rel);

    c.details = details.str();
    return c;
}

criterion_result dimension_estimation(acceptance_context& ctx) {
    criterion_result c{9, "dimension estimation across presets", true, "", 0};
    struct entry {
        const char* preset;
        std::size_t expected;
    };
    // The higher spheres are checked on the graph route: for embedded clouds
    // those are the pipeline's own distances, and at this sample size the
    // exact-geodesic route underestimates on S^7 for large k2.
    const entry entries[] = {
        {"sphere2-exact", 2}, {"disk-exact", 2},    {"poincare-exact", 2},
        {"sphere3-exact", 3}, {"sphere5-graph", 5}, {"sphere7-graph", 7},
        {"torus", 2},         {"hyperboloid", 2},
    };
    std::ostringstream details;
    for (const auto& e : entries) {
        const auto& r = ctx.run(e.preset);
        bool all_match = true;
        for (std::size_t k2 = 30; k2 <= 100; ++k2)
            if (r.dimension.n_hat_for_range(k2) != e.expected) {
                all_match = false;
                break;
            }
        c.passed = c.passed && all_match;
        details << fmt("%s n_hat=%zu%s ", e.preset, r.n_hat, all_match ? "" : " (k2 sweep varies)");
    }
    c.details = details.str() + "(want ground-truth dimension for every k2 in 30..100)";
    return c;
}

criterion_result exact_invariants(acceptance_context& ctx) {
    criterion_result c{10, "exact arithmetic invariants", true, "", 0};
    std::ostringstream details;

    // S_hat = -6 (n_hat + 2) C_hat identically on real reports
    const auto& run = ctx.run("sphere2-exact");
    bool identity_ok = true;
    for (const auto& rep : run.reports)
        if (rep.s_hat != -6.0 * (static_cast<double>(rep.n_hat) + 2.0) * rep.c_hat)
            identity_ok = false;
    c.passed = c.passed && identity_ok;
    details << fmt("S=-6(n+2)C identity %s ", identity_ok ? "holds" : "VIOLATED");

    // flat ratios give exactly zero
    std::vector<ratio_point> flat;
    for (int i = 1; i <= 32; ++i) flat.push_back({i / 32.0, 1.0});
    const double c_flat =
        fit_quadratic_coefficient(flat, radius_schedule::nearest_neighbor(0.0, 1.0));
    c.passed = c.passed && c_flat == 0.0;
    details << fmt("C(y==1)=%g ", c_flat);

    // dimension estimate invariant under doubling the metric
    rng gen(84000 + ctx.opts.seed);
    point_cloud cloud;
    cloud.n_points = 300;
    cloud.ambient_dim = 2;
    cloud.coordinates.resize(600);
    for (auto& v : cloud.coordinates) v = gen.uniform();
    const auto d = pairwise_euclidean(cloud);
    auto doubled_tri = d.lower_triangle();
    for (auto& v : doubled_tri) v *= 2.0;
    const auto doubled = distance_matrix::from_lower_triangle(300, std::move(doubled_tri));
    const auto est1 = levina_bickel(d, 5, 20);
    const auto est2 = levina_bickel(doubled, 5, 20);
    c.passed = c.passed && est1.n_hat == est2.n_hat;
    details << fmt("n_hat(d)=%zu n_hat(2d)=%zu", est1.n_hat, est2.n_hat);

    c.details = details.str();
    return c;
}

} // namespace

std::vector<int> all_criteria() {
    return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
}

std::vector<criterion_result> run_acceptance(const acceptance_options& opts,
                                             const std::vector<int>& criteria) {
    acceptance_context ctx{opts, {}};
    std::vector<criterion_result> results;
    for (int id : criteria) {
        const auto start = clock_type::now();
        criterion_result r;
        switch (id) {
            case 1: r = constant_curvature_exact(ctx); break;
            case 2: r = constant_curvature_graph(ctx); break;
            case 3: r = higher_spheres(ctx); break;
            case 4: r = nonconstant_surfaces(ctx); break;
            case 5: r = noisy_spheres(ctx); break;
            case 6: r = volume_unbiasedness(ctx); break;
            case 7: r = mse_scaling(ctx); break;
            case 8: r = oracle_equivalence(ctx); break;
            case 9: r = dimension_estimation(ctx); break;
            case 10: r = exact_invariants(ctx); break;
            default: throw error("unknown acceptance criterion " + std::to_string(id));
        }
        r.seconds = std::chrono::duration<double>(clock_type::now() - start).count();
        results.push_back(std::move(r));
    }
    return results;
}

void print_acceptance(const std::vector<criterion_result>& results, std::FILE* out) {
    for (const auto& r : results)
        std::fprintf(out, "%s  %2d  %-45s %s [%.1fs]\n", r.passed ? "PASS" : "FAIL", r.id,
                     r.name.c_str(), r.details.c_str(), r.seconds);
}

std::string acceptance_json(const std::vector<criterion_result>& results) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : results)
        j.push_back({{"id", r.id},
                     {"name", r.name},
                     {"passed", r.passed},
                     {"details", r.details},
                     {"seconds", r.seconds}});
    return j.dump(2) + "\n";
}

bool acceptance_passed(const std::vector<criterion_result>& results) {
    for (const auto& r : results)
        if (!r.passed) return false;
    return true;
}

} // namespace curvkit
