#include "curvkit/acceptance.hpp"
#include "curvkit/common.hpp"
#include "curvkit/experiment.hpp"
#include "curvkit/graph.hpp"
#include "curvkit/io.hpp"
#include "curvkit/samplers.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace {

using namespace curvkit;

void write_labels_csv(const labeled_sample& sample, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw error("cannot write " + path);
    std::vector<bool> in_mask(sample.size(), false);
    for (std::size_t idx : sample.evaluation_mask.indices) in_mask[idx] = true;
    out << "# index,true_S,true_density,in_evaluation_mask\n";
    char buf[128];
    for (std::size_t i = 0; i < sample.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%d\n", i, sample.true_curvature[i],
                      sample.true_density[i], in_mask[i] ? 1 : 0);
        out << buf;
    }
}

int cmd_sample(const std::string& manifold, std::size_t count, std::uint64_t seed,
               double noise_sigma, std::uint64_t noise_seed, const std::string& out_dir) {
    auto sample = sample_manifold(manifold, count, seed);
    if (noise_sigma > 0.0) sample = add_noise(sample, {noise_sigma, noise_seed});
    std::filesystem::create_directories(out_dir);
    if (sample.embeddable) save_point_cloud(sample.cloud, out_dir + "/cloud.csv");
    if (sample.exact_distances)
        save_distance_matrix(*sample.exact_distances, out_dir + "/exact.dmat",
                             matrix_format::binary);
    write_labels_csv(sample, out_dir + "/labels.csv");
    save_index_set(sample.evaluation_mask, out_dir + "/mask.csv");
    std::printf("wrote %zu points (%zu in evaluation mask) to %s\n", sample.size(),
                sample.evaluation_mask.size(), out_dir.c_str());
    return 0;
}

int cmd_distances(const std::string& cloud_path, const std::string& edges_path, std::size_t k,
                  const std::string& sources, const std::string& out) {
    weighted_graph graph;
    if (!cloud_path.empty()) {
        const auto cloud = load_point_cloud(cloud_path);
        graph = build_knn_graph(pairwise_euclidean(cloud), k);
    } else if (!edges_path.empty()) {
        graph = load_graph(edges_path);
    } else {
        throw error("distances: need --cloud or --edges");
    }

    if (sources == "all") {
        const auto d = shortest_path_distances(graph);
        save_distance_matrix(d, out, matrix_format::binary);
        std::printf("wrote %zux%zu distances to %s\n", d.size(), d.size(), out.c_str());
        return 0;
    }
    const auto mask = load_index_set(sources);
    const auto rows = shortest_path_distances(graph, mask);
    std::ofstream f(out);
    if (!f) throw error("cannot write " + out);
    char buf[40];
    for (std::size_t s = 0; s < rows.sources.size(); ++s) {
        f << rows.sources[s];
        const double* row = rows.row(s);
        for (std::size_t j = 0; j < rows.n_points; ++j) {
            std::snprintf(buf, sizeof buf, ",%.17g", row[j]);
            f << buf;
        }
        f << '\n';
    }
    std::printf("wrote %zu source rows to %s\n", rows.sources.size(), out.c_str());
    return 0;
}

int cmd_estimate(experiment_config config, const std::string& out,
                 const std::string& ratios_out) {
    config.dump_ratios = !ratios_out.empty();
    const auto result = run_experiment(config);

    std::ofstream f(out);
    if (!f) throw error("cannot write " + out);
    f << "point_index,n_hat,C_hat,S_hat,true_S\n";
    char buf[160];
    for (const auto& rep : result.reports) {
        std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%.17g", rep.point, rep.n_hat, rep.c_hat,
                      rep.s_hat);
        f << buf;
        if (rep.true_s) {
            std::snprintf(buf, sizeof buf, ",%.17g", *rep.true_s);
            f << buf << '\n';
        } else {
            f << ",\n";
        }
    }
    if (!ratios_out.empty()) {
        std::ofstream rf(ratios_out);
        if (!rf) throw error("cannot write " + ratios_out);
        rf << "point_index,r,y_hat\n";
        for (const auto& rep : result.reports)
            for (const auto& p : rep.ratios) {
                std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", rep.point, p.radius, p.y_hat);
                rf << buf;
            }
    }
    std::printf("n_hat=%zu bandwidth=%.6g points=%zu mean_S=%.4f median_S=%.4f (%.1fs)\n",
                result.n_hat, result.bandwidth, result.reports.size(), result.mean_s,
                result.median_s, result.total_seconds);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"curvkit: scalar-curvature estimation from finite metric spaces"};
    app.require_subcommand(1);

    // ---- sample ----
    std::string manifold = "sphere2", out_dir = "out";
    std::size_t count = 4000;
    std::uint64_t seed = 1, noise_seed = 7;
    double noise_sigma = 0.0;
    auto* sample_cmd = app.add_subcommand("sample", "generate a synthetic labeled data set");
    sample_cmd->add_option("--manifold", manifold,
                           "sphere2|sphere3|sphere5|sphere7|disk|poincare|torus|hyperboloid");
    sample_cmd->add_option("--count", count, "number of points");
    sample_cmd->add_option("--seed", seed, "RNG seed");
    sample_cmd->add_option("--noise-sigma", noise_sigma, "isotropic Gaussian noise level");
    sample_cmd->add_option("--noise-seed", noise_seed, "noise RNG seed");
    sample_cmd->add_option("--out-dir", out_dir, "output directory");

    // ---- distances ----
    std::string cloud_path, edges_path, sources = "all", dist_out = "distances.dmat";
    std::size_t knn_k = 20;
    auto* dist_cmd =
        app.add_subcommand("distances", "k-NN graph shortest-path distance estimation");
    dist_cmd->add_option("--cloud", cloud_path, "point cloud CSV");
    dist_cmd->add_option("--edges", edges_path, "edge-list file (i j w per line)");
    dist_cmd->add_option("--k", knn_k, "neighbors per point");
    dist_cmd->add_option("--sources", sources, "'all' or an index-file path");
    dist_cmd->add_option("--out", dist_out, "output (binary DMAT for all, CSV rows otherwise)");

    // ---- estimate ----
    experiment_config est;
    est.name = "estimate";
    std::string est_distances, est_cloud, est_mask, est_out = "reports.csv", est_ratios;
    std::string est_kernel = "gaussian", est_bandwidth = "auto", est_density_dist = "geodesic";
    std::string est_dimension = "auto", est_schedule = "nn";
    auto* est_cmd = app.add_subcommand("estimate", "pointwise scalar-curvature estimation");
    est_cmd->add_option("--distances", est_distances, "distance matrix (.dmat or CSV)");
    est_cmd->add_option("--cloud", est_cloud, "point cloud CSV (geodesics estimated)");
    est_cmd->add_option("--geodesic-k", est.geodesic_k, "k for the k-NN geodesic graph");
    est_cmd->add_option("--kernel", est_kernel, "gaussian|biweight");
    est_cmd->add_option("--bandwidth", est_bandwidth, "KDE bandwidth or 'auto'");
    est_cmd->add_option("--density-distances", est_density_dist, "geodesic|euclidean");
    est_cmd->add_option("--k1", est.k1, "dimension-estimation lower neighbor bound");
    est_cmd->add_option("--k2", est.k2, "dimension-estimation upper neighbor bound");
    est_cmd->add_option("--dimension", est_dimension, "intrinsic dimension or 'auto'");
    est_cmd->add_option("--r-min", est.r_min, "minimum ball radius");
    est_cmd->add_option("--r-max", est.r_max, "maximum ball radius")->required();
    est_cmd->add_option("--schedule", est_schedule, "nn | grid:<spacing>");
    est_cmd->add_option("--mask", est_mask, "evaluation-mask index file");
    est_cmd->add_option("--out", est_out, "report CSV path");
    est_cmd->add_option("--dump-ratios", est_ratios, "also write the per-point ratio CSV here");

    // ---- experiment ----
    auto* experiment_cmd = app.add_subcommand("experiment", "experiment harness and acceptance suite");
    experiment_cmd->require_subcommand(1);

    std::string run_target, run_out_dir = "out";
    std::size_t run_count = 4000, run_bins = 40;
    bool run_full = false, run_log_log = false, run_dump_ratios = false;
    std::uint64_t run_seed = 0;
    auto* run_cmd = experiment_cmd->add_subcommand("run", "run a preset or a config JSON");
    run_cmd->add_option("target", run_target, "preset name or config.json path")->required();
    run_cmd->add_option("--out-dir", run_out_dir, "output directory");
    run_cmd->add_option("--count", run_count, "sample size");
    run_cmd->add_flag("--full", run_full, "full-scale run (N = 10000)");
    run_cmd->add_option("--seed", run_seed, "override the preset seed");
    run_cmd->add_option("--bins", run_bins, "histogram bins");
    run_cmd->add_flag("--log-log", run_log_log, "log-log histogram axes");
    run_cmd->add_flag("--dump-ratios", run_dump_ratios, "write ratios.csv");

    std::string accept_out_dir;
    std::size_t accept_count = 4000;
    std::uint64_t accept_seed = 0;
    std::vector<int> accept_criteria;
    auto* accept_cmd =
        experiment_cmd->add_subcommand("accept", "run the acceptance criteria suite");
    accept_cmd->add_option("--out-dir", accept_out_dir, "artifact directory");
    accept_cmd->add_option("--count", accept_count, "sample size for preset criteria");
    accept_cmd->add_option("--seed", accept_seed, "fresh-seed offset (0 = preset defaults)");
    accept_cmd->add_option("--criteria", accept_criteria, "criterion ids to run (default all)");

    auto* presets_cmd = experiment_cmd->add_subcommand("presets", "list preset names");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sample_cmd)
            return cmd_sample(manifold, count, seed, noise_sigma, noise_seed, out_dir);
        if (*dist_cmd) return cmd_distances(cloud_path, edges_path, knn_k, sources, dist_out);
        if (*est_cmd) {
            if (est_distances.empty() == est_cloud.empty())
                throw curvkit::error("estimate: need exactly one of --distances / --cloud");
            est.distances_path = est_distances;
            est.cloud_path = est_cloud;
            est.graph_distances = !est_cloud.empty();
            est.mask_path = est_mask;
            est.kernel = est_kernel == "biweight" ? kde_kernel::biweight : kde_kernel::gaussian;
            if (est_kernel != "gaussian" && est_kernel != "biweight")
                throw curvkit::error("estimate: unknown kernel '" + est_kernel + "'");
            est.bandwidth = est_bandwidth == "auto" ? 0.0 : std::stod(est_bandwidth);
            if (est_density_dist == "euclidean")
                est.density_distances = density_distance_choice::euclidean;
            else if (est_density_dist != "geodesic")
                throw curvkit::error("estimate: unknown density distances '" + est_density_dist +
                                     "'");
            est.fixed_dimension =
                est_dimension == "auto" ? 0 : static_cast<std::size_t>(std::stoul(est_dimension));
            if (est_schedule == "nn") {
                est.schedule = schedule_mode::nearest_neighbor;
            } else if (est_schedule.rfind("grid:", 0) == 0) {
                est.schedule = schedule_mode::equal_spacing;
                est.schedule_spacing = std::stod(est_schedule.substr(5));
            } else {
                throw curvkit::error("estimate: unknown schedule '" + est_schedule + "'");
            }
            return cmd_estimate(est, est_out, est_ratios);
        }
        if (*run_cmd) {
            experiment_config config;
            if (run_target.size() > 5 &&
                run_target.substr(run_target.size() - 5) == ".json") {
                config = load_experiment_config(run_target);
            } else {
                config = preset(run_target);
            }
            if (run_cmd->count("--count") > 0) config.count = run_count;
            if (run_full) config.count = 10000;
            if (run_seed != 0) config.seed = run_seed;
            if (run_cmd->count("--out-dir") > 0 || config.output_dir.empty())
                config.output_dir = run_out_dir;
            if (run_cmd->count("--bins") > 0) config.histogram_bins = run_bins;
            if (run_log_log) config.histogram_log_log = true;
            if (run_dump_ratios) config.dump_ratios = true;
            const auto result = run_experiment(config);
            write_experiment_outputs(result);
            std::printf(
                "%s: n_hat=%zu points=%zu mean_S=%.4f median_S=%.4f std_S=%.4f (%.1fs)\n",
                config.name.c_str(), result.n_hat, result.reports.size(), result.mean_s,
                result.median_s, result.std_s, result.total_seconds);
            return 0;
        }
        if (*accept_cmd) {
            acceptance_options opts;
            opts.count = accept_count;
            opts.seed = accept_seed;
            opts.output_dir = accept_out_dir;
            const auto ids = accept_criteria.empty() ? all_criteria() : accept_criteria;
            const auto results = run_acceptance(opts, ids);
            print_acceptance(results, stdout);
            if (!accept_out_dir.empty()) {
                std::filesystem::create_directories(accept_out_dir);
                std::ofstream f(accept_out_dir + "/acceptance.json");
                f << acceptance_json(results);
            }
            return acceptance_passed(results) ? 0 : 1;
        }
        if (*presets_cmd) {
            for (const auto& name : preset_names()) std::printf("%s\n", name.c_str());
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
