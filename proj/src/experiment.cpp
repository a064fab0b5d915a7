#include "curvkit/experiment.hpp"

#include "curvkit/common.hpp"
#include "curvkit/graph.hpp"
#include "curvkit/histogram.hpp"
#include "curvkit/io.hpp"
#include "curvkit/kernels.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>

namespace curvkit {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point start) {
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

constexpr double PI_HALF = M_PI / 2.0;

experiment_config base_preset(const std::string& name, const std::string& manifold,
                              double r_max, std::uint64_t seed) {
    experiment_config c;
    c.name = name;
    c.manifold = manifold;
    c.r_max = r_max;
    c.seed = seed;
    return c;
}

std::size_t geodesic_k_for_dimension(std::size_t n) {
    switch (n) {
        case 2: return 20;
        case 3: return 50;
        case 5: return 100;
        case 7: return 200;
        default: return 20;
    }
}

std::optional<experiment_config> make_preset(const std::string& name) {
    // Constant-curvature surfaces use a compactly supported kernel with a
    // per-manifold bandwidth (chosen, like r_max, to balance the kernel's
    // curvature-calibration bias against its sampling noise; the estimate
    // sits on a flat plateau in h around each value).
    if (name == "sphere2-exact") {
        auto c = base_preset(name, "sphere2", PI_HALF, 101);
        c.kernel = kde_kernel::biweight;
        c.bandwidth = 0.45;
        return c;
    }
    if (name == "disk-exact") {
        auto c = base_preset(name, "disk", 1.0, 102);
        c.kernel = kde_kernel::biweight;
        c.bandwidth = 0.6;
        return c;
    }
    if (name == "poincare-exact") {
        auto c = base_preset(name, "poincare", 1.0, 103);
        c.kernel = kde_kernel::biweight;
        c.bandwidth = 0.5;
        return c;
    }

    if (name == "sphere2-graph") {
        auto c = base_preset(name, "sphere2", PI_HALF, 104);
        c.graph_distances = true;
        c.geodesic_k = geodesic_k_for_dimension(2);
        c.kernel = kde_kernel::biweight;
        c.bandwidth = 0.45;
        return c;
    }
    if (name == "disk-graph") {
        auto c = base_preset(name, "disk", 1.0, 105);
        c.graph_distances = true;
        c.geodesic_k = geodesic_k_for_dimension(2);
        c.kernel = kde_kernel::biweight;
        c.bandwidth = 0.6;
        return c;
    }

    for (std::size_t n : {std::size_t{3}, std::size_t{5}, std::size_t{7}}) {
        const std::string tag = "sphere" + std::to_string(n);
        if (name == tag + "-exact" || name == tag + "-graph") {
            auto c = base_preset(name, tag, PI_HALF, 110 + n);
            c.kernel = kde_kernel::biweight;
            if (name == tag + "-graph") {
                c.graph_distances = true;
                c.geodesic_k = geodesic_k_for_dimension(n);
                c.seed += 10;
            }
            return c;
        }
    }

    if (name == "torus") {
        auto c = base_preset(name, "torus", M_PI, 120);
        c.graph_distances = true;
        c.geodesic_k = 20;
        return c;
    }
    if (name == "hyperboloid") {
        auto c = base_preset(name, "hyperboloid", 2.0, 121);
        c.graph_distances = true;
        c.geodesic_k = 20;
        return c;
    }

    const std::string noise_prefix = "sphere2-noise-";
    if (name.rfind(noise_prefix, 0) == 0) {
        const std::string sigma_text = name.substr(noise_prefix.size());
        char* end = nullptr;
        const double sigma = std::strtod(sigma_text.c_str(), &end);
        if (end && *end == '\0' && sigma >= 0.0) {
            auto c = base_preset(name, "sphere2", PI_HALF, 130);
            c.noise_sigma = sigma;
            c.noise_seed = 131;
            c.graph_distances = true;
            c.geodesic_k = 20;
            c.density_distances = density_distance_choice::euclidean;
            return c;
        }
    }
    return std::nullopt;
}

const char* kernel_name(kde_kernel k) {
    return k == kde_kernel::gaussian ? "gaussian" : "biweight";
}

const char* schedule_name(schedule_mode m) {
    return m == schedule_mode::nearest_neighbor ? "nn" : "grid";
}

matrix_format format_by_extension(const std::string& path) {
    return path.size() >= 5 && path.substr(path.size() - 5) == ".dmat" ? matrix_format::binary
                                                                       : matrix_format::csv;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error("cannot write " + path);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

} // namespace

std::vector<std::string> preset_names() {
    return {
        "sphere2-exact",      "disk-exact",         "poincare-exact",
        "sphere2-graph",      "disk-graph",         "sphere3-exact",
        "sphere3-graph",      "sphere5-exact",      "sphere5-graph",
        "sphere7-exact",      "sphere7-graph",      "torus",
        "hyperboloid",        "sphere2-noise-0.001", "sphere2-noise-0.003",
        "sphere2-noise-0.01", "sphere2-noise-0.03",
    };
}

experiment_config preset(const std::string& name) {
    if (auto c = make_preset(name)) return *c;
    throw error("unknown preset '" + name + "'");
}

experiment_result run_experiment(const experiment_config& config) {
    const auto run_start = clock_type::now();
    experiment_result result;
    result.config = config;

    auto timed = [&](const char* stage, auto&& fn) {
        const auto start = clock_type::now();
        fn();
        result.stages.push_back({stage, seconds_since(start)});
    };

    // ---- sample ------------------------------------------------------
    std::optional<labeled_sample> sample;
    std::optional<point_cloud> external_cloud;
    timed("sample", [&] {
        if (!config.manifold.empty()) {
            sample = sample_manifold(config.manifold, config.count, config.seed);
            if (config.noise_sigma > 0.0)
                sample = add_noise(*sample, {config.noise_sigma, config.noise_seed});
        } else if (!config.cloud_path.empty()) {
            external_cloud = load_point_cloud(config.cloud_path);
        } else if (config.distances_path.empty()) {
            throw error("experiment: need a manifold, a cloud, or a distance matrix");
        }
    });

    const point_cloud* cloud = nullptr;
    if (sample && sample->cloud.n_points > 0 && sample->embeddable) cloud = &sample->cloud;
    if (external_cloud) cloud = &*external_cloud;

    // ---- distances ---------------------------------------------------
    std::optional<distance_matrix> geodesic;
    std::optional<distance_matrix> euclidean;
    timed("distances", [&] {
        if (!config.distances_path.empty()) {
            geodesic = load_distance_matrix(config.distances_path,
                                            format_by_extension(config.distances_path));
        } else if (config.graph_distances) {
            if (!cloud) throw error("experiment: graph distances need an embedded cloud");
            euclidean = pairwise_euclidean(*cloud);
            const auto graph = build_knn_graph(*euclidean, config.geodesic_k);
            geodesic = shortest_path_distances(graph);
        } else if (sample && sample->exact_distances) {
            geodesic = *sample->exact_distances;
        } else {
            throw error("experiment: no exact distances available; set graph distances");
        }
        if (config.density_distances == density_distance_choice::euclidean && !euclidean) {
            if (!cloud) throw error("experiment: euclidean kernel distances need a cloud");
            euclidean = pairwise_euclidean(*cloud);
        }
    });

    // ---- dimension ---------------------------------------------------
    timed("dimension", [&] {
        if (config.fixed_dimension > 0) {
            result.n_hat = config.fixed_dimension;
            result.dimension.n_hat = config.fixed_dimension;
            result.dimension.k1 = result.dimension.k2 = 0;
        } else {
            result.dimension = levina_bickel(*geodesic, config.k1, config.k2);
            result.n_hat = result.dimension.n_hat;
        }
    });

    // ---- density -----------------------------------------------------
    std::optional<density_field> field;
    timed("density", [&] {
        if (config.use_true_density) {
            if (!sample) throw error("experiment: true density needs a labeled sample");
            density_field f;
            f.values = sample->true_density;
            f.dimension = result.n_hat;
            f.source = distance_source::exact;
            f.validate();
            field = std::move(f);
            result.bandwidth = 0.0;
            return;
        }
        const bool euclid = config.density_distances == density_distance_choice::euclidean;
        const distance_matrix& m = euclid ? *euclidean : *geodesic;
        result.bandwidth = config.bandwidth > 0.0 ? config.bandwidth : default_bandwidth(m);
        const auto tag = euclid ? distance_source::euclidean
                                : (config.graph_distances ? distance_source::graph
                                                          : distance_source::exact);
        field = kde_density(m, result.n_hat, config.kernel, result.bandwidth, tag,
                            config.kde_self_term);
    });

    // ---- curvature ---------------------------------------------------
    timed("curvature", [&] {
        evaluation_set mask;
        if (!config.mask_path.empty()) {
            mask = load_index_set(config.mask_path);
        } else if (sample && !sample->evaluation_mask.empty()) {
            mask = sample->evaluation_mask;
        } else {
            mask = evaluation_set::all(geodesic->size());
        }
        if (mask.empty()) throw error("experiment: evaluation mask is empty");

        const auto schedule =
            config.schedule == schedule_mode::nearest_neighbor
                ? radius_schedule::nearest_neighbor(config.r_min, config.r_max)
                : radius_schedule::equal_spacing(config.r_min, config.r_max,
                                                 config.schedule_spacing);
        result.reports = estimate_curvature_batch(*geodesic, *field, mask, schedule,
                                                  result.n_hat, config.dump_ratios);
        if (sample)
            for (auto& rep : result.reports) rep.true_s = sample->true_curvature[rep.point];
    });

    // ---- summary statistics ------------------------------------------
    std::vector<double> s_values;
    s_values.reserve(result.reports.size());
    for (const auto& rep : result.reports) s_values.push_back(rep.s_hat);
    double sum = 0.0;
    for (double v : s_values) sum += v;
    result.mean_s = sum / static_cast<double>(s_values.size());
    double var = 0.0;
    for (double v : s_values) var += (v - result.mean_s) * (v - result.mean_s);
    result.std_s = s_values.size() > 1
                       ? std::sqrt(var / static_cast<double>(s_values.size() - 1))
                       : 0.0;
    std::vector<double> sorted = s_values;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    result.median_s = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);

    std::size_t truth_points = 0, sign_matches = 0;
    for (const auto& rep : result.reports)
        if (rep.true_s && *rep.true_s != 0.0) {
            ++truth_points;
            if ((rep.s_hat > 0.0) == (*rep.true_s > 0.0)) ++sign_matches;
        }
    result.has_truth = truth_points > 0;
    result.sign_accuracy =
        truth_points > 0 ? static_cast<double>(sign_matches) / static_cast<double>(truth_points)
                         : 0.0;

    result.total_seconds = seconds_since(run_start);
    return result;
}

namespace {

std::string reports_csv(const experiment_result& result) {
    std::string text = "point_index,n_hat,C_hat,S_hat,true_S\n";
    char buf[160];
    for (const auto& rep : result.reports) {
        std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%.17g", rep.point, rep.n_hat, rep.c_hat,
                      rep.s_hat);
        text += buf;
        if (rep.true_s) {
            std::snprintf(buf, sizeof buf, ",%.17g", *rep.true_s);
            text += buf;
        } else {
            text += ",";
        }
        text += '\n';
    }
    return text;
}

std::string ratios_csv(const experiment_result& result) {
    std::string text = "point_index,r,y_hat\n";
    char buf[120];
    for (const auto& rep : result.reports)
        for (const auto& p : rep.ratios) {
            std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", rep.point, p.radius, p.y_hat);
            text += buf;
        }
    return text;
}

} // namespace

std::string summary_json(const experiment_result& result) {
    nlohmann::json j;
    j["schema_version"] = result.config.schema_version;
    j["name"] = result.config.name;
    j["manifold"] = result.config.manifold;
    j["count"] = result.config.count;
    j["seed"] = result.config.seed;
    j["noise_sigma"] = result.config.noise_sigma;
    j["graph_distances"] = result.config.graph_distances;
    j["geodesic_k"] = result.config.geodesic_k;
    j["kernel"] = kernel_name(result.config.kernel);
    j["bandwidth"] = result.bandwidth;
    j["density_distances"] =
        result.config.density_distances == density_distance_choice::euclidean ? "euclidean"
                                                                              : "geodesic";
    j["k1"] = result.config.k1;
    j["k2"] = result.config.k2;
    j["n_hat"] = result.n_hat;
    j["r_min"] = result.config.r_min;
    j["r_max"] = result.config.r_max;
    j["schedule"] = schedule_name(result.config.schedule);
    j["simd"] = kernels::active().name;
    j["points_evaluated"] = result.reports.size();
    j["stats"] = {{"mean_S", result.mean_s},
                  {"median_S", result.median_s},
                  {"std_S", result.std_s},
                  {"sign_accuracy", result.has_truth ? result.sign_accuracy : -1.0}};
    nlohmann::json stages = nlohmann::json::array();
    for (const auto& s : result.stages)
        stages.push_back({{"stage", s.stage}, {"seconds", s.seconds}});
    j["stages"] = stages;
    j["total_seconds"] = result.total_seconds;
    return j.dump(2) + "\n";
}

void write_experiment_outputs(const experiment_result& result) {
    const std::string dir = result.config.output_dir.empty() ? "." : result.config.output_dir;
    std::filesystem::create_directories(dir);
    write_text(dir + "/reports.csv", reports_csv(result));
    write_text(dir + "/summary.json", summary_json(result));

    std::vector<double> s_values;
    s_values.reserve(result.reports.size());
    for (const auto& rep : result.reports) s_values.push_back(rep.s_hat);
    emit_histogram(s_values, result.config.histogram_bins, dir + "/histogram.svg",
                   result.config.name + ": estimated scalar curvature",
                   result.config.histogram_log_log);

    if (result.config.dump_ratios) write_text(dir + "/ratios.csv", ratios_csv(result));
}

experiment_config load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw error(path + ": invalid JSON: " + e.what());
    }

    experiment_config c;
    if (j.contains("preset")) {
        c = preset(j.at("preset").get<std::string>());
    }
    const int version = j.value("schema_version", 1);
    if (version != 1) throw error(path + ": unsupported schema_version");

    auto get = [&](const char* key, auto& target) {
        if (j.contains(key)) target = j.at(key).get<std::decay_t<decltype(target)>>();
    };
    get("name", c.name);
    get("manifold", c.manifold);
    get("count", c.count);
    get("seed", c.seed);
    get("noise_sigma", c.noise_sigma);
    get("noise_seed", c.noise_seed);
    get("cloud_path", c.cloud_path);
    get("distances_path", c.distances_path);
    get("mask_path", c.mask_path);
    get("graph_distances", c.graph_distances);
    get("geodesic_k", c.geodesic_k);
    if (j.contains("kernel")) {
        const auto k = j.at("kernel").get<std::string>();
        if (k == "gaussian")
            c.kernel = kde_kernel::gaussian;
        else if (k == "biweight")
            c.kernel = kde_kernel::biweight;
        else
            throw error(path + ": unknown kernel '" + k + "'");
    }
    get("bandwidth", c.bandwidth);
    if (j.contains("density_distances")) {
        const auto s = j.at("density_distances").get<std::string>();
        if (s == "geodesic")
            c.density_distances = density_distance_choice::geodesic;
        else if (s == "euclidean")
            c.density_distances = density_distance_choice::euclidean;
        else
            throw error(path + ": unknown density_distances '" + s + "'");
    }
    get("use_true_density", c.use_true_density);
    get("kde_self_term", c.kde_self_term);
    get("k1", c.k1);
    get("k2", c.k2);
    get("fixed_dimension", c.fixed_dimension);
    get("r_min", c.r_min);
    get("r_max", c.r_max);
    if (j.contains("schedule")) {
        const auto s = j.at("schedule").get<std::string>();
        if (s == "nn")
            c.schedule = schedule_mode::nearest_neighbor;
        else if (s == "grid")
            c.schedule = schedule_mode::equal_spacing;
        else
            throw error(path + ": unknown schedule '" + s + "'");
    }
    get("schedule_spacing", c.schedule_spacing);
    get("output_dir", c.output_dir);
    get("histogram_bins", c.histogram_bins);
    get("histogram_log_log", c.histogram_log_log);
    get("dump_ratios", c.dump_ratios);
    return c;
}

void save_experiment_config(const experiment_config& c, const std::string& path) {
    nlohmann::json j;
    j["schema_version"] = c.schema_version;
    j["name"] = c.name;
    j["manifold"] = c.manifold;
    j["count"] = c.count;
    j["seed"] = c.seed;
    j["noise_sigma"] = c.noise_sigma;
    j["noise_seed"] = c.noise_seed;
    j["cloud_path"] = c.cloud_path;
    j["distances_path"] = c.distances_path;
    j["mask_path"] = c.mask_path;
    j["graph_distances"] = c.graph_distances;
    j["geodesic_k"] = c.geodesic_k;
    j["kernel"] = kernel_name(c.kernel);
    j["bandwidth"] = c.bandwidth;
    j["density_distances"] =
        c.density_distances == density_distance_choice::euclidean ? "euclidean" : "geodesic";
    j["use_true_density"] = c.use_true_density;
    j["kde_self_term"] = c.kde_self_term;
    j["k1"] = c.k1;
    j["k2"] = c.k2;
    j["fixed_dimension"] = c.fixed_dimension;
    j["r_min"] = c.r_min;
    j["r_max"] = c.r_max;
    j["schedule"] = schedule_name(c.schedule);
    j["schedule_spacing"] = c.schedule_spacing;
    j["output_dir"] = c.output_dir;
    j["histogram_bins"] = c.histogram_bins;
    j["histogram_log_log"] = c.histogram_log_log;
    j["dump_ratios"] = c.dump_ratios;
    write_text(path, j.dump(2) + "\n");
}

} // namespace curvkit
