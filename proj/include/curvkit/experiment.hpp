#pragma once

#include "curvkit/curvature.hpp"
#include "curvkit/dimension.hpp"
#include "curvkit/samplers.hpp"

#include <cstdint>
#include <string>

namespace curvkit {

/// Which distance matrix feeds the density kernel.
enum class density_distance_choice { geodesic, euclidean };

/// Full description of one pipeline run. Preset defaults: nearest-neighbor
/// radius schedule with r_min = 0, per-manifold r_max, k-NN graph size tied
/// to the dimension, k1 = 20 and k2 = 100 for dimension estimation.
struct experiment_config {
    int schema_version = 1;
    std::string name = "custom";

    // data source: a synthetic manifold, or external files
    std::string manifold;            // sphere2/sphere3/sphere5/sphere7/disk/poincare/torus/hyperboloid
    std::size_t count = 4000;
    std::uint64_t seed = 1;
    double noise_sigma = 0.0;
    std::uint64_t noise_seed = 7;
    std::string cloud_path;          // external cloud CSV (alternative to manifold)
    std::string distances_path;      // external distance matrix (csv/dmat by extension)
    std::string mask_path;           // optional evaluation-mask index file

    // geodesic estimation
    bool graph_distances = false;    // estimate geodesics from the embedded cloud
    std::size_t geodesic_k = 20;

    // density estimation
    kde_kernel kernel = kde_kernel::gaussian;
    double bandwidth = 0.0;          // 0 = default rule
    density_distance_choice density_distances = density_distance_choice::geodesic;
    bool use_true_density = false;   // inject ground-truth density (labeled samples only)
    bool kde_self_term = false;      // pipeline default: leave-one-out KDE

    // dimension estimation
    std::size_t k1 = 20;
    std::size_t k2 = 100;
    std::size_t fixed_dimension = 0; // 0 = estimate

    // radius schedule
    double r_min = 0.0;
    double r_max = 0.0;
    schedule_mode schedule = schedule_mode::nearest_neighbor;
    double schedule_spacing = 0.0;   // equal-spacing mode

    // outputs
    std::string output_dir;
    std::size_t histogram_bins = 40;
    bool histogram_log_log = false;
    bool dump_ratios = false;
};

struct stage_timing {
    std::string stage;
    double seconds = 0.0;
};

struct experiment_result {
    experiment_config config;
    std::vector<curvature_report> reports;
    dimension_estimate dimension;
    std::size_t n_hat = 0;
    double bandwidth = 0.0;

    // summary statistics over reported S_hat
    double mean_s = 0.0;
    double median_s = 0.0;
    double std_s = 0.0;
    bool has_truth = false;
    double sign_accuracy = 0.0; // fraction of sign matches over points with true S != 0

    std::vector<stage_timing> stages;
    double total_seconds = 0.0;
};

/// Runs sample -> distances -> dimension -> density -> curvature.
/// Deterministic given the config (including seeds).
experiment_result run_experiment(const experiment_config& config);

/// Writes reports.csv, summary.json, histogram.svg (and ratios.csv when
/// requested) under config.output_dir.
void write_experiment_outputs(const experiment_result& result);

/// Built-in named presets. Unknown name throws.
experiment_config preset(const std::string& name);
std::vector<std::string> preset_names();

/// JSON config round-trip (versioned schema).
experiment_config load_experiment_config(const std::string& path);
void save_experiment_config(const experiment_config& config, const std::string& path);

/// Serialized summary (also embedded in summary.json).
std::string summary_json(const experiment_result& result);

} // namespace curvkit
