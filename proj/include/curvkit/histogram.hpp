#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace curvkit {

/// Equal-width binning over [min, max] of the input (log10-transformed
/// when log_log is set, which requires strictly positive values).
struct histogram {
    std::vector<std::size_t> counts;
    double lo = 0.0;
    double hi = 0.0;
    bool log_log = false;
};

histogram compute_histogram(std::span<const double> values, std::size_t bins,
                            bool log_log = false);

/// Self-contained SVG bar chart; byte-identical output for identical inputs.
/// In log-log mode bar heights scale with log10(1 + count).
std::string render_histogram_svg(const histogram& h, const std::string& title);

/// compute + render + write. Throws on empty input or bins == 0.
void emit_histogram(std::span<const double> values, std::size_t bins,
                    const std::string& path, const std::string& title,
                    bool log_log = false);

} // namespace curvkit
