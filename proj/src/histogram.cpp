#include "curvkit/histogram.hpp"

#include "curvkit/common.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace curvkit {

histogram compute_histogram(std::span<const double> values, std::size_t bins, bool log_log) {
    if (values.empty()) throw error("compute_histogram: no values");
    if (bins == 0) throw error("compute_histogram: bins must be >= 1");

    std::vector<double> transformed;
    transformed.reserve(values.size());
    for (double v : values) {
        if (!std::isfinite(v)) throw error("compute_histogram: non-finite value");
        if (log_log) {
            if (!(v > 0.0))
                throw error("compute_histogram: log-log axes need strictly positive values");
            transformed.push_back(std::log10(v));
        } else {
            transformed.push_back(v);
        }
    }

    histogram h;
    h.log_log = log_log;
    h.counts.assign(bins, 0);
    h.lo = *std::min_element(transformed.begin(), transformed.end());
    h.hi = *std::max_element(transformed.begin(), transformed.end());
    if (h.hi == h.lo) h.hi = h.lo + 1.0; // degenerate range: everything lands in bin 0

    const double width = (h.hi - h.lo) / static_cast<double>(bins);
    for (double v : transformed) {
        auto bin = static_cast<std::size_t>((v - h.lo) / width);
        if (bin >= bins) bin = bins - 1; // v == hi
        ++h.counts[bin];
    }
    return h;
}

std::string render_histogram_svg(const histogram& h, const std::string& title) {
    constexpr int width = 640;
    constexpr int height = 420;
    constexpr int margin_left = 60;
    constexpr int margin_right = 20;
    constexpr int margin_top = 40;
    constexpr int margin_bottom = 50;
    const int plot_w = width - margin_left - margin_right;
    const int plot_h = height - margin_top - margin_bottom;

    const std::size_t max_count = *std::max_element(h.counts.begin(), h.counts.end());
    auto bar_height = [&](std::size_t count) {
        if (max_count == 0) return 0.0;
        if (h.log_log)
            return plot_h * std::log10(1.0 + static_cast<double>(count)) /
                   std::log10(1.0 + static_cast<double>(max_count));
        return plot_h * static_cast<double>(count) / static_cast<double>(max_count);
    };

    char buf[256];
    std::string svg;
    svg.reserve(4096 + 128 * h.counts.size());
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
                  "viewBox=\"0 0 %d %d\">\n",
                  width, height, width, height);
    svg += buf;
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%d\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" "
                  "text-anchor=\"middle\">%s</text>\n",
                  width / 2, title.c_str());
    svg += buf;

    const double bin_w = static_cast<double>(plot_w) / static_cast<double>(h.counts.size());
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
        const double bh = bar_height(h.counts[b]);
        if (bh <= 0.0) continue;
        std::snprintf(buf, sizeof buf,
                      "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" "
                      "fill=\"#4878a8\"/>\n",
                      margin_left + b * bin_w, margin_top + plot_h - bh,
                      std::max(1.0, bin_w - 1.0), bh);
        svg += buf;
    }

    // axes
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"black\"/>\n",
                  margin_left, margin_top + plot_h, margin_left + plot_w, margin_top + plot_h);
    svg += buf;
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"black\"/>\n",
                  margin_left, margin_top, margin_left, margin_top + plot_h);
    svg += buf;

    const char* x_label = h.log_log ? "log10(value)" : "value";
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%d\" y=\"%d\" font-family=\"sans-serif\" font-size=\"12\" "
                  "text-anchor=\"middle\">%s</text>\n",
                  margin_left + plot_w / 2, height - 12, x_label);
    svg += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%d\" y=\"%d\" font-family=\"sans-serif\" font-size=\"12\" "
                  "text-anchor=\"start\">%.6g</text>\n",
                  margin_left - 4, height - 28, h.lo);
    svg += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%d\" y=\"%d\" font-family=\"sans-serif\" font-size=\"12\" "
                  "text-anchor=\"end\">%.6g</text>\n",
                  margin_left + plot_w, height - 28, h.hi);
    svg += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%d\" y=\"%d\" font-family=\"sans-serif\" font-size=\"12\" "
                  "text-anchor=\"end\">%zu</text>\n",
                  margin_left - 6, margin_top + 12, max_count);
    svg += buf;

    svg += "</svg>\n";
    return svg;
}

void emit_histogram(std::span<const double> values, std::size_t bins, const std::string& path,
                    const std::string& title, bool log_log) {
    const histogram h = compute_histogram(values, bins, log_log);
    const std::string svg = render_histogram_svg(h, title);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error("cannot write " + path);
    out.write(svg.data(), static_cast<std::streamsize>(svg.size()));
}

} // namespace curvkit
