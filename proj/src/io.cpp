#include "curvkit/io.hpp"

#include "curvkit/common.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <vector>

namespace curvkit {

namespace {

constexpr char DMAT_MAGIC[4] = {'D', 'M', 'A', 'T'};
constexpr unsigned char DMAT_VERSION = 0x01;

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error("cannot open " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    // ignore one trailing blank line
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

std::vector<double> parse_decimal_row(const std::string& line, const std::string& path,
                                      std::size_t line_no) {
    std::vector<double> values;
    const char* p = line.c_str();
    for (;;) {
        char* end = nullptr;
        const double v = std::strtod(p, &end);
        if (end == p)
            throw error(path + ":" + std::to_string(line_no) + ": malformed number near '" +
                        std::string(p).substr(0, 16) + "'");
        values.push_back(v);
        p = end;
        while (*p == ' ' || *p == '\t') ++p;
        if (*p == '\0') break;
        if (*p != ',')
            throw error(path + ":" + std::to_string(line_no) + ": expected ',' near '" +
                        std::string(p).substr(0, 16) + "'");
        ++p;
        while (*p == ' ' || *p == '\t') ++p;
    }
    return values;
}

std::uint64_t to_le64(std::uint64_t v) {
    if constexpr (std::endian::native == std::endian::big) {
        std::uint64_t r = 0;
        for (int i = 0; i < 8; ++i) r = (r << 8) | ((v >> (8 * i)) & 0xff);
        return r;
    }
    return v;
}

distance_matrix load_csv_matrix(const std::string& path) {
    const auto lines = read_lines(path);
    const std::size_t n = lines.size();
    if (n < 2) throw error(path + ": distance matrix needs at least 2 points");

    std::vector<double> full(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = parse_decimal_row(lines[i], path, i + 1);
        if (row.size() != n)
            throw error(path + ":" + std::to_string(i + 1) + ": expected " + std::to_string(n) +
                        " columns, got " + std::to_string(row.size()));
        for (std::size_t j = 0; j < n; ++j) {
            const double v = row[j];
            if (!std::isfinite(v)) throw error(path + ": non-finite entry");
            if (v < 0.0) throw error(path + ": negative distance " + std::to_string(v));
            full[i * n + j] = v;
        }
    }

    double max_entry = 0.0;
    for (double v : full) max_entry = std::max(max_entry, v);
    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(full[i * n + i]) > 1e-12)
            throw error(path + ": nonzero diagonal at row " + std::to_string(i));

    double max_asym = 0.0;
    std::vector<double> tri(n * (n - 1) / 2);
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) {
            max_asym = std::max(max_asym, std::abs(full[i * n + j] - full[j * n + i]));
            tri[distance_matrix::tri_index(i, j)] = 0.5 * (full[i * n + j] + full[j * n + i]);
        }
    if (max_asym > 1e-9 * max_entry)
        warn(path + ": asymmetry up to " + std::to_string(max_asym) +
             " repaired by averaging (d+d^T)/2");

    return distance_matrix::from_lower_triangle(n, std::move(tri));
}

distance_matrix load_binary_matrix(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error("cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, DMAT_MAGIC, 4) != 0)
        throw error(path + ": not a DMAT file");
    unsigned char version = 0;
    in.read(reinterpret_cast<char*>(&version), 1);
    if (!in || version != DMAT_VERSION)
        throw error(path + ": unsupported DMAT version");
    std::uint64_t n_le = 0;
    in.read(reinterpret_cast<char*>(&n_le), 8);
    if (!in) throw error(path + ": truncated header");
    const std::uint64_t n = to_le64(n_le);
    if (n < 2) throw error(path + ": distance matrix needs at least 2 points");

    const std::uint64_t count = n * (n - 1) / 2;
    std::vector<double> tri(count);
    in.read(reinterpret_cast<char*>(tri.data()), static_cast<std::streamsize>(count * 8));
    if (!in) throw error(path + ": truncated payload");
    if constexpr (std::endian::native == std::endian::big) {
        for (double& v : tri) {
            auto bits = std::bit_cast<std::uint64_t>(v);
            v = std::bit_cast<double>(to_le64(bits));
        }
    }
    return distance_matrix::from_lower_triangle(static_cast<std::size_t>(n), std::move(tri));
}

void write_decimal(std::FILE* f, double v, bool leading_comma) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    if (leading_comma) std::fputc(',', f);
    std::fputs(buf, f);
}

struct file_closer {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using unique_file = std::unique_ptr<std::FILE, file_closer>;

unique_file open_for_write(const std::string& path, const char* mode) {
    unique_file f(std::fopen(path.c_str(), mode));
    if (!f) throw error("cannot write " + path);
    return f;
}

} // namespace

distance_matrix load_distance_matrix(const std::string& path, matrix_format format) {
    return format == matrix_format::csv ? load_csv_matrix(path) : load_binary_matrix(path);
}

void save_distance_matrix(const distance_matrix& m, const std::string& path,
                          matrix_format format) {
    if (format == matrix_format::csv) {
        auto f = open_for_write(path, "w");
        const std::size_t n = m.size();
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) write_decimal(f.get(), m(i, j), j > 0);
            std::fputc('\n', f.get());
        }
        return;
    }
    auto f = open_for_write(path, "wb");
    std::fwrite(DMAT_MAGIC, 1, 4, f.get());
    std::fputc(DMAT_VERSION, f.get());
    const std::uint64_t n_le = to_le64(m.size());
    std::fwrite(&n_le, 8, 1, f.get());
    if constexpr (std::endian::native == std::endian::big) {
        for (double v : m.lower_triangle()) {
            const std::uint64_t bits = to_le64(std::bit_cast<std::uint64_t>(v));
            std::fwrite(&bits, 8, 1, f.get());
        }
    } else {
        const auto& tri = m.lower_triangle();
        std::fwrite(tri.data(), 8, tri.size(), f.get());
    }
}

point_cloud load_point_cloud(const std::string& path) {
    const auto lines = read_lines(path);
    point_cloud cloud;
    std::size_t line_no = 0;
    for (const auto& line : lines) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto row = parse_decimal_row(line, path, line_no);
        if (cloud.n_points == 0) {
            cloud.ambient_dim = row.size();
        } else if (row.size() != cloud.ambient_dim) {
            throw error(path + ":" + std::to_string(line_no) + ": inconsistent column count");
        }
        cloud.coordinates.insert(cloud.coordinates.end(), row.begin(), row.end());
        ++cloud.n_points;
    }
    if (cloud.n_points == 0) throw error(path + ": empty point cloud");
    cloud.validate();
    return cloud;
}

void save_point_cloud(const point_cloud& cloud, const std::string& path) {
    auto f = open_for_write(path, "w");
    for (std::size_t i = 0; i < cloud.n_points; ++i) {
        const double* p = cloud.point(i);
        for (std::size_t k = 0; k < cloud.ambient_dim; ++k) write_decimal(f.get(), p[k], k > 0);
        std::fputc('\n', f.get());
    }
}

evaluation_set load_index_set(const std::string& path) {
    const auto lines = read_lines(path);
    evaluation_set set;
    std::size_t line_no = 0;
    for (const auto& line : lines) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        char* end = nullptr;
        const unsigned long long v = std::strtoull(line.c_str(), &end, 10);
        if (end == line.c_str())
            throw error(path + ":" + std::to_string(line_no) + ": malformed index");
        set.indices.push_back(static_cast<std::size_t>(v));
    }
    return set;
}

void save_index_set(const evaluation_set& set, const std::string& path) {
    auto f = open_for_write(path, "w");
    for (std::size_t idx : set.indices) std::fprintf(f.get(), "%zu\n", idx);
}

} // namespace curvkit
