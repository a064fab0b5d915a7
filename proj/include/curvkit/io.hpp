#pragma once

#include "curvkit/distance_matrix.hpp"

#include <string>

namespace curvkit {

enum class matrix_format { csv, binary };

/// Loads a distance matrix. CSV input is N rows x N comma-separated decimals
/// (LF or CRLF); asymmetry is repaired by averaging (d + d^T)/2 with a warning
/// when the max asymmetry exceeds 1e-9 of the largest entry. Binary input is
/// the DMAT format below. Throws on malformed files, negative entries,
/// diagonal entries beyond 1e-12, or N < 2.
distance_matrix load_distance_matrix(const std::string& path, matrix_format format);

/// CSV: N lines of N comma-separated decimals, LF line endings.
/// Binary (DMAT): magic "DMAT", version byte 0x01, uint64 little-endian N,
/// then N(N-1)/2 IEEE-754 little-endian doubles (row-major lower triangle).
/// Binary save/load round-trips bit-exactly.
void save_distance_matrix(const distance_matrix& m, const std::string& path,
                          matrix_format format);

/// N lines x D comma-separated decimals; lines starting with '#' are skipped.
point_cloud load_point_cloud(const std::string& path);
void save_point_cloud(const point_cloud& cloud, const std::string& path);

/// One 0-based index per line; '#' comments and blank lines are skipped.
evaluation_set load_index_set(const std::string& path);
void save_index_set(const evaluation_set& set, const std::string& path);

} // namespace curvkit
