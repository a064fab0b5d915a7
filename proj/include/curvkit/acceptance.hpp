#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

namespace curvkit {

struct criterion_result {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string details; // measured values, one clause per check
    double seconds = 0.0;
};

struct acceptance_options {
    std::size_t count = 4000;   // sample size for the preset-driven criteria
    std::uint64_t seed = 0;     // 0 = the presets' fixed seeds; else mixed in
    std::string output_dir;     // when set, per-preset artifacts are written
};

/// Runs the requested criteria in order; an empty list yields an empty
/// report (use all_criteria() for the full suite). Failures are reported,
/// not thrown.
std::vector<criterion_result> run_acceptance(const acceptance_options& opts,
                                             const std::vector<int>& criteria);

/// All ten criterion ids, in order.
std::vector<int> all_criteria();

/// One "PASS"/"FAIL" line per criterion.
void print_acceptance(const std::vector<criterion_result>& results, std::FILE* out);

std::string acceptance_json(const std::vector<criterion_result>& results);

bool acceptance_passed(const std::vector<criterion_result>& results);

} // namespace curvkit
