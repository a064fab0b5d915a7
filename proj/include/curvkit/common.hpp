#pragma once

#include <stdexcept>
#include <string>

namespace curvkit {

/// Error type thrown by all loaders, validators, and estimators.
struct error : std::runtime_error {
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Warnings (symmetrization repairs, duplicate points, truncated schedules)
/// go through a process-wide handler so callers and tests can intercept them.
/// The default handler prints to stderr.
using warning_handler = void (*)(const std::string& msg);

warning_handler set_warning_handler(warning_handler h);
void warn(const std::string& msg);

} // namespace curvkit
