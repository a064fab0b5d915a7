#include "curvkit/common.hpp"

#include <atomic>
#include <cstdio>

namespace curvkit {

namespace {

void default_handler(const std::string& msg) {
    std::fprintf(stderr, "[curvkit] warning: %s\n", msg.c_str());
}

std::atomic<warning_handler> g_handler{&default_handler};

} // namespace

warning_handler set_warning_handler(warning_handler h) {
    return g_handler.exchange(h ? h : &default_handler);
}

void warn(const std::string& msg) {
    g_handler.load()(msg);
}

} // namespace curvkit
