#include "liemix/diagnostics.hpp"

#include <atomic>
#include <iostream>
#include <mutex>
#include <set>

namespace liemix {

namespace {

std::mutex g_mutex;
WarningHandler g_handler;
std::set<std::string> g_seen_tags;
std::atomic<std::size_t> g_count{0};
std::atomic<double> g_concentration_bound{1.0};

void default_handler(const std::string& tag, const std::string& message) {
    if (g_seen_tags.insert(tag).second)
        std::cerr << "liemix warning [" << tag << "]: " << message << " (further '" << tag
                  << "' warnings suppressed)\n";
}

}  // namespace

void set_warning_handler(WarningHandler handler) {
    std::lock_guard lock(g_mutex);
    g_handler = std::move(handler);
}

void reset_warning_handler() {
    std::lock_guard lock(g_mutex);
    g_handler = nullptr;
    g_seen_tags.clear();
}

void warn(const std::string& tag, const std::string& message) {
    ++g_count;
    std::lock_guard lock(g_mutex);
    if (g_handler)
        g_handler(tag, message);
    else
        default_handler(tag, message);
}

std::size_t warning_count() { return g_count.load(); }

void set_concentration_bound(double bound) { g_concentration_bound.store(bound); }
double concentration_bound() { return g_concentration_bound.load(); }

}  // namespace liemix
