#include "mtfl/core/log.hpp"

#include <atomic>

namespace mtfl::log {

namespace {
std::atomic<Level> g_threshold{Level::info};
std::mutex g_mutex;

const char *tag(Level lvl) {
    switch (lvl) {
    case Level::debug:
        return "debug";
    case Level::info:
        return "info";
    case Level::warn:
        return "warn";
    case Level::error:
        return "error";
    default:
        return "?";
    }
}
} // namespace

Level threshold() { return g_threshold.load(std::memory_order_relaxed); }

void set_threshold(Level lvl) { g_threshold.store(lvl, std::memory_order_relaxed); }

namespace detail {
void emit(Level lvl, const std::string &msg) {
    std::lock_guard<std::mutex> lock(g_mutex);
    std::cerr << "[mtfl:" << tag(lvl) << "] " << msg << "\n";
}
} // namespace detail

} // namespace mtfl::log
