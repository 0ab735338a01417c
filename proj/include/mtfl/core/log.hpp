#pragma once

#include <iostream>
#include <mutex>
#include <sstream>

namespace mtfl::log {

enum class Level { debug = 0, info = 1, warn = 2, error = 3, off = 4 };

Level threshold();
void set_threshold(Level lvl);

namespace detail {
void emit(Level lvl, const std::string &msg);
}

// Diagnostics go to stderr only; artifact files never pass through here,
// so verbosity cannot perturb outputs.
template <typename... Args> void info(Args &&...args) {
    if (threshold() > Level::info)
        return;
    std::ostringstream os;
    (os << ... << args);
    detail::emit(Level::info, os.str());
}

template <typename... Args> void warn(Args &&...args) {
    if (threshold() > Level::warn)
        return;
    std::ostringstream os;
    (os << ... << args);
    detail::emit(Level::warn, os.str());
}

template <typename... Args> void debug(Args &&...args) {
    if (threshold() > Level::debug)
        return;
    std::ostringstream os;
    (os << ... << args);
    detail::emit(Level::debug, os.str());
}

} // namespace mtfl::log
