#include "optomech/diagnostics.hpp"

#include <iostream>
#include <mutex>

namespace optomech {

namespace {

std::mutex& handler_mutex() {
    static std::mutex m;
    return m;
}

WarningHandler& handler() {
    static WarningHandler h = [](const std::string& text) { std::cerr << "warning: " << text << '\n'; };
    return h;
}

}  // namespace

WarningHandler set_warning_handler(WarningHandler next) {
    std::lock_guard lock(handler_mutex());
    WarningHandler previous = std::move(handler());
    handler() = std::move(next);
    return previous;
}

void warn(const std::string& message) {
    WarningHandler h;
    {
        std::lock_guard lock(handler_mutex());
        h = handler();
    }
    if (h) h(message);
}

}  // namespace optomech
