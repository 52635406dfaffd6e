#pragma once

#include <functional>
#include <string>

namespace optomech {

using WarningHandler = std::function<void(const std::string&)>;

/// Installs a process-wide warning sink and returns the previous one. The
/// default writes "warning: <text>" to stderr. Handlers must be thread-safe.
WarningHandler set_warning_handler(WarningHandler handler);

void warn(const std::string& message);

}  // namespace optomech
