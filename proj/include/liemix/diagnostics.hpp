#pragma once

#include <cstddef>
#include <functional>
#include <string>

namespace liemix {

using WarningHandler = std::function<void(const std::string& tag, const std::string& message)>;

/// Replaces the process-wide warning sink. The default sink prints the first
/// warning of each tag to stderr and counts the rest silently.
void set_warning_handler(WarningHandler handler);
void reset_warning_handler();
void warn(const std::string& tag, const std::string& message);
std::size_t warning_count();

/// Largest covariance eigenvalue a CGD may have before a "concentration"
/// warning is raised (default 1.0). Diagnostic only.
void set_concentration_bound(double bound);
double concentration_bound();

}  // namespace liemix
