#pragma once

#include <string>

namespace geocox {

/// Reporting format: 9 significant digits, deterministic byte output.
std::string format_double(double v);

/// Data format: 15 significant digits; read-after-write stays within 1e-12.
std::string format_data(double v);

} // namespace geocox
