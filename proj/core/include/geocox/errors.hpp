#pragma once

#include <stdexcept>
#include <string>

namespace geocox {

/// Malformed or inconsistent input data (files, records, labels).
class data_error : public std::runtime_error {
public:
    explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure: undefined likelihood, singular systems, empty grids.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace geocox
