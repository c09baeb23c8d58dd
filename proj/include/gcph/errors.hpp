#pragma once

#include <stdexcept>
#include <string>

namespace gcph {

// Invalid model/grid/schema configuration (bad knot grid, rank-deficient
// design, unwritable schema, ...).
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed caller input (dimension mismatch, non-finite values, bad CSV cell).
class input_error : public std::runtime_error {
public:
    explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure during optimization (NaN loss, divergence).
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A requested metric has no defined value (no comparable pairs, zero
// censoring-survival weight). Callers report these per-cell, not fatally.
class undefined_metric : public std::runtime_error {
public:
    explicit undefined_metric(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace gcph
