#pragma once

#include <stdexcept>
#include <string>

namespace tsam {

// Error taxonomy. The CLI maps these onto process exit codes:
//   UsageError/ArgumentError/IoError -> 2, NumericError -> 1.
struct DimensionError : std::invalid_argument {
    explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

struct ArgumentError : std::invalid_argument {
    explicit ArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

struct StateError : std::logic_error {
    explicit StateError(const std::string& what) : std::logic_error(what) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tsam
