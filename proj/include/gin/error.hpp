#pragma once

#include <stdexcept>
#include <string>

namespace gin {

// Malformed or unusable input data (bad CSV cell, non-finite value, ...).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// A numerical routine could not produce a trustworthy answer
// (singular system, failed SVD, ...).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gin
