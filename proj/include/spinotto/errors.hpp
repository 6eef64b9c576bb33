#pragma once

#include <stdexcept>
#include <string>

namespace spinotto {

// All library errors derive from Error and carry a short machine-readable
// category that the CLI maps to exit codes.

class Error : public std::runtime_error {
public:
    Error(std::string category, const std::string& what)
        : std::runtime_error(what), category_(std::move(category)) {}
    const std::string& category() const { return category_; }

private:
    std::string category_;
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error("domain", what) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error("config", what) {}
};

class SimulationError : public Error {
public:
    explicit SimulationError(const std::string& what) : Error("simulation", what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error("io", what) {}
};

} // namespace spinotto
