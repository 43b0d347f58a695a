#ifndef MAPPRED_ERRORS_HPP
#define MAPPRED_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mappred {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string &msg) : std::runtime_error(msg) {}
};

struct InvalidPoseError : std::runtime_error {
    explicit InvalidPoseError(const std::string &msg) : std::runtime_error(msg) {}
};

struct ModelError : std::runtime_error {
    explicit ModelError(const std::string &msg) : std::runtime_error(msg) {}
};

struct InfeasiblePlanError : std::runtime_error {
    explicit InfeasiblePlanError(const std::string &msg) : std::runtime_error(msg) {}
};

struct SmoothingError : std::runtime_error {
    explicit SmoothingError(const std::string &msg) : std::runtime_error(msg) {}
};

struct ProfileInfeasibleError : std::runtime_error {
    explicit ProfileInfeasibleError(const std::string &msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string &msg) : std::runtime_error(msg) {}
};

} // namespace mappred

#endif
