#pragma once

#include <stdexcept>
#include <string>

namespace fwi {

// Exit-code categories used by the CLI: 2 = config, 3 = solver, 4 = missing artifact.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ArtifactError : std::runtime_error {
    explicit ArtifactError(const std::string& msg) : std::runtime_error(msg) {}
};

struct UnstableConfig : SolverError {
    explicit UnstableConfig(const std::string& msg) : SolverError(msg) {}
};

struct NonPositiveGamma : SolverError {
    explicit NonPositiveGamma(const std::string& msg) : SolverError(msg) {}
};

struct OutOfBounds : SolverError {
    explicit OutOfBounds(const std::string& msg) : SolverError(msg) {}
};

struct ShapeMismatch : SolverError {
    explicit ShapeMismatch(const std::string& msg) : SolverError(msg) {}
};

struct CheckpointMismatch : ArtifactError {
    explicit CheckpointMismatch(const std::string& msg) : ArtifactError(msg) {}
};

}  // namespace fwi
