#pragma once

#include <stdexcept>
#include <string>

namespace weyl {

// Base of every error thrown by the library.  The CLI maps these to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

class UnsupportedError : public Error {
public:
    using Error::Error;
};

class GeometryError : public Error {
public:
    GeometryError(const std::string& what, int node_i, int node_j)
        : Error(what + " at node (" + std::to_string(node_i) + "," + std::to_string(node_j) + ")"),
          i(node_i), j(node_j) {}
    int i, j;
};

class HypothesisError : public Error {
public:
    HypothesisError(const std::string& what, int surface_index, int node)
        : Error(what), surface(surface_index), node(node) {}
    int surface, node;
};

class EmbeddingError : public Error {
public:
    using Error::Error;
};

class SolverError : public Error {
public:
    SolverError(const std::string& what, double residual)
        : Error(what), residual(residual) {}
    double residual;
};

} // namespace weyl
