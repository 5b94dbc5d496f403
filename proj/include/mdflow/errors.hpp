#ifndef MDFLOW_ERRORS_HPP
#define MDFLOW_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mdflow {

//! Inconsistent subdomain/mortar structure (bad projections, codimension gaps, ...).
struct TopologyError : std::runtime_error {
    explicit TopologyError(const std::string& what) : std::runtime_error(what) {}
};

//! Degenerate grid geometry (zero measures, zero center-to-face distance, ...).
struct GeometryError : std::runtime_error {
    explicit GeometryError(const std::string& what) : std::runtime_error(what) {}
};

//! Non-finite residual entries or malformed unknown layout during assembly.
struct AssemblyError : std::runtime_error {
    explicit AssemblyError(const std::string& what) : std::runtime_error(what) {}
};

//! File parsing / writing problems, always carrying the offending path or line.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace mdflow

#endif
