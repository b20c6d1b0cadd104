// errors.hpp
// Error taxonomy shared by all modules. The CLI maps these onto exit codes:
// usage -> 2, resource -> 3, numerical -> 4.

#ifndef RHOPATH_ERRORS_HPP
#define RHOPATH_ERRORS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rhopath {

// Bad arguments or contract violations (out-of-cone query, rho out of range, ...).
class usage_error : public std::invalid_argument {
public:
    explicit usage_error(const std::string& what) : std::invalid_argument(what) {}
};

// A computation would exceed the configured memory budget.
class resource_error : public std::runtime_error {
public:
    explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

// An iteration failed to converge or a value left its valid domain.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

// Process-wide memory budget in bytes. Default 2 GiB, overridable via the
// RHO_PATHS_MEM_BUDGET environment variable or the CLI --mem-budget flag.
std::uint64_t memory_budget();
void set_memory_budget(std::uint64_t bytes);

// Throws resource_error naming the budget if `bytes` exceeds it.
void check_budget(std::uint64_t bytes, const std::string& what);

} // namespace rhopath

#endif
