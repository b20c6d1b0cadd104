// errors.cpp

#include "rhopath/errors.hpp"

#include <cstdlib>

namespace rhopath {

namespace {
std::uint64_t g_budget = 0; // 0 = uninitialized

std::uint64_t initial_budget() {
    if (const char* env = std::getenv("RHO_PATHS_MEM_BUDGET")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0' && v > 0) return v;
    }
    return std::uint64_t{2} << 30; // 2 GiB
}
} // namespace

std::uint64_t memory_budget() {
    if (g_budget == 0) g_budget = initial_budget();
    return g_budget;
}

void set_memory_budget(std::uint64_t bytes) { g_budget = bytes; }

void check_budget(std::uint64_t bytes, const std::string& what) {
    const std::uint64_t budget = memory_budget();
    if (bytes > budget) {
        throw resource_error(what + " needs " + std::to_string(bytes) +
                             " bytes, over the memory budget of " + std::to_string(budget) +
                             " bytes (raise RHO_PATHS_MEM_BUDGET or --mem-budget)");
    }
}

} // namespace rhopath
