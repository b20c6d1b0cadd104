// pathcount.hpp
// Exact combinatorics of open-vertex counts along oriented paths: the table
// Q_n(k), tail counts R_n(rho), and the support extremes, plus a brute-force
// enumerator kept as the independent oracle.

#ifndef RHOPATH_PATHCOUNT_HPP
#define RHOPATH_PATHCOUNT_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <vector>

#include "rhopath/environment.hpp"

namespace rhopath {

using BigInt = boost::multiprecision::cpp_int;

struct CountTable {
    int d = 0;
    int n = 0;
    double p = 0.0;
    std::uint64_t seed = 0;
    std::vector<BigInt> counts; // Q_n(k), k = 0..n

    BigInt total() const;
};

struct HnExtremes {
    int max_h = 0;
    int min_h = 0;
};

// Layered DP with per-site count vectors trimmed to the feasible k-range.
// Exact integers; fails with resource_error when the two live layers would
// not fit the memory budget (use the scalar polymer DP at that size).
CountTable count_exact(const Environment& env);

// Enumerates all (2d)^n paths; requires (2d)^n <= 1e7.
CountTable brute_force_count(const Environment& env);

// Tail count: sum_{k >= n rho} Q_n(k) for rho >= p, sum_{k <= n rho} otherwise.
BigInt r_n(const CountTable& table, double p, double rho);

// Support endpoints of the table.
HnExtremes extremes(const CountTable& table);

// Same endpoints from max-plus / min-plus recursions, usable when the exact
// table is out of reach.
HnExtremes extremes_dp(const Environment& env);

// Natural log of a positive big integer.
double log_big(const BigInt& v);

} // namespace rhopath

#endif
