// environment.hpp
// The Bernoulli(p) space-time field eta(t,x), materialized as packed bits over
// the reachable cone and regenerable site-by-site from a counter-based hash.

#ifndef RHOPATH_ENVIRONMENT_HPP
#define RHOPATH_ENVIRONMENT_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rhopath/lattice.hpp"
#include "rhopath/rng.hpp"

namespace rhopath {

struct EnvParams {
    int d = 1;
    int n = 1;
    double p = 0.5;
    std::uint64_t seed = 0;

    void validate() const; // throws usage_error
};

class ShiftedView;

class Environment {
public:
    // Draws the whole cone. Fails with resource_error if the packed bits would
    // exceed the memory budget.
    static Environment generate(const EnvParams& params);

    const EnvParams& params() const { return params_; }
    int d() const { return params_.d; }
    int n() const { return params_.n; }
    double p() const { return params_.p; }
    std::uint64_t seed() const { return params_.seed; }

    // eta at a cone site; throws usage_error off the cone.
    bool query(int t, std::span<const std::int32_t> x) const;
    bool in_cone(int t, std::span<const std::int32_t> x) const;

    // The underlying i.i.d. field at arbitrary coordinates (not restricted to
    // the cone); what shifted views fall back to.
    bool field_at(std::int64_t t, std::span<const std::int32_t> x) const {
        return hash_open(site_hash(params_.seed, t, x), params_.p);
    }

    ShiftedView shifted_view(int t_shift, std::span<const std::int32_t> x_shift,
                             int horizon = -1, bool allow_regen = true) const;

    // Fast paths for the DP kernels: packed bits of one layer, site order as in
    // LayerGeometry (row-major, bit index = row.bit_off + r).
    std::span<const std::uint64_t> layer_words(int t) const {
        return {words_.data() + layer_word_off_[t], layer_word_off_[t + 1] - layer_word_off_[t]};
    }
    std::uint64_t sites_in_layer(int t) const { return layer_sites_[t]; }
    std::uint64_t total_sites() const;

    // Packed site index within layer t (the serialization order).
    std::uint64_t site_index(int t, std::span<const std::int32_t> x) const;

    void save(const std::string& path) const;
    static Environment load(const std::string& path);

private:
    Environment() = default;
    void init_offsets(); // fills layer tables from params_

    EnvParams params_;
    BallCounts bc_;                            // prefix-ball counts up to radius n
    std::vector<std::uint64_t> cum_;           // C_k(r) tables for site ranking
    std::vector<std::uint64_t> layer_sites_;   // [0..n]
    std::vector<std::size_t> layer_word_off_;  // [1..n+1]
    std::vector<std::uint64_t> words_;

    std::uint64_t cum(int k, int r) const {
        if (r < 0) return 0;
        return cum_[static_cast<std::size_t>(k) * (params_.n + 1) + r];
    }
};

// Read-only affine relabeling of an environment: query(t, x) maps to the
// parent field at (t + t_shift, x + x_shift). Backed by parent storage when
// the shifted cone sits inside the parent slab, by hash regeneration
// otherwise.
class ShiftedView {
public:
    ShiftedView(const Environment& base, int t_shift, std::span<const std::int32_t> x_shift,
                int horizon, bool allow_regen);

    int d() const { return base_->d(); }
    int horizon() const { return horizon_; }
    bool uses_parent_storage() const { return stored_; }

    // (t, x) in view coordinates; must lie in the view's own cone.
    bool query(int t, std::span<const std::int32_t> x) const;

    // Composition: shifting a view shifts offsets additively.
    ShiftedView shifted_view(int t_shift, std::span<const std::int32_t> x_shift,
                             int horizon = -1, bool allow_regen = true) const;

private:
    const Environment* base_;
    int t_shift_;
    std::vector<std::int32_t> x_shift_;
    int horizon_;
    bool stored_;
};

// q(x) = 1 - (p^c + (1-p)^c) with c = |I(0,x)|, the number of lattice points
// adjacent to both 0 and x; c is 2d, 2 or 1 for x = 0, |x|_inf = 1, |x|_inf = 2.
// x must be reachable in two steps.
double m_event_probability(int d, double p, std::span<const std::int32_t> x);

} // namespace rhopath

#endif
