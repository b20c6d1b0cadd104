// pathcount.cpp

#include "rhopath/pathcount.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

#include "dp_sweep.hpp"
#include "rhopath/errors.hpp"

namespace rhopath {

BigInt CountTable::total() const {
    BigInt s = 0;
    for (const auto& c : counts) s += c;
    return s;
}

double log_big(const BigInt& v) {
    if (v <= 0) throw usage_error("log of a non-positive integer");
    const unsigned bits = boost::multiprecision::msb(v);
    if (bits < 900) return std::log(v.convert_to<double>());
    const BigInt shifted = v >> (bits - 512);
    return std::log(shifted.convert_to<double>()) + (bits - 512) * std::log(2.0);
}

// ---- exact layered DP ---------------------------------------------------

namespace {

struct SiteVec {
    std::int32_t kmin = 0;
    std::vector<BigInt> c;
};

} // namespace

CountTable count_exact(const Environment& env) {
    const int d = env.d(), n = env.n();
    BallCounts bc(d > 1 ? d - 1 : 0, n);

    // two live layers of per-site vectors; vectors span the feasible k-range,
    // which is at most t/2 + 1 entries deep into the DP on average
    const double last = static_cast<double>(layer_site_count(d, n, bc));
    const double est = 2.0 * last * (n / 2.0 + 2.0) * (sizeof(BigInt) + 16.0);
    check_budget(static_cast<std::uint64_t>(est),
                 "exact count table (use the scalar polymer DP at this size)");

    LayerGeometry gin, gout;
    gin.build(d, 0, bc);
    std::vector<SiteVec> in(1), out;
    in[0].kmin = 0;
    in[0].c.assign(1, BigInt(1));

    for (int t = 1; t <= n; ++t) {
        gout.build(d, t, bc);
        NeighborCursors cur(gin, gout);
        out.assign(gout.site_count(), SiteVec{});
        const auto words = env.layer_words(t);
        for (std::size_t i = 0; i < gout.row_count(); ++i) {
            const auto& plan = cur.advance(i);
            const Row& orow = gout.row(i);
            // collect contributing input (row, read-shift) pairs once per row
            struct Src {
                const Row* row;
                std::int32_t shift;
            };
            Src srcs[16];
            int nsrc = 0;
            if (plan.same >= 0) {
                srcs[nsrc++] = {&gin.row(plan.same), -1}; // x_d - 1
                srcs[nsrc++] = {&gin.row(plan.same), 0};  // x_d + 1
            }
            for (int j = 0; j < plan.nb_count; ++j)
                if (plan.nb[j] >= 0) srcs[nsrc++] = {&gin.row(plan.nb[j]), plan.nb_shift[j]};

            for (std::int32_t r = 0; r < orow.len; ++r) {
                const std::uint64_t b = orow.bit_off + static_cast<std::uint64_t>(r);
                const int eta = (words[b >> 6] >> (b & 63)) & 1;
                SiteVec& o = out[orow.bit_off + r];
                std::int32_t lo = std::numeric_limits<std::int32_t>::max(), hi = -1;
                for (int s = 0; s < nsrc; ++s) {
                    const std::int32_t q = r + srcs[s].shift;
                    if (q < 0 || q >= srcs[s].row->len) continue;
                    const SiteVec& sv = in[srcs[s].row->bit_off + q];
                    if (sv.c.empty()) continue;
                    lo = std::min(lo, sv.kmin);
                    hi = std::max(hi, sv.kmin + static_cast<std::int32_t>(sv.c.size()) - 1);
                }
                if (hi < 0) continue; // unreachable (never happens on the cone)
                o.kmin = lo + eta;
                o.c.assign(hi - lo + 1, BigInt(0));
                for (int s = 0; s < nsrc; ++s) {
                    const std::int32_t q = r + srcs[s].shift;
                    if (q < 0 || q >= srcs[s].row->len) continue;
                    const SiteVec& sv = in[srcs[s].row->bit_off + q];
                    for (std::size_t j = 0; j < sv.c.size(); ++j)
                        o.c[sv.kmin - lo + j] += sv.c[j];
                }
            }
        }
        in.swap(out);
        std::swap(gin, gout);
    }

    CountTable table{d, n, env.p(), env.seed(), std::vector<BigInt>(n + 1, BigInt(0))};
    for (const auto& sv : in)
        for (std::size_t j = 0; j < sv.c.size(); ++j) table.counts[sv.kmin + j] += sv.c[j];
    return table;
}

// ---- brute force oracle -------------------------------------------------

CountTable brute_force_count(const Environment& env) {
    const int d = env.d(), n = env.n();
    double total = 1;
    for (int t = 0; t < n; ++t) total *= 2 * d;
    if (total > 1e7) throw usage_error("brute force requires (2d)^n <= 1e7");

    // per-layer dense box arrays for O(1) mark lookups along the walk
    BallCounts bc(d > 1 ? d - 1 : 0, n);
    std::vector<std::vector<std::uint8_t>> box(n + 1);
    std::vector<std::int64_t> stride(d);
    LayerGeometry g;
    for (int t = 1; t <= n; ++t) {
        const std::int64_t side = 2 * t + 1;
        std::int64_t vol = 1;
        for (int i = 0; i < d; ++i) vol *= side;
        box[t].assign(vol, 0);
        g.build(d, t, bc);
        const auto words = env.layer_words(t);
        for (std::size_t i = 0; i < g.row_count(); ++i) {
            const Row& row = g.row(i);
            const auto pre = g.prefix(i);
            std::int64_t base = 0;
            for (int a = 0; a < d - 1; ++a) base = base * side + (pre[a] + t);
            for (std::int32_t r = 0; r < row.len; ++r) {
                const std::uint64_t b = row.bit_off + static_cast<std::uint64_t>(r);
                const int xd = -row.half_l + 2 * r;
                box[t][base * side + (xd + t)] =
                    static_cast<std::uint8_t>((words[b >> 6] >> (b & 63)) & 1);
            }
        }
    }

    std::vector<std::uint64_t> hist(n + 1, 0);
    std::vector<std::int32_t> x(d, 0);
    struct Walk {
        int d, n;
        std::vector<std::int32_t>& x;
        const std::vector<std::vector<std::uint8_t>>& box;
        std::vector<std::uint64_t>& hist;
        void go(int t, int h) {
            if (t == n) {
                ++hist[h];
                return;
            }
            const int tt = t + 1;
            const std::int64_t side = 2 * tt + 1;
            for (int mv = 0; mv < 2 * d; ++mv) {
                const int axis = mv >> 1;
                const int sgn = (mv & 1) ? -1 : 1;
                x[axis] += sgn;
                std::int64_t addr = 0;
                for (int a = 0; a < d; ++a) addr = addr * side + (x[a] + tt);
                go(tt, h + box[tt][addr]);
                x[axis] -= sgn;
            }
        }
    } walk{d, n, x, box, hist};
    walk.go(0, 0);

    CountTable table{d, n, env.p(), env.seed(), std::vector<BigInt>(n + 1, BigInt(0))};
    for (int k = 0; k <= n; ++k) table.counts[k] = hist[k];
    return table;
}

// ---- tails and extremes -------------------------------------------------

BigInt r_n(const CountTable& table, double p, double rho) {
    if (!(rho >= 0.0) || !(rho <= 1.0)) throw usage_error("rho must lie in [0, 1]");
    const int n = table.n;
    BigInt s = 0;
    if (rho >= p) {
        const int k0 = static_cast<int>(std::ceil(n * rho - 1e-9));
        for (int k = std::max(k0, 0); k <= n; ++k) s += table.counts[k];
    } else {
        const int k1 = static_cast<int>(std::floor(n * rho + 1e-9));
        for (int k = 0; k <= std::min(k1, n); ++k) s += table.counts[k];
    }
    return s;
}

HnExtremes extremes(const CountTable& table) {
    int lo = -1, hi = -1;
    for (int k = 0; k <= table.n; ++k) {
        if (table.counts[k] > 0) {
            if (lo < 0) lo = k;
            hi = k;
        }
    }
    if (lo < 0) throw usage_error("empty count table");
    return HnExtremes{hi, lo};
}

// ---- max-plus / min-plus sweep -------------------------------------------

namespace {

class ExtremeKernel {
public:
    static constexpr std::int32_t kAbsentMax = std::numeric_limits<std::int32_t>::min() / 4;
    static constexpr std::int32_t kAbsentMin = std::numeric_limits<std::int32_t>::max() / 4;

    void alloc(std::uint64_t padded, std::int32_t max_row_len) {
        check_budget(padded * 2 * 2 * sizeof(std::int32_t), "extremes DP layer buffers");
        for (int h = 0; h < 2; ++h) {
            mx_[h].assign(padded, kAbsentMax);
            mn_[h].assign(padded, kAbsentMin);
        }
        zmax_.assign(static_cast<std::uint64_t>(max_row_len) + 2, kAbsentMax);
        zmin_.assign(static_cast<std::uint64_t>(max_row_len) + 2, kAbsentMin);
    }
    void init_origin(const LayerGeometry& g0) {
        cur_ = 0;
        mx_[0][g0.row(0).val_off] = 0;
        mn_[0][g0.row(0).val_off] = 0;
    }
    void begin_layer(int) {
        cur_ ^= 1;
        best_max_ = kAbsentMax;
        best_min_ = kAbsentMin;
    }
    void row(const RowIO& io) {
        const std::int64_t len = io.out->len;
        std::int32_t* omax = mx_[cur_].data() + io.out->val_off;
        std::int32_t* omin = mn_[cur_].data() + io.out->val_off;
        const std::int32_t* pmax = mx_[cur_ ^ 1].data();
        const std::int32_t* pmin = mn_[cur_ ^ 1].data();
        const std::int32_t* smx =
            io.same_off >= 0 ? pmax + io.same_off : zmax_.data() + 1;
        const std::int32_t* smn =
            io.same_off >= 0 ? pmin + io.same_off : zmin_.data() + 1;
        for (std::int64_t r = 0; r < len; ++r) {
            omax[r] = std::max(smx[r - 1], smx[r]);
            omin[r] = std::min(smn[r - 1], smn[r]);
        }
        for (int j = 0; j < io.nb_count; ++j) {
            const bool ok = io.nb_off[j] >= 0;
            const std::int32_t* nmx = ok ? pmax + io.nb_off[j] + io.nb_shift[j] : zmax_.data() + 1;
            const std::int32_t* nmn = ok ? pmin + io.nb_off[j] + io.nb_shift[j] : zmin_.data() + 1;
            for (std::int64_t r = 0; r < len; ++r) {
                omax[r] = std::max(omax[r], nmx[r]);
                omin[r] = std::min(omin[r], nmn[r]);
            }
        }
        for (std::int64_t r = 0; r < len; ++r) {
            const std::uint64_t b = io.bit0 + static_cast<std::uint64_t>(r);
            const std::int32_t eta = (io.bits[b >> 6] >> (b & 63)) & 1;
            omax[r] += eta;
            omin[r] += eta;
            best_max_ = std::max(best_max_, omax[r]);
            best_min_ = std::min(best_min_, omin[r]);
        }
        omax[-1] = kAbsentMax;
        omax[len] = kAbsentMax;
        omin[-1] = kAbsentMin;
        omin[len] = kAbsentMin;
    }
    void end_layer(int) {}

    std::int32_t best_max() const { return best_max_; }
    std::int32_t best_min() const { return best_min_; }

private:
    std::vector<std::int32_t> mx_[2], mn_[2], zmax_, zmin_;
    int cur_ = 0;
    std::int32_t best_max_ = 0, best_min_ = 0;
};

} // namespace

HnExtremes extremes_dp(const Environment& env) {
    ExtremeKernel kernel;
    dp::sweep(env, env.n(), kernel);
    return HnExtremes{kernel.best_max(), kernel.best_min()};
}

} // namespace rhopath
