// dp_sweep.hpp
// Internal layer-sweep driver shared by the counting and partition-function
// kernels. The driver walks layers 1..n, resolves for every output row the
// up-to-six input rows it reads, and hands the kernel a RowIO descriptor.
// Kernels own their ping-pong value buffers; a row is processed as a few
// contiguous streaming passes (rows fit L1), then one indexed pass applies
// the per-site multiplier, tracks the running maximum for the per-layer
// renormalization, and accumulates the layer sum in fixed row order, so
// results never depend on scheduling.
//
// Renormalization convention: stored(t) = true(t) * exp(-C_t), where
// C_t = sum_{tau < t} ln M_tau and M_tau is the max norm over layer tau.
// The rescale by 1/M_t is folded into the multipliers of layer t+1, so
// values stay O(1) with no separate scaling pass. ln Z at horizon t is
// ln(layer-t sum) + C_t, valid at every intermediate t (nested horizons).

#ifndef RHOPATH_DP_SWEEP_HPP
#define RHOPATH_DP_SWEEP_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "rhopath/environment.hpp"
#include "rhopath/errors.hpp"
#include "rhopath/lattice.hpp"

namespace rhopath::dp {

struct RowIO {
    const Row* out;
    std::int64_t same_off; // val_off of the same-prefix input row, -1 if absent
    std::int64_t nb_off[14];
    std::int32_t nb_shift[14];
    int nb_count;
    const std::uint64_t* bits;
    std::uint64_t bit0;
};

template <class Kernel>
void sweep(const Environment& env, int n, Kernel& kernel) {
    const int d = env.d();
    if (n < 1 || n > env.n()) throw usage_error("sweep horizon out of range");
    BallCounts bc(d > 1 ? d - 1 : 0, n);

    // padded size is monotone in t, so layer n bounds both buffers
    std::uint64_t sites_n = 0;
    for (int s = 0; s <= n; ++s) sites_n += bc(d - 1, s);
    const std::uint64_t rows_n = bc(d - 1, n);
    kernel.alloc(sites_n + 2 * rows_n, n + 1);

    LayerGeometry gin, gout;
    gin.build(d, 0, bc);
    kernel.init_origin(gin);

    RowIO io;
    for (int t = 1; t <= n; ++t) {
        gout.build(d, t, bc);
        NeighborCursors cur(gin, gout);
        kernel.begin_layer(t);
        io.bits = env.layer_words(t).data();
        const std::size_t nrows = gout.row_count();
        for (std::size_t i = 0; i < nrows; ++i) {
            const auto& plan = cur.advance(i);
            io.out = &gout.row(i);
            io.same_off = plan.same >= 0 ? gin.row(plan.same).val_off : -1;
            io.nb_count = plan.nb_count;
            for (int j = 0; j < plan.nb_count; ++j) {
                io.nb_off[j] = plan.nb[j] >= 0 ? gin.row(plan.nb[j]).val_off : -1;
                io.nb_shift[j] = plan.nb_shift[j];
            }
            io.bit0 = io.out->bit_off;
            kernel.row(io);
        }
        kernel.end_layer(t);
        std::swap(gin, gout);
    }
}

// ---- streaming pass helpers (auto-vectorized) ---------------------------

template <class S>
inline void pass_pair(S* __restrict dst, const S* __restrict a, const S* __restrict b,
                      std::int64_t count) {
    for (std::int64_t i = 0; i < count; ++i) dst[i] = a[i] + b[i];
}

template <class S>
inline void pass_add(S* __restrict dst, const S* __restrict a, std::int64_t count) {
    for (std::int64_t i = 0; i < count; ++i) dst[i] += a[i];
}

// Sums the six neighbour streams of one row into the output plane.
template <class S>
inline void gather_plane(S* __restrict out, const S* prev, const S* zero, const RowIO& io,
                         std::int64_t lanes) {
    const std::int64_t cnt = io.out->len * lanes;
    const S* sm = io.same_off >= 0 ? prev + io.same_off * lanes : zero + lanes;
    pass_pair(out, sm - lanes, sm, cnt);
    for (int j = 0; j < io.nb_count; ++j) {
        const S* nb = io.nb_off[j] >= 0 ? prev + (io.nb_off[j] + io.nb_shift[j]) * lanes
                                        : zero + lanes;
        pass_add(out, nb, cnt);
    }
}

// Tracks ln Z per lane across layers: layer sums (stored units), the C_t
// ledger, and the continuously accumulated phase.
class LaneLog {
public:
    void reset(int lanes) {
        lanes_ = lanes;
        c_.assign(1, std::vector<double>(lanes, 0.0));
        sums_.assign(1, std::vector<std::complex<double>>(lanes, {1.0, 0.0}));
        accum_.assign(lanes, 0.0);
    }
    void push_layer(const std::complex<double>* layer_sum, const double* max_norm, int t) {
        sums_.emplace_back(layer_sum, layer_sum + lanes_);
        c_.emplace_back(accum_);
        for (int k = 0; k < lanes_; ++k) {
            if (!(max_norm[k] > 0.0))
                throw numerical_error("all-zero layer at t=" + std::to_string(t) + " (lane " +
                                      std::to_string(k) + ")");
            accum_[k] += std::log(max_norm[k]);
        }
    }
    // scale to fold into the next layer's multipliers
    double inv_scale(int k, const double* max_norm) const { return 1.0 / max_norm[k]; }

    std::complex<double> sum(int t, int k) const { return sums_[t][k]; }
    double c(int t, int k) const { return c_[t][k]; }

    std::complex<double> log_z(int t, int k, bool* continuous = nullptr) const {
        double theta = 0.0;
        bool ok = true;
        std::complex<double> prev(1.0, 0.0);
        for (int tau = 1; tau <= t; ++tau) {
            const auto s = sums_[tau][k];
            if (s == std::complex<double>(0.0, 0.0) || prev == std::complex<double>(0.0, 0.0)) {
                ok = false;
                break;
            }
            theta += std::arg(s / prev);
            prev = s;
        }
        const auto st = sums_[t][k];
        if (!ok) theta = std::arg(st);
        if (continuous) *continuous = ok;
        return {std::log(std::abs(st)) + c_[t][k], theta};
    }

private:
    int lanes_ = 0;
    std::vector<std::vector<double>> c_;
    std::vector<std::vector<std::complex<double>>> sums_;
    std::vector<double> accum_;
};

// ---- value kernel -------------------------------------------------------
// K lanes per site, one inverse temperature per lane. CPLX selects separated
// re/im planes. S = float serves the bandwidth-bound sweeps, S = double the
// precision-critical ones; layer sums always accumulate in double.

template <class S, bool CPLX, int K>
class ValueKernel {
public:
    void set_weights(const std::complex<double>* w, int count) {
        lanes_ = count;
        for (int k = 0; k < count; ++k) w_[k] = w[k];
        for (int k = count; k < K; ++k) w_[k] = w[count - 1];
    }

    void alloc(std::uint64_t padded, std::int32_t max_row_len) {
        const std::uint64_t scalars = padded * K;
        check_budget(scalars * (CPLX ? 2 : 1) * 2 * sizeof(S), "partition DP layer buffers");
        for (int h = 0; h < 2; ++h) {
            re_[h].assign(scalars, S(0));
            if (CPLX) im_[h].assign(scalars, S(0));
        }
        zero_.assign(static_cast<std::uint64_t>(max_row_len + 2) * K, S(0));
    }

    void init_origin(const LayerGeometry& g0) {
        cur_ = 0;
        const std::int64_t off = g0.row(0).val_off * K;
        for (int k = 0; k < K; ++k) re_[0][off + k] = S(1);
        log_.reset(K);
        for (int k = 0; k < K; ++k) {
            m0_re_[k] = S(1);
            m0_im_[k] = S(0);
            m1_re_[k] = static_cast<S>(w_[k].real());
            m1_im_[k] = static_cast<S>(w_[k].imag());
        }
    }

    void begin_layer(int) {
        cur_ ^= 1;
        for (int k = 0; k < K; ++k) {
            mx_[k] = 0.0;
            acc_re_[k] = 0.0;
            acc_im_[k] = 0.0;
        }
    }

    void row(const RowIO& io) {
        const std::int64_t len = io.out->len;
        const std::int64_t cnt = len * K;
        S* __restrict ore = re_[cur_].data() + io.out->val_off * K;
        gather_plane(ore, re_[cur_ ^ 1].data(), zero_.data(), io, K);
        S* __restrict oim = nullptr;
        if constexpr (CPLX) {
            oim = im_[cur_].data() + io.out->val_off * K;
            gather_plane(oim, im_[cur_ ^ 1].data(), zero_.data(), io, K);
        }
        for (std::int64_t r = 0; r < len; ++r) {
            const std::uint64_t b = io.bit0 + static_cast<std::uint64_t>(r);
            const bool open = (io.bits[b >> 6] >> (b & 63)) & 1;
            const S* mre = open ? m1_re_ : m0_re_;
            if constexpr (CPLX) {
                const S* mim = open ? m1_im_ : m0_im_;
                for (int k = 0; k < K; ++k) {
                    const S ar = ore[r * K + k], ai = oim[r * K + k];
                    const S vr = ar * mre[k] - ai * mim[k];
                    const S vi = ar * mim[k] + ai * mre[k];
                    ore[r * K + k] = vr;
                    oim[r * K + k] = vi;
                    acc_re_[k] += vr;
                    acc_im_[k] += vi;
                    const double a =
                        std::abs(static_cast<double>(vr)) + std::abs(static_cast<double>(vi));
                    if (a > mx_[k]) mx_[k] = a;
                }
            } else {
                for (int k = 0; k < K; ++k) {
                    const S v = ore[r * K + k] * mre[k];
                    ore[r * K + k] = v;
                    acc_re_[k] += static_cast<double>(v);
                    const double a = std::abs(static_cast<double>(v));
                    if (a > mx_[k]) mx_[k] = a;
                }
            }
        }
        for (int k = 0; k < K; ++k) {
            ore[-K + k] = S(0);
            ore[cnt + k] = S(0);
        }
        if constexpr (CPLX) {
            for (int k = 0; k < K; ++k) {
                oim[-K + k] = S(0);
                oim[cnt + k] = S(0);
            }
        }
    }

    void end_layer(int t) {
        std::complex<double> s[K];
        for (int k = 0; k < K; ++k) s[k] = {acc_re_[k], acc_im_[k]};
        log_.push_layer(s, mx_, t);
        for (int k = 0; k < K; ++k) {
            const double inv = 1.0 / mx_[k];
            m0_re_[k] = static_cast<S>(inv);
            m0_im_[k] = S(0);
            m1_re_[k] = static_cast<S>(w_[k].real() * inv);
            m1_im_[k] = static_cast<S>(w_[k].imag() * inv);
        }
    }

    int lanes() const { return lanes_; }
    std::complex<double> log_z(int t, int k, bool* continuous = nullptr) const {
        return log_.log_z(t, k, continuous);
    }

private:
    std::complex<double> w_[K];
    std::vector<S> re_[2], im_[2], zero_;
    int cur_ = 0;
    int lanes_ = K;
    S m0_re_[K], m0_im_[K], m1_re_[K], m1_im_[K];
    double mx_[K], acc_re_[K], acc_im_[K];
    LaneLog log_;
};

// ---- derivative kernel --------------------------------------------------
// Propagates (z, dz/dbeta, d2z/dbeta2) per site; single lane. For a site with
// mark eta and neighbour sums (A, A', A''):
//   z = m A,  z' = m (A' + eta A),  z'' = m (A'' + 2 eta A' + eta A),
// with m = s w^eta (eta^2 = eta for marks in {0,1}).

template <class S, bool CPLX>
class TripleKernel {
public:
    void set_beta(std::complex<double> beta) { w_ = std::exp(beta); }

    void alloc(std::uint64_t padded, std::int32_t max_row_len) {
        check_budget(padded * (CPLX ? 6ull : 3ull) * 2 * sizeof(S), "derivative DP layer buffers");
        for (int h = 0; h < 2; ++h)
            for (int pl = 0; pl < 3; ++pl) {
                re_[h][pl].assign(padded, S(0));
                if (CPLX) im_[h][pl].assign(padded, S(0));
            }
        zero_.assign(static_cast<std::uint64_t>(max_row_len) + 2, S(0));
    }

    void init_origin(const LayerGeometry& g0) {
        cur_ = 0;
        re_[0][0][g0.row(0).val_off] = S(1);
        for (int pl = 0; pl < 3; ++pl) log_[pl].reset(1);
        scale_ = 1.0;
    }

    void begin_layer(int) {
        cur_ ^= 1;
        mx_ = 0.0;
        for (int pl = 0; pl < 3; ++pl) acc_[pl] = {0.0, 0.0};
    }

    void row(const RowIO& io) {
        const std::int64_t len = io.out->len;
        S* __restrict o[3];
        S* __restrict oi[3] = {nullptr, nullptr, nullptr};
        for (int pl = 0; pl < 3; ++pl) {
            o[pl] = re_[cur_][pl].data() + io.out->val_off;
            gather_plane(o[pl], re_[cur_ ^ 1][pl].data(), zero_.data(), io, 1);
            if constexpr (CPLX) {
                oi[pl] = im_[cur_][pl].data() + io.out->val_off;
                gather_plane(oi[pl], im_[cur_ ^ 1][pl].data(), zero_.data(), io, 1);
            }
        }
        const S m1r = static_cast<S>(w_.real() * scale_);
        const S m1i = static_cast<S>(w_.imag() * scale_);
        const S m0r = static_cast<S>(scale_);
        for (std::int64_t r = 0; r < len; ++r) {
            const std::uint64_t b = io.bit0 + static_cast<std::uint64_t>(r);
            const bool open = (io.bits[b >> 6] >> (b & 63)) & 1;
            if constexpr (CPLX) {
                const S e = open ? S(1) : S(0);
                const S mr = open ? m1r : m0r, mi = open ? m1i : S(0);
                const S azr = o[0][r], azi = oi[0][r];
                const S agr = o[1][r] + e * azr, agi = oi[1][r] + e * azi;
                const S ahr = o[2][r] + 2 * e * o[1][r] + e * azr;
                const S ahi = oi[2][r] + 2 * e * oi[1][r] + e * azi;
                o[0][r] = azr * mr - azi * mi;
                oi[0][r] = azr * mi + azi * mr;
                o[1][r] = agr * mr - agi * mi;
                oi[1][r] = agr * mi + agi * mr;
                o[2][r] = ahr * mr - ahi * mi;
                oi[2][r] = ahr * mi + ahi * mr;
                for (int pl = 0; pl < 3; ++pl)
                    acc_[pl] += std::complex<double>(o[pl][r], oi[pl][r]);
                const double a = std::abs(static_cast<double>(o[0][r])) +
                                 std::abs(static_cast<double>(oi[0][r]));
                if (a > mx_) mx_ = a;
            } else {
                const S e = open ? S(1) : S(0);
                const S m = open ? m1r : m0r;
                const S az = o[0][r];
                const S ag = o[1][r] + e * az;
                const S ah = o[2][r] + 2 * e * o[1][r] + e * az;
                o[0][r] = m * az;
                o[1][r] = m * ag;
                o[2][r] = m * ah;
                for (int pl = 0; pl < 3; ++pl) acc_[pl] += static_cast<double>(o[pl][r]);
                const double a = std::abs(static_cast<double>(o[0][r]));
                if (a > mx_) mx_ = a;
            }
        }
        for (int pl = 0; pl < 3; ++pl) {
            o[pl][-1] = S(0);
            o[pl][len] = S(0);
            if constexpr (CPLX) {
                oi[pl][-1] = S(0);
                oi[pl][len] = S(0);
            }
        }
    }

    void end_layer(int t) {
        for (int pl = 0; pl < 3; ++pl) log_[pl].push_layer(&acc_[pl], &mx_, t);
        scale_ = 1.0 / mx_;
    }

    std::complex<double> log_z(int t, bool* continuous = nullptr) const {
        return log_[0].log_z(t, 0, continuous);
    }
    // first and second derivative of ln Z at horizon t
    std::complex<double> d1(int t) const { return log_[1].sum(t, 0) / log_[0].sum(t, 0); }
    std::complex<double> d2(int t) const {
        const auto r1 = d1(t);
        return log_[2].sum(t, 0) / log_[0].sum(t, 0) - r1 * r1;
    }

private:
    std::complex<double> w_{1.0, 0.0};
    std::vector<S> re_[2][3], im_[2][3], zero_;
    int cur_ = 0;
    double scale_ = 1.0;
    double mx_ = 0.0;
    std::complex<double> acc_[3];
    LaneLog log_[3];
};

} // namespace rhopath::dp

#endif
