// lattice.cpp

#include "rhopath/lattice.hpp"

#include <algorithm>
#include <cstdlib>

#include "rhopath/errors.hpp"

namespace rhopath {

BallCounts::BallCounts(int dims, int radius) : radius_(radius) {
    table_.assign(static_cast<std::size_t>(dims + 1) * (radius + 1), 0);
    for (int r = 0; r <= radius; ++r) table_[r] = 1; // m = 0
    for (int m = 1; m <= dims; ++m) {
        auto* row = table_.data() + static_cast<std::size_t>(m) * (radius_ + 1);
        auto* below = table_.data() + static_cast<std::size_t>(m - 1) * (radius_ + 1);
        row[0] = 1;
        for (int r = 1; r <= radius; ++r) {
            // |B_m(r)| = |B_m(r-1)| + |B_{m-1}(r)| + |B_{m-1}(r-1)|
            row[r] = row[r - 1] + below[r] + below[r - 1];
        }
    }
}

std::uint64_t layer_site_count(int d, int t, const BallCounts& bc) {
    // sum over prefix shells s: (#prefixes at |P|=s) * (t-s+1) telescopes to
    // sum_{s<=t} N_{d-1}(s)
    std::uint64_t total = 0;
    for (int s = 0; s <= t; ++s) total += bc(d - 1, s);
    return total;
}

std::uint64_t cone_site_count(int d, int n) {
    BallCounts bc(d - 1 > 0 ? d - 1 : 0, n);
    unsigned __int128 total = 0;
    unsigned __int128 layer = 1; // layer 0: the origin
    for (int t = 1; t <= n; ++t) {
        layer += bc(d - 1, t); // layer(t) = layer(t-1) + N_{d-1}(t)
        total += layer;
    }
    if (total > static_cast<unsigned __int128>(UINT64_MAX))
        throw resource_error("cone site count overflows 64 bits");
    return static_cast<std::uint64_t>(total);
}

void LayerGeometry::build(int d, int t, const BallCounts& bc) {
    if (d < 1 || d > 8) throw usage_error("lattice kernels support 1 <= d <= 8");
    d_ = d;
    t_ = t;
    rows_.clear();
    prefix_.clear();
    sites_ = 0;
    max_len_ = 0;

    const int m = d - 1;
    std::int64_t voff = 1;
    std::int64_t boff = 0;
    if (m == 0) {
        rows_.push_back(Row{t + 1, t, voff, boff});
        prefix_.push_back(0);
        sites_ = t + 1;
        padded_ = t + 3;
        max_len_ = t + 1;
        return;
    }

    const std::size_t nrows = bc(m, t);
    rows_.reserve(nrows);
    prefix_.reserve(nrows * m);

    std::vector<std::int32_t> p(m);
    auto emit = [&](int rem) {
        const std::int32_t len = rem + 1;
        rows_.push_back(Row{len, rem, voff, boff});
        prefix_.insert(prefix_.end(), p.begin(), p.end());
        voff += len + 2;
        boff += len;
        sites_ += len;
        max_len_ = std::max(max_len_, len);
    };
    // lexicographic odometer over the prefix ball B_m(t)
    struct Rec {
        std::vector<std::int32_t>& p;
        decltype(emit)& out;
        int m;
        void operator()(int axis, int rem) {
            if (axis == m) {
                out(rem);
                return;
            }
            for (int v = -rem; v <= rem; ++v) {
                p[axis] = v;
                (*this)(axis + 1, rem - std::abs(v));
            }
        }
    } rec{p, emit, m};
    rec(0, t);
    padded_ = voff - 1;
}

namespace {
// lexicographic compare of prefixes, -1/0/+1
inline int cmp(std::span<const std::int32_t> a, const std::int32_t* b, int m) {
    for (int i = 0; i < m; ++i) {
        if (a[i] < b[i]) return -1;
        if (a[i] > b[i]) return 1;
    }
    return 0;
}
} // namespace

NeighborCursors::NeighborCursors(const LayerGeometry& in, const LayerGeometry& out)
    : in_(&in), out_(&out), d_(out.dim()) {
    target_.assign(d_ > 1 ? d_ - 1 : 1, 0);
    std::fill(std::begin(cur_nb_), std::end(cur_nb_), 0);
}

const NeighborCursors::RowPlan& NeighborCursors::advance(std::size_t i) {
    const int m = d_ - 1;
    if (m == 0) {
        plan_.same = 0;
        plan_.nb_count = 0;
        return plan_;
    }
    const auto tgt = out_->prefix(i);
    const auto rows = in_->row_count();

    auto locate = [&](std::int64_t& cur, const std::int32_t* want) -> std::int64_t {
        while (cur < static_cast<std::int64_t>(rows) &&
               cmp(in_->prefix(cur), want, m) < 0)
            ++cur;
        if (cur < static_cast<std::int64_t>(rows) && cmp(in_->prefix(cur), want, m) == 0)
            return cur;
        return -1;
    };

    plan_.same = locate(cur_same_, tgt.data());
    int j = 0;
    for (int k = 0; k < m; ++k) {
        for (int sgn = 1; sgn >= -1; sgn -= 2) {
            std::copy(tgt.begin(), tgt.end(), target_.begin());
            target_[k] += sgn;
            plan_.nb[j] = locate(cur_nb_[j], target_.data());
            const bool grew = (sgn > 0) ? (tgt[k] >= 0) : (tgt[k] <= 0);
            plan_.nb_shift[j] = grew ? -1 : 0;
            ++j;
        }
    }
    plan_.nb_count = j;
    return plan_;
}

} // namespace rhopath
