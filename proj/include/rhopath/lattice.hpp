// lattice.hpp
// Geometry of the reachable space-time cone of a nearest-neighbour walk from
// the origin: layer t holds the x in Z^d with |x|_1 <= t and |x|_1 == t mod 2.
//
// Sites are enumerated row-major. A "row" fixes the first d-1 coordinates
// (the prefix P) and runs over the last coordinate x_d = -L, -L+2, ..., L,
// where L = t - |P|_1, so a row has L+1 sites. Rows are ordered
// lexicographically over the prefix ball B_{d-1}(t). Two index spaces exist
// per layer: a packed one (bit storage, serialization) and a padded one for
// DP value arrays, where every row gets one zero slot on each side so that
// neighbour reads never need bounds checks:
//
//   out[r] <- in_same[r-1] + in_same[r] + sum_k in_{P +- e_k}[r + shift],
//
// with shift in {0, -1} determined per row by how |P +- e_k|_1 changed.

#ifndef RHOPATH_LATTICE_HPP
#define RHOPATH_LATTICE_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace rhopath {

// N_m(r) = |{x in Z^m : |x|_1 <= r}| for m <= dims, r <= radius.
class BallCounts {
public:
    BallCounts() = default;
    BallCounts(int dims, int radius);
    std::uint64_t operator()(int m, int r) const {
        if (r < 0) return 0;
        return table_[static_cast<std::size_t>(m) * (radius_ + 1) + r];
    }
    int radius() const { return radius_; }

private:
    int radius_ = -1;
    std::vector<std::uint64_t> table_;
};

// Number of sites in layer t of the d-dimensional cone.
std::uint64_t layer_site_count(int d, int t, const BallCounts& bc);
// Total sites over layers 1..n.
std::uint64_t cone_site_count(int d, int n);

struct Row {
    std::int32_t len;      // L+1 sites
    std::int32_t half_l;   // L = t - |prefix|_1 (so x_d = -L + 2r)
    std::int64_t val_off;  // padded offset of site r=0; slots -1 and len are pads
    std::int64_t bit_off;  // packed offset of site r=0
};

class LayerGeometry {
public:
    LayerGeometry() = default;
    // Enumerates all rows of layer t. bc must cover (d-1, t).
    void build(int d, int t, const BallCounts& bc);

    int dim() const { return d_; }
    int time() const { return t_; }
    std::size_t row_count() const { return rows_.size(); }
    const Row& row(std::size_t i) const { return rows_[i]; }
    // The first d-1 coordinates of row i (empty for d = 1).
    std::span<const std::int32_t> prefix(std::size_t i) const {
        return {prefix_.data() + i * pdim(), static_cast<std::size_t>(d_ - 1)};
    }
    std::int64_t site_count() const { return sites_; }
    std::int64_t padded_size() const { return padded_; }
    std::int32_t max_row_len() const { return max_len_; }

private:
    int pdim() const { return d_ > 1 ? d_ - 1 : 1; } // storage stride; d=1 keeps one dummy coord

    int d_ = 0;
    int t_ = -1;
    std::int64_t sites_ = 0;
    std::int64_t padded_ = 0;
    std::int32_t max_len_ = 0;
    std::vector<Row> rows_;
    std::vector<std::int32_t> prefix_;
};

// Resolves, for every output row of `out`, the input rows of `in` it reads.
// Cursor-based: as output rows advance lexicographically, each of the
// 2(d-1) shifted prefixes also advances lexicographically, so resolution is
// amortized O(1) per row with no lookup tables.
class NeighborCursors {
public:
    // in must be the geometry of layer t-1 when out is layer t.
    NeighborCursors(const LayerGeometry& in, const LayerGeometry& out);

    struct RowPlan {
        // Row indices into the input geometry, or -1 when the row is absent.
        // same: identical prefix (reads r-1 and r).
        // nb[j]: prefix +- e_k for k < d-1 (j = 2k for +, 2k+1 for -);
        // reads r + nb_shift[j] with shift in {0, -1}.
        std::int64_t same;
        std::int64_t nb[14];
        std::int32_t nb_shift[14];
        int nb_count;
    };

    // Advances to output row i (must be called with i = 0, 1, 2, ... in order).
    const RowPlan& advance(std::size_t i);

private:
    const LayerGeometry* in_;
    const LayerGeometry* out_;
    int d_;
    RowPlan plan_;
    std::int64_t cur_same_ = 0;
    std::int64_t cur_nb_[14];
    std::vector<std::int32_t> target_;
};

} // namespace rhopath

#endif
