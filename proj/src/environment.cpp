// environment.cpp

#include "rhopath/environment.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "rhopath/errors.hpp"

namespace rhopath {

void EnvParams::validate() const {
    if (d < 1 || d > 8) throw usage_error("d must be in [1, 8]");
    if (n < 1) throw usage_error("n must be >= 1");
    if (!(p > 0.0) || !(p < 1.0)) throw usage_error("p must lie in the open interval (0, 1)");
}

namespace {
int l1_norm(std::span<const std::int32_t> x) {
    long s = 0;
    for (auto v : x) s += std::abs(v);
    return static_cast<int>(s);
}
} // namespace

void Environment::init_offsets() {
    const int n = params_.n;
    const int m = params_.d - 1;
    bc_ = BallCounts(m > 0 ? m : 0, n);
    // C_k(r) = sum_{s<=r} N_k(s): site count of a rank subtree with k free
    // prefix axes plus the row axis.
    cum_.assign(static_cast<std::size_t>(m + 1) * (n + 1), 0);
    for (int k = 0; k <= m; ++k) {
        std::uint64_t acc = 0;
        for (int r = 0; r <= n; ++r) {
            acc += bc_(k, r);
            cum_[static_cast<std::size_t>(k) * (n + 1) + r] = acc;
        }
    }
    layer_sites_.assign(n + 1, 0);
    layer_sites_[0] = 1;
    layer_word_off_.assign(n + 2, 0);
    std::size_t off = 0;
    for (int t = 1; t <= n; ++t) {
        layer_sites_[t] = layer_sites_[t - 1] + bc_(m, t);
        layer_word_off_[t] = off;
        off += (layer_sites_[t] + 63) / 64;
    }
    layer_word_off_[n + 1] = off;
}

std::uint64_t Environment::total_sites() const {
    std::uint64_t s = 0;
    for (int t = 1; t <= params_.n; ++t) s += layer_sites_[t];
    return s;
}

Environment Environment::generate(const EnvParams& params) {
    params.validate();
    Environment env;
    env.params_ = params;
    env.init_offsets();

    const std::uint64_t words = env.layer_word_off_[params.n + 1];
    check_budget(words * 8, "environment cone (d=" + std::to_string(params.d) +
                                ", n=" + std::to_string(params.n) + ")");
    env.words_.assign(words, 0);

    LayerGeometry geom;
    for (int t = 1; t <= params.n; ++t) {
        geom.build(params.d, t, env.bc_);
        std::uint64_t* base = env.words_.data() + env.layer_word_off_[t];
        for (std::size_t i = 0; i < geom.row_count(); ++i) {
            const Row& row = geom.row(i);
            RowHasher rh(params.seed, t, geom.prefix(i));
            for (std::int32_t r = 0; r < row.len; ++r) {
                const std::int64_t xd = -row.half_l + 2 * r;
                if (hash_open(rh.at(xd), params.p)) {
                    const std::uint64_t idx = row.bit_off + r;
                    base[idx >> 6] |= std::uint64_t{1} << (idx & 63);
                }
            }
        }
    }
    return env;
}

bool Environment::in_cone(int t, std::span<const std::int32_t> x) const {
    if (t < 1 || t > params_.n) return false;
    if (static_cast<int>(x.size()) != params_.d) return false;
    const int s = l1_norm(x);
    return s <= t && ((t - s) & 1) == 0;
}

std::uint64_t Environment::site_index(int t, std::span<const std::int32_t> x) const {
    // lexicographic rank over (x_1 .. x_{d-1}), then position along x_d
    const int m = params_.d - 1;
    std::uint64_t rank = 0;
    int rem = t;
    for (int j = 0; j < m; ++j) {
        for (int y = -rem; y < x[j]; ++y) rank += cum(m - j - 1, rem - std::abs(y));
        rem -= std::abs(x[j]);
    }
    return rank + static_cast<std::uint64_t>((x[m] + rem) / 2);
}

bool Environment::query(int t, std::span<const std::int32_t> x) const {
    if (!in_cone(t, x)) {
        std::string coords;
        for (auto v : x) coords += std::to_string(v) + ",";
        throw usage_error("query outside the reachable cone: t=" + std::to_string(t) +
                          " x=(" + coords + ")");
    }
    const std::uint64_t idx = site_index(t, x);
    const std::uint64_t w = words_[layer_word_off_[t] + (idx >> 6)];
    return (w >> (idx & 63)) & 1;
}

ShiftedView Environment::shifted_view(int t_shift, std::span<const std::int32_t> x_shift,
                                      int horizon, bool allow_regen) const {
    return ShiftedView(*this, t_shift, x_shift, horizon, allow_regen);
}

ShiftedView::ShiftedView(const Environment& base, int t_shift,
                         std::span<const std::int32_t> x_shift, int horizon, bool allow_regen)
    : base_(&base), t_shift_(t_shift), x_shift_(x_shift.begin(), x_shift.end()) {
    if (static_cast<int>(x_shift.size()) != base.d())
        throw usage_error("shift dimension mismatch");
    if (t_shift < 0) throw usage_error("time shift must be >= 0");
    horizon_ = horizon >= 0 ? horizon : base.n() - t_shift;
    if (horizon_ < 0) throw usage_error("view horizon is negative");

    // Parent storage covers the view iff the shift point is itself reachable
    // (then every view-cone site maps into the parent cone) and the horizon
    // fits the slab.
    const int s = l1_norm(x_shift_);
    stored_ = (s <= t_shift) && (((t_shift - s) & 1) == 0) && (t_shift + horizon_ <= base.n());
    if (!stored_ && !allow_regen)
        throw usage_error("shifted cone escapes the parent slab and regeneration is disabled");
}

bool ShiftedView::query(int t, std::span<const std::int32_t> x) const {
    if (static_cast<int>(x.size()) != base_->d())
        throw usage_error("query dimension mismatch");
    const int s = l1_norm(x);
    if (t < 1 || t > horizon_ || s > t || ((t - s) & 1) != 0)
        throw usage_error("query outside the view cone");
    std::vector<std::int32_t> px(x.begin(), x.end());
    for (std::size_t i = 0; i < px.size(); ++i) px[i] += x_shift_[i];
    if (stored_) return base_->query(t + t_shift_, px);
    return base_->field_at(t + t_shift_, px);
}

ShiftedView ShiftedView::shifted_view(int t_shift, std::span<const std::int32_t> x_shift,
                                      int horizon, bool allow_regen) const {
    std::vector<std::int32_t> combined(x_shift_.begin(), x_shift_.end());
    for (std::size_t i = 0; i < combined.size(); ++i) combined[i] += x_shift[i];
    const int h = horizon >= 0 ? horizon : horizon_ - t_shift;
    return ShiftedView(*base_, t_shift_ + t_shift, combined, h, allow_regen);
}

double m_event_probability(int d, double p, std::span<const std::int32_t> x) {
    if (d < 1) throw usage_error("d must be >= 1");
    if (!(p > 0.0) || !(p < 1.0)) throw usage_error("p must lie in (0, 1)");
    if (static_cast<int>(x.size()) != d) throw usage_error("dimension mismatch");
    int l1 = 0, linf = 0;
    for (auto v : x) {
        l1 += std::abs(v);
        linf = std::max(linf, std::abs(static_cast<int>(v)));
    }
    int c;
    if (l1 == 0)
        c = 2 * d;
    else if (l1 == 2 && linf == 1)
        c = 2;
    else if (l1 == 2 && linf == 2)
        c = 1;
    else
        throw usage_error("x is not reachable in two steps");
    return 1.0 - (std::pow(p, c) + std::pow(1.0 - p, c));
}

// ---- serialization ----------------------------------------------------
// 32-byte header: "RHOPATH1" | u32 d | u32 n | f64 p | u64 seed (little
// endian), then the packed cone bits in layer order, each layer starting at a
// fresh 64-bit word.

namespace {
constexpr char kMagic[8] = {'R', 'H', 'O', 'P', 'A', 'T', 'H', '1'};
}

void Environment::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw usage_error("cannot open " + path + " for writing");
    out.write(kMagic, 8);
    const std::uint32_t d32 = params_.d, n32 = params_.n;
    out.write(reinterpret_cast<const char*>(&d32), 4);
    out.write(reinterpret_cast<const char*>(&n32), 4);
    out.write(reinterpret_cast<const char*>(&params_.p), 8);
    out.write(reinterpret_cast<const char*>(&params_.seed), 8);
    out.write(reinterpret_cast<const char*>(words_.data()),
              static_cast<std::streamsize>(words_.size() * 8));
    if (!out) throw usage_error("short write to " + path);
}

Environment Environment::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw usage_error("cannot open " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic, 8) != 0)
        throw usage_error(path + " is not a RHOPATH1 environment file");
    std::uint32_t d32 = 0, n32 = 0;
    double p = 0;
    std::uint64_t seed = 0;
    in.read(reinterpret_cast<char*>(&d32), 4);
    in.read(reinterpret_cast<char*>(&n32), 4);
    in.read(reinterpret_cast<char*>(&p), 8);
    in.read(reinterpret_cast<char*>(&seed), 8);
    if (!in) throw usage_error(path + ": truncated header");

    Environment env;
    env.params_ = EnvParams{static_cast<int>(d32), static_cast<int>(n32), p, seed};
    env.params_.validate();
    env.init_offsets();
    const std::uint64_t words = env.layer_word_off_[env.params_.n + 1];
    check_budget(words * 8, "environment cone from " + path);
    env.words_.assign(words, 0);
    in.read(reinterpret_cast<char*>(env.words_.data()), static_cast<std::streamsize>(words * 8));
    if (!in) throw usage_error(path + ": truncated bit payload");
    return env;
}

} // namespace rhopath
