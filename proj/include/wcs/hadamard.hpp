#pragma once

// Scrambled Walsh-Hadamard sensing: fast transform, the subsampled
// operator Phi = S P_r H P_c with its adjoint, and the conversion from
// 0/1 pattern measurements to signed Hadamard data.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>

#include "wcs/common.hpp"

namespace wcs {

/// In-place Walsh-Hadamard transform in natural (Sylvester) order.
/// With `normalize` the orthonormal 1/sqrt(n) scaling is applied, which
/// makes the transform an involution.
inline void fwht_inplace(std::span<double> v, bool normalize = true) {
    const std::size_t n = v.size();
    if (!is_power_of_two(n)) throw InvalidInput("fwht: length " + std::to_string(n) + " is not a power of two");
    for (std::size_t h = 1; h < n; h *= 2) {
        for (std::size_t i = 0; i < n; i += 2 * h) {
            for (std::size_t j = i; j < i + h; ++j) {
                const double x = v[j];
                const double y = v[j + h];
                v[j] = x + y;
                v[j + h] = x - y;
            }
        }
    }
    if (normalize) {
        const double s = 1.0 / std::sqrt(static_cast<double>(n));
        for (double& x : v) x *= s;
    }
}

inline std::vector<double> fwht(std::span<const double> v, bool normalize = true) {
    std::vector<double> out(v.begin(), v.end());
    fwht_inplace(out, normalize);
    return out;
}

/// Entry of the unnormalized Sylvester Hadamard matrix, +1 or -1.
inline int hadamard_sign(std::size_t row, std::size_t col) {
    return (std::popcount(row & col) & 1) ? -1 : 1;
}

namespace detail {

// Fisher-Yates with an explicit rejection sampler so the permutation
// only depends on the mt19937_64 stream, not on library distributions.
inline std::vector<std::uint32_t> seeded_permutation(std::size_t n, std::mt19937_64& rng) {
    std::vector<std::uint32_t> p(n);
    std::iota(p.begin(), p.end(), 0u);
    for (std::size_t i = n; i > 1; --i) {
        const std::uint64_t bound = i;
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - (std::numeric_limits<std::uint64_t>::max() % bound);
        std::uint64_t r;
        do {
            r = rng();
        } while (r >= limit);
        std::swap(p[i - 1], p[r % bound]);
    }
    return p;
}

inline void check_permutation(const std::vector<std::uint32_t>& p, std::size_t n, const char* what) {
    if (p.size() != n) throw InvalidInput(std::string(what) + ": expected length " + std::to_string(n));
    std::vector<bool> seen(n, false);
    for (auto v : p) {
        if (v >= n || seen[v]) throw InvalidInput(std::string(what) + ": not a permutation");
        seen[v] = true;
    }
}

}  // namespace detail

/// Phi = S P_r H P_c. (P_c g)[i] = g[perm_cols[i]], (P_r y)[i] = y[perm_rows[i]],
/// and S keeps entries selected_rows[0..m) of the scrambled transform.
/// Immutable after construction.
class SensingOperator {
  public:
    SensingOperator(unsigned log2n, std::vector<std::uint32_t> perm_rows, std::vector<std::uint32_t> perm_cols,
                    std::vector<std::uint32_t> selected_rows, std::uint32_t seed = 0)
        : log2n_(log2n),
          n_(std::size_t{1} << log2n),
          seed_(seed),
          perm_rows_(std::move(perm_rows)),
          perm_cols_(std::move(perm_cols)),
          selected_(std::move(selected_rows)) {
        detail::check_permutation(perm_rows_, n_, "perm_rows");
        detail::check_permutation(perm_cols_, n_, "perm_cols");
        if (selected_.size() > n_) throw InvalidInput("selected_rows: m exceeds n");
        std::vector<bool> seen(n_, false);
        for (auto r : selected_) {
            if (r >= n_ || seen[r]) throw InvalidInput("selected_rows: duplicate or out-of-range index");
            seen[r] = true;
        }
        cols_inv_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) cols_inv_[perm_cols_[i]] = static_cast<std::uint32_t>(i);
    }

    /// Random row and column scrambling from `seed`; S keeps the first m rows.
    /// With `keep_all_ones`, the last of them gives way to the all-ones row
    /// when that row is not already selected, so the sensor mean is measured.
    static SensingOperator scrambled(unsigned log2n, std::size_t m, std::uint32_t seed, bool keep_all_ones = false) {
        const std::size_t n = std::size_t{1} << log2n;
        if (m > n) throw InvalidInput("scrambled: m = " + std::to_string(m) + " exceeds n = " + std::to_string(n));
        std::mt19937_64 rng(seed);
        auto rows = detail::seeded_permutation(n, rng);
        auto cols = detail::seeded_permutation(n, rng);
        std::vector<std::uint32_t> sel(m);
        std::iota(sel.begin(), sel.end(), 0u);
        if (keep_all_ones && m > 0) {
            const auto r0 = static_cast<std::uint32_t>(std::find(rows.begin(), rows.end(), 0u) - rows.begin());
            if (r0 >= m) sel.back() = r0;
        }
        SensingOperator op(log2n, std::move(rows), std::move(cols), std::move(sel), seed);
        op.keeps_all_ones_ = keep_all_ones;
        return op;
    }

    static SensingOperator identity(unsigned log2n, std::size_t m) {
        const std::size_t n = std::size_t{1} << log2n;
        std::vector<std::uint32_t> id(n);
        std::iota(id.begin(), id.end(), 0u);
        std::vector<std::uint32_t> sel(m);
        std::iota(sel.begin(), sel.end(), 0u);
        return SensingOperator(log2n, id, id, std::move(sel));
    }

    unsigned log2n() const { return log2n_; }
    std::size_t n() const { return n_; }
    std::size_t m() const { return selected_.size(); }
    std::uint32_t seed() const { return seed_; }
    bool keeps_all_ones() const { return keeps_all_ones_; }
    const std::vector<std::uint32_t>& perm_rows() const { return perm_rows_; }
    const std::vector<std::uint32_t>& perm_cols() const { return perm_cols_; }
    const std::vector<std::uint32_t>& selected_rows() const { return selected_; }

    /// Row of the unscrambled Hadamard matrix measured by output j.
    std::size_t hadamard_row(std::size_t j) const { return perm_rows_[selected_[j]]; }

    /// b = Phi g, O(n log n).
    void apply(std::span<const double> g, std::span<double> b) const {
        if (g.size() != n_ || b.size() != m())
            throw InvalidInput("sensing_apply: expected input " + std::to_string(n_) + " and output " +
                               std::to_string(m()));
        std::vector<double> u(n_);
        for (std::size_t i = 0; i < n_; ++i) u[i] = g[perm_cols_[i]];
        fwht_inplace(u);
        for (std::size_t j = 0; j < m(); ++j) b[j] = u[hadamard_row(j)];
    }

    std::vector<double> apply(std::span<const double> g) const {
        std::vector<double> b(m());
        apply(g, b);
        return b;
    }

    /// g = Phi^T b.
    void adjoint(std::span<const double> b, std::span<double> g) const {
        if (b.size() != m() || g.size() != n_)
            throw InvalidInput("sensing_adjoint: expected input " + std::to_string(m()) + " and output " +
                               std::to_string(n_));
        std::vector<double> h(n_, 0.0);
        for (std::size_t j = 0; j < m(); ++j) h[hadamard_row(j)] = b[j];
        fwht_inplace(h);
        for (std::size_t i = 0; i < n_; ++i) g[perm_cols_[i]] = h[i];
    }

    std::vector<double> adjoint(std::span<const double> b) const {
        std::vector<double> g(n_);
        adjoint(b, g);
        return g;
    }

    /// Output index whose pattern is the all-ones Hadamard row, if selected.
    std::optional<std::size_t> all_ones_output() const {
        for (std::size_t j = 0; j < m(); ++j)
            if (hadamard_row(j) == 0) return j;
        return std::nullopt;
    }

    /// Binary pattern an instrument displays for output j. The all-ones row
    /// is replaced by the half-0/half-1 vector (in unscrambled column order).
    std::vector<std::uint8_t> pattern(std::size_t j) const {
        const std::size_t row = hadamard_row(j);
        std::vector<std::uint8_t> p(n_);
        for (std::size_t c = 0; c < n_; ++c) {
            const std::size_t i = cols_inv_[c];
            if (row == 0)
                p[c] = i >= n_ / 2 ? 1 : 0;
            else
                p[c] = hadamard_sign(row, i) > 0 ? 1 : 0;
        }
        return p;
    }

    /// Complement of the replacement pattern: row n/2 of the 0/1 Hadamard matrix.
    std::vector<std::uint8_t> complement_pattern() const {
        std::vector<std::uint8_t> p(n_);
        for (std::size_t c = 0; c < n_; ++c) p[c] = cols_inv_[c] < n_ / 2 ? 1 : 0;
        return p;
    }

  private:
    unsigned log2n_;
    std::size_t n_;
    std::uint32_t seed_;
    bool keeps_all_ones_ = false;
    std::vector<std::uint32_t> perm_rows_, perm_cols_, selected_, cols_inv_;
};

inline std::vector<std::vector<std::uint8_t>> build_patterns(const SensingOperator& op) {
    std::vector<std::vector<std::uint8_t>> out;
    out.reserve(op.m());
    for (std::size_t j = 0; j < op.m(); ++j) out.push_back(op.pattern(j));
    return out;
}

/// Raw detector readings taken with the 0/1 patterns of `build_patterns`.
struct BinaryMeasurement {
    std::vector<double> w;
    std::optional<double> all_ones_value;
    /// Output index measured with the half-pattern replacement, if any.
    std::optional<std::size_t> all_ones_row;

    /// The all-ones reading is the replacement reading plus its complement.
    void set_all_ones_from_halves(double half_pattern, double complement) {
        all_ones_value = half_pattern + complement;
    }
};

inline double pattern_dot(std::span<const std::uint8_t> p, std::span<const double> g) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i]) s += g[i];
    return s;
}

/// Simulates an instrument run: every emitted pattern plus the complement
/// pattern needed to synthesize the all-ones reading.
inline BinaryMeasurement measure_binary(const SensingOperator& op, std::span<const double> g) {
    if (g.size() != op.n()) throw InvalidInput("measure_binary: length mismatch");
    BinaryMeasurement bm;
    bm.w.resize(op.m());
    for (std::size_t j = 0; j < op.m(); ++j) bm.w[j] = pattern_dot(op.pattern(j), g);
    bm.all_ones_row = op.all_ones_output();
    std::vector<std::uint8_t> half(op.n());
    const auto comp = op.complement_pattern();
    for (std::size_t c = 0; c < op.n(); ++c) half[c] = comp[c] ? 0 : 1;
    bm.set_all_ones_from_halves(pattern_dot(half, g), pattern_dot(comp, g));
    return bm;
}

/// b_i = (2 w_i - w_all_ones) / sqrt(n); the replaced row reads the all-ones value.
inline std::vector<double> binary_to_signed(const BinaryMeasurement& bm, unsigned log2n) {
    if (!bm.all_ones_value) throw InvalidState("binary_to_signed: all-ones measurement not populated");
    const double ones = *bm.all_ones_value;
    const double s = 1.0 / std::sqrt(static_cast<double>(std::size_t{1} << log2n));
    std::vector<double> b(bm.w.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
        const double wi = (bm.all_ones_row && *bm.all_ones_row == i) ? ones : bm.w[i];
        b[i] = (2.0 * wi - ones) * s;
    }
    return b;
}

}  // namespace wcs
