#pragma once

// Fast discrete curvelet transform via wrapping, real-valued, with an
// optional low-frequency finest scale.
//
// Frequency tiling (per axis, tensorized):
//   * finest scale lives on an extended grid of 2*floor(2m)+1 samples,
//     m = n_eff/3, filled by periodic extension of the available spectrum
//     and weighted by a window whose overlapping flanks are squared
//     complements of each other;
//   * coarser scales use Cartesian lowpasses halving every scale;
//   * each band is cut into angular wedges by a smooth partition of unity
//     in a pseudo-polar angle, and each wedge is wrapped onto a rectangle
//     on which the wrap is injective.
// The squared windows sum to one over the fundamental cell, so analysis
// is an isometry and synthesis (its adjoint) a left inverse.

#include <algorithm>
#include <memory>
#include <numeric>
#include <optional>

#include "wcs/common.hpp"
#include "wcs/fft.hpp"

namespace wcs::curvelet {

/// Raised when the low-frequency extent does not reach beyond the
/// fundamental cell, so no periodization window applies.
class NoPeriodization : public InvalidInput {
  public:
    using InvalidInput::InvalidInput;
};

/// C-infinity decreasing step on [0, 1]: h(0) = 1, h(1) = 0.
inline double smooth_step(double x) {
    if (x <= 0.0) return 1.0;
    if (x >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - std::exp(1.0 - 1.0 / x)));
}

/// Normalized rising flank a(x) h(1-x); rising(x)^2 + falling(x)^2 = 1.
inline double rising(double x) {
    const double l = smooth_step(1.0 - x), r = smooth_step(x);
    return l / std::sqrt(l * l + r * r);
}

/// Normalized falling flank a(x) h(x).
inline double falling(double x) {
    const double l = smooth_step(1.0 - x), r = smooth_step(x);
    return r / std::sqrt(l * l + r * r);
}

/// The 1D partition window of length 4*m1+1: rising flank on the first m1
/// samples, flat on m1+1..3m1+1 (1-based), falling flank after.
inline std::vector<double> cinf_window(int m1) {
    if (m1 < 2) throw InvalidInput("cinf_window: m1 must be >= 2");
    std::vector<double> w(4 * m1 + 1, 1.0);
    for (int i = 1; i <= m1; ++i) {
        const double x = double(i - 1) / double(m1 - 1);
        w[i - 1] = rising(x);
        w[3 * m1 + 1 + i - 1] = falling(x);
    }
    return w;
}

/// Short-flank periodization window of length N for a spectrum of period n
/// (n < N <= 2n). Samples i and i+n are periodic copies and their squares
/// sum to one.
inline std::vector<double> lf_window(int N, int n) {
    if (N <= n) throw NoPeriodization("lf_window: extent " + std::to_string(N) + " fits inside period " +
                                      std::to_string(n) + "; no periodization needed");
    if (N > 2 * n) throw InvalidInput("lf_window: extent exceeds twice the period");
    const int flank = N - n;
    std::vector<double> w(N, 1.0);
    for (int i = 1; i <= flank; ++i) {
        const double x = flank > 1 ? double(i - 1) / double(flank - 1) : 0.5;
        w[i - 1] = rising(x);
        w[n + i - 1] = falling(x);
    }
    return w;
}

/// Cartesian lowpass profile at offset k: flat up to floor(M), zero from floor(2M).
inline double lowpass_profile(long k, double M) {
    const long a = static_cast<long>(std::floor(M)), b = static_cast<long>(std::floor(2.0 * M));
    const long ak = std::abs(k);
    if (ak <= a) return 1.0;
    if (ak >= b) return 0.0;
    return falling(double(ak - a) / double(b - a));
}

/// Pseudo-polar angle in [0, 4): one unit per Cartesian cone, continuous
/// across cone boundaries, and phi(-k) = phi(k) + 2 (mod 4).
inline double pseudo_angle(long k1, long k2) {
    const double a = double(k1), b = double(k2);
    if (std::abs(a) >= std::abs(b)) {
        const double t = b / a;
        return a > 0 ? 0.5 * (t + 1.0) : 2.0 + 0.5 * (t + 1.0);
    }
    const double t = -a / b;
    return b > 0 ? 1.0 + 0.5 * (t + 1.0) : 3.0 + 0.5 * (t + 1.0);
}

/// Angular window of wedge l out of `count` at pseudo-angle phi.
inline double angular_window(double phi, int l, int count) {
    const double w = 4.0 / count;
    double d = phi - l * w;
    d = std::fmod(d + 2.0, 4.0);
    if (d < 0) d += 4.0;
    d -= 2.0;
    if (d >= -0.5 * w && d <= 0.5 * w) return rising((d + 0.5 * w) / w);
    if (d > 0.5 * w && d <= 1.5 * w) return falling((d - 0.5 * w) / w);
    return 0.0;
}

/// Angles per scale: 1 at the coarse scale, `angles_coarse` at scale 2,
/// doubling every other scale toward the finest.
inline std::vector<int> angles_per_scale(int J, int angles_coarse) {
    std::vector<int> a(J, 1);
    for (int s = 2; s <= J; ++s) a[s - 1] = angles_coarse << ((s - 1) / 2);
    return a;
}

/// One real coefficient grid in canonical order.
struct Slot {
    int scale;   // 1 = coarse, J = finest
    int angle;   // 0 .. angles(scale)-1
    int rows, cols;
    std::size_t offset;
};

/// Vectorized coefficients: coarse scale first, then scale-major,
/// angle-minor, row-major grids (see CurveletPlan::slots()).
using CurveletCoeffs = std::vector<double>;

class CurveletPlan {
  public:
    struct Options {
        int J = 3;
        int angles_coarse = 16;
        std::optional<int> lf1, lf2;
    };

    static std::shared_ptr<const CurveletPlan> make(int n1, int n2, int J, int angles_coarse = 16,
                                                    std::optional<int> lf1 = std::nullopt,
                                                    std::optional<int> lf2 = std::nullopt) {
        return std::shared_ptr<const CurveletPlan>(new CurveletPlan(n1, n2, J, angles_coarse, lf1, lf2));
    }

    int n1() const { return n1_; }
    int n2() const { return n2_; }
    int J() const { return J_; }
    int angles_coarse() const { return angles_coarse_; }
    const std::vector<int>& angles() const { return angles_; }
    std::optional<int> lf1() const { return lf1_; }
    std::optional<int> lf2() const { return lf2_; }
    bool low_frequency() const { return lf1_.has_value() || lf2_.has_value(); }
    /// Finest-scale extents 2*floor(2m)+1 per axis.
    int N1() const { return 2 * K1_ + 1; }
    int N2() const { return 2 * K2_ + 1; }
    /// True when the finest scale periodizes along both axes, i.e. the
    /// transform is an isometry on the full cell.
    bool isometric() const { return periodic1_ && periodic2_; }

    std::size_t image_size() const { return std::size_t(n1_) * n2_; }
    std::size_t coeff_count() const { return total_; }
    const std::vector<Slot>& slots() const { return slots_; }

    const Slot& slot(int scale, int angle) const {
        for (const auto& s : slots_)
            if (s.scale == scale && s.angle == angle) return s;
        throw InvalidInput("curvelet: no slot (" + std::to_string(scale) + ", " + std::to_string(angle) + ")");
    }

    /// Residual of the squared-window partition of unity, measured against
    /// the finest window's own fold (which is 1 on periodized axes).
    double partition_residual() const { return pou_residual_; }

    void forward(std::span<const double> image, std::span<double> coeffs) const {
        if (image.size() != image_size())
            throw InvalidInput("fdct: image has " + std::to_string(image.size()) + " samples, plan expects " +
                               std::to_string(image_size()));
        if (coeffs.size() != total_) throw InvalidInput("fdct: coefficient buffer size mismatch");
        std::vector<cplx> X(image.begin(), image.end());
        fft::unitary(X, {n1_, n2_}, fft::Direction::forward);
        std::vector<cplx> buf;
        for (const auto& w : wedges_) {
            buf.assign(std::size_t(w.rows) * w.cols, cplx{});
            for (std::size_t e = 0; e < w.cell.size(); ++e) buf[w.wrap[e]] = w.weight[e] * X[w.cell[e]];
            fft::unitary(buf, {w.rows, w.cols}, fft::Direction::backward);
            const Slot& re = slots_[w.re_slot];
            if (w.im_slot < 0) {
                for (std::size_t i = 0; i < buf.size(); ++i) coeffs[re.offset + i] = buf[i].real();
            } else {
                const Slot& im = slots_[w.im_slot];
                const double r2 = std::sqrt(2.0);
                for (std::size_t i = 0; i < buf.size(); ++i) {
                    coeffs[re.offset + i] = r2 * buf[i].real();
                    coeffs[im.offset + i] = r2 * buf[i].imag();
                }
            }
        }
    }

    CurveletCoeffs forward(std::span<const double> image) const {
        CurveletCoeffs c(total_);
        forward(image, c);
        return c;
    }

    /// Adjoint of forward(); the exact inverse on the range of forward()
    /// when isometric().
    void adjoint(std::span<const double> coeffs, std::span<double> image) const {
        if (coeffs.size() != total_)
            throw InvalidInput("ifdct: got " + std::to_string(coeffs.size()) + " coefficients, plan expects " +
                               std::to_string(total_));
        if (image.size() != image_size()) throw InvalidInput("ifdct: image buffer size mismatch");
        std::vector<cplx> X(image_size(), cplx{});
        std::vector<cplx> buf;
        for (const auto& w : wedges_) {
            const Slot& re = slots_[w.re_slot];
            buf.resize(std::size_t(w.rows) * w.cols);
            if (w.im_slot < 0) {
                for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = coeffs[re.offset + i];
            } else {
                const Slot& im = slots_[w.im_slot];
                const double r2 = std::sqrt(2.0);
                for (std::size_t i = 0; i < buf.size(); ++i)
                    buf[i] = r2 * cplx(coeffs[re.offset + i], coeffs[im.offset + i]);
            }
            fft::unitary(buf, {w.rows, w.cols}, fft::Direction::forward);
            for (std::size_t e = 0; e < w.cell.size(); ++e) X[w.cell[e]] += w.weight[e] * buf[w.wrap[e]];
        }
        fft::unitary(X, {n1_, n2_}, fft::Direction::backward);
        for (std::size_t i = 0; i < image.size(); ++i) image[i] = X[i].real();
    }

    std::vector<double> adjoint(std::span<const double> coeffs) const {
        std::vector<double> img(image_size());
        adjoint(coeffs, img);
        return img;
    }

  private:
    // A complex wedge: gather list from the image spectrum into a wrapped
    // rows x cols grid. Wedges with a mirror partner carry both real slots.
    struct Wedge {
        int rows = 0, cols = 0;
        std::vector<std::uint32_t> cell;  // bin in the n1 x n2 spectrum
        std::vector<std::uint32_t> wrap;  // index in the rows x cols grid
        std::vector<double> weight;
        int re_slot = -1, im_slot = -1;
    };

    struct Point {
        long k1, k2;
        double w;
    };

    CurveletPlan(int n1, int n2, int J, int angles_coarse, std::optional<int> lf1, std::optional<int> lf2)
        : n1_(n1), n2_(n2), J_(J), angles_coarse_(angles_coarse), lf1_(lf1), lf2_(lf2) {
        if (n1 < 8 || n2 < 8 || n1 % 2 || n2 % 2) throw InvalidInput("curvelet: image dimensions must be even and >= 8");
        if (J < 2) throw InvalidInput("curvelet: J must be >= 2");
        if (angles_coarse < 4 || angles_coarse % 4) throw InvalidInput("curvelet: angles_coarse must be a positive multiple of 4");
        if (lf1 && (*lf1 <= 0 || *lf1 >= n1)) throw InvalidInput("curvelet: lf1 must lie in (0, n1)");
        if (lf2 && (*lf2 <= 0 || *lf2 >= n2)) throw InvalidInput("curvelet: lf2 must lie in (0, n2)");
        angles_ = angles_per_scale(J, angles_coarse);
        build_axis(n1, lf1, K1_, periodic1_, fw1_, m1_);
        build_axis(n2, lf2, K2_, periodic2_, fw2_, m2_);
        build_tiling();
    }

    // Finest window along one axis on offsets -K..K.
    static void build_axis(int n, std::optional<int> lf, long& K, bool& periodic, std::vector<double>& fw,
                           double& m) {
        const int neff = lf.value_or(n);
        m = neff / 3.0;
        K = static_cast<long>(std::floor(2.0 * m));
        const int N = int(2 * K + 1);
        periodic = 2 * K + 1 > n;  // N/2 > n/2: finest support leaves the cell
        if (periodic)
            fw = lf_window(N, n);
        else
            fw = lf_window(N, neff);
        if (K < 4) throw InvalidInput("curvelet: image too small for the requested frequency range");
    }

    double lowpass(long k1, long k2, int scale) const {
        // scale s < J uses M = m / 2^(J - s)
        const double f = std::ldexp(1.0, -(J_ - scale));
        return lowpass_profile(k1, m1_ * f) * lowpass_profile(k2, m2_ * f);
    }

    double finest(long k1, long k2) const { return fw1_[k1 + K1_] * fw2_[k2 + K2_]; }

    // Band window: outer lowpass times highpass complement of the next coarser one.
    double band(long k1, long k2, int scale) const {
        const double outer = scale == J_ ? finest(k1, k2) : lowpass(k1, k2, scale);
        if (outer == 0.0) return 0.0;
        const double inner = lowpass(k1, k2, scale - 1);
        return outer * std::sqrt(std::max(0.0, 1.0 - inner * inner));
    }

    std::uint32_t cell_bin(long k1, long k2) const {
        return static_cast<std::uint32_t>(fft::bin_of(k1, n1_) * n2_ + fft::bin_of(k2, n2_));
    }

    void check_scale_extents() const {
        for (int s = 1; s < J_; ++s) {
            const double f = std::ldexp(1.0, -(J_ - s));
            for (double M : {m1_ * f, m2_ * f}) {
                if (std::floor(2.0 * M) - std::floor(M) < 2)
                    throw InvalidInput("curvelet: too many scales (" + std::to_string(J_) + ") for image size");
            }
        }
    }

    Wedge make_wedge(const std::vector<Point>& pts, bool horizontal_rows, std::vector<double>& pou) {
        Wedge w;
        if (pts.empty()) return w;
        // Rows run along the dominant axis; each row's span bounds the width.
        auto primary = [&](const Point& p) { return horizontal_rows ? p.k1 : p.k2; };
        auto secondary = [&](const Point& p) { return horizontal_rows ? p.k2 : p.k1; };
        long pmin = primary(pts[0]), pmax = pmin;
        for (const auto& p : pts) {
            pmin = std::min(pmin, primary(p));
            pmax = std::max(pmax, primary(p));
        }
        std::vector<long> smin(pmax - pmin + 1, std::numeric_limits<long>::max()), smax(pmax - pmin + 1, std::numeric_limits<long>::min());
        for (const auto& p : pts) {
            auto r = primary(p) - pmin;
            smin[r] = std::min(smin[r], secondary(p));
            smax[r] = std::max(smax[r], secondary(p));
        }
        long span = 1;
        for (std::size_t r = 0; r < smin.size(); ++r)
            if (smin[r] <= smax[r]) span = std::max(span, smax[r] - smin[r] + 1);
        const long len = pmax - pmin + 1;
        w.rows = int(horizontal_rows ? len : span);
        w.cols = int(horizontal_rows ? span : len);
        for (const auto& p : pts) {
            const auto r = fft::bin_of(p.k1, w.rows), c = fft::bin_of(p.k2, w.cols);
            w.cell.push_back(cell_bin(p.k1, p.k2));
            w.wrap.push_back(static_cast<std::uint32_t>(r * w.cols + c));
            w.weight.push_back(p.w);
            pou[cell_bin(p.k1, p.k2)] += p.w * p.w;
        }
        return w;
    }

    void build_tiling() {
        check_scale_extents();
        std::vector<double> pou(image_size(), 0.0);

        // Coarse scale: lowpass of scale 1 on an odd symmetric grid.
        {
            const double f = std::ldexp(1.0, -(J_ - 1));
            const long b1 = long(std::floor(2.0 * m1_ * f)), b2 = long(std::floor(2.0 * m2_ * f));
            std::vector<Point> pts;
            for (long k1 = -b1 + 1; k1 < b1; ++k1)
                for (long k2 = -b2 + 1; k2 < b2; ++k2) {
                    const double v = lowpass(k1, k2, 1);
                    if (v > 0.0) pts.push_back({k1, k2, v});
                }
            Wedge w = make_wedge(pts, true, pou);
            w.rows = int(2 * b1 - 1);
            w.cols = int(2 * b2 - 1);
            for (std::size_t e = 0; e < pts.size(); ++e)
                w.wrap[e] = static_cast<std::uint32_t>(fft::bin_of(pts[e].k1, w.rows) * w.cols + fft::bin_of(pts[e].k2, w.cols));
            slots_.push_back({1, 0, w.rows, w.cols, 0});
            w.re_slot = 0;
            wedges_.push_back(std::move(w));
        }

        for (int s = 2; s <= J_; ++s) {
            long r1, r2;
            if (s == J_) {
                r1 = K1_;
                r2 = K2_;
            } else {
                const double f = std::ldexp(1.0, -(J_ - s));
                r1 = long(std::floor(2.0 * m1_ * f));
                r2 = long(std::floor(2.0 * m2_ * f));
            }
            struct BandPoint {
                long k1, k2;
                double b, phi;
            };
            std::vector<BandPoint> bandpts;
            for (long k1 = -r1; k1 <= r1; ++k1)
                for (long k2 = -r2; k2 <= r2; ++k2) {
                    const double b = band(k1, k2, s);
                    if (b > 0.0) bandpts.push_back({k1, k2, b, pseudo_angle(k1, k2)});
                }
            const int A = angles_[s - 1];
            std::vector<Wedge> full(A);
            for (int l = 0; l < A; ++l) {
                std::vector<Point> pts;
                for (const auto& bp : bandpts) {
                    const double v = angular_window(bp.phi, l, A);
                    if (v > 0.0) pts.push_back({bp.k1, bp.k2, bp.b * v});
                }
                const double center = (l + 0.5) * 4.0 / A;
                const int cone = int(std::floor(center));
                full[l] = make_wedge(pts, cone % 2 == 0, pou);
            }
            // Real slots: angle l < A/2 holds sqrt(2) Re, angle l + A/2 holds sqrt(2) Im
            // of the complex wedge l, sharing its grid shape.
            const std::size_t first = slots_.size();
            for (int l = 0; l < A; ++l) {
                const Wedge& src = full[l < A / 2 ? l : l - A / 2];
                slots_.push_back({s, l, src.rows, src.cols, 0});
            }
            for (int l = 0; l < A / 2; ++l) {
                full[l].re_slot = int(first + l);
                full[l].im_slot = int(first + l + A / 2);
                wedges_.push_back(std::move(full[l]));
            }
        }

        std::size_t off = 0;
        for (auto& sl : slots_) {
            sl.offset = off;
            off += std::size_t(sl.rows) * sl.cols;
        }
        total_ = off;

        // Expected fold of the finest window per axis.
        std::vector<double> e1(n1_, 0.0), e2(n2_, 0.0);
        for (long k = -K1_; k <= K1_; ++k) e1[fft::bin_of(k, n1_)] += fw1_[k + K1_] * fw1_[k + K1_];
        for (long k = -K2_; k <= K2_; ++k) e2[fft::bin_of(k, n2_)] += fw2_[k + K2_] * fw2_[k + K2_];
        double res = 0.0;
        for (int i = 0; i < n1_; ++i)
            for (int j = 0; j < n2_; ++j) res = std::max(res, std::abs(pou[std::size_t(i) * n2_ + j] - e1[i] * e2[j]));
        if (periodic1_)
            for (double v : e1) res = std::max(res, std::abs(v - 1.0));
        if (periodic2_)
            for (double v : e2) res = std::max(res, std::abs(v - 1.0));
        pou_residual_ = res;
        if (res > 1e-10)
            throw NumericalFailure("curvelet: partition of unity violated, residual " + std::to_string(res));
    }

    int n1_, n2_, J_, angles_coarse_;
    std::optional<int> lf1_, lf2_;
    std::vector<int> angles_;
    long K1_ = 0, K2_ = 0;
    bool periodic1_ = false, periodic2_ = false;
    double m1_ = 0, m2_ = 0;
    std::vector<double> fw1_, fw2_;
    std::vector<Wedge> wedges_;
    std::vector<Slot> slots_;
    std::size_t total_ = 0;
    double pou_residual_ = 0.0;
};

using PlanPtr = std::shared_ptr<const CurveletPlan>;

inline PlanPtr make_plan(int n1, int n2, int J, int angles_coarse = 16, std::optional<int> lf1 = std::nullopt,
                         std::optional<int> lf2 = std::nullopt) {
    return CurveletPlan::make(n1, n2, J, angles_coarse, lf1, lf2);
}

inline CurveletCoeffs fdct(const CurveletPlan& plan, std::span<const double> image) { return plan.forward(image); }

inline std::vector<double> ifdct(const CurveletPlan& plan, std::span<const double> coeffs) {
    return plan.adjoint(coeffs);
}

/// Indices of the k largest magnitudes; ties go to the earlier index.
inline std::vector<std::size_t> largest_indices(std::span<const double> c, std::size_t k) {
    std::vector<std::size_t> idx(c.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    k = std::min(k, c.size());
    auto cmp = [&](std::size_t a, std::size_t b) {
        const double x = std::abs(c[a]), y = std::abs(c[b]);
        return x > y || (x == y && a < b);
    };
    std::nth_element(idx.begin(), idx.begin() + static_cast<long>(k), idx.end(), cmp);
    idx.resize(k);
    return idx;
}

/// Best k-term approximation: keeps the k largest-magnitude coefficients.
inline CurveletCoeffs k_term(std::span<const double> coeffs, std::size_t k) {
    CurveletCoeffs out(coeffs.size(), 0.0);
    if (k >= coeffs.size()) return CurveletCoeffs(coeffs.begin(), coeffs.end());
    for (auto i : largest_indices(coeffs, k)) out[i] = coeffs[i];
    return out;
}

}  // namespace wcs::curvelet
