#pragma once

// Homogeneous-medium acoustics on a planar sensor at z = 0: exact spectral
// forward simulation, the frequency-domain data model, band-limiting
// windows, and time reversal.
//
// Fourier conventions: lateral transforms are unnormalized DFTs on the
// voxel grid; the z and t transforms approximate the continuous transform
// (dx and dt times the DFT of the even extension).

#include <functional>
#include <numbers>
#include <optional>

#include "wcs/common.hpp"
#include "wcs/fft.hpp"

namespace wcs::wave {

struct MediumSpec {
    double c0 = 1500.0;   // m/s
    double rho0 = 1000.0;  // kg/m^3
    double dx = 1e-4;      // m
    double dt = 20e-9;     // s
    std::size_t nt = 128;

    void validate() const {
        if (!(c0 > 0)) throw InvalidConfig("medium.c0 must be > 0");
        if (!(rho0 > 0)) throw InvalidConfig("medium.rho0 must be > 0");
        if (!(dx > 0)) throw InvalidConfig("medium.dx must be > 0");
        if (!(dt > 0)) throw InvalidConfig("medium.dt must be > 0");
        if (nt < 1) throw InvalidConfig("medium.nt must be >= 1");
    }
    double cfl() const { return c0 * dt / dx; }
    /// Distance travelled during the record, in voxels.
    double travel_voxels() const { return c0 * double(nt) * dt / dx; }
};

/// Smallest padding (voxels per axis) that keeps periodic images from
/// reaching the sensor within the record.
inline std::size_t minimum_pad(const MediumSpec& med) {
    return static_cast<std::size_t>(std::ceil(med.travel_voxels())) + 1;
}

struct ForwardOptions {
    std::optional<std::size_t> pad;  // defaults to minimum_pad
    /// Treat the lateral axes as periodic (no lateral padding). The axial
    /// padding is still enforced.
    bool periodic_lateral = false;
};

namespace detail {

inline double wavenumber(std::size_t i, std::size_t n, double dx) {
    return 2.0 * std::numbers::pi * double(fft::signed_freq(i, n)) / (double(n) * dx);
}

/// Centered Blackman profile on [-1, 1]: 1 at 0, 0 at +-1 and beyond.
inline double blackman_profile(double u) {
    u = std::abs(u);
    if (u >= 1.0) return 0.0;
    return 0.42 + 0.5 * std::cos(std::numbers::pi * u) + 0.08 * std::cos(2.0 * std::numbers::pi * u);
}

/// Even extension of p0 about z = 0 on an (N1, N2, Nz) grid, p0 placed at the lateral origin.
inline std::vector<cplx> even_extend(const Volume3D& p0, std::size_t N1, std::size_t N2, std::size_t Nz) {
    const auto [n1, n2, n3] = p0.dims;
    std::vector<cplx> out(N1 * N2 * Nz, 0.0);
    for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t j = 0; j < n2; ++j) {
            cplx* row = out.data() + (i * N2 + j) * Nz;
            for (std::size_t k = 0; k < n3; ++k) {
                row[k] = p0(i, j, k);
                if (k > 0) row[Nz - k] = p0(i, j, k);
            }
        }
    return out;
}

inline std::vector<int> shape(std::initializer_list<std::size_t> d) {
    std::vector<int> s;
    for (auto v : d) s.push_back(static_cast<int>(v));
    return s;
}

}  // namespace detail

/// p(x_S, t_i) for t_i = i*dt, i < nt, via p(k, t) = cos(c0 |k| t) p0(k) on a
/// padded grid with p0 evenly extended about the sensor plane.
inline SensorSeries spectral_forward(const Volume3D& p0, const MediumSpec& med, const ForwardOptions& opt = {},
                                     unsigned workers = 0) {
    med.validate();
    const auto [n1, n2, n3] = p0.dims;
    if (n1 == 0 || n2 == 0 || n3 == 0) throw InvalidInput("spectral_forward: empty volume");
    const std::size_t need = minimum_pad(med);
    const std::size_t pad = opt.pad.value_or(need);
    if (pad < need)
        throw InvalidConfig("spectral_forward: padding of " + std::to_string(pad) + " voxels is too small for nt = " +
                            std::to_string(med.nt) + "; minimum pad is " + std::to_string(need));
    const std::size_t N1 = opt.periodic_lateral ? n1 : n1 + pad;
    const std::size_t N2 = opt.periodic_lateral ? n2 : n2 + pad;
    const std::size_t Nz = 2 * (n3 + pad);
    auto P = detail::even_extend(p0, N1, N2, Nz);
    fft::transform(P, detail::shape({N1, N2, Nz}), fft::Direction::forward);

    // The spectrum is even in kz, so only kz >= 0 is summed, with weight 2
    // for bins that have a distinct mirror.
    const std::size_t nt = med.nt, half = Nz / 2;
    std::vector<cplx> S(nt * N1 * N2, 0.0);
    const double cdt = med.c0 * med.dt;
    parallel_for(N1, workers, [&](std::size_t i) {
        const double k1 = detail::wavenumber(i, N1, med.dx);
        for (std::size_t j = 0; j < N2; ++j) {
            const double k2 = detail::wavenumber(j, N2, med.dx);
            const cplx* row = P.data() + (i * N2 + j) * Nz;
            for (std::size_t kz = 0; kz <= half; ++kz) {
                const double k3 = detail::wavenumber(kz, Nz, med.dx);
                const double w = (kz == 0 || kz == half) ? 1.0 : 2.0;
                const cplx a = w * row[kz] / double(Nz);
                // cos((s+1) th) = 2 cos(th) cos(s th) - cos((s-1) th)
                const double c1 = std::cos(cdt * std::sqrt(k1 * k1 + k2 * k2 + k3 * k3));
                double prev = c1, cur = 1.0;
                for (std::size_t s = 0; s < nt; ++s) {
                    S[(s * N1 + i) * N2 + j] += cur * a;
                    const double next = 2.0 * c1 * cur - prev;
                    prev = cur;
                    cur = next;
                }
            }
        }
    });

    SensorSeries g(nt, n1, n2);
    const double scale = 1.0 / double(N1 * N2);
    parallel_for(nt, workers, [&](std::size_t s) {
        std::span<cplx> plane(S.data() + s * N1 * N2, N1 * N2);
        fft::transform(plane, detail::shape({N1, N2}), fft::Direction::backward);
        for (std::size_t i = 0; i < n1; ++i)
            for (std::size_t j = 0; j < n2; ++j) g(s, i, j) = plane[i * N2 + j].real() * scale;
    });
    return g;
}

/// Sensor-data spectrum predicted from p0:
///   p(k_S, w) = (w / c0^2) / k_perp * p0(k_S, k_perp),  k_perp = sqrt((w/c0)^2 - |k_S|^2),
/// zero outside the open cone w / c0 > |k_S|. The lateral axes of p0 are
/// treated as periodic; p0(k_S, .) is sampled on an oversampled kz grid and
/// interpolated linearly in k_perp.
class FrequencyModel {
  public:
    FrequencyModel(const Volume3D& p0, const MediumSpec& med, std::size_t oversample = 8) : med_(med) {
        med.validate();
        if (oversample < 1) throw InvalidInput("freq_model: oversample must be >= 1");
        n1_ = p0.dims[0];
        n2_ = p0.dims[1];
        Nz_ = 2 * oversample * p0.dims[2];
        half_ = Nz_ / 2;
        auto P = detail::even_extend(p0, n1_, n2_, Nz_);
        fft::transform(P, detail::shape({n1_, n2_, Nz_}), fft::Direction::forward);
        spec_.resize(n1_ * n2_ * (half_ + 1));
        for (std::size_t ij = 0; ij < n1_ * n2_; ++ij)
            for (std::size_t k = 0; k <= half_; ++k) spec_[ij * (half_ + 1) + k] = P[ij * Nz_ + k] * med.dx;
        dkz_ = 2.0 * std::numbers::pi / (double(Nz_) * med.dx);
    }

    std::size_t n1() const { return n1_; }
    std::size_t n2() const { return n2_; }

    /// Lateral wavenumber magnitude of DFT bin (i1, i2).
    double k_lateral(std::size_t i1, std::size_t i2) const {
        const double a = detail::wavenumber(i1, n1_, med_.dx), b = detail::wavenumber(i2, n2_, med_.dx);
        return std::sqrt(a * a + b * b);
    }

    cplx operator()(std::size_t i1, std::size_t i2, double omega) const {
        const double ks = k_lateral(i1, i2);
        if (!(std::abs(omega) > med_.c0 * ks)) return 0.0;
        const double w = std::abs(omega) / med_.c0;
        if (!(w > ks)) return 0.0;
        const double kp = std::sqrt((w - ks) * (w + ks));
        const double q = kp / dkz_;
        const auto i0 = static_cast<std::size_t>(q);
        if (i0 >= half_) return 0.0;
        const double fr = q - double(i0);
        const cplx* row = spec_.data() + (i1 * n2_ + i2) * (half_ + 1);
        const cplx val = (1.0 - fr) * row[i0] + fr * row[i0 + 1];
        return (w / med_.c0) / kp * val;
    }

    /// Temporal frequencies of the even extension of an nt-sample record.
    std::vector<double> omega_grid() const {
        std::vector<double> w(med_.nt);
        const double step = med_.nt > 1 ? std::numbers::pi / (double(med_.nt - 1) * med_.dt) : 0.0;
        for (std::size_t j = 0; j < w.size(); ++j) w[j] = step * double(j);
        return w;
    }

    /// The model on (omega_grid x lateral DFT grid), indexed (w, i1, i2).
    Array3<cplx> grid() const {
        const auto om = omega_grid();
        Array3<cplx> out(om.size(), n1_, n2_);
        for (std::size_t j = 0; j < om.size(); ++j)
            for (std::size_t a = 0; a < n1_; ++a)
                for (std::size_t b = 0; b < n2_; ++b) out(j, a, b) = (*this)(a, b, om[j]);
        return out;
    }

  private:
    MediumSpec med_;
    std::size_t n1_ = 0, n2_ = 0, Nz_ = 0, half_ = 0;
    double dkz_ = 0.0;
    std::vector<cplx> spec_;  // dx * DFT over kz >= 0
};

inline Array3<cplx> freq_model(const Volume3D& p0, const MediumSpec& med) { return FrequencyModel(p0, med).grid(); }

/// Tabulated band-limiting windows for an (nt, n1, n2) series. w_t is indexed
/// by the frequency bins of the record's even extension (0 .. nt-1), w_par by
/// the lateral DFT bins.
struct DegradationSpec {
    std::vector<double> w_t;
    Array2<double> w_par;

    void validate() const {
        for (double v : w_t)
            if (!(v >= 0.0 && v <= 1.0)) throw InvalidInput("degradation: w_t values must lie in [0, 1]");
        for (std::size_t i = 0; i < w_par.rows; ++i)
            for (std::size_t j = 0; j < w_par.cols; ++j) {
                const double v = w_par(i, j);
                if (!(v >= 0.0 && v <= 1.0)) throw InvalidInput("degradation: w_par values must lie in [0, 1]");
                const double m = w_par((w_par.rows - i) % w_par.rows, (w_par.cols - j) % w_par.cols);
                if (std::abs(v - m) > 1e-12) throw InvalidInput("degradation: w_par must be symmetric about zero frequency");
            }
    }
};

/// Window functions of normalized frequency (1 = Nyquist), from which both
/// the tabulated data windows and the equivalent p0 filter are derived.
struct DegradationWindows {
    std::function<double(double)> temporal;
    std::function<double(double, double)> lateral;

    static DegradationWindows blackman() {
        return {detail::blackman_profile,
                [](double u, double v) { return detail::blackman_profile(u) * detail::blackman_profile(v); }};
    }
    static DegradationWindows none() {
        return {[](double) { return 1.0; }, [](double, double) { return 1.0; }};
    }

    DegradationSpec tabulate(std::size_t nt, std::size_t n1, std::size_t n2) const {
        DegradationSpec d;
        d.w_t.resize(nt);
        for (std::size_t j = 0; j < nt; ++j) d.w_t[j] = temporal(nt > 1 ? double(j) / double(nt - 1) : 0.0);
        d.w_par = Array2<double>(n1, n2);
        for (std::size_t i = 0; i < n1; ++i)
            for (std::size_t j = 0; j < n2; ++j)
                d.w_par(i, j) = lateral(double(fft::signed_freq(i, n1)) / (0.5 * double(n1)),
                                        double(fft::signed_freq(j, n2)) / (0.5 * double(n2)));
        // The Nyquist bin of an even-length axis has no mirror; keep it real-symmetric.
        if (n1 % 2 == 0)
            for (std::size_t j = 0; j < n2; ++j) d.w_par(n1 / 2, j) = d.w_par(n1 / 2, (n2 - j) % n2);
        if (n2 % 2 == 0)
            for (std::size_t i = 0; i < n1; ++i) d.w_par(i, n2 / 2) = d.w_par((n1 - i) % n1, n2 / 2);
        return d;
    }
};

/// D[g]: windows applied in (w, k_S). Time uses the even extension of the
/// record, the lateral axes a circular DFT.
inline SensorSeries degrade(const SensorSeries& g, const DegradationSpec& d) {
    const auto [nt, n1, n2] = g.dims;
    if (d.w_t.size() != nt || d.w_par.rows != n1 || d.w_par.cols != n2)
        throw InvalidInput("degrade: window tables do not match the series grid");
    d.validate();
    if (nt == 0 || n1 == 0 || n2 == 0) return g;
    const std::size_t L = nt > 1 ? 2 * nt - 2 : 1;
    std::vector<cplx> buf(L * n1 * n2);
    for (std::size_t s = 0; s < L; ++s) {
        const std::size_t src = s < nt ? s : L - s;
        auto slice = g.slice(src);
        std::copy(slice.begin(), slice.end(), buf.begin() + std::ptrdiff_t(s * n1 * n2));
    }
    const auto dims = detail::shape({L, n1, n2});
    fft::transform(buf, dims, fft::Direction::forward);
    for (std::size_t s = 0; s < L; ++s) {
        const double wt = d.w_t[s < nt ? s : L - s];
        cplx* plane = buf.data() + s * n1 * n2;
        for (std::size_t ij = 0; ij < n1 * n2; ++ij) plane[ij] *= wt * d.w_par.data[ij];
    }
    fft::transform(buf, dims, fft::Direction::backward);
    SensorSeries out(nt, n1, n2);
    const double scale = 1.0 / double(buf.size());
    for (std::size_t i = 0; i < out.size(); ++i) out.data[i] = buf[i].real() * scale;
    return out;
}

namespace detail {

/// Multiplies the spectrum of the even extension of p0 (z padded to
/// `zfactor` times its depth) by `gain(k1, k2, kz)` and returns the result on
/// the original grid.
template <typename Gain>
Volume3D filter_even(const Volume3D& p0, std::size_t zfactor, Gain&& gain) {
    const auto [n1, n2, n3] = p0.dims;
    const std::size_t Nz = std::max<std::size_t>(2 * zfactor * n3, 2);
    auto P = even_extend(p0, n1, n2, Nz);
    const auto dims = shape({n1, n2, Nz});
    fft::transform(P, dims, fft::Direction::forward);
    for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t j = 0; j < n2; ++j)
            for (std::size_t k = 0; k < Nz; ++k) P[(i * n2 + j) * Nz + k] *= gain(i, j, k, Nz);
    fft::transform(P, dims, fft::Direction::backward);
    Volume3D out(n1, n2, n3);
    const double scale = 1.0 / double(P.size());
    for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t j = 0; j < n2; ++j)
            for (std::size_t k = 0; k < n3; ++k) out(i, j, k) = P[(i * n2 + j) * Nz + k].real() * scale;
    return out;
}

}  // namespace detail

/// The p0 filter w_t(c0 |k|) w_par(k_S) whose forward data equals the
/// degraded data of p0, for a sensor whose lateral grid matches p0's.
inline Volume3D filter_p0(const Volume3D& p0, const DegradationWindows& win, const MediumSpec& med) {
    med.validate();
    const auto [n1, n2, n3] = p0.dims;
    const double wnyq = std::numbers::pi / med.dt;
    return detail::filter_even(p0, 2, [&](std::size_t i, std::size_t j, std::size_t k, std::size_t Nz) {
        const double k1 = detail::wavenumber(i, n1, med.dx), k2 = detail::wavenumber(j, n2, med.dx);
        const double k3 = detail::wavenumber(k, Nz, med.dx);
        const double wt = win.temporal(med.c0 * std::sqrt(k1 * k1 + k2 * k2 + k3 * k3) / wnyq);
        const double wp = win.lateral(double(fft::signed_freq(i, n1)) / (0.5 * double(n1)),
                                      double(fft::signed_freq(j, n2)) / (0.5 * double(n2)));
        return wt * wp;
    });
}

/// Multiplies the 3D spectrum of p0 by the separable Blackman window of the grid.
inline Volume3D blackman_smooth(const Volume3D& p0) {
    const auto [n1, n2, n3] = p0.dims;
    if (p0.size() == 0) return p0;
    auto w = [](std::size_t n) {
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = detail::blackman_profile(double(fft::signed_freq(i, n)) / (0.5 * double(n)));
        return v;
    };
    const auto w1 = w(n1), w2 = w(n2), w3 = w(n3);
    std::vector<cplx> P(p0.data.begin(), p0.data.end());
    const auto dims = detail::shape({n1, n2, n3});
    fft::transform(P, dims, fft::Direction::forward);
    for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t j = 0; j < n2; ++j)
            for (std::size_t k = 0; k < n3; ++k) P[(i * n2 + j) * n3 + k] *= w1[i] * w2[j] * w3[k];
    fft::transform(P, dims, fft::Direction::backward);
    Volume3D out(n1, n2, n3);
    const double scale = 1.0 / double(P.size());
    for (std::size_t i = 0; i < P.size(); ++i) out.data[i] = P[i].real() * scale;
    return out;
}

struct TimeReversalOptions {
    std::size_t frame = 8;  // absorbing layer on the lateral sides and the far z side
    std::size_t below = 8;  // absorbing layer behind the sensor plane
};

/// Reverse-time k-space stepping with the sensor plane held at the data:
///   p^{n-1} = 2 cos(c0 |k| dt) p^n - p^{n+1},
/// which equals the leapfrog step with the sinc(c0 |k| dt / 2) correction.
/// Returns the field at t = 0 on the (n1, n2, n3) grid below the sensor.
inline Volume3D time_reversal(const SensorSeries& g, const MediumSpec& med, std::array<std::size_t, 3> grid,
                              const TimeReversalOptions& opt = {}) {
    med.validate();
    const auto [nt, a1, a2] = g.dims;
    const auto [n1, n2, n3] = grid;
    if (a1 != n1 || a2 != n2) throw InvalidInput("time_reversal: sensor plane does not match the grid");
    if (nt == 0 || n3 == 0) throw InvalidInput("time_reversal: empty input");
    if (med.cfl() > 0.3) log_warn("time_reversal: c0*dt/dx = " + std::to_string(med.cfl()) + " exceeds 0.3");
    const std::size_t F = opt.frame, B = opt.below;
    const std::size_t N1 = n1 + 2 * F, N2 = n2 + 2 * F, Nz = B + n3 + F;
    const auto dims = detail::shape({N1, N2, Nz});
    const std::size_t total = N1 * N2 * Nz;

    std::vector<double> C(total);
    for (std::size_t i = 0; i < N1; ++i) {
        const double k1 = detail::wavenumber(i, N1, med.dx);
        for (std::size_t j = 0; j < N2; ++j) {
            const double k2 = detail::wavenumber(j, N2, med.dx);
            for (std::size_t k = 0; k < Nz; ++k) {
                const double k3 = detail::wavenumber(k, Nz, med.dx);
                C[(i * N2 + j) * Nz + k] = 2.0 * std::cos(med.c0 * med.dt * std::sqrt(k1 * k1 + k2 * k2 + k3 * k3));
            }
        }
    }
    // Cosine taper, smallest at the outer edge of each layer.
    auto taper = [](std::size_t n, std::size_t lo, std::size_t hi) {
        std::vector<double> w(n, 1.0);
        auto ramp = [](std::size_t i, std::size_t width) {
            return 0.5 * (1.0 - std::cos(std::numbers::pi * (double(i) + 0.5) / double(width)));
        };
        for (std::size_t i = 0; i < lo; ++i) w[i] = ramp(i, lo);
        for (std::size_t i = 0; i < hi; ++i) w[n - 1 - i] = ramp(i, hi);
        return w;
    };
    const auto t1 = taper(N1, F, F), t2 = taper(N2, F, F), t3 = taper(Nz, B, F);

    std::vector<double> prev(total, 0.0), cur(total, 0.0), next(total);
    std::vector<cplx> work(total);
    auto set_plane = [&](std::vector<double>& p, std::size_t s) {
        for (std::size_t i = 0; i < n1; ++i)
            for (std::size_t j = 0; j < n2; ++j) p[((i + F) * N2 + (j + F)) * Nz + B] = g(s, i, j);
    };
    set_plane(cur, nt - 1);
    const double scale = 1.0 / double(total);
    for (std::size_t s = nt - 1; s-- > 0;) {
        std::copy(cur.begin(), cur.end(), work.begin());
        fft::transform(work, dims, fft::Direction::forward);
        for (std::size_t i = 0; i < total; ++i) work[i] *= C[i];
        fft::transform(work, dims, fft::Direction::backward);
        for (std::size_t i = 0; i < N1; ++i)
            for (std::size_t j = 0; j < N2; ++j) {
                const double wij = t1[i] * t2[j];
                for (std::size_t k = 0; k < Nz; ++k) {
                    const std::size_t idx = (i * N2 + j) * Nz + k;
                    next[idx] = (work[idx].real() * scale - prev[idx]) * wij * t3[k];
                }
            }
        set_plane(next, s);
        std::swap(prev, cur);
        std::swap(cur, next);
        if (s % 16 == 0 && !std::all_of(cur.begin(), cur.end(), [](double v) { return std::isfinite(v); }))
            throw NumericalFailure("time_reversal: non-finite field at step " + std::to_string(s), long(s));
    }
    Volume3D out(n1, n2, n3);
    for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t j = 0; j < n2; ++j)
            for (std::size_t k = 0; k < n3; ++k) out(i, j, k) = cur[((i + F) * N2 + (j + F)) * Nz + B + k];
    return out;
}

/// Part of p0 whose wavefronts reach the sensor within the record: at depth
/// z, wavevectors are kept when the ray from the lateral center of the grid
/// along them meets the aperture [0, n1) x [0, n2) within c0 * nt * dt.
inline Volume3D visible_part(const Volume3D& p0, const MediumSpec& med) {
    med.validate();
    const auto [n1, n2, n3] = p0.dims;
    const double reach = med.travel_voxels();
    Volume3D out(n1, n2, n3);
    const std::size_t Nz = 4 * n3;
    auto P = detail::even_extend(p0, n1, n2, Nz);
    const auto dims = detail::shape({n1, n2, Nz});
    fft::transform(P, dims, fft::Direction::forward);
    std::vector<cplx> work(P.size());
    for (std::size_t z = 0; z < n3; ++z) {
        const double depth = std::max(double(z), 0.5);
        if (depth > reach) break;
        // Lateral offsets reachable along the ray, limited by aperture and travel time.
        const double lat = std::sqrt(std::max(reach * reach - depth * depth, 0.0));
        const double a1 = std::min(0.5 * double(n1), lat) / depth, a2 = std::min(0.5 * double(n2), lat) / depth;
        for (std::size_t i = 0; i < n1; ++i) {
            const double f1 = std::abs(double(fft::signed_freq(i, n1))) / double(n1);
            for (std::size_t j = 0; j < n2; ++j) {
                const double f2 = std::abs(double(fft::signed_freq(j, n2))) / double(n2);
                for (std::size_t k = 0; k < Nz; ++k) {
                    const double f3 = std::abs(double(fft::signed_freq(k, Nz))) / double(Nz);
                    const std::size_t idx = (i * n2 + j) * Nz + k;
                    const bool keep = f1 <= a1 * f3 + 1e-12 && f2 <= a2 * f3 + 1e-12;
                    work[idx] = keep ? P[idx] : cplx(0.0);
                }
            }
        }
        fft::transform(work, dims, fft::Direction::backward);
        const double scale = 1.0 / double(work.size());
        for (std::size_t i = 0; i < n1; ++i)
            for (std::size_t j = 0; j < n2; ++j) out(i, j, z) = work[(i * n2 + j) * Nz + z].real() * scale;
    }
    return out;
}

}  // namespace wcs::wave
