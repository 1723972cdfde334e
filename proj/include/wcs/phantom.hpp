#pragma once

// Parametric ball phantoms and the evaluation metrics used by the pipeline.

#include <algorithm>
#include <fstream>
#include <numbers>
#include <random>

#include "wcs/common.hpp"

namespace wcs {

struct Ball {
    std::array<double, 3> center;  // voxel units, (x1, x2, z)
    double radius;                 // voxels
    double amplitude;
};

struct BallPhantomSpec {
    std::array<std::size_t, 3> dims{64, 64, 64};
    std::vector<Ball> balls;
    std::uint32_t seed = 0;
};

/// Voxelized union of balls; overlapping balls take the larger amplitude.
/// A radius below one voxel marks the single voxel nearest the center.
inline Volume3D make_ball_phantom(const BallPhantomSpec& spec) {
    Volume3D vol(spec.dims[0], spec.dims[1], spec.dims[2], 0.0);
    for (std::size_t b = 0; b < spec.balls.size(); ++b) {
        const Ball& ball = spec.balls[b];
        if (!(ball.radius >= 0.0) || !(ball.amplitude > 0.0))
            throw InvalidInput("ball " + std::to_string(b) + ": radius must be >= 0 and amplitude > 0");
        const std::string tag = "ball " + std::to_string(b);
        if (ball.radius < 1.0) {
            std::array<std::size_t, 3> c{};
            for (int a = 0; a < 3; ++a) {
                const double r = std::round(ball.center[a]);
                if (!(r >= 0.0 && r < double(spec.dims[a]))) throw InvalidInput(tag + " lies outside the grid");
                c[a] = std::size_t(r);
            }
            double& v = vol(c[0], c[1], c[2]);
            v = std::max(v, ball.amplitude);
            continue;
        }
        const double r = ball.radius;
        std::array<long, 3> lo{}, hi{};
        for (int a = 0; a < 3; ++a) {
            if (!(ball.center[a] - r >= -0.5 && ball.center[a] + r <= double(spec.dims[a]) - 0.5))
                throw InvalidInput(tag + " extends outside the grid");
            lo[a] = std::max(0L, long(std::floor(ball.center[a] - r)));
            hi[a] = std::min(long(spec.dims[a]) - 1, long(std::ceil(ball.center[a] + r)));
        }
        for (long i = lo[0]; i <= hi[0]; ++i)
            for (long j = lo[1]; j <= hi[1]; ++j)
                for (long k = lo[2]; k <= hi[2]; ++k) {
                    const double d0 = i - ball.center[0], d1 = j - ball.center[1], d2 = k - ball.center[2];
                    if (d0 * d0 + d1 * d1 + d2 * d2 <= r * r) {
                        double& v = vol(std::size_t(i), std::size_t(j), std::size_t(k));
                        v = std::max(v, ball.amplitude);
                    }
                }
    }
    return vol;
}

/// Clock layout: twelve balls on a circle parallel to the sensor plus two
/// hands of small balls, scaled to the lateral grid size.
inline BallPhantomSpec clock_phantom_spec(std::array<std::size_t, 3> dims, double depth) {
    BallPhantomSpec spec;
    spec.dims = dims;
    const double c1 = 0.5 * double(dims[0] - 1), c2 = 0.5 * double(dims[1] - 1);
    const double s = double(std::min(dims[0], dims[1])) / 64.0;
    const double ring = 20.0 * s;
    for (int h = 0; h < 12; ++h) {
        const double a = 2.0 * std::numbers::pi * h / 12.0;
        const double radius = (h % 3 == 0 ? 4.0 : 2.5) * s;
        spec.balls.push_back({{c1 + ring * std::cos(a), c2 + ring * std::sin(a), depth}, radius, h % 3 == 0 ? 1.0 : 0.8});
    }
    // hour hand: short, toward 2 o'clock; minute hand: long, toward 9 o'clock, deeper
    for (int i = 0; i <= 3; ++i) {
        const double a = 2.0 * std::numbers::pi * 2.0 / 12.0;
        spec.balls.push_back({{c1 + 3.0 * s * i * std::cos(a), c2 + 3.0 * s * i * std::sin(a), depth}, 2.0 * s, 0.6});
    }
    for (int i = 1; i <= 5; ++i) {
        const double a = 2.0 * std::numbers::pi * 9.0 / 12.0;
        spec.balls.push_back(
            {{c1 + 3.0 * s * i * std::cos(a), c2 + 3.0 * s * i * std::sin(a), depth + 6.0 * s}, 2.0 * s, 0.6});
    }
    return spec;
}

/// Seeded random layout of `count` balls, each fully inside the grid.
inline BallPhantomSpec random_phantom_spec(std::array<std::size_t, 3> dims, std::size_t count, std::uint32_t seed) {
    BallPhantomSpec spec;
    spec.dims = dims;
    spec.seed = seed;
    std::mt19937_64 rng(seed);
    const double s = double(std::min({dims[0], dims[1], dims[2]})) / 64.0;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t b = 0; b < count; ++b) {
        const double r = (2.0 + 3.0 * unit(rng)) * s;
        Ball ball{{}, r, 0.5 + 0.5 * unit(rng)};
        for (int a = 0; a < 3; ++a) {
            const double lo = r - 0.5, hi = double(dims[a]) - 0.5 - r;
            if (hi < lo) throw InvalidInput("random_phantom_spec: grid too small for the ball radius");
            ball.center[a] = lo + (hi - lo) * unit(rng);
        }
        spec.balls.push_back(ball);
    }
    return spec;
}

inline double mse(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw InvalidInput("mse: size mismatch");
    if (a.empty()) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s / double(a.size());
}

/// Pearson correlation coefficient.
inline double correlation(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.empty()) throw InvalidInput("correlation: size mismatch");
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= double(a.size());
    mb /= double(b.size());
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa == 0 || sbb == 0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

/// Min-max normalized 8-bit grayscale bytes; NaNs map to 0, a constant field to mid-gray.
inline std::vector<std::uint8_t> grayscale_bytes(const Array2<double>& field) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    bool saw_nan = false;
    for (double v : field.data) {
        if (std::isnan(v)) {
            saw_nan = true;
            continue;
        }
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (saw_nan) log_warn("emit_image: NaN values mapped to 0");
    std::vector<std::uint8_t> out(field.size());
    for (std::size_t i = 0; i < field.size(); ++i) {
        const double v = field.data[i];
        if (std::isnan(v))
            out[i] = 0;
        else if (!(hi > lo))
            out[i] = 128;
        else
            out[i] = static_cast<std::uint8_t>(std::lround(255.0 * (v - lo) / (hi - lo)));
    }
    return out;
}

/// Writes a binary PGM (P5) image.
inline void emit_image(const Array2<double>& field, const std::string& path) {
    const auto bytes = grayscale_bytes(field);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("emit_image: cannot open " + path);
    os << "P5\n" << field.cols << ' ' << field.rows << "\n255\n";
    os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw IoError("emit_image: write failed for " + path);
}

/// Slice z = k of a volume as an (x1, x2) image.
inline Array2<double> z_slice(const Volume3D& v, std::size_t k) {
    if (k >= v.dims[2]) throw InvalidInput("z_slice: index out of range");
    Array2<double> out(v.dims[0], v.dims[1]);
    for (std::size_t i = 0; i < v.dims[0]; ++i)
        for (std::size_t j = 0; j < v.dims[1]; ++j) out(i, j) = v(i, j, k);
    return out;
}

/// Slice x1 = i of a volume as an (x2, z) image.
inline Array2<double> x_slice(const Volume3D& v, std::size_t i) {
    if (i >= v.dims[0]) throw InvalidInput("x_slice: index out of range");
    Array2<double> out(v.dims[1], v.dims[2]);
    for (std::size_t j = 0; j < v.dims[1]; ++j)
        for (std::size_t k = 0; k < v.dims[2]; ++k) out(j, k) = v(i, j, k);
    return out;
}

/// Maximum intensity projection along z.
inline Array2<double> mip_z(const Volume3D& v) {
    Array2<double> out(v.dims[0], v.dims[1], -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < v.dims[0]; ++i)
        for (std::size_t j = 0; j < v.dims[1]; ++j)
            for (std::size_t k = 0; k < v.dims[2]; ++k) out(i, j) = std::max(out(i, j), v(i, j, k));
    return out;
}

}  // namespace wcs
