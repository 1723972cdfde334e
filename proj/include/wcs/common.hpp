#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <iostream>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace wcs {

using cplx = std::complex<double>;

// Error hierarchy. Each category maps to one CLI exit code.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
  public:
    using Error::Error;
};

class InvalidState : public Error {
  public:
    using Error::Error;
};

class InvalidConfig : public Error {
  public:
    using Error::Error;
};

class NumericalFailure : public Error {
  public:
    NumericalFailure(const std::string& what, long index = -1) : Error(what), index_(index) {}
    long index() const { return index_; }

  private:
    long index_;
};

class IoError : public Error {
  public:
    using Error::Error;
};

class BadMagic : public IoError {
  public:
    using IoError::IoError;
};

class TruncatedFile : public IoError {
  public:
    using IoError::IoError;
};

class CorruptFile : public IoError {
  public:
    using IoError::IoError;
};

inline bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

inline void log_warn(const std::string& msg) {
    static std::mutex mu;
    std::lock_guard lock(mu);
    std::cerr << "warning: " << msg << '\n';
}

inline void log_error(const std::string& msg) {
    static std::mutex mu;
    std::lock_guard lock(mu);
    std::cerr << "error: " << msg << '\n';
}

/// Dense row-major 2D array.
template <typename T>
struct Array2 {
    std::size_t rows = 0, cols = 0;
    std::vector<T> data;

    Array2() = default;
    Array2(std::size_t r, std::size_t c, T fill = T{}) : rows(r), cols(c), data(r * c, fill) {}

    T& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
    std::size_t size() const { return data.size(); }
};

/// Dense row-major 3D array, index (i, j, k) with k fastest.
template <typename T>
struct Array3 {
    std::array<std::size_t, 3> dims{0, 0, 0};
    std::vector<T> data;

    Array3() = default;
    Array3(std::size_t d0, std::size_t d1, std::size_t d2, T fill = T{})
        : dims{d0, d1, d2}, data(d0 * d1 * d2, fill) {}

    T& operator()(std::size_t i, std::size_t j, std::size_t k) {
        return data[(i * dims[1] + j) * dims[2] + k];
    }
    const T& operator()(std::size_t i, std::size_t j, std::size_t k) const {
        return data[(i * dims[1] + j) * dims[2] + k];
    }
    std::size_t size() const { return data.size(); }

    std::span<T> slice(std::size_t i) { return {data.data() + i * dims[1] * dims[2], dims[1] * dims[2]}; }
    std::span<const T> slice(std::size_t i) const {
        return {data.data() + i * dims[1] * dims[2], dims[1] * dims[2]};
    }
};

/// Initial pressure volume, indexed (x1, x2, z); z = 0 is the sensor plane.
using Volume3D = Array3<double>;

/// Pressure on the planar sensor, indexed (t, x1, x2).
using SensorSeries = Array3<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double max_abs(std::span<const double> a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

/// Runs `fn(i)` for i in [0, count) on up to `workers` threads (0 = all cores).
/// The first exception thrown by `fn` is rethrown after all workers stop.
template <typename Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mu);
                        if (!failure) failure = std::current_exception();
                        next = count;
                    }
                }
            });
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace wcs
