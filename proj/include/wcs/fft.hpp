#pragma once

// Thin FFTW wrapper. Plans are created once per (shape, direction) under a
// mutex and executed with the new-array interface, which FFTW documents as
// thread-safe; every call supplies its own buffers.

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "wcs/common.hpp"

namespace wcs::fft {

enum class Direction { forward = FFTW_FORWARD, backward = FFTW_BACKWARD };

namespace detail {

struct PlanKey {
    std::vector<int> dims;
    int sign;
    auto operator<=>(const PlanKey&) const = default;
};

struct PlanDeleter {
    void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};

inline std::mutex& planner_mutex() {
    static std::mutex mu;
    return mu;
}

inline fftw_plan get_plan(const std::vector<int>& dims, int sign) {
    static std::map<PlanKey, std::unique_ptr<fftw_plan_s, PlanDeleter>> cache;
    std::lock_guard lock(planner_mutex());
    PlanKey key{dims, sign};
    auto it = cache.find(key);
    if (it != cache.end()) return it->second.get();
    std::size_t total = 1;
    for (int d : dims) total *= static_cast<std::size_t>(d);
    auto* buf = fftw_alloc_complex(total);
    fftw_plan p = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), buf, buf, sign,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    if (!p) throw NumericalFailure("fftw: could not create plan");
    cache.emplace(key, std::unique_ptr<fftw_plan_s, PlanDeleter>(p));
    return p;
}

}  // namespace detail

/// In-place unnormalized DFT over a row-major array of shape `dims`.
inline void transform(std::span<cplx> data, const std::vector<int>& dims, Direction dir) {
    std::size_t total = 1;
    for (int d : dims) total *= static_cast<std::size_t>(d);
    if (data.size() != total) throw InvalidInput("fft: buffer size does not match shape");
    if (total == 0) return;
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(detail::get_plan(dims, static_cast<int>(dir)), p, p);
}

/// In-place DFT scaled by 1/sqrt(size), i.e. unitary.
inline void unitary(std::span<cplx> data, const std::vector<int>& dims, Direction dir) {
    transform(data, dims, dir);
    const double s = 1.0 / std::sqrt(static_cast<double>(data.size()));
    for (auto& v : data) v *= s;
}

/// Signed frequency index of DFT bin i on a grid of length n: i for i < n/2 ... wraps to negative.
inline long signed_freq(std::size_t i, std::size_t n) {
    const long li = static_cast<long>(i), ln = static_cast<long>(n);
    return li < (ln + 1) / 2 ? li : li - ln;
}

/// DFT bin holding signed frequency k on a grid of length n.
inline std::size_t bin_of(long k, std::size_t n) {
    const long ln = static_cast<long>(n);
    long r = k % ln;
    if (r < 0) r += ln;
    return static_cast<std::size_t>(r);
}

}  // namespace wcs::fft
