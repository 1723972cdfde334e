#pragma once

// SALSA (an ADMM splitting) for
//     min_f  1/2 ||A f - b||^2 + tau ||f||_1,   A = Phi Psi^T,
// with the exact Sherman-Morrison-Woodbury inner solve that A A^T = I
// permits, plus per-time-step orchestration over a sensor series.

#include <algorithm>
#include <concepts>

#include "wcs/common.hpp"
#include "wcs/curvelet.hpp"
#include "wcs/hadamard.hpp"

namespace wcs::solver {

template <typename Op>
concept LinearOperator = requires(const Op& op, std::span<const double> x, std::span<double> y) {
    { op.rows() } -> std::convertible_to<std::size_t>;
    { op.cols() } -> std::convertible_to<std::size_t>;
    op.apply(x, y);
    op.adjoint(x, y);
};

/// A = Phi Psi^T: curvelet synthesis followed by scrambled-Hadamard sensing.
class FrameSensing {
  public:
    FrameSensing(const SensingOperator& phi, const curvelet::CurveletPlan& psi) : phi_(phi), psi_(psi) {
        if (phi.n() != psi.image_size()) throw InvalidInput("FrameSensing: sensor size does not match frame");
    }
    std::size_t rows() const { return phi_.m(); }
    std::size_t cols() const { return psi_.coeff_count(); }
    void apply(std::span<const double> f, std::span<double> b) const { phi_.apply(psi_.adjoint(f), b); }
    void adjoint(std::span<const double> b, std::span<double> f) const { psi_.forward(phi_.adjoint(b), f); }

  private:
    const SensingOperator& phi_;
    const curvelet::CurveletPlan& psi_;
};

/// A = Phi, for signals sparse in the pixel basis.
class PixelSensing {
  public:
    explicit PixelSensing(const SensingOperator& phi) : phi_(phi) {}
    std::size_t rows() const { return phi_.m(); }
    std::size_t cols() const { return phi_.n(); }
    void apply(std::span<const double> f, std::span<double> b) const { phi_.apply(f, b); }
    void adjoint(std::span<const double> b, std::span<double> f) const { phi_.adjoint(b, f); }

  private:
    const SensingOperator& phi_;
};

struct RecoveryConfig {
    double tau_factor = 0.01;  // tau = tau_factor * max|A^T b|
    double mu_factor = 5.0;    // mu = mu_factor * max|A^T b| / ||b||
    double tol = 5e-4;         // relative objective change
    int max_iters = 100;

    void validate() const {
        if (!(tau_factor > 0)) throw InvalidConfig("solver.tau_factor must be > 0");
        if (!(mu_factor > 0)) throw InvalidConfig("solver.mu_factor must be > 0");
        if (!(tol > 0)) throw InvalidConfig("solver.tol must be > 0");
        if (max_iters < 1) throw InvalidConfig("solver.max_iters must be >= 1");
    }
};

enum class StopReason { tolerance, max_iters, failed };

inline const char* to_string(StopReason r) {
    switch (r) {
        case StopReason::tolerance: return "tolerance";
        case StopReason::max_iters: return "max_iters";
        case StopReason::failed: return "failed";
    }
    return "?";
}

struct SolveReport {
    int iterations = 0;
    std::vector<double> objective;  // zeta(f_0) .. zeta(f_iterations)
    double residual = 0.0;          // ||A f* - b||
    StopReason stop = StopReason::tolerance;
    double tau = 0.0, mu = 0.0;
};

/// Proximal map of theta*||.||_1.
inline void soft_threshold(std::span<const double> x, double theta, std::span<double> out) {
    if (theta < 0) throw InvalidInput("soft_threshold: theta must be >= 0");
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double a = std::abs(x[i]) - theta;
        out[i] = a > 0 ? std::copysign(a, x[i]) : 0.0;
    }
}

inline std::vector<double> soft_threshold(std::span<const double> x, double theta) {
    std::vector<double> out(x.size());
    soft_threshold(x, theta, out);
    return out;
}

/// (A^T A + mu I)^{-1} r for A with orthonormal rows: one apply, one adjoint.
template <LinearOperator Op>
std::vector<double> smw_apply(const Op& A, double mu, std::span<const double> r) {
    if (!(mu > 0)) throw InvalidInput("smw_apply: mu must be > 0");
    if (r.size() != A.cols()) throw InvalidInput("smw_apply: length mismatch");
    std::vector<double> Ar(A.rows()), AtAr(A.cols());
    A.apply(r, Ar);
    A.adjoint(Ar, AtAr);
    std::vector<double> out(r.size());
    const double c = 1.0 / (mu + 1.0);
    for (std::size_t i = 0; i < r.size(); ++i) out[i] = (r[i] - c * AtAr[i]) / mu;
    return out;
}

struct SalsaResult {
    std::vector<double> f;
    SolveReport report;
};

namespace detail {
inline double l1(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += std::abs(v);
    return s;
}
inline bool all_finite(std::span<const double> x) {
    for (double v : x)
        if (!std::isfinite(v)) return false;
    return true;
}
}  // namespace detail

/// Runs SALSA from v0 = A^T b, d0 = 0 unless warm starts are supplied.
/// Returns the thresholded iterate v, which is exactly sparse.
template <LinearOperator Op>
SalsaResult salsa(const Op& A, std::span<const double> b, const RecoveryConfig& cfg,
                  std::optional<std::vector<double>> v0 = std::nullopt,
                  std::optional<std::vector<double>> d0 = std::nullopt) {
    cfg.validate();
    if (b.size() != A.rows()) throw InvalidInput("salsa: measurement length mismatch");
    if (!detail::all_finite(b)) throw NumericalFailure("salsa: non-finite measurement at iteration 0", 0);
    const std::size_t N = A.cols(), m = A.rows();
    SalsaResult out;
    auto& rep = out.report;

    std::vector<double> Atb(N);
    A.adjoint(b, Atb);
    const double scale = max_abs(Atb), bnorm = norm2(b);
    if (bnorm == 0.0 || scale == 0.0) {
        out.f.assign(N, 0.0);
        rep.iterations = 1;
        rep.objective = {0.0, 0.0};
        rep.residual = bnorm;
        return out;
    }
    rep.tau = cfg.tau_factor * scale;
    rep.mu = cfg.mu_factor * scale / bnorm;
    const double tau = rep.tau, mu = rep.mu;

    std::vector<double> v = v0 ? std::move(*v0) : Atb;
    std::vector<double> d = d0 ? std::move(*d0) : std::vector<double>(N, 0.0);
    if (v.size() != N || d.size() != N) throw InvalidInput("salsa: warm start length mismatch");

    std::vector<double> Ax(m), rhs(N), f(N), AtAr(N), tmp(N);
    auto objective = [&](std::span<const double> Af, std::span<const double> x) {
        double r2 = 0.0;
        for (std::size_t i = 0; i < m; ++i) r2 += (Af[i] - b[i]) * (Af[i] - b[i]);
        return 0.5 * r2 + tau * detail::l1(x);
    };

    A.apply(v, Ax);
    double zeta_prev = objective(Ax, v);
    rep.objective.push_back(zeta_prev);
    rep.stop = StopReason::max_iters;

    const double c = 1.0 / (mu + 1.0);
    for (int it = 1; it <= cfg.max_iters; ++it) {
        for (std::size_t i = 0; i < N; ++i) rhs[i] = Atb[i] + mu * (v[i] + d[i]);
        // f = (A^T A + mu I)^{-1} rhs; since A A^T = I, A f = A rhs / (mu + 1).
        A.apply(rhs, Ax);
        A.adjoint(Ax, AtAr);
        for (std::size_t i = 0; i < N; ++i) f[i] = (rhs[i] - c * AtAr[i]) / mu;
        for (auto& x : Ax) x *= c;
        for (std::size_t i = 0; i < N; ++i) tmp[i] = f[i] - d[i];
        soft_threshold(tmp, tau / mu, v);
        for (std::size_t i = 0; i < N; ++i) d[i] -= f[i] - v[i];

        const double zeta = objective(Ax, f);
        rep.objective.push_back(zeta);
        rep.iterations = it;
        if (!std::isfinite(zeta) || !detail::all_finite(v))
            throw NumericalFailure("salsa: non-finite iterate at iteration " + std::to_string(it), it);
        // The test compares two f-iterates, so it starts at the second step;
        // with v0 = A^T b, d0 = 0 the first f-step reproduces v0 exactly.
        if (it >= 2 && (zeta_prev == 0.0 || std::abs(zeta - zeta_prev) / zeta_prev < cfg.tol)) {
            rep.stop = StopReason::tolerance;
            break;
        }
        zeta_prev = zeta;
    }
    A.apply(v, Ax);
    double r2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) r2 += (Ax[i] - b[i]) * (Ax[i] - b[i]);
    rep.residual = std::sqrt(r2);
    out.f = std::move(v);
    return out;
}

struct SeriesRecovery {
    SensorSeries series;
    std::vector<SolveReport> reports;
};

/// Recovers every time step independently: B(j, t) holds measurement j of
/// step t. A failing step yields a zero field and a `failed` report.
inline SeriesRecovery recover_series(const SensingOperator& op, const curvelet::CurveletPlan& plan,
                                     const Array2<double>& B, const RecoveryConfig& cfg, unsigned workers = 0) {
    cfg.validate();
    if (B.rows != op.m()) throw InvalidInput("recover_series: B has " + std::to_string(B.rows) + " rows, expected m = " + std::to_string(op.m()));
    const std::size_t nt = B.cols;
    SeriesRecovery out;
    out.series = SensorSeries(nt, std::size_t(plan.n1()), std::size_t(plan.n2()));
    out.reports.resize(nt);
    const FrameSensing A(op, plan);
    parallel_for(nt, workers, [&](std::size_t t) {
        std::vector<double> b(op.m());
        for (std::size_t j = 0; j < op.m(); ++j) b[j] = B(j, t);
        try {
            auto res = salsa(A, b, cfg);
            auto g = plan.adjoint(res.f);
            std::copy(g.begin(), g.end(), out.series.slice(t).begin());
            out.reports[t] = std::move(res.report);
        } catch (const Error& e) {
            log_error("recover_series: time step " + std::to_string(t) + ": " + e.what());
            out.reports[t] = SolveReport{};
            out.reports[t].stop = StopReason::failed;
        }
    });
    return out;
}

/// Zero-filled linear reconstruction g = Phi^T b per time step.
inline SensorSeries linear_series(const SensingOperator& op, const Array2<double>& B, std::size_t n1, std::size_t n2) {
    if (B.rows != op.m() || n1 * n2 != op.n()) throw InvalidInput("linear_series: shape mismatch");
    SensorSeries out(B.cols, n1, n2);
    std::vector<double> b(op.m());
    for (std::size_t t = 0; t < B.cols; ++t) {
        for (std::size_t j = 0; j < op.m(); ++j) b[j] = B(j, t);
        op.adjoint(b, out.slice(t));
    }
    return out;
}

}  // namespace wcs::solver
