#pragma once

// Quick invariant checks on tiny problem sizes, run by `wcs selftest`.

#include <functional>
#include <random>

#include "wcs/pipeline.hpp"

namespace wcs {

struct CheckResult {
    std::string name;
    bool ok = false;
    std::string detail;
};

namespace detail {

inline std::vector<double> gaussian(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> d(0.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

inline std::string sci(double v) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << v;
    return os.str();
}

}  // namespace detail

inline std::vector<CheckResult> run_selftest(const std::filesystem::path& scratch) {
    std::vector<CheckResult> out;
    std::mt19937_64 rng(7);
    auto check = [&](std::string name, const std::function<std::pair<bool, std::string>()>& fn) {
        CheckResult r{std::move(name), false, {}};
        try {
            std::tie(r.ok, r.detail) = fn();
        } catch (const std::exception& e) {
            r.ok = false;
            r.detail = std::string("threw: ") + e.what();
        }
        out.push_back(std::move(r));
    };
    auto bound = [](double err, double tol) { return std::pair{err < tol, "error " + detail::sci(err)}; };

    check("fwht is an involution", [&] {
        const auto x = detail::gaussian(64, rng);
        const auto y = fwht(fwht(x));
        double err = 0;
        for (std::size_t i = 0; i < x.size(); ++i) err = std::max(err, std::abs(x[i] - y[i]));
        return bound(err, 1e-12);
    });

    check("sensing adjoint identity", [&] {
        const auto op = SensingOperator::scrambled(6, 20, 3);
        const auto g = detail::gaussian(64, rng), b = detail::gaussian(20, rng);
        const double lhs = dot(op.apply(g), b), rhs = dot(g, op.adjoint(b));
        return bound(std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)), 1e-12);
    });

    check("binary patterns reproduce signed sensing", [&] {
        const auto op = SensingOperator::scrambled(4, 16, 5);
        const auto g = detail::gaussian(16, rng);
        const auto b = op.apply(g), c = binary_to_signed(measure_binary(op, g), 4);
        double err = 0;
        for (std::size_t i = 0; i < b.size(); ++i) err = std::max(err, std::abs(b[i] - c[i]));
        return bound(err, 1e-12);
    });

    for (auto lf : {std::optional<int>{}, std::optional<int>{24}}) {
        check(lf ? "low-frequency curvelet isometry" : "curvelet isometry", [&] {
            const auto plan = curvelet::make_plan(32, 32, 3, 16, lf, lf);
            const auto g = detail::gaussian(32 * 32, rng);
            const auto c = plan->forward(g);
            const auto r = plan->adjoint(c);
            double err = std::abs(norm2(c) / norm2(g) - 1.0);
            for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(g[i] - r[i]));
            return bound(err, 1e-10);
        });
    }

    check("SALSA recovers a sparse vector", [&] {
        const auto op = SensingOperator::scrambled(8, 96, 11);
        std::vector<double> x(256, 0.0);
        x[3] = 1.0;
        x[77] = -2.0;
        x[200] = 0.5;
        solver::RecoveryConfig cfg;
        cfg.tau_factor = 1e-3;
        cfg.mu_factor = 0.5;
        cfg.tol = 1e-12;
        cfg.max_iters = 500;
        const auto res = solver::salsa(solver::PixelSensing(op), op.apply(x), cfg);
        double err = 0;
        for (std::size_t i = 0; i < x.size(); ++i) err += (x[i] - res.f[i]) * (x[i] - res.f[i]);
        return bound(std::sqrt(err) / norm2(x), 1e-2);
    });

    check("volume file round trip", [&] {
        Volume3D v(4, 5, 6);
        for (auto& x : v.data) x = float(detail::gaussian(1, rng)[0]);
        const auto path = (scratch / "selftest.wcsv").string();
        io::write_volume(path, v, {1e-4, 2e-8, 1500});
        const auto w = io::read_volume(path);
        std::filesystem::remove(path);
        return std::pair{w.dims == v.dims && w.data == v.data, std::string("payload compared bitwise")};
    });

    check("forward model starts at p0", [&] {
        Volume3D p0(8, 8, 8, 0.0);
        p0(3, 4, 0) = 1.0;
        p0(5, 2, 2) = 0.5;
        wave::MediumSpec med;
        med.nt = 4;
        const auto g = wave::spectral_forward(p0, med);
        double err = 0;
        for (std::size_t i = 0; i < 8; ++i)
            for (std::size_t j = 0; j < 8; ++j) err = std::max(err, std::abs(g(0, i, j) - p0(i, j, 0)));
        return bound(err, 1e-10);
    });

    check("time reversal of zero data is zero", [&] {
        wave::MediumSpec med;
        med.nt = 6;
        const auto v = wave::time_reversal(SensorSeries(6, 8, 8, 0.0), med, {8, 8, 8});
        return std::pair{max_abs(v.data) == 0.0, std::string("max |p0| ") + detail::sci(max_abs(v.data))};
    });

    return out;
}

}  // namespace wcs
