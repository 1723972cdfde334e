// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <thread>

#include "support/dense.hpp"
#include "support/oracles.hpp"
#include "wcs/curvelet.hpp"
#include "wcs/pipeline.hpp"

using namespace wcs;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;

    void check(bool ok, const std::string& what) {
        pass = pass && ok;
        if (!detail.empty()) detail += "; ";
        detail += what + (ok ? "" : " [fail]");
    }
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::vector<double> gaussian(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> d;
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

unsigned cores() { return std::max(1u, std::thread::hardware_concurrency()); }

solver::RecoveryConfig tight(double tau_factor, double mu_factor, int iters) {
    solver::RecoveryConfig c;
    c.tau_factor = tau_factor;
    c.mu_factor = mu_factor;
    c.tol = 1e-300;
    c.max_iters = iters;
    return c;
}

Verdict frame_exactness() {
    Verdict v;
    const std::vector<std::pair<std::string, curvelet::PlanPtr>> plans{
        {"C3(64,64)", curvelet::make_plan(64, 64, 3)},
        {"C3(128,128)", curvelet::make_plan(128, 128, 3)},
        {"C3,96,96(128,128)", curvelet::make_plan(128, 128, 3, 16, 96, 96)},
    };
    std::mt19937_64 rng(1);
    for (const auto& [name, plan] : plans) {
        double rt = 0, ratio = 0;
        for (int i = 0; i < 50; ++i) {
            const auto g = gaussian(plan->image_size(), rng);
            const auto c = plan->forward(g);
            const auto back = plan->adjoint(c);
            for (std::size_t j = 0; j < g.size(); ++j) rt = std::max(rt, std::abs(back[j] - g[j]));
            ratio = std::max(ratio, std::abs(norm2(c) / norm2(g) - 1.0));
        }
        v.check(rt < 1e-10 && ratio < 1e-10, name + " roundtrip " + num(rt) + " norm " + num(ratio));
    }
    return v;
}

Verdict sensing_exactness() {
    Verdict v;
    // Phi Phi^T = I at the pipeline size, column by column.
    {
        const auto op = SensingOperator::scrambled(12, 737, 7, true);
        double worst = 0;
        std::vector<double> e(op.m(), 0.0);
        for (std::size_t j = 0; j < op.m(); ++j) {
            e[j] = 1.0;
            const auto col = op.apply(op.adjoint(e));
            e[j] = 0.0;
            for (std::size_t i = 0; i < op.m(); ++i) worst = std::max(worst, std::abs(col[i] - (i == j ? 1.0 : 0.0)));
        }
        v.check(worst < 1e-12, "PhiPhi^T-I " + num(worst));
    }
    double fast = 0, binary = 0, adj = 0;
    std::mt19937_64 rng(2);
    for (unsigned log2n = 1; log2n <= 6; ++log2n) {
        const std::size_t n = std::size_t{1} << log2n;
        for (std::size_t m : {std::size_t{1}, n / 2 + 1, n}) {
            if (m > n) continue;
            for (std::uint32_t seed = 0; seed < 5; ++seed) {
                for (bool ones : {false, true}) {
                    const auto op = SensingOperator::scrambled(log2n, m, seed, ones);
                    const Eigen::MatrixXd phi = oracle::dense_phi(op);
                    const auto g = gaussian(n, rng), b = gaussian(m, rng);
                    const Eigen::VectorXd f = phi * Eigen::Map<const Eigen::VectorXd>(g.data(), long(n));
                    const Eigen::VectorXd a = phi.transpose() * Eigen::Map<const Eigen::VectorXd>(b.data(), long(m));
                    const auto fg = op.apply(g), ab = op.adjoint(b);
                    for (std::size_t i = 0; i < m; ++i) fast = std::max(fast, std::abs(fg[i] - f(long(i))));
                    for (std::size_t i = 0; i < n; ++i) fast = std::max(fast, std::abs(ab[i] - a(long(i))));
                    const auto bs = binary_to_signed(measure_binary(op, g), log2n);
                    double e = 0;
                    for (std::size_t i = 0; i < m; ++i) e = std::max(e, std::abs(bs[i] - fg[i]));
                    binary = std::max(binary, e / std::max(max_abs(fg), 1e-300));
                }
            }
        }
    }
    for (int trial = 0; trial < 20; ++trial) {
        const auto op = SensingOperator::scrambled(12, 737, std::uint32_t(trial), true);
        const auto x = gaussian(op.n(), rng), y = gaussian(op.m(), rng);
        const auto Ax = op.apply(x), Aty = op.adjoint(y);
        adj = std::max(adj, std::abs(dot(Ax, y) - dot(x, Aty)) / (norm2(Ax) * norm2(y)));
    }
    v.check(fast < 1e-12, "fast vs dense (n<=64) " + num(fast));
    v.check(adj < 1e-12, "adjoint " + num(adj));
    v.check(binary < 1e-12, "binary vs signed (n<=64) " + num(binary));
    return v;
}

Verdict solver_correctness() {
    Verdict v;
    std::mt19937_64 rng(3);
    {
        double worst = 0;
        for (unsigned log2n : {4u, 6u, 8u}) {
            const std::size_t n = std::size_t{1} << log2n;
            const auto op = SensingOperator::scrambled(log2n, n / 4 + 3, log2n, true);
            const solver::PixelSensing A(op);
            const Eigen::MatrixXd M = oracle::dense(A);
            const double mu = 0.37;
            const Eigen::MatrixXd inv =
                (M.transpose() * M + mu * Eigen::MatrixXd::Identity(long(n), long(n))).inverse();
            const auto r = gaussian(n, rng);
            const auto fast = solver::smw_apply(A, mu, r);
            const Eigen::VectorXd ref = inv * Eigen::Map<const Eigen::VectorXd>(r.data(), long(n));
            worst = std::max(worst, (Eigen::Map<const Eigen::VectorXd>(fast.data(), long(n)) - ref).norm() / ref.norm());
        }
        v.check(worst < 1e-10, "SMW vs dense (N<=256) " + num(worst));
    }
    {
        double worst = 0;
        for (std::uint32_t s = 0; s < 20; ++s) {
            const auto op = SensingOperator::scrambled(6, 32, 100 + s);
            const solver::PixelSensing A(op);
            std::vector<double> x(64, 0.0);
            std::vector<std::size_t> idx(64);
            std::iota(idx.begin(), idx.end(), 0);
            std::shuffle(idx.begin(), idx.end(), rng);
            std::normal_distribution<double> d;
            for (int i = 0; i < 3; ++i) x[idx[i]] = d(rng) + 1.0;
            const auto b = op.apply(x);
            const auto cfg = tight(0.01, 5.0, 20000);
            const auto res = solver::salsa(A, b, cfg);
            const Eigen::MatrixXd M = oracle::dense(A);
            const Eigen::Map<const Eigen::VectorXd> bv(b.data(), 32);
            const double tau = cfg.tau_factor * max_abs(op.adjoint(b));
            const double ref = oracle::lasso_objective(M, bv, oracle::lasso_oracle(M, bv, tau), tau);
            const double got = oracle::lasso_objective(M, bv, Eigen::Map<const Eigen::VectorXd>(res.f.data(), 64), tau);
            worst = std::max(worst, std::abs(got - ref) / ref);
        }
        v.check(worst < 1e-3, "SALSA vs oracle objective (20 instances) " + num(worst));
    }
    {
        const std::size_t n = 4096, k = 123, m = 6 * k;
        int ok = 0;
        double med = 0;
        std::vector<double> errs;
        for (std::uint32_t s = 0; s < 20; ++s) {
            const auto op = SensingOperator::scrambled(12, m, 500 + s);
            std::vector<double> x(n, 0.0);
            std::vector<std::size_t> idx(n);
            std::iota(idx.begin(), idx.end(), 0);
            std::shuffle(idx.begin(), idx.end(), rng);
            std::normal_distribution<double> d;
            for (std::size_t i = 0; i < k; ++i) {
                const double a = d(rng);
                x[idx[i]] = a + (a >= 0 ? 1.0 : -1.0);
            }
            const auto res = solver::salsa(solver::PixelSensing(op), op.apply(x), tight(1e-4, 0.05, 3000));
            const double e = oracle::rel_l2(res.f, x);
            errs.push_back(e);
            if (e < 1e-2) ++ok;
        }
        std::sort(errs.begin(), errs.end());
        med = errs[errs.size() / 2];
        v.check(ok >= 18, "k-sparse n=4096 m=6k " + std::to_string(ok) + "/20 (median err " + num(med) + ")");
    }
    return v;
}

wave::MediumSpec medium(std::size_t nt, double dt = 20e-9) {
    wave::MediumSpec m;
    m.nt = nt;
    m.dt = dt;
    return m;
}

Verdict wave_model() {
    Verdict v;
    const auto p0 = oracle::smooth_ball(64, {31.5, 31.5, 20}, 5.0);
    const double mis = oracle::frequency_model_mismatch(p0, medium(128));
    v.check(mis < 0.05, "frequency model vs simulation " + num(mis));
    const auto q0 = oracle::smooth_ball(64, {31.5, 31.5, 16}, 4.0);
    const double com = oracle::degradation_commutator(q0, medium(192, 10e-9));
    v.check(com < 1e-2, "degradation commutator " + num(com));
    return v;
}

Verdict inverse_crime() {
    Verdict v;
    const auto p0 = oracle::smooth_ball(64, {31.5, 31.5, 24}, 6.0);
    const auto med = medium(256);
    const auto rec = wave::time_reversal(wave::spectral_forward(p0, med), med, {64, 64, 64});
    const double c = correlation(rec.data, wave::visible_part(p0, med).data);
    v.check(c > 0.9, "correlation with visible part " + num(c));
    return v;
}

// Shared by criteria 6 and 7: the default clock run.
struct ClockRun {
    RunConfig cfg;
    pipeline::Simulation sim;
};

const ClockRun& clock_run() {
    static const ClockRun run = [] {
        ClockRun r;
        r.cfg.workers = cores();
        r.sim = pipeline::simulate(r.cfg);
        return r;
    }();
    return run;
}

std::vector<std::string> notes;

Verdict end_to_end() {
    Verdict v;
    const auto& run = clock_run();
    const auto& cfg = run.cfg;
    const auto& g = run.sim.g;
    const auto [nt, n1, n2] = g.dims;
    const std::size_t n3 = cfg.phantom.dims[2];
    const auto op = pipeline::sensing_operator(n1 * n2, cfg.measurement_count(), cfg.seed, cfg.sensing.keep_all_ones);
    const auto B = pipeline::sense(op, g, 0.0, 0);
    const auto full = pipeline::reconstruct(g, cfg.medium, n3);
    const auto image_mse = [&](const SensorSeries& s) { return mse(pipeline::reconstruct(s, cfg.medium, n3).data, full.data); };
    const double linear = image_mse(solver::linear_series(op, B, n1, n2));

    for (const std::string kind : {"standard", "lf"}) {
        const auto plan = pipeline::frame_plan(cfg, kind, n1, n2);
        const auto rec = solver::recover_series(op, *plan, B, cfg.solver, cfg.workers).series;
        const auto rec_steps = pipeline::mse_per_step(rec, g);
        const double rec_img = image_mse(rec);
        for (bool per_pixel : {true, false}) {
            const std::size_t k = pipeline::kterm_count(*plan, cfg.kterm_fraction, per_pixel);
            const auto kt = pipeline::kterm_series(*plan, g, k, cfg.workers);
            const auto kt_steps = pipeline::mse_per_step(kt, g);
            std::size_t within = 0;
            for (std::size_t t = 0; t < nt; ++t)
                if (rec_steps[t] <= 2.0 * kt_steps[t]) ++within;
            const double frac = double(within) / double(nt);
            const double ratio = rec_img / image_mse(kt);
            const std::string base = per_pixel ? "k=3%n=" : "k=3%N=";
            const std::string tag = kind + " " + base + std::to_string(k) + ", m=" + std::to_string(op.m());
            if (per_pixel) {
                v.check(frac >= 0.8, tag + ": (a) steps within 2x " + num(frac));
                v.check(ratio <= 3.0, kind + ": (b) image MSE recovered/k-term " + num(ratio));
                notes.push_back(kind + " image MSE ratio recovered/k-term in [0.3, 3]: " + num(ratio) +
                                (ratio >= 0.3 && ratio <= 3.0 ? " (yes)" : " (no)"));
            } else {
                notes.push_back(tag + ": steps within 2x " + num(frac) + ", image MSE ratio " + num(ratio) +
                                " (k/m " + num(double(k) / double(op.m())) + ")");
            }
        }
        v.check(rec_img / linear < 0.7, kind + ": (c) nonlinear/linear " + num(rec_img / linear));
    }
    return v;
}

double top_sum(std::vector<double> c, std::size_t k) {
    for (auto& x : c) x = std::abs(x);
    std::partial_sort(c.begin(), c.begin() + long(k), c.end(), std::greater<>());
    return std::accumulate(c.begin(), c.begin() + long(k), 0.0);
}

// Both frames keep the same number of largest magnitudes, 1% of the sensor size.
Verdict coefficient_decay() {
    Verdict v;
    const auto& run = clock_run();
    const auto& g = run.sim.g;
    const auto [nt, n1, n2] = g.dims;
    const auto standard = pipeline::frame_plan(run.cfg, "standard", n1, n2);
    const auto lf = pipeline::frame_plan(run.cfg, "lf", n1, n2);
    const auto k = static_cast<std::size_t>(std::ceil(0.01 * double(n1 * n2)));
    int wins = 0;
    std::string steps, own;
    for (std::size_t t : {nt * 7 / 16, nt * 9 / 16, nt * 3 / 4}) {
        const auto cs = standard->forward(g.slice(t)), cl = lf->forward(g.slice(t));
        const double ratio = top_sum(cl, k) / top_sum(cs, k);
        if (ratio >= 1.0) ++wins;
        steps += " t=" + std::to_string(t) + " lf/std " + num(ratio);
        const auto ks = static_cast<std::size_t>(std::ceil(0.01 * double(cs.size())));
        const auto kl = static_cast<std::size_t>(std::ceil(0.01 * double(cl.size())));
        own += " t=" + std::to_string(t) + " " + num(top_sum(cl, kl) / top_sum(cs, ks));
    }
    v.check(wins >= 2, "k=" + std::to_string(k) + ", LF >= standard at " + std::to_string(wins) + "/3 steps:" + steps);
    notes.push_back("top 1% of each frame's own coefficient count, lf/std:" + own);
    return v;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget_s;
        std::function<Verdict()> run;
    };
    const double scale = std::max(1.0, 4.0 / double(cores()));
    const std::vector<Criterion> all{
        {1, "frame exactness", 30, frame_exactness},
        {2, "sensing exactness", 10, sensing_exactness},
        {3, "solver correctness", 300, solver_correctness},
        {4, "wave model cross-validation", 120, wave_model},
        {5, "time-reversal baseline", 180, inverse_crime},
        {6, "end-to-end pipeline", 900 * scale, end_to_end},
        {7, "coefficient decay", 60, coefficient_decay},
    };
    int failed = 0;
    for (const auto& c : all) {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v.check(false, std::string("threw: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        v.check(secs < c.budget_s, "runtime " + num(secs) + " s (limit " + num(c.budget_s) + " s)");
        if (!v.pass) ++failed;
        std::printf("criterion %d %s: %s | %s\n", c.id, c.name, v.pass ? "PASS" : "FAIL", v.detail.c_str());
        std::fflush(stdout);
    }
    for (const auto& n : notes) std::printf("note: %s\n", n.c_str());
    std::printf("%d/%zu criteria passed\n", int(all.size()) - failed, all.size());
    return failed == 0 ? 0 : 1;
}
