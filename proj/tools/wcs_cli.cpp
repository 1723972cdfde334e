// wcs: compressed-sensing photoacoustic pipeline driver.
//
//   wcs [--config PATH] [--out DIR] [--workers N] [--seed U32] <stage>
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure, 4 I/O error.

#include <CLI11.hpp>

#include "wcs/selftest.hpp"

namespace {

enum ExitCode { ok = 0, config_error = 2, numerical_error = 3, io_error = 4 };

struct Overrides {
    std::string config;
    std::optional<std::string> out;
    std::optional<unsigned> workers;
    std::optional<std::uint32_t> seed;
    std::optional<double> tau_factor, mu_factor, tol;
    std::optional<int> max_iters;
};

wcs::RunConfig resolve(const Overrides& o) {
    wcs::RunConfig cfg = o.config.empty() ? wcs::RunConfig{} : wcs::load_config(o.config);
    if (o.out) cfg.out = *o.out;
    if (o.workers) cfg.workers = *o.workers;
    if (o.seed) cfg.seed = *o.seed;
    if (o.tau_factor) cfg.solver.tau_factor = *o.tau_factor;
    if (o.mu_factor) cfg.solver.mu_factor = *o.mu_factor;
    if (o.tol) cfg.solver.tol = *o.tol;
    if (o.max_iters) cfg.solver.max_iters = *o.max_iters;
    cfg.validate();
    return cfg;
}

int selftest(const wcs::RunConfig& cfg) {
    std::filesystem::create_directories(cfg.out);
    const auto results = wcs::run_selftest(cfg.out);
    int failed = 0;
    for (const auto& r : results) {
        std::cout << (r.ok ? "PASS  " : "FAIL  ") << r.name << "  (" << r.detail << ")\n";
        failed += r.ok ? 0 : 1;
    }
    std::cout << results.size() - std::size_t(failed) << "/" << results.size() << " checks passed\n";
    return failed ? numerical_error : ok;
}

int run(const std::string& stage, const wcs::RunConfig& cfg) {
    namespace p = wcs::pipeline;
    if (stage == "simulate") {
        p::cmd_simulate(cfg);
        std::cout << "wrote " << p::layout(cfg).series() << '\n';
    } else if (stage == "sense") {
        p::cmd_sense(cfg);
        std::cout << "wrote " << p::layout(cfg).measurements() << " (m = " << cfg.measurement_count() << ")\n";
    } else if (stage == "recover") {
        const auto s = p::cmd_recover(cfg);
        std::cout << "recovered " << s.frames.size() << " frame(s), " << s.failed_steps << " failed step(s)\n";
    } else if (stage == "reconstruct") {
        p::cmd_reconstruct(cfg);
        std::cout << "wrote reconstructions to " << cfg.out << '\n';
    } else if (stage == "report") {
        const auto s = p::cmd_report(cfg);
        for (const auto& [k, v] : s.values) std::cout << k << " = " << v << '\n';
    } else if (stage == "selftest") {
        return selftest(cfg);
    }
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Compressed-sensing photoacoustic tomography pipeline"};
    app.require_subcommand(1);
    Overrides o;
    app.add_option("--config", o.config, "Run configuration (key = value lines)");
    app.add_option("--out", o.out, "Output directory");
    app.add_option("--workers", o.workers, "Worker threads, 0 = all cores");
    app.add_option("--seed", o.seed, "Seed for scrambling, noise and random phantoms");
    app.add_option("--tau-factor", o.tau_factor, "tau = factor * max|A^T b| (default 0.01)");
    app.add_option("--mu-factor", o.mu_factor, "mu = factor * max|A^T b| / ||b|| (default 5)");
    app.add_option("--tol", o.tol, "Relative objective change stopping tolerance (default 5e-4)");
    app.add_option("--max-iters", o.max_iters, "Iteration cap per time step (default 100)");

    const std::vector<std::pair<std::string, std::string>> stages{
        {"simulate", "Phantom, forward model and degradation to a sensor series"},
        {"sense", "Compressed measurements of the sensor series"},
        {"recover", "Per-time-step L1 recovery in each configured frame"},
        {"reconstruct", "Time-reversal reconstructions and images"},
        {"report", "MSE tables and summary"},
        {"selftest", "Invariant checks on tiny sizes"},
    };
    for (const auto& [name, help] : stages) app.add_subcommand(name, help)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : config_error;
    }

    try {
        const auto cfg = resolve(o);
        return run(app.get_subcommands().front()->get_name(), cfg);
    } catch (const wcs::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return io_error;
    } catch (const wcs::NumericalFailure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return numerical_error;
    } catch (const wcs::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return config_error;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return io_error;
    }
}
