#pragma once

// Pipeline stages. Each stage has an in-memory form and a file-backed
// `cmd_*` form that reads the previous stage's artifacts from the output
// directory and writes its own atomically.

#include <fftw3.h>

#include <random>

#include "wcs/config.hpp"
#include "wcs/io.hpp"

namespace wcs::pipeline {

using io::CsvTable;
using io::GridMeta;
using io::Measurements;
using io::read_measurements;
using io::read_series;
using io::read_volume;
using io::write_coeffs;
using io::write_measurements;
using io::write_patterns;
using io::write_series;
using io::write_text;
using io::write_volume;

inline constexpr const char* version = "0.1.0";

/// Artifact names inside the output directory.
struct Layout {
    std::filesystem::path dir;

    std::string at(const std::string& name) const { return (dir / name).string(); }
    std::string phantom() const { return at("phantom.wcsv"); }
    std::string series() const { return at("series.wcss"); }
    std::string measurements() const { return at("measurements.wcsb"); }
    std::string patterns() const { return at("patterns.wcsh"); }
    std::string recovered(const std::string& frame) const { return at("recovered_" + frame + ".wcss"); }
    std::string kterm(const std::string& frame) const { return at("kterm_" + frame + ".wcss"); }
    std::string kterm_coeffs(const std::string& frame) const { return at("kterm_" + frame + "_t0.wcsc"); }
    std::string linear() const { return at("linear.wcss"); }
    std::string solve_log(const std::string& frame) const { return at("solve_" + frame + ".csv"); }
    std::string volume(const std::string& tag) const { return at("recon_" + tag + ".wcsv"); }
    std::string slice_image(const std::string& tag) const { return at("recon_" + tag + "_slice.pgm"); }
    std::string mip_image(const std::string& tag) const { return at("recon_" + tag + "_mip.pgm"); }
    std::string report(const std::string& frame) const { return at("report_" + frame + ".csv"); }
    std::string summary() const { return at("summary.txt"); }
};

inline Layout layout(const RunConfig& cfg) { return {cfg.out}; }

// ---- in-memory stages ----

inline Volume3D make_phantom(const RunConfig& cfg) {
    const auto& p = cfg.phantom;
    if (p.kind == "file") {
        auto v = read_volume(p.path);
        if (v.dims != p.dims) throw InvalidConfig("phantom.dims: does not match the volume in " + p.path);
        return v;
    }
    if (p.kind == "balls") return make_ball_phantom({p.dims, p.balls, cfg.seed});
    if (p.kind == "random") return make_ball_phantom(random_phantom_spec(p.dims, p.count, cfg.seed));
    return make_ball_phantom(clock_phantom_spec(p.dims, p.depth.value_or(double(p.dims[2]) / 4.0)));
}

struct Simulation {
    Volume3D p0;  // smoothed source, the ground truth
    SensorSeries g;
};

inline Simulation simulate(const RunConfig& cfg) {
    Simulation s;
    s.p0 = wave::blackman_smooth(make_phantom(cfg));
    wave::ForwardOptions opt;
    opt.pad = cfg.pad;
    const auto raw = wave::spectral_forward(s.p0, cfg.medium, opt, cfg.workers);
    s.g = wave::degrade(raw, cfg.windows().tabulate(cfg.medium.nt, s.p0.dims[0], s.p0.dims[1]));
    return s;
}

inline SensingOperator sensing_operator(std::size_t n, std::size_t m, std::uint32_t seed, bool keep_all_ones = true) {
    if (!is_power_of_two(n)) throw InvalidConfig("sensing: sensor size " + std::to_string(n) + " is not a power of two");
    return SensingOperator::scrambled(unsigned(std::countr_zero(n)), m, seed, keep_all_ones);
}

/// B(j, t) = (Phi g_t)_j plus optional white Gaussian noise with standard
/// deviation sigma * max|B|.
inline Array2<double> sense(const SensingOperator& op, const SensorSeries& g, double sigma, std::uint64_t noise_seed) {
    const std::size_t nt = g.dims[0];
    if (g.dims[1] * g.dims[2] != op.n())
        throw InvalidInput("sense: sensor plane has " + std::to_string(g.dims[1] * g.dims[2]) + " pixels, operator expects " +
                           std::to_string(op.n()));
    Array2<double> B(op.m(), nt);
    std::vector<double> b(op.m());
    for (std::size_t t = 0; t < nt; ++t) {
        op.apply(g.slice(t), b);
        for (std::size_t j = 0; j < op.m(); ++j) B(j, t) = b[j];
    }
    if (sigma > 0) {
        const double s = sigma * max_abs(B.data);
        std::mt19937_64 rng(noise_seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        for (auto& v : B.data) v += s * normal(rng);
    }
    return B;
}

inline std::uint64_t noise_seed(std::uint32_t seed) { return (std::uint64_t{seed} << 32) ^ 0x9e3779b97f4a7c15ULL; }

inline curvelet::PlanPtr frame_plan(const RunConfig& cfg, const std::string& kind, std::size_t n1, std::size_t n2) {
    if (kind == "standard") return curvelet::make_plan(int(n1), int(n2), cfg.frame.J, cfg.frame.angles);
    if (kind == "lf")
        return curvelet::make_plan(int(n1), int(n2), cfg.frame.J, cfg.frame.angles,
                                   cfg.frame.lf1.value_or(int(3 * n1 / 4)), cfg.frame.lf2.value_or(int(3 * n2 / 4)));
    throw InvalidConfig("frame.kinds: unknown frame '" + kind + "'");
}

/// k = fraction * N by default; `per_pixel` counts against n = n1 * n2 instead.
inline std::size_t kterm_count(const curvelet::CurveletPlan& plan, double fraction, bool per_pixel = false) {
    const double base = double(per_pixel ? plan.image_size() : plan.coeff_count());
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(fraction * base)));
}

inline std::size_t kterm_count(const curvelet::CurveletPlan& plan, const RunConfig& cfg) {
    return kterm_count(plan, cfg.kterm_fraction, cfg.kterm_base == "pixels");
}

/// Per-step best k-term approximation of a series in a frame.
inline SensorSeries kterm_series(const curvelet::CurveletPlan& plan, const SensorSeries& g, std::size_t k,
                                 unsigned workers = 0) {
    SensorSeries out(g.dims[0], g.dims[1], g.dims[2]);
    parallel_for(g.dims[0], workers, [&](std::size_t t) {
        const auto c = curvelet::k_term(plan.forward(g.slice(t)), k);
        const auto img = plan.adjoint(c);
        std::copy(img.begin(), img.end(), out.slice(t).begin());
    });
    return out;
}

inline Volume3D reconstruct(const SensorSeries& g, const wave::MediumSpec& med, std::size_t n3) {
    return wave::time_reversal(g, med, {g.dims[1], g.dims[2], n3});
}

inline std::vector<double> mse_per_step(const SensorSeries& a, const SensorSeries& b) {
    if (a.dims != b.dims) throw InvalidInput("mse_per_step: series shapes differ");
    std::vector<double> out(a.dims[0]);
    for (std::size_t t = 0; t < out.size(); ++t) out[t] = mse(a.slice(t), b.slice(t));
    return out;
}

// ---- file-backed stages ----

namespace detail {

inline std::string provenance(const RunConfig& cfg, const std::string& stage, const std::string& extra = {}) {
    std::ostringstream os;
    os << "# provenance\n"
       << "stage = " << stage << '\n'
       << "wcs.version = " << version << '\n'
       << "fftw.version = " << fftw_version << '\n'
       << "compiler = " << __VERSION__ << '\n'
       << "seed = " << cfg.seed << '\n'
       << extra << "# configuration\n"
       << cfg.echo();
    return os.str();
}

inline void require(const std::string& path, const std::string& stage) {
    if (!std::filesystem::exists(path))
        throw IoError("missing input " + path + " (run '" + stage + "' first)");
}

inline wave::MediumSpec medium_of(const RunConfig& cfg, const GridMeta& meta, std::size_t nt) {
    auto med = cfg.medium;
    med.dx = meta.dx;
    med.dt = meta.dt;
    med.c0 = meta.c0;
    med.nt = nt;
    return med;
}

inline void prepare(const RunConfig& cfg) {
    cfg.validate();
    std::error_code ec;
    std::filesystem::create_directories(cfg.out, ec);
    if (ec) throw IoError("cannot create output directory " + cfg.out + ": " + ec.message());
}

}  // namespace detail

inline void cmd_simulate(const RunConfig& cfg) {
    detail::prepare(cfg);
    const auto L = layout(cfg);
    const auto sim = simulate(cfg);
    const GridMeta meta{cfg.medium.dx, cfg.medium.dt, cfg.medium.c0};
    write_volume(L.phantom(), sim.p0, meta);
    write_series(L.series(), sim.g, meta);
    write_text(L.series() + ".provenance.txt", detail::provenance(cfg, "simulate"));
}

inline void cmd_sense(const RunConfig& cfg) {
    detail::prepare(cfg);
    const auto L = layout(cfg);
    detail::require(L.series(), "simulate");
    GridMeta meta;
    const auto g = read_series(L.series(), &meta);
    const std::size_t n = g.dims[1] * g.dims[2];
    if (g.dims[1] != cfg.phantom.dims[0] || g.dims[2] != cfg.phantom.dims[1])
        throw InvalidConfig("phantom.dims: sensor plane " + std::to_string(g.dims[1]) + "x" + std::to_string(g.dims[2]) +
                            " in " + L.series() + " does not match the configuration");
    const auto op = sensing_operator(n, cfg.measurement_count(), cfg.seed, cfg.sensing.keep_all_ones);
    const auto nseed = noise_seed(cfg.seed);
    Measurements meas{sense(op, g, cfg.sensing.noise_sigma, nseed), op.log2n(), op.seed(), op.keeps_all_ones()};
    write_measurements(L.measurements(), meas);
    write_patterns(L.patterns(), op);
    write_text(L.measurements() + ".provenance.txt",
               detail::provenance(cfg, "sense", "m = " + std::to_string(op.m()) + "\nnoise_seed = " + std::to_string(nseed) + "\n"));
}

struct RecoverSummary {
    std::vector<std::string> frames;
    std::size_t failed_steps = 0;
};

inline RecoverSummary cmd_recover(const RunConfig& cfg) {
    detail::prepare(cfg);
    const auto L = layout(cfg);
    detail::require(L.measurements(), "sense");
    detail::require(L.series(), "simulate");
    const auto meas = read_measurements(L.measurements());
    GridMeta meta;
    const auto g = read_series(L.series(), &meta);
    const std::size_t n1 = g.dims[1], n2 = g.dims[2];
    if ((std::size_t{1} << meas.log2n) != n1 * n2)
        throw InvalidConfig("sensing: measurements were taken with n = " + std::to_string(std::size_t{1} << meas.log2n) +
                            " but the sensor plane has " + std::to_string(n1 * n2) + " pixels");
    if (meas.B.cols != g.dims[0]) throw CorruptFile(L.measurements() + ": time step count does not match the series");
    const auto op = meas.sensing_operator();
    write_series(L.linear(), solver::linear_series(op, meas.B, n1, n2), meta);

    RecoverSummary summary;
    for (const auto& kind : cfg.frame.kinds) {
        const auto plan = frame_plan(cfg, kind, n1, n2);
        const auto rec = solver::recover_series(op, *plan, meas.B, cfg.solver, cfg.workers);
        write_series(L.recovered(kind), rec.series, meta);
        const std::size_t k = kterm_count(*plan, cfg);
        write_series(L.kterm(kind), kterm_series(*plan, g, k, cfg.workers), meta);
        write_coeffs(L.kterm_coeffs(kind), *plan, curvelet::k_term(plan->forward(g.slice(0)), k));
        CsvTable log({"t_index", "iterations", "stop_reason", "objective", "residual"});
        for (std::size_t t = 0; t < rec.reports.size(); ++t) {
            const auto& r = rec.reports[t];
            if (r.stop == solver::StopReason::failed) ++summary.failed_steps;
            log.row(t, r.iterations, solver::to_string(r.stop), r.objective.empty() ? 0.0 : r.objective.back(), r.residual);
        }
        log.write(L.solve_log(kind));
        summary.frames.push_back(kind);
    }
    write_text(L.at("recover.provenance.txt"), detail::provenance(cfg, "recover"));
    return summary;
}

/// Tags of the series that `cmd_reconstruct` turns into volumes.
inline std::vector<std::pair<std::string, std::string>> reconstruction_inputs(const RunConfig& cfg) {
    const auto L = layout(cfg);
    std::vector<std::pair<std::string, std::string>> out{{"full", L.series()}, {"linear", L.linear()}};
    for (const auto& kind : cfg.frame.kinds) {
        out.emplace_back("recovered_" + kind, L.recovered(kind));
        out.emplace_back("kterm_" + kind, L.kterm(kind));
    }
    return out;
}

inline void cmd_reconstruct(const RunConfig& cfg) {
    detail::prepare(cfg);
    const auto L = layout(cfg);
    detail::require(L.series(), "simulate");
    for (const auto& kind : cfg.frame.kinds) detail::require(L.recovered(kind), "recover");
    const std::size_t n3 = cfg.phantom.dims[2];
    for (const auto& [tag, path] : reconstruction_inputs(cfg)) {
        if (!std::filesystem::exists(path)) continue;
        GridMeta meta;
        const auto g = read_series(path, &meta);
        const auto vol = reconstruct(g, detail::medium_of(cfg, meta, g.dims[0]), n3);
        write_volume(L.volume(tag), vol, meta);
        emit_image(x_slice(vol, vol.dims[0] / 2), L.slice_image(tag));
        emit_image(mip_z(vol), L.mip_image(tag));
    }
}

struct ReportSummary {
    std::map<std::string, double> values;
};

inline ReportSummary cmd_report(const RunConfig& cfg) {
    detail::prepare(cfg);
    const auto L = layout(cfg);
    detail::require(L.series(), "simulate");
    for (const auto& kind : cfg.frame.kinds) {
        detail::require(L.recovered(kind), "recover");
        detail::require(L.kterm(kind), "recover");
        detail::require(L.volume("recovered_" + kind), "reconstruct");
        detail::require(L.volume("kterm_" + kind), "reconstruct");
    }
    detail::require(L.volume("full"), "reconstruct");
    const auto g = read_series(L.series());
    const auto baseline = read_volume(L.volume("full"));

    ReportSummary s;
    auto image_mse = [&](const std::string& tag) { return mse(read_volume(L.volume(tag)).data, baseline.data); };
    for (const auto& kind : cfg.frame.kinds) {
        const auto rec = mse_per_step(read_series(L.recovered(kind)), g);
        const auto kt = mse_per_step(read_series(L.kterm(kind)), g);
        CsvTable csv({"t_index", "mse_compressed", "mse_recovered"});
        std::size_t within = 0;
        for (std::size_t t = 0; t < rec.size(); ++t) {
            csv.row(t, kt[t], rec[t]);
            if (rec[t] <= 2.0 * kt[t]) ++within;
        }
        csv.write(L.report(kind));
        s.values[kind + ".steps_within_2x"] = double(within) / double(rec.size());
        s.values[kind + ".image_mse_recovered"] = image_mse("recovered_" + kind);
        s.values[kind + ".image_mse_kterm"] = image_mse("kterm_" + kind);
    }
    if (std::filesystem::exists(L.volume("linear"))) s.values["linear.image_mse"] = image_mse("linear");

    std::ostringstream os;
    os.precision(6);
    os << "# image MSE is measured against the full-data reconstruction\n";
    for (const auto& [k, v] : s.values) os << k << " = " << v << '\n';
    write_text(L.summary(), os.str());
    return s;
}

}  // namespace wcs::pipeline
