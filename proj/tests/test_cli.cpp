#include <gtest/gtest.h>

#include <fstream>
#include <sys/wait.h>

#include "wcs/pipeline.hpp"

using namespace wcs;
namespace fs = std::filesystem;
namespace p = wcs::pipeline;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), {}};
}

std::size_t line_count(const std::string& text) { return std::size_t(std::count(text.begin(), text.end(), '\n')); }

class Scratch : public ::testing::Test {
  protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / ("wcs_cli_" + std::string(info->name()) + "_" + std::to_string(::getpid()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    /// Small but complete pipeline configuration.
    RunConfig small(const std::string& sub = "run") const {
        auto cfg = parse_config_text(
            "phantom.dims = 32,32,32\n"
            "phantom.kind = balls\n"
            "phantom.ball = 15.5,15.5,8,3,1\n"
            "phantom.ball = 9,20,12,2,0.7\n"
            "medium.nt = 48\n"
            "run.workers = 2\n");
        cfg.out = (dir_ / sub).string();
        return cfg;
    }

    std::string write_config(const std::string& name, const std::string& text) const {
        const auto path = (dir_ / name).string();
        std::ofstream(path) << text;
        return path;
    }

    struct Run {
        int code;
        std::string output;
    };
    Run cli(const std::string& args) const {
        const auto log = dir_ / "cli.log";
        const std::string cmd = std::string(WCS_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
        const int status = std::system(cmd.c_str());
        return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read_file(log)};
    }

    fs::path dir_;
};

template <typename Fn>
std::string error_of(Fn&& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        return e.what();
    }
    return "<no error>";
}

}  // namespace

TEST(Config, DefaultFractionGives737Rows) {
    const RunConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    EXPECT_EQ(cfg.sensor_size(), 4096u);
    EXPECT_EQ(cfg.measurement_count(), 737u);
    EXPECT_EQ(cfg.solver.tau_factor, 0.01);
    EXPECT_EQ(cfg.solver.mu_factor, 5.0);
    EXPECT_EQ(cfg.solver.tol, 5e-4);
    EXPECT_EQ(cfg.solver.max_iters, 100);
    EXPECT_EQ(cfg.kterm_fraction, 0.03);
}

TEST(Config, ParsesCommentsWhitespaceAndRepeatedKeys) {
    const auto cfg = parse_config_text(
        "# a run\n"
        "  sensing.fraction =0.25   # inline comment\n"
        "\n"
        "phantom.kind=balls\n"
        "phantom.ball = 1, 2, 3, 1.5, 0.5\n"
        "phantom.ball = 4,5,6,2,1\n"
        "frame.kinds = lf\n"
        "solver.max_iters = 7\n"
        "sensing.keep_all_ones = false\n"
        "run.seed = 4294967295\n");
    EXPECT_EQ(cfg.sensing.fraction, 0.25);
    ASSERT_EQ(cfg.phantom.balls.size(), 2u);
    EXPECT_EQ(cfg.phantom.balls[0].center[2], 3.0);
    EXPECT_EQ(cfg.phantom.balls[1].radius, 2.0);
    EXPECT_EQ(cfg.frame.kinds, std::vector<std::string>{"lf"});
    EXPECT_EQ(cfg.solver.max_iters, 7);
    EXPECT_FALSE(cfg.sensing.keep_all_ones);
    EXPECT_EQ(cfg.seed, 4294967295u);
}

TEST(Config, ParseErrorsCarryLineAndKey) {
    auto msg = error_of([] { parse_config_text("sensing.fraction = 0.2\nsensing.fractoin = 0.3\n"); });
    EXPECT_NE(msg.find("config:2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("sensing.fractoin"), std::string::npos) << msg;
    msg = error_of([] { parse_config_text("medium.nt = many\n"); });
    EXPECT_NE(msg.find("medium.nt"), std::string::npos) << msg;
    msg = error_of([] { parse_config_text("just words\n"); });
    EXPECT_NE(msg.find("config:1"), std::string::npos) << msg;
    EXPECT_THROW(parse_config_text("run.seed = 4294967296\n"), InvalidConfig);
    EXPECT_THROW(parse_config_text("phantom.dims = 8,8\n"), InvalidConfig);
    EXPECT_THROW(parse_config_text("sensing.keep_all_ones = maybe\n"), InvalidConfig);
}

TEST(Config, ValidationNamesTheField) {
    const std::vector<std::pair<std::string, std::string>> cases{
        {"sensing.fraction = 0", "sensing.fraction"},
        {"sensing.fraction = 1.5", "sensing.fraction"},
        {"sensing.m = 5000", "sensing.m"},
        {"phantom.dims = 48,64,64", "phantom.dims"},
        {"phantom.kind = file", "phantom.path"},
        {"phantom.kind = file\nphantom.path = /no/such/volume.wcsv", "phantom.path"},
        {"phantom.kind = cube", "phantom.kind"},
        {"medium.pad = 10", "minimum pad"},
        {"medium.c0 = -1", "medium.c0"},
        {"frame.kinds = standard,wavelet", "frame.kinds"},
        {"frame.lf1 = 64", "frame.lf1"},
        {"solver.tau_factor = 0", "solver.tau_factor"},
        {"solver.tol = -1", "solver.tol"},
        {"solver.max_iters = 0", "solver.max_iters"},
        {"report.kterm_base = voxels", "report.kterm_base"},
        {"degradation.kind = gauss", "degradation.kind"},
        {"phantom.kind = balls", "phantom.ball"},
    };
    for (const auto& [text, field] : cases) {
        const auto cfg = parse_config_text(text + "\n");
        const auto msg = error_of([&] { cfg.validate(); });
        EXPECT_NE(msg.find(field), std::string::npos) << text << " -> " << msg;
        EXPECT_THROW(cfg.validate(), InvalidConfig) << text;
    }
}

TEST(Config, EchoRoundTrips) {
    auto cfg = parse_config_text("phantom.kind = balls\nphantom.ball = 1,2,3,1.25,0.5\nsensing.m = 100\nframe.lf1 = 40\nmedium.pad = 60\n");
    cfg.solver.tau_factor = 0.05;
    const auto again = parse_config_text(cfg.echo());
    EXPECT_EQ(again.echo(), cfg.echo());
    EXPECT_EQ(again.measurement_count(), 100u);
    EXPECT_EQ(again.solver.tau_factor, 0.05);
}

TEST(Config, MissingFileIsIoError) { EXPECT_THROW(load_config("/no/such/run.cfg"), IoError); }

TEST_F(Scratch, SimulateWritesSeriesWithFixtureShape) {
    RunConfig cfg;
    cfg.out = (dir_ / "full").string();
    p::cmd_simulate(cfg);
    io::GridMeta meta;
    const auto g = io::read_series(p::layout(cfg).series(), &meta);
    EXPECT_EQ(g.dims, (std::array<std::size_t, 3>{128, 64, 64}));
    EXPECT_EQ(meta.dt, 20e-9);
    const auto prov = read_file(p::layout(cfg).series() + ".provenance.txt");
    EXPECT_NE(prov.find("seed = 0"), std::string::npos);
    EXPECT_NE(prov.find("fftw.version"), std::string::npos);
    EXPECT_NE(prov.find("sensing.fraction = 0.17999999999999999"), std::string::npos);
}

TEST_F(Scratch, StagesAreBitwiseReproducible) {
    auto a = small("a"), b = small("b");
    a.sensing.noise_sigma = b.sensing.noise_sigma = 0.01;
    for (const auto* cfg : {&a, &b}) {
        p::cmd_simulate(*cfg);
        p::cmd_sense(*cfg);
    }
    const auto La = p::layout(a), Lb = p::layout(b);
    EXPECT_EQ(read_file(La.series()), read_file(Lb.series()));
    EXPECT_EQ(read_file(La.phantom()), read_file(Lb.phantom()));
    EXPECT_EQ(read_file(La.measurements()), read_file(Lb.measurements()));
    EXPECT_EQ(read_file(La.patterns()), read_file(Lb.patterns()));

    auto c = small("c");
    c.sensing.noise_sigma = 0.01;
    c.seed = 5;
    p::cmd_simulate(c);
    p::cmd_sense(c);
    EXPECT_EQ(read_file(La.series()), read_file(p::layout(c).series()));
    EXPECT_NE(read_file(La.measurements()), read_file(p::layout(c).measurements()));
}

TEST_F(Scratch, FullSamplingMeasurementsAreInvertible) {
    auto cfg = small();
    cfg.sensing.fraction = 1.0;
    p::cmd_simulate(cfg);
    p::cmd_sense(cfg);
    const auto L = p::layout(cfg);
    const auto g = io::read_series(L.series());
    const auto meas = io::read_measurements(L.measurements());
    ASSERT_EQ(meas.B.rows, 1024u);
    const auto back = solver::linear_series(meas.sensing_operator(), meas.B, 32, 32);
    double err = 0;
    for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(back.data[i] - g.data[i]));
    EXPECT_LT(err, 1e-12 * std::max(1.0, max_abs(g.data)));
}

TEST_F(Scratch, SenseUsesConfiguredRowCount) {
    auto cfg = small();
    p::cmd_simulate(cfg);
    p::cmd_sense(cfg);
    const auto meas = io::read_measurements(p::layout(cfg).measurements());
    EXPECT_EQ(meas.B.rows, std::size_t(0.18 * 1024));
    EXPECT_EQ(meas.B.cols, 48u);
    EXPECT_TRUE(meas.keep_all_ones);
    const auto pat = io::read_patterns(p::layout(cfg).patterns());
    EXPECT_EQ(pat.m, meas.B.rows);
}

TEST_F(Scratch, PipelineEndToEndInProcess) {
    const auto cfg = small();
    const auto L = p::layout(cfg);
    p::cmd_simulate(cfg);
    p::cmd_sense(cfg);
    const auto rec = p::cmd_recover(cfg);
    EXPECT_EQ(rec.frames, (std::vector<std::string>{"standard", "lf"}));
    EXPECT_EQ(rec.failed_steps, 0u);
    for (const auto& kind : rec.frames) {
        const auto log = read_file(L.solve_log(kind));
        EXPECT_EQ(log.substr(0, log.find('\n')), "t_index,iterations,stop_reason,objective,residual");
        EXPECT_EQ(line_count(log), 49u);
        EXPECT_TRUE(fs::exists(L.kterm_coeffs(kind)));
        EXPECT_NO_THROW(io::plan_of(io::read_coeffs(L.kterm_coeffs(kind))));
    }
    p::cmd_reconstruct(cfg);
    for (const auto* tag : {"full", "linear", "recovered_standard", "kterm_lf"}) {
        EXPECT_EQ(io::read_volume(L.volume(tag)).dims, (std::array<std::size_t, 3>{32, 32, 32})) << tag;
        const auto mip = read_file(L.mip_image(tag));
        EXPECT_EQ(mip.substr(0, 12), "P5\n32 32\n255") << tag;
        EXPECT_EQ(mip.size(), 13u + 32 * 32);
        EXPECT_TRUE(fs::exists(L.slice_image(tag)));
    }
    const auto summary = p::cmd_report(cfg);
    for (const auto& kind : rec.frames) {
        const auto csv = read_file(L.report(kind));
        EXPECT_EQ(csv.substr(0, csv.find('\n')), "t_index,mse_compressed,mse_recovered");
        EXPECT_EQ(line_count(csv), 1u + 48u);
        for (const auto* key : {".steps_within_2x", ".image_mse_recovered", ".image_mse_kterm"})
            EXPECT_TRUE(summary.values.contains(kind + key)) << kind << key;
    }
    EXPECT_TRUE(summary.values.contains("linear.image_mse"));
    EXPECT_NE(read_file(L.summary()).find("standard.steps_within_2x"), std::string::npos);
    // The recovered data beats zero-filled back-projection.
    EXPECT_LT(summary.values.at("standard.image_mse_recovered"), summary.values.at("linear.image_mse"));
}

TEST_F(Scratch, KtermCountFollowsConfiguredBase) {
    const auto cfg = small();
    const auto plan = p::frame_plan(cfg, "standard", 32, 32);
    EXPECT_EQ(p::kterm_count(*plan, cfg), std::size_t(std::floor(0.03 * double(plan->coeff_count()))));
    auto px = cfg;
    px.kterm_base = "pixels";
    EXPECT_EQ(p::kterm_count(*plan, px), std::size_t(std::floor(0.03 * 1024)));
}

TEST_F(Scratch, MissingStageOutputIsNamed) {
    const auto cfg = small();
    auto msg = error_of([&] { p::cmd_sense(cfg); });
    EXPECT_NE(msg.find("series.wcss"), std::string::npos) << msg;
    EXPECT_NE(msg.find("simulate"), std::string::npos) << msg;
    EXPECT_THROW(p::cmd_sense(cfg), IoError);

    p::cmd_simulate(cfg);
    p::cmd_sense(cfg);
    msg = error_of([&] { p::cmd_report(cfg); });
    EXPECT_NE(msg.find("recovered_standard.wcss"), std::string::npos) << msg;
    EXPECT_NE(msg.find("recover"), std::string::npos) << msg;
}

TEST_F(Scratch, TooLongRecordForPaddingIsReported) {
    auto cfg = small();
    cfg.pad = 20;
    cfg.medium.nt = 64;
    const auto msg = error_of([&] { p::cmd_simulate(cfg); });
    EXPECT_NE(msg.find("minimum pad"), std::string::npos) << msg;
    EXPECT_THROW(p::cmd_simulate(cfg), InvalidConfig);
}

TEST_F(Scratch, PhantomFromFileMustMatchDims) {
    Volume3D v(32, 32, 16, 0.0);
    v(16, 16, 4) = 1.0;
    const auto path = (dir_ / "p.wcsv").string();
    io::write_volume(path, v, {});
    auto cfg = small();
    cfg.phantom.kind = "file";
    cfg.phantom.path = path;
    cfg.phantom.dims = {32, 32, 16};
    EXPECT_EQ(p::make_phantom(cfg).data, v.data);
    cfg.phantom.dims = {32, 32, 32};
    EXPECT_THROW(p::make_phantom(cfg), InvalidConfig);
}

TEST_F(Scratch, CliHelpAndUsageErrors) {
    EXPECT_EQ(cli("--help").code, 0);
    EXPECT_EQ(cli("").code, 2);
    EXPECT_EQ(cli("frobnicate").code, 2);
    EXPECT_EQ(cli("--workers many simulate").code, 2);
    EXPECT_EQ(cli("--seed -3 simulate").code, 2);
}

TEST_F(Scratch, CliConfigErrorsExitTwo) {
    const auto bad = write_config("bad.cfg", "sensing.fraction = 0.18\nsensing.fractoin = 1\n");
    auto r = cli("--config " + bad + " --out " + (dir_ / "o").string() + " simulate");
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.output.find("bad.cfg:2"), std::string::npos) << r.output;

    const auto invalid = write_config("invalid.cfg", "sensing.fraction = 2\n");
    r = cli("--config " + invalid + " sense");
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.output.find("sensing.fraction"), std::string::npos) << r.output;

    EXPECT_EQ(cli("--tau-factor -1 recover").code, 2);
}

TEST_F(Scratch, CliMissingFilesExitFour) {
    auto r = cli("--config " + (dir_ / "absent.cfg").string() + " simulate");
    EXPECT_EQ(r.code, 4);
    r = cli("--out " + (dir_ / "empty").string() + " recover");
    EXPECT_EQ(r.code, 4);
    EXPECT_NE(r.output.find("measurements.wcsb"), std::string::npos) << r.output;
}

TEST_F(Scratch, CliNonFiniteDataExitsThree) {
    Volume3D v(16, 16, 16, 0.0);
    v(8, 8, 4) = std::numeric_limits<double>::quiet_NaN();
    const auto vol = (dir_ / "nan.wcsv").string();
    io::write_volume(vol, v, {});
    const auto cfg = write_config("nan.cfg",
                                  "phantom.kind = file\nphantom.path = " + vol +
                                      "\nphantom.dims = 16,16,16\nmedium.nt = 24\nframe.kinds = standard\nframe.J = 2\n");
    const std::string common = "--config " + cfg + " --out " + (dir_ / "nan").string() + " ";
    EXPECT_EQ(cli(common + "simulate").code, 0);
    EXPECT_EQ(cli(common + "sense").code, 0);
    const auto r = cli(common + "recover");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.output.find("failed step"), std::string::npos) << r.output;
    EXPECT_EQ(cli(common + "reconstruct").code, 3);
}

TEST_F(Scratch, CliRunsEveryStage) {
    const auto cfg = write_config("run.cfg",
                                  "phantom.dims = 32,32,32\nphantom.kind = random\nphantom.count = 4\nmedium.nt = 40\n");
    const std::string common = "--config " + cfg + " --out " + (dir_ / "cli").string() + " --workers 2 --seed 9 ";
    for (const auto* stage : {"simulate", "sense", "recover", "reconstruct", "report"}) {
        const auto r = cli(common + stage);
        EXPECT_EQ(r.code, 0) << stage << ": " << r.output;
    }
    const auto summary = read_file(dir_ / "cli" / "summary.txt");
    EXPECT_NE(summary.find("lf.image_mse_recovered"), std::string::npos);
    EXPECT_NE(read_file(dir_ / "cli" / "series.wcss.provenance.txt").find("seed = 9"), std::string::npos);
    EXPECT_EQ(line_count(read_file(dir_ / "cli" / "report_lf.csv")), 41u);
}

TEST_F(Scratch, CliSolverFlagsOverrideConfig) {
    const auto cfg = write_config("s.cfg", "phantom.dims = 16,16,16\nmedium.nt = 16\nframe.kinds = standard\nframe.J = 2\n");
    const std::string common = "--config " + cfg + " --out " + (dir_ / "s").string() + " ";
    ASSERT_EQ(cli(common + "simulate").code, 0);
    ASSERT_EQ(cli(common + "sense").code, 0);
    ASSERT_EQ(cli(common + "--max-iters 3 --tol 1e-300 recover").code, 0);
    const auto log = read_file(dir_ / "s" / "solve_standard.csv");
    EXPECT_NE(log.find(",3,max_iters,"), std::string::npos) << log;
    EXPECT_NE(read_file(dir_ / "s" / "recover.provenance.txt").find("solver.max_iters = 3"), std::string::npos);
}

TEST_F(Scratch, CliSelftestPasses) {
    const auto r = cli("--out " + dir_.string() + " selftest");
    EXPECT_EQ(r.code, 0) << r.output;
    EXPECT_NE(r.output.find("9/9 checks passed"), std::string::npos) << r.output;
    EXPECT_EQ(r.output.find("FAIL"), std::string::npos);
}
