#pragma once

// Run configuration: flat `section.key = value` lines, '#' starts a comment.
// Repeatable keys (phantom.ball) may appear several times.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "wcs/phantom.hpp"
#include "wcs/solver.hpp"
#include "wcs/wave.hpp"

namespace wcs {

struct PhantomConfig {
    std::string kind = "clock";  // clock | balls | random | file
    std::array<std::size_t, 3> dims{64, 64, 64};
    std::optional<double> depth;  // clock ring depth in voxels, default dims[2] / 4
    std::vector<Ball> balls;
    std::size_t count = 8;  // random layouts
    std::string path;       // WCSV input for kind = file
};

struct SensingConfig {
    double fraction = 0.18;
    std::optional<std::size_t> m;
    double noise_sigma = 0.0;  // fraction of max|B|
    bool keep_all_ones = true;
};

struct FrameConfig {
    std::vector<std::string> kinds{"standard", "lf"};
    int J = 3;
    int angles = 16;
    std::optional<int> lf1, lf2;  // default 3/4 of the sensor size
};

struct RunConfig {
    PhantomConfig phantom;
    wave::MediumSpec medium;
    std::optional<std::size_t> pad;
    std::string degradation = "blackman";  // blackman | none
    SensingConfig sensing;
    FrameConfig frame;
    solver::RecoveryConfig solver;
    double kterm_fraction = 0.03;
    std::string kterm_base = "coefficients";  // k = fraction * N, or fraction * n with "pixels"
    std::string out = ".";
    unsigned workers = 0;
    std::uint32_t seed = 0;

    std::size_t sensor_size() const { return phantom.dims[0] * phantom.dims[1]; }

    std::size_t measurement_count() const {
        return sensing.m ? *sensing.m : static_cast<std::size_t>(std::floor(sensing.fraction * double(sensor_size())));
    }

    wave::DegradationWindows windows() const {
        return degradation == "none" ? wave::DegradationWindows::none() : wave::DegradationWindows::blackman();
    }

    void validate() const;
    /// Canonical key=value echo, parseable by `parse_config`.
    std::string echo() const;
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, sep)) out.push_back(trim(item));
    return out;
}

inline double to_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size())
        throw InvalidConfig(key + ": expected a number, got '" + v + "'");
    return out;
}

inline std::uint64_t to_uint(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size())
        throw InvalidConfig(key + ": expected a non-negative integer, got '" + v + "'");
    return out;
}

inline bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw InvalidConfig(key + ": expected true or false, got '" + v + "'");
}

inline std::string join(const auto& values, const char* sep = ",") {
    std::ostringstream os;
    os.precision(17);
    bool first = true;
    for (const auto& v : values) {
        os << (first ? "" : sep) << v;
        first = false;
    }
    return os.str();
}

}  // namespace detail

/// Applies one key=value assignment; unknown keys are rejected.
inline void apply_setting(RunConfig& c, const std::string& key, const std::string& v) {
    using detail::to_double, detail::to_uint;
    auto u32 = [&](std::uint64_t x) {
        if (x > std::numeric_limits<std::uint32_t>::max()) throw InvalidConfig(key + ": value out of range");
        return static_cast<std::uint32_t>(x);
    };
    if (key == "phantom.kind") c.phantom.kind = v;
    else if (key == "phantom.dims") {
        const auto parts = detail::split(v, ',');
        if (parts.size() != 3) throw InvalidConfig(key + ": expected three comma-separated sizes");
        for (int a = 0; a < 3; ++a) c.phantom.dims[a] = to_uint(key, parts[a]);
    } else if (key == "phantom.depth") c.phantom.depth = to_double(key, v);
    else if (key == "phantom.ball") {
        const auto parts = detail::split(v, ',');
        if (parts.size() != 5) throw InvalidConfig(key + ": expected x,y,z,radius,amplitude");
        c.phantom.balls.push_back({{to_double(key, parts[0]), to_double(key, parts[1]), to_double(key, parts[2])},
                                   to_double(key, parts[3]), to_double(key, parts[4])});
    } else if (key == "phantom.count") c.phantom.count = to_uint(key, v);
    else if (key == "phantom.path") c.phantom.path = v;
    else if (key == "medium.c0") c.medium.c0 = to_double(key, v);
    else if (key == "medium.rho0") c.medium.rho0 = to_double(key, v);
    else if (key == "medium.dx") c.medium.dx = to_double(key, v);
    else if (key == "medium.dt") c.medium.dt = to_double(key, v);
    else if (key == "medium.nt") c.medium.nt = to_uint(key, v);
    else if (key == "medium.pad") c.pad = to_uint(key, v);
    else if (key == "degradation.kind") c.degradation = v;
    else if (key == "sensing.fraction") c.sensing.fraction = to_double(key, v);
    else if (key == "sensing.m") c.sensing.m = to_uint(key, v);
    else if (key == "sensing.noise_sigma") c.sensing.noise_sigma = to_double(key, v);
    else if (key == "sensing.keep_all_ones") c.sensing.keep_all_ones = detail::to_bool(key, v);
    else if (key == "frame.kinds") c.frame.kinds = detail::split(v, ',');
    else if (key == "frame.J") c.frame.J = int(to_uint(key, v));
    else if (key == "frame.angles") c.frame.angles = int(to_uint(key, v));
    else if (key == "frame.lf1") c.frame.lf1 = int(to_uint(key, v));
    else if (key == "frame.lf2") c.frame.lf2 = int(to_uint(key, v));
    else if (key == "solver.tau_factor") c.solver.tau_factor = to_double(key, v);
    else if (key == "solver.mu_factor") c.solver.mu_factor = to_double(key, v);
    else if (key == "solver.tol") c.solver.tol = to_double(key, v);
    else if (key == "solver.max_iters") c.solver.max_iters = int(to_uint(key, v));
    else if (key == "report.kterm_fraction") c.kterm_fraction = to_double(key, v);
    else if (key == "report.kterm_base") c.kterm_base = v;
    else if (key == "run.out") c.out = v;
    else if (key == "run.workers") c.workers = u32(to_uint(key, v));
    else if (key == "run.seed") c.seed = u32(to_uint(key, v));
    else throw InvalidConfig("unknown key '" + key + "'");
}

inline RunConfig parse_config(std::istream& is, const std::string& origin = "config") {
    RunConfig c;
    std::string line;
    for (std::size_t lineno = 1; std::getline(is, line); ++lineno) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string t = detail::trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw InvalidConfig(origin + ":" + std::to_string(lineno) + ": expected key = value");
        try {
            apply_setting(c, detail::trim(t.substr(0, eq)), detail::trim(t.substr(eq + 1)));
        } catch (const InvalidConfig& e) {
            throw InvalidConfig(origin + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return c;
}

inline RunConfig parse_config_text(const std::string& text) {
    std::istringstream is(text);
    return parse_config(is);
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open config " + path);
    return parse_config(is, path);
}

inline void RunConfig::validate() const {
    const auto& p = phantom;
    if (p.kind != "clock" && p.kind != "balls" && p.kind != "random" && p.kind != "file")
        throw InvalidConfig("phantom.kind: expected clock, balls, random or file");
    if (p.kind == "file") {
        if (p.path.empty()) throw InvalidConfig("phantom.path: required for phantom.kind = file");
        if (!std::filesystem::exists(p.path)) throw InvalidConfig("phantom.path: no such file '" + p.path + "'");
    }
    for (int a = 0; a < 3; ++a)
        if (p.dims[a] < 8) throw InvalidConfig("phantom.dims: every size must be >= 8");
    if (p.kind == "balls" && p.balls.empty()) throw InvalidConfig("phantom.ball: at least one ball is required");
    for (std::size_t b = 0; b < p.balls.size(); ++b)
        if (!(p.balls[b].radius > 0) || !(p.balls[b].amplitude > 0))
            throw InvalidConfig("phantom.ball[" + std::to_string(b) + "]: radius and amplitude must be > 0");
    if (p.depth && !(*p.depth >= 0 && *p.depth < double(p.dims[2])))
        throw InvalidConfig("phantom.depth: must lie inside the grid");
    medium.validate();
    if (pad && *pad < wave::minimum_pad(medium))
        throw InvalidConfig("medium.pad: " + std::to_string(*pad) + " is below the minimum pad of " +
                            std::to_string(wave::minimum_pad(medium)) + " voxels for medium.nt = " +
                            std::to_string(medium.nt));
    if (degradation != "blackman" && degradation != "none")
        throw InvalidConfig("degradation.kind: expected blackman or none");
    if (!is_power_of_two(sensor_size()))
        throw InvalidConfig("phantom.dims: the sensor size n1*n2 must be a power of two");
    if (!(sensing.fraction > 0 && sensing.fraction <= 1)) throw InvalidConfig("sensing.fraction: must lie in (0, 1]");
    if (measurement_count() > sensor_size()) throw InvalidConfig("sensing.m: must not exceed n = n1*n2");
    if (measurement_count() == 0) throw InvalidConfig("sensing.m: must be >= 1");
    if (!(sensing.noise_sigma >= 0)) throw InvalidConfig("sensing.noise_sigma: must be >= 0");
    if (frame.kinds.empty()) throw InvalidConfig("frame.kinds: at least one frame is required");
    for (const auto& k : frame.kinds)
        if (k != "standard" && k != "lf") throw InvalidConfig("frame.kinds: unknown frame '" + k + "'");
    if (frame.J < 2) throw InvalidConfig("frame.J: must be >= 2");
    if (frame.angles < 4 || frame.angles % 4) throw InvalidConfig("frame.angles: must be a positive multiple of 4");
    if (frame.lf1 && !(*frame.lf1 > 0 && std::size_t(*frame.lf1) < p.dims[0]))
        throw InvalidConfig("frame.lf1: must lie in (0, n1)");
    if (frame.lf2 && !(*frame.lf2 > 0 && std::size_t(*frame.lf2) < p.dims[1]))
        throw InvalidConfig("frame.lf2: must lie in (0, n2)");
    solver.validate();
    if (!(kterm_fraction > 0 && kterm_fraction <= 1)) throw InvalidConfig("report.kterm_fraction: must lie in (0, 1]");
    if (kterm_base != "coefficients" && kterm_base != "pixels")
        throw InvalidConfig("report.kterm_base: expected coefficients or pixels");
    if (out.empty()) throw InvalidConfig("run.out: must not be empty");
}

inline std::string RunConfig::echo() const {
    std::ostringstream os;
    os.precision(17);
    os << "phantom.kind = " << phantom.kind << '\n'
       << "phantom.dims = " << detail::join(phantom.dims) << '\n';
    if (phantom.depth) os << "phantom.depth = " << *phantom.depth << '\n';
    for (const auto& b : phantom.balls)
        os << "phantom.ball = " << detail::join(std::vector<double>{b.center[0], b.center[1], b.center[2], b.radius, b.amplitude})
           << '\n';
    os << "phantom.count = " << phantom.count << '\n';
    if (!phantom.path.empty()) os << "phantom.path = " << phantom.path << '\n';
    os << "medium.c0 = " << medium.c0 << '\n'
       << "medium.rho0 = " << medium.rho0 << '\n'
       << "medium.dx = " << medium.dx << '\n'
       << "medium.dt = " << medium.dt << '\n'
       << "medium.nt = " << medium.nt << '\n';
    if (pad) os << "medium.pad = " << *pad << '\n';
    os << "degradation.kind = " << degradation << '\n'
       << "sensing.fraction = " << sensing.fraction << '\n';
    if (sensing.m) os << "sensing.m = " << *sensing.m << '\n';
    os << "sensing.noise_sigma = " << sensing.noise_sigma << '\n'
       << "sensing.keep_all_ones = " << (sensing.keep_all_ones ? "true" : "false") << '\n'
       << "frame.kinds = " << detail::join(frame.kinds) << '\n'
       << "frame.J = " << frame.J << '\n'
       << "frame.angles = " << frame.angles << '\n';
    if (frame.lf1) os << "frame.lf1 = " << *frame.lf1 << '\n';
    if (frame.lf2) os << "frame.lf2 = " << *frame.lf2 << '\n';
    os << "solver.tau_factor = " << solver.tau_factor << '\n'
       << "solver.mu_factor = " << solver.mu_factor << '\n'
       << "solver.tol = " << solver.tol << '\n'
       << "solver.max_iters = " << solver.max_iters << '\n'
       << "report.kterm_fraction = " << kterm_fraction << '\n'
       << "report.kterm_base = " << kterm_base << '\n'
       << "run.out = " << out << '\n'
       << "run.workers = " << workers << '\n'
       << "run.seed = " << seed << '\n';
    return os.str();
}

}  // namespace wcs
