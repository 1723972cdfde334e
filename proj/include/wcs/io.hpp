#pragma once

// Binary dataset formats. All integers and floats are little-endian.
//
//   WCSV / WCSS   magic, u32 d0 d1 d2, f64 dx dt c0, u64 count, f32[count]
//   WCSB          magic, u32 m nt log2n seed flags, u64 count, f64[count]   (m x nt, row-major;
//                 flags bit 0: all-ones row kept in the selection)
//   WCSC          magic, u32 n1 n2 J angles_coarse lf1 lf2 (0 = none), u32[J-1] angles, u64 count, f64[count]
//   WCSH          magic, u32 log2n m seed, u8[m*n]
//
// Writes go to a temporary sibling and are renamed into place.

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <unistd.h>

#include "wcs/common.hpp"
#include "wcs/curvelet.hpp"
#include "wcs/hadamard.hpp"

namespace wcs::io {

static_assert(std::endian::native == std::endian::little, "on-disk formats assume a little-endian host");

struct GridMeta {
    double dx = 0.0, dt = 0.0, c0 = 0.0;
};

namespace detail {

class Writer {
  public:
    template <typename T>
    void put(T v) {
        const auto* p = reinterpret_cast<const char*>(&v);
        buf_.insert(buf_.end(), p, p + sizeof(T));
    }
    void put_bytes(const void* data, std::size_t n) {
        const auto* p = static_cast<const char*>(data);
        buf_.insert(buf_.end(), p, p + n);
    }
    const std::vector<char>& bytes() const { return buf_; }

  private:
    std::vector<char> buf_;
};

class Reader {
  public:
    Reader(std::vector<char> data, std::string path) : data_(std::move(data)), path_(std::move(path)) {}

    template <typename T>
    T get() {
        need(sizeof(T));
        T v;
        std::memcpy(&v, data_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }
    void get_bytes(void* out, std::size_t n) {
        need(n);
        std::memcpy(out, data_.data() + pos_, n);
        pos_ += n;
    }
    std::size_t remaining() const { return data_.size() - pos_; }
    const std::string& path() const { return path_; }

    void expect_magic(const char (&magic)[5]) {
        if (data_.size() < 4) throw TruncatedFile(path_ + ": file shorter than its magic");
        if (std::memcmp(data_.data(), magic, 4) != 0)
            throw BadMagic(path_ + ": expected magic " + std::string(magic, 4));
        pos_ = 4;
    }

  private:
    void need(std::size_t n) const {
        if (data_.size() - pos_ < n) throw TruncatedFile(path_ + ": unexpected end of file");
    }
    std::vector<char> data_;
    std::size_t pos_ = 0;
    std::string path_;
};

inline std::vector<char> slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path);
    std::vector<char> data((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    if (is.bad()) throw IoError("read failed for " + path);
    return data;
}

inline std::uint64_t checked_product(std::initializer_list<std::uint64_t> dims, const std::string& path) {
    std::uint64_t p = 1;
    for (auto d : dims) {
        if (d != 0 && p > std::numeric_limits<std::uint64_t>::max() / d) throw CorruptFile(path + ": dimension overflow");
        p *= d;
    }
    return p;
}

inline void check_count(std::uint64_t count, std::uint64_t expected, std::size_t elem, Reader& r) {
    if (count != expected)
        throw CorruptFile(r.path() + ": payload count " + std::to_string(count) + " does not match dimensions (" +
                          std::to_string(expected) + ")");
    if (count > r.remaining() / elem) throw TruncatedFile(r.path() + ": payload shorter than header declares");
}

}  // namespace detail

/// Atomically replaces `path` with `bytes`.
inline void write_atomic(const std::string& path, std::span<const char> bytes) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    const fs::path tmp = target.string() + ".tmp" + std::to_string(::getpid());
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw IoError("cannot open " + tmp.string() + " for writing");
        os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        os.flush();
        if (!os) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw IoError("write failed for " + path);
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot rename into " + path + ": " + ec.message());
    }
}

inline void write_text(const std::string& path, const std::string& text) { write_atomic(path, {text.data(), text.size()}); }

inline void write_array3(const std::string& path, const char (&magic)[5], const Array3<double>& a, const GridMeta& meta) {
    detail::Writer w;
    w.put_bytes(magic, 4);
    for (auto d : a.dims) {
        if (d > std::numeric_limits<std::uint32_t>::max()) throw InvalidInput("write_array: dimension too large");
        w.put(static_cast<std::uint32_t>(d));
    }
    w.put(meta.dx);
    w.put(meta.dt);
    w.put(meta.c0);
    w.put(static_cast<std::uint64_t>(a.size()));
    for (double v : a.data) w.put(static_cast<float>(v));
    write_atomic(path, w.bytes());
}

inline Array3<double> read_array3(const std::string& path, const char (&magic)[5], GridMeta* meta = nullptr) {
    detail::Reader r(detail::slurp(path), path);
    r.expect_magic(magic);
    const auto d0 = r.get<std::uint32_t>(), d1 = r.get<std::uint32_t>(), d2 = r.get<std::uint32_t>();
    GridMeta m;
    m.dx = r.get<double>();
    m.dt = r.get<double>();
    m.c0 = r.get<double>();
    const auto count = r.get<std::uint64_t>();
    detail::check_count(count, detail::checked_product({d0, d1, d2}, path), sizeof(float), r);
    Array3<double> a(d0, d1, d2);
    for (auto& v : a.data) v = r.get<float>();
    if (meta) *meta = m;
    return a;
}

inline void write_volume(const std::string& path, const Volume3D& v, const GridMeta& meta) {
    write_array3(path, "WCSV", v, meta);
}
inline Volume3D read_volume(const std::string& path, GridMeta* meta = nullptr) {
    return read_array3(path, "WCSV", meta);
}
inline void write_series(const std::string& path, const SensorSeries& s, const GridMeta& meta) {
    write_array3(path, "WCSS", s, meta);
}
inline SensorSeries read_series(const std::string& path, GridMeta* meta = nullptr) {
    return read_array3(path, "WCSS", meta);
}

/// Measurement matrix B (m x nt) plus what is needed to rebuild its operator.
struct Measurements {
    Array2<double> B;
    std::uint32_t log2n = 0;
    std::uint32_t seed = 0;
    bool keep_all_ones = false;

    SensingOperator sensing_operator() const {
        return SensingOperator::scrambled(log2n, B.rows, seed, keep_all_ones);
    }
};

inline void write_measurements(const std::string& path, const Measurements& meas) {
    detail::Writer w;
    w.put_bytes("WCSB", 4);
    w.put(static_cast<std::uint32_t>(meas.B.rows));
    w.put(static_cast<std::uint32_t>(meas.B.cols));
    w.put(meas.log2n);
    w.put(meas.seed);
    w.put(static_cast<std::uint32_t>(meas.keep_all_ones ? 1 : 0));
    w.put(static_cast<std::uint64_t>(meas.B.size()));
    for (double v : meas.B.data) w.put(v);
    write_atomic(path, w.bytes());
}

inline Measurements read_measurements(const std::string& path) {
    detail::Reader r(detail::slurp(path), path);
    r.expect_magic("WCSB");
    const auto m = r.get<std::uint32_t>(), nt = r.get<std::uint32_t>();
    Measurements out;
    out.log2n = r.get<std::uint32_t>();
    out.seed = r.get<std::uint32_t>();
    const auto flags = r.get<std::uint32_t>();
    if (flags > 1) throw CorruptFile(path + ": unknown flags");
    out.keep_all_ones = flags == 1;
    if (out.log2n >= 32) throw CorruptFile(path + ": log2n out of range");
    if (m > (std::uint64_t{1} << out.log2n)) throw CorruptFile(path + ": m exceeds n");
    const auto count = r.get<std::uint64_t>();
    detail::check_count(count, detail::checked_product({m, nt}, path), sizeof(double), r);
    out.B = Array2<double>(m, nt);
    for (auto& v : out.B.data) v = r.get<double>();
    return out;
}

/// Curvelet coefficients with the plan parameters needed to rebuild the frame.
struct CoeffFile {
    std::uint32_t n1 = 0, n2 = 0, J = 0, angles_coarse = 0, lf1 = 0, lf2 = 0;
    std::vector<std::uint32_t> angles;
    curvelet::CurveletCoeffs coeffs;
};

inline void write_coeffs(const std::string& path, const curvelet::CurveletPlan& plan, std::span<const double> coeffs) {
    if (coeffs.size() != plan.coeff_count()) throw InvalidInput("write_coeffs: coefficient count does not match plan");
    detail::Writer w;
    w.put_bytes("WCSC", 4);
    w.put(static_cast<std::uint32_t>(plan.n1()));
    w.put(static_cast<std::uint32_t>(plan.n2()));
    w.put(static_cast<std::uint32_t>(plan.J()));
    w.put(static_cast<std::uint32_t>(plan.angles_coarse()));
    w.put(static_cast<std::uint32_t>(plan.lf1().value_or(0)));
    w.put(static_cast<std::uint32_t>(plan.lf2().value_or(0)));
    for (std::size_t s = 1; s < plan.angles().size(); ++s) w.put(static_cast<std::uint32_t>(plan.angles()[s]));
    w.put(static_cast<std::uint64_t>(coeffs.size()));
    for (double v : coeffs) w.put(v);
    write_atomic(path, w.bytes());
}

inline CoeffFile read_coeffs(const std::string& path) {
    detail::Reader r(detail::slurp(path), path);
    r.expect_magic("WCSC");
    CoeffFile f;
    f.n1 = r.get<std::uint32_t>();
    f.n2 = r.get<std::uint32_t>();
    f.J = r.get<std::uint32_t>();
    f.angles_coarse = r.get<std::uint32_t>();
    f.lf1 = r.get<std::uint32_t>();
    f.lf2 = r.get<std::uint32_t>();
    if (f.J < 2 || f.J > 16) throw CorruptFile(path + ": scale count out of range");
    f.angles.resize(f.J - 1);
    for (auto& a : f.angles) a = r.get<std::uint32_t>();
    const auto count = r.get<std::uint64_t>();
    if (count > r.remaining() / sizeof(double)) throw TruncatedFile(path + ": payload shorter than header declares");
    f.coeffs.resize(count);
    for (auto& v : f.coeffs) v = r.get<double>();
    return f;
}

/// Rebuilds the plan recorded in a coefficient file and checks it matches.
inline std::shared_ptr<const curvelet::CurveletPlan> plan_of(const CoeffFile& f, const std::string& path = "coefficients") {
    auto lf = [](std::uint32_t v) { return v ? std::optional<int>(int(v)) : std::nullopt; };
    auto plan = curvelet::make_plan(int(f.n1), int(f.n2), int(f.J), int(f.angles_coarse), lf(f.lf1), lf(f.lf2));
    if (plan->coeff_count() != f.coeffs.size()) throw CorruptFile(path + ": coefficient count does not match its plan");
    for (std::size_t s = 0; s < f.angles.size(); ++s)
        if (int(f.angles[s]) != plan->angles()[s + 1]) throw CorruptFile(path + ": angle counts do not match its plan");
    return plan;
}

inline void write_patterns(const std::string& path, const SensingOperator& op) {
    detail::Writer w;
    w.put_bytes("WCSH", 4);
    w.put(static_cast<std::uint32_t>(op.log2n()));
    w.put(static_cast<std::uint32_t>(op.m()));
    w.put(op.seed());
    for (std::size_t j = 0; j < op.m(); ++j) {
        const auto p = op.pattern(j);
        w.put_bytes(p.data(), p.size());
    }
    write_atomic(path, w.bytes());
}

struct PatternFile {
    std::uint32_t log2n = 0, m = 0, seed = 0;
    std::vector<std::vector<std::uint8_t>> patterns;
};

inline PatternFile read_patterns(const std::string& path) {
    detail::Reader r(detail::slurp(path), path);
    r.expect_magic("WCSH");
    PatternFile f;
    f.log2n = r.get<std::uint32_t>();
    f.m = r.get<std::uint32_t>();
    f.seed = r.get<std::uint32_t>();
    if (f.log2n >= 32 || f.m > (std::uint64_t{1} << f.log2n)) throw CorruptFile(path + ": header out of range");
    const std::size_t n = std::size_t{1} << f.log2n;
    if (r.remaining() / n < f.m) throw TruncatedFile(path + ": fewer patterns than header declares");
    if (r.remaining() != std::size_t(f.m) * n) throw CorruptFile(path + ": trailing bytes after patterns");
    f.patterns.assign(f.m, std::vector<std::uint8_t>(n));
    for (auto& p : f.patterns) {
        r.get_bytes(p.data(), n);
        for (auto b : p)
            if (b > 1) throw CorruptFile(path + ": pattern entry is not 0/1");
    }
    return f;
}

/// Comma-separated table with a header row.
class CsvTable {
  public:
    explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    template <typename... Ts>
    void row(const Ts&... values) {
        if (sizeof...(Ts) != columns_.size()) throw InvalidInput("csv: row width does not match header");
        std::ostringstream os;
        os.precision(10);
        bool first = true;
        ((os << (first ? "" : ",") << values, first = false), ...);
        rows_.push_back(os.str());
    }
    std::size_t rows() const { return rows_.size(); }

    std::string str() const {
        std::string out;
        for (std::size_t i = 0; i < columns_.size(); ++i) out += (i ? "," : "") + columns_[i];
        out += '\n';
        for (const auto& r : rows_) out += r + '\n';
        return out;
    }
    void write(const std::string& path) const { write_text(path, str()); }

  private:
    std::vector<std::string> columns_;
    std::vector<std::string> rows_;
};

}  // namespace wcs::io
