#include "sburgers/io.hpp"

#include "sburgers/config.hpp"
#include "sburgers/error.hpp"

#include <bit>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#ifndef SBURGERS_VERSION
#define SBURGERS_VERSION "0.0.0"
#endif

namespace sburgers {

namespace {

constexpr char kMagic[8] = {'S', 'B', 'G', 'R', 'T', 'R', 'J', '1'};
constexpr std::uint32_t kDumpVersion = 1;

void put_u64(std::string& out, std::uint64_t v)
{
    for (int i = 0; i < 8; ++i) out.push_back(char((v >> (8 * i)) & 0xFF));
}

void put_u32(std::string& out, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i) out.push_back(char((v >> (8 * i)) & 0xFF));
}

void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

class Reader {
public:
    explicit Reader(std::string data) : data_(std::move(data)) {}

    std::uint64_t u64()
    {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= std::uint64_t(std::uint8_t(data_[pos_ + i])) << (8 * i);
        pos_ += 8;
        return v;
    }
    std::uint32_t u32()
    {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t(std::uint8_t(data_[pos_ + i])) << (8 * i);
        pos_ += 4;
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string bytes(std::size_t n)
    {
        need(n);
        std::string s = data_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    bool done() const { return pos_ == data_.size(); }

private:
    void need(std::size_t n) const
    {
        if (pos_ + n > data_.size()) throw Error("trajectory dump: truncated file");
    }
    std::string data_;
    std::size_t pos_ = 0;
};

std::string slurp(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

const char* artifact_version() { return SBURGERS_VERSION; }

std::string format_double(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void CsvTable::add_row(const std::vector<double>& row)
{
    if (row.size() != header_.size()) throw Error("csv: row width does not match the header");
    rows_.push_back(row);
}

std::string CsvTable::str() const
{
    std::string out;
    for (std::size_t i = 0; i < header_.size(); ++i) {
        if (i) out += ',';
        out += header_[i];
    }
    out += '\n';
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += format_double(row[i]);
        }
        out += '\n';
    }
    return out;
}

void CsvTable::write(const std::filesystem::path& path) const { write_text(path, str()); }

CsvTable trajectory_table(const Trajectory& tr, bool with_coefficients)
{
    std::vector<std::string> header{"time", "l2", "h1_semi", "w_l4"};
    const std::size_t n = with_coefficients && !tr.states.empty() ? tr.states.front().n_modes() : 0;
    for (std::size_t k = 1; k <= n; ++k) header.push_back("a" + std::to_string(k));
    CsvTable table(std::move(header));
    for (std::size_t i = 0; i < tr.size(); ++i) {
        const auto& d = tr.diagnostics[i];
        std::vector<double> row{tr.times[i], d.l2, d.h1, d.w_l4};
        for (std::size_t k = 0; k < n; ++k) row.push_back(tr.states[i][k]);
        table.add_row(row);
    }
    return table;
}

void write_trajectory_binary(const std::filesystem::path& path, const Trajectory& tr, double h, std::uint64_t seed,
                             const std::string& config_hash)
{
    if (tr.states.size() != tr.size()) throw Error("trajectory dump: states were not stored");
    if (config_hash.size() != 64) throw Error("trajectory dump: config hash must be 64 hex characters");
    const std::uint32_t n = tr.states.empty() ? 0 : std::uint32_t(tr.states.front().n_modes());
    std::string out(kMagic, sizeof kMagic);
    put_u32(out, kDumpVersion);
    put_u32(out, n);
    put_f64(out, h);
    put_u64(out, seed);
    out += config_hash;
    put_u64(out, tr.size());
    for (std::size_t i = 0; i < tr.size(); ++i) {
        put_f64(out, tr.times[i]);
        for (double a : tr.states[i].coeffs()) put_f64(out, a);
    }
    write_text(path, out);
}

TrajectoryDump read_trajectory_binary(const std::filesystem::path& path)
{
    Reader r(slurp(path));
    if (r.bytes(sizeof kMagic) != std::string(kMagic, sizeof kMagic)) throw Error("trajectory dump: bad magic");
    TrajectoryDump d;
    d.version = r.u32();
    if (d.version != kDumpVersion) throw Error("trajectory dump: unsupported version");
    d.n_modes = r.u32();
    d.h = r.f64();
    d.seed = r.u64();
    d.config_hash = r.bytes(64);
    const std::uint64_t records = r.u64();
    for (std::uint64_t i = 0; i < records; ++i) {
        d.times.push_back(r.f64());
        SpectralField u(d.n_modes);
        for (std::uint32_t k = 0; k < d.n_modes; ++k) u[k] = r.f64();
        d.states.push_back(std::move(u));
    }
    if (!r.done()) throw Error("trajectory dump: trailing bytes");
    return d;
}

std::string file_sha256(const std::filesystem::path& path) { return sha256_hex(slurp(path)); }

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

nlohmann::json RunRecord::to_json() const
{
    nlohmann::json manifest = nlohmann::json::array();
    for (const auto& p : outputs) {
        manifest.push_back({{"file", p.filename().string()},
                            {"bytes", std::filesystem::file_size(p)},
                            {"sha256", file_sha256(p)}});
    }
    return {{"command", command},
            {"artifact_version", artifact_version()},
            {"config", config},
            {"config_hash", config_hash},
            {"seed", seed},
            {"started", started},
            {"finished", finished},
            {"status", status},
            {"metrics", metrics},
            {"outputs", manifest}};
}

} // namespace sburgers
