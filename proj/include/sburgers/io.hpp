#pragma once

#include "sburgers/solver.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace sburgers {

/// Version string written into every run record and binary dump.
const char* artifact_version();

/// Comma-separated table with a header row; numbers as %.17g.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    /// Throws Error when the row width differs from the header.
    void add_row(const std::vector<double>& row);
    std::size_t rows() const noexcept { return rows_.size(); }
    std::string str() const;
    void write(const std::filesystem::path& path) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<double>> rows_;
};

std::string format_double(double x);

/// time, l2, h1_semi, w_l4 [, a1..an] per record.
CsvTable trajectory_table(const Trajectory& tr, bool with_coefficients);

/// Little-endian binary dump of the recorded states; layout in docs/formats.md.
void write_trajectory_binary(const std::filesystem::path& path, const Trajectory& tr, double h, std::uint64_t seed,
                             const std::string& config_hash);

struct TrajectoryDump {
    std::uint32_t version = 0;
    std::uint32_t n_modes = 0;
    double h = 0.0;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::vector<double> times;
    std::vector<SpectralField> states;
};

/// Throws Error on a bad magic string, version or truncated file.
TrajectoryDump read_trajectory_binary(const std::filesystem::path& path);

std::string file_sha256(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

/// UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

/// Persisted summary of one CLI invocation.
struct RunRecord {
    std::string command;
    nlohmann::json config;
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string started;
    std::string finished;
    std::string status;  ///< PASS, FAIL or ERROR
    nlohmann::json metrics = nlohmann::json::object();
    std::vector<std::filesystem::path> outputs;

    /// Manifest entries carry the file name, size and SHA-256 of each output.
    nlohmann::json to_json() const;
};

} // namespace sburgers
