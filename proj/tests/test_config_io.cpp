#include "helpers.hpp"

#include "sburgers/config.hpp"
#include "sburgers/error.hpp"
#include "sburgers/io.hpp"
#include "sburgers/parallel.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>

using namespace sburgers;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("sburgers_io_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

} // namespace

TEST_SUITE("config") {

TEST_CASE("hash is stable under key reordering")
{
    const auto a = nlohmann::json::parse(R"({"nu": 0.5, "seed": 3, "pullback": {"tol": 1e-8, "horizon": 2}})");
    const auto b = nlohmann::json::parse(R"({"pullback": {"horizon": 2, "tol": 1e-8}, "seed": 3, "nu": 0.5})");
    CHECK(config_hash(from_json(a)) == config_hash(from_json(b)));
    CHECK(config_hash(from_json(a)).size() == 64);
    const auto c = nlohmann::json::parse(R"({"nu": 0.5, "seed": 4, "pullback": {"tol": 1e-8, "horizon": 2}})");
    CHECK(config_hash(from_json(a)) != config_hash(from_json(c)));
}

TEST_CASE("round trip through JSON")
{
    RunConfig cfg;
    apply_preset(cfg, "condA-boundary");
    cfg.seed = 99;
    cfg.moments.times = {1, 3};
    cfg.simulate.u0.kind = InitialCondition::Kind::random;
    const RunConfig back = from_json(to_json(cfg));
    CHECK(to_json(back) == to_json(cfg));
    CHECK(config_hash(back) == config_hash(cfg));
}

TEST_CASE("presets")
{
    RunConfig cfg;
    apply_preset(cfg, "condA-strong");
    CHECK(cfg.nu == 1.0);
    CHECK(cfg.sigma_profile.sigma == 0.1);
    CHECK(cfg.noise().sigma(2) == doctest::Approx(0.05));
    apply_preset(cfg, "condA-violated");
    CHECK(cfg.nu == 0.05);
    CHECK(cfg.preset == "condA-violated");
    CHECK_THROWS_AS(apply_preset(cfg, "condA-weird"), ConfigError);
    CHECK(preset_names().size() == 3);
}

TEST_CASE("preset key in a config file is applied before the other keys")
{
    const RunConfig cfg = from_json(nlohmann::json::parse(R"({"nu": 2.0, "preset": "condA-violated"})"));
    CHECK(cfg.nu == 2.0);
    CHECK(cfg.sigma_profile.sigma == 1.0);
}

TEST_CASE("unknown keys and wrong types name the field")
{
    try {
        from_json(nlohmann::json::parse(R"({"pullback": {"tolerance": 1}})"));
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("pullback.tolerance") != std::string::npos);
    }
    try {
        from_json(nlohmann::json::parse(R"({"n_modes": "many"})"));
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("n_modes") != std::string::npos);
    }
    CHECK_THROWS_AS(from_json(nlohmann::json::parse(R"({"n_modes": -3})")), ConfigError);
    CHECK_THROWS_AS(from_json(nlohmann::json::parse(R"({"scheme": "rk4"})")), ConfigError);
    CHECK_THROWS_AS(from_json(nlohmann::json::parse(R"({"sigma_profile": {"name": "white"}})")), ConfigError);
    CHECK_THROWS_AS(from_json(nlohmann::json::parse(R"([1, 2])")), ConfigError);
}

TEST_CASE("validation")
{
    RunConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.nu = -1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = RunConfig{};
    cfg.sigma_profile.q = 0.5;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = RunConfig{};
    cfg.moments.powers = {3};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = RunConfig{};
    cfg.oracle.horizon = 1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("parse errors report line and column")
{
    const fs::path dir = scratch("parse");
    const fs::path f = dir / "bad.json";
    std::ofstream(f) << "{\n  \"nu\": 1.0,\n  \"seed\": ,\n}\n";
    try {
        read_json_file(f.string());
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("bad.json:3:") != std::string::npos);
    }
    CHECK_THROWS_AS(read_json_file((dir / "missing.json").string()), ConfigError);
}

TEST_CASE("initial conditions")
{
    InitialCondition ic;
    CHECK(ic.build(8).l2_norm() == 0.0);
    ic.kind = InitialCondition::Kind::mode;
    ic.mode = 3;
    ic.amplitude = 0.5;
    CHECK(ic.build(8) == SpectralField::mode(8, 3, 0.5));
    ic.mode = 9;
    CHECK_THROWS_AS(ic.build(8), ConfigError);
    ic.kind = InitialCondition::Kind::random;
    ic.amplitude = 2.0;
    CHECK(ic.build(16).l2_norm() == doctest::Approx(2.0));
    CHECK(ic.build(16) == ic.build(16));
}

}

TEST_SUITE("io") {

TEST_CASE("doubles use 17 significant digits")
{
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(1.0) == "1");
    CHECK(std::stod(format_double(kPi)) == kPi);
}

TEST_CASE("csv table")
{
    CsvTable t({"a", "b"});
    t.add_row({1.0, 0.25});
    t.add_row({-2.5, 1e-300});
    CHECK(t.rows() == 2);
    CHECK(t.str() == "a,b\n1,0.25\n-2.5,1e-300\n");
    CHECK_THROWS_AS(t.add_row({1.0}), Error);
}

TEST_CASE("trajectory table and binary dump round trip")
{
    const fs::path dir = scratch("dump");
    SolverConfig cfg;
    cfg.n_modes = 8;
    cfg.record_every = 5;
    const NoisePath path(3, cfg.h);
    const NoiseSpec spec = NoiseSpec::from_profile(NoiseProfile::power_decay(0.5, 1.0), 8);
    const Trajectory tr = solve(test::random_field(8, 1), 0.0, 0.1, path, spec, cfg);

    const CsvTable plain = trajectory_table(tr, false);
    const CsvTable full = trajectory_table(tr, true);
    CHECK(plain.rows() == tr.size());
    CHECK(full.str().substr(0, full.str().find('\n')) == "time,l2,h1_semi,w_l4,a1,a2,a3,a4,a5,a6,a7,a8");

    const std::string hash(64, 'f');
    write_trajectory_binary(dir / "t.bin", tr, cfg.h, 3, hash);
    const TrajectoryDump d = read_trajectory_binary(dir / "t.bin");
    CHECK(d.version == 1);
    CHECK(d.n_modes == 8);
    CHECK(d.h == cfg.h);
    CHECK(d.seed == 3);
    CHECK(d.config_hash == hash);
    CHECK(d.times == tr.times);
    CHECK(d.states == tr.states);
    CHECK(fs::file_size(dir / "t.bin") == 8 + 4 + 4 + 8 + 8 + 64 + 8 + tr.size() * 8 * 9);

    // Truncated and corrupted files are rejected.
    {
        std::ifstream in(dir / "t.bin", std::ios::binary);
        std::string bytes((std::istreambuf_iterator<char>(in)), {});
        write_text(dir / "short.bin", bytes.substr(0, bytes.size() - 3));
        bytes[0] = 'X';
        write_text(dir / "magic.bin", bytes);
    }
    CHECK_THROWS_AS(read_trajectory_binary(dir / "short.bin"), Error);
    CHECK_THROWS_AS(read_trajectory_binary(dir / "magic.bin"), Error);
    CHECK_THROWS_AS(write_trajectory_binary(dir / "x.bin", tr, cfg.h, 3, "short"), Error);
}

TEST_CASE("run record manifest")
{
    const fs::path dir = scratch("record");
    write_text(dir / "a.csv", "x\n1\n");
    RunRecord r;
    r.command = "simulate";
    r.config = to_json(RunConfig{});
    r.config_hash = config_hash(RunConfig{});
    r.seed = 1;
    r.started = r.finished = utc_timestamp();
    r.status = "PASS";
    r.outputs = {dir / "a.csv"};
    const auto j = r.to_json();
    CHECK(j["outputs"][0]["file"] == "a.csv");
    CHECK(j["outputs"][0]["bytes"] == 4);
    CHECK(j["outputs"][0]["sha256"] == sha256_hex("x\n1\n"));
    CHECK(j["artifact_version"] == artifact_version());
    CHECK(j["config"]["seed"] == 1);
    CHECK(r.started.size() == 20);
}

TEST_CASE("sha256 of known strings")
{
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

}

TEST_SUITE("parallel") {

TEST_CASE("ensemble map is bitwise identical to the serial reference")
{
    auto member = [](std::size_t i) {
        double s = 0.0;
        for (std::size_t k = 1; k < 2000; ++k) s += std::sin(double(i * k)) / double(k);
        return s;
    };
    const auto ref = ensemble_map_serial(97, member);
    for (int w : {0, 1, 2, 4, 7}) CHECK(ensemble_map(97, member, w) == ref);
    CHECK(ensemble_map(0, member, 4).empty());
}

TEST_CASE("ensemble map rethrows member errors")
{
    auto member = [](std::size_t i) -> int {
        if (i == 13) throw DomainError("member 13");
        return int(i);
    };
    CHECK_THROWS_AS(ensemble_map(40, member, 3), DomainError);
    CHECK_THROWS_AS(ensemble_map_serial(40, member), DomainError);
}

TEST_CASE("compensated sum and sample statistics")
{
    std::vector<double> xs{1e16, 1.0, -1e16, 1.0};
    CHECK(compensated_sum(xs) == 2.0);
    const SampleStats s = sample_stats(std::vector<double>{1, 2, 3, 4});
    CHECK(s.mean == 2.5);
    CHECK(s.variance == doctest::Approx(5.0 / 3.0));
    CHECK(s.standard_error == doctest::Approx(std::sqrt(5.0 / 12.0)));
    CHECK(sample_stats(std::vector<double>{}).count == 0);
}

}
