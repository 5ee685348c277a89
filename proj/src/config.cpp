#include "sburgers/config.hpp"

#include "sburgers/error.hpp"
#include "sburgers/philox.hpp"

#include <openssl/evp.h>

#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace sburgers {

using nlohmann::json;

SpectralField InitialCondition::build(std::size_t n_modes) const
{
    SpectralField u(n_modes);
    switch (kind) {
    case Kind::zero:
        break;
    case Kind::mode:
        if (mode == 0 || mode > n_modes) throw ConfigError("u0.mode must lie in [1, n_modes]");
        u[mode - 1] = amplitude;
        break;
    case Kind::random: {
        for (std::size_t k = 1; k <= n_modes; ++k) u[k - 1] = philox_standard_normal(seed, 0xC0FFEEULL, k) / double(k);
        const double norm = u.l2_norm();
        if (norm > 0.0) u *= amplitude / norm;
        break;
    }
    }
    return u;
}

SolverConfig RunConfig::solver() const
{
    SolverConfig c;
    c.nu = nu;
    c.n_modes = n_modes;
    c.h = h;
    c.scheme = scheme;
    c.dealias = dealias;
    c.record_every = record_every;
    return c;
}

PullbackOptions RunConfig::pullback_options() const
{
    PullbackOptions o;
    o.schedule = pullback.schedule;
    o.tol = pullback.tol;
    o.horizon = pullback.horizon;
    o.early_stop = false;
    return o;
}

namespace {

void require(bool ok, const std::string& field, const std::string& what)
{
    if (!ok) throw ConfigError("config field '" + field + "': " + what);
}

} // namespace

void RunConfig::validate() const
{
    require(nu > 0.0 && std::isfinite(nu), "nu", "must be positive");
    require(n_modes >= 1, "n_modes", "must be >= 1");
    require(h > 0.0 && std::isfinite(h), "h", "must be positive");
    require(record_every >= 1, "record_every", "must be >= 1");
    require(gamma > 0.0, "gamma", "must be positive");
    require(sigma_profile.sigma >= 0.0, "sigma_profile.sigma", "must be >= 0");
    if (sigma_profile.kind == NoiseProfile::Kind::power_decay) {
        require(sigma_profile.q > 0.5, "sigma_profile.q", "must exceed 1/2");
    }
    require(simulate.t1 > simulate.t0, "simulate.t1", "must exceed simulate.t0");
    require(!pullback.schedule.empty(), "pullback.schedule", "must not be empty");
    require(pullback.tol > 0.0, "pullback.tol", "must be positive");
    require(pullback.horizon > 0.0, "pullback.horizon", "must be positive");
    require(contraction.horizon > 0.0, "contraction.horizon", "must be positive");
    require(contraction.separation > 0.0, "contraction.separation", "must be positive");
    require(lyapunov.horizon > lyapunov.transient, "lyapunov.horizon", "must exceed lyapunov.transient");
    require(lyapunov.renorm_every >= 1, "lyapunov.renorm_every", "must be >= 1");
    require(lyapunov.fd_eps > 0.0, "lyapunov.fd_eps", "must be positive");
    require(moments.ensemble >= 1, "moments.ensemble", "must be >= 1");
    require(!moments.times.empty(), "moments.times", "must not be empty");
    for (int p : moments.powers) require(p == 1 || p == 2, "moments.powers", "entries must be 1 or 2");
    require(oracle.n_modes >= 1, "oracle.n_modes", "must be >= 1");
    require(oracle.horizon > 0.0 && oracle.horizon <= 0.5, "oracle.horizon", "must lie in (0, 0.5]");
    require(oracle.kernel_t_min > 0.0, "oracle.kernel_t_min", "must be positive");
    require(oracle.kernel_t_max > oracle.kernel_t_min, "oracle.kernel_t_max", "must exceed kernel_t_min");
    solver().validate();
}

const std::vector<std::string>& preset_names()
{
    static const std::vector<std::string> names{"condA-strong", "condA-boundary", "condA-violated"};
    return names;
}

void apply_preset(RunConfig& cfg, const std::string& name)
{
    if (name == "condA-strong") {
        cfg.nu = 1.0;
        cfg.sigma_profile = NoiseProfile::power_decay(0.1, 1.0);
    } else if (name == "condA-boundary") {
        cfg.nu = 0.4;
        cfg.sigma_profile = NoiseProfile::power_decay(1.0, 1.0);
    } else if (name == "condA-violated") {
        cfg.nu = 0.05;
        cfg.sigma_profile = NoiseProfile::power_decay(1.0, 1.0);
    } else {
        throw ConfigError("unknown preset '" + name + "' (expected condA-strong, condA-boundary or condA-violated)");
    }
    cfg.n_modes = 64;
    cfg.h = 1e-3;
    cfg.preset = name;
}

// ---------------------------------------------------------------------------

namespace {

json profile_json(const NoiseProfile& p)
{
    json j{{"name", p.name()}, {"sigma", p.sigma}};
    if (p.kind == NoiseProfile::Kind::power_decay) j["q"] = p.q;
    else j["count"] = p.count;
    return j;
}

json initial_json(const InitialCondition& ic)
{
    switch (ic.kind) {
    case InitialCondition::Kind::zero: return json{{"kind", "zero"}};
    case InitialCondition::Kind::mode: return json{{"kind", "mode"}, {"mode", ic.mode}, {"amplitude", ic.amplitude}};
    case InitialCondition::Kind::random:
        return json{{"kind", "random"}, {"amplitude", ic.amplitude}, {"seed", ic.seed}};
    }
    return {};
}

} // namespace

json to_json(const RunConfig& c)
{
    json j;
    j["preset"] = c.preset;
    j["nu"] = c.nu;
    j["sigma_profile"] = profile_json(c.sigma_profile);
    j["n_modes"] = c.n_modes;
    j["h"] = c.h;
    j["seed"] = c.seed;
    j["scheme"] = to_string(c.scheme);
    j["dealias"] = c.dealias;
    j["record_every"] = c.record_every;
    j["gamma"] = c.gamma;
    j["simulate"] = {{"t0", c.simulate.t0},
                     {"t1", c.simulate.t1},
                     {"u0", initial_json(c.simulate.u0)},
                     {"write_coefficients", c.simulate.write_coefficients}};
    j["pullback"] = {{"schedule", c.pullback.schedule},
                     {"tol", c.pullback.tol},
                     {"horizon", c.pullback.horizon},
                     {"gap_limit", c.pullback.gap_limit}};
    j["contraction"] = {{"horizon", c.contraction.horizon},
                        {"separation", c.contraction.separation},
                        {"slack_fraction", c.contraction.slack_fraction},
                        {"decay_run", c.contraction.decay_run}};
    j["lyapunov"] = {{"horizon", c.lyapunov.horizon},       {"renorm_every", c.lyapunov.renorm_every},
                     {"transient", c.lyapunov.transient},   {"fd_eps", c.lyapunov.fd_eps},
                     {"fd_horizon", c.lyapunov.fd_horizon}, {"fd_tolerance", c.lyapunov.fd_tolerance}};
    j["moments"] = {{"ensemble", c.moments.ensemble}, {"times", c.moments.times}, {"powers", c.moments.powers}};
    j["oracle"] = {{"n_modes", c.oracle.n_modes},
                   {"horizon", c.oracle.horizon},
                   {"seeds", c.oracle.seeds},
                   {"u0_norm", c.oracle.u0_norm},
                   {"max_iterations", c.oracle.max_iterations},
                   {"budget_factor", c.oracle.budget_factor},
                   {"kernel_t_min", c.oracle.kernel_t_min},
                   {"kernel_t_max", c.oracle.kernel_t_max},
                   {"kernel_n_t", c.oracle.kernel_n_t},
                   {"kernel_n_xy", c.oracle.kernel_n_xy}};
    return j;
}

namespace {

// Field binder: each entry reads one key of an object into the config.
using Setter = std::function<void(const json&, const std::string&)>;

template <class T>
Setter bind(T& target)
{
    return [&target](const json& v, const std::string& path) {
        try {
            if constexpr (std::is_same_v<T, std::uint64_t> || std::is_same_v<T, std::size_t>) {
                if (!v.is_number_unsigned()) throw ConfigError("");
            } else if constexpr (std::is_same_v<T, double>) {
                if (!v.is_number()) throw ConfigError("");
            } else if constexpr (std::is_same_v<T, bool>) {
                if (!v.is_boolean()) throw ConfigError("");
            } else if constexpr (std::is_same_v<T, std::string>) {
                if (!v.is_string()) throw ConfigError("");
            }
            target = v.get<T>();
        } catch (const std::exception&) {
            throw ConfigError("config field '" + path + "': wrong type (got " + std::string(v.type_name()) + ")");
        }
    };
}

void merge_object(const json& j, const std::string& prefix, const std::map<std::string, Setter>& fields)
{
    if (!j.is_object()) throw ConfigError("config field '" + prefix + "': expected an object");
    for (const auto& [key, value] : j.items()) {
        const std::string path = prefix.empty() ? key : prefix + "." + key;
        const auto it = fields.find(key);
        if (it == fields.end()) throw ConfigError("config field '" + path + "': unknown key");
        it->second(value, path);
    }
}

} // namespace

void merge_json(RunConfig& c, const json& j)
{
    if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
    if (j.contains("preset")) {
        const auto& p = j.at("preset");
        if (!p.is_string()) throw ConfigError("config field 'preset': wrong type");
        if (!p.get<std::string>().empty()) apply_preset(c, p.get<std::string>());
    }

    std::map<std::string, Setter> top{
        {"preset", [](const json&, const std::string&) {}},
        {"nu", bind(c.nu)},
        {"n_modes", bind(c.n_modes)},
        {"h", bind(c.h)},
        {"seed", bind(c.seed)},
        {"dealias", bind(c.dealias)},
        {"record_every", bind(c.record_every)},
        {"gamma", bind(c.gamma)},
        {"scheme",
         [&c](const json& v, const std::string& path) {
             if (!v.is_string()) throw ConfigError("config field '" + path + "': wrong type");
             c.scheme = parse_scheme(v.get<std::string>());
         }},
        {"sigma_profile",
         [&c](const json& v, const std::string& path) {
             std::string name = c.sigma_profile.name();
             merge_object(v, path,
                          {{"name", bind(name)},
                           {"sigma", bind(c.sigma_profile.sigma)},
                           {"q", bind(c.sigma_profile.q)},
                           {"count", bind(c.sigma_profile.count)}});
             if (name == "constant") c.sigma_profile.kind = NoiseProfile::Kind::constant;
             else if (name == "power-decay") c.sigma_profile.kind = NoiseProfile::Kind::power_decay;
             else throw ConfigError("config field '" + path + ".name': expected constant or power-decay");
         }},
        {"simulate",
         [&c](const json& v, const std::string& path) {
             merge_object(v, path,
                          {{"t0", bind(c.simulate.t0)},
                           {"t1", bind(c.simulate.t1)},
                           {"write_coefficients", bind(c.simulate.write_coefficients)},
                           {"u0", [&c](const json& u, const std::string& p) {
                                auto& ic = c.simulate.u0;
                                std::string kind = "zero";
                                if (ic.kind == InitialCondition::Kind::mode) kind = "mode";
                                if (ic.kind == InitialCondition::Kind::random) kind = "random";
                                merge_object(u, p,
                                             {{"kind", bind(kind)},
                                              {"mode", bind(ic.mode)},
                                              {"amplitude", bind(ic.amplitude)},
                                              {"seed", bind(ic.seed)}});
                                if (kind == "zero") ic.kind = InitialCondition::Kind::zero;
                                else if (kind == "mode") ic.kind = InitialCondition::Kind::mode;
                                else if (kind == "random") ic.kind = InitialCondition::Kind::random;
                                else throw ConfigError("config field '" + p + ".kind': expected zero, mode or random");
                            }}});
         }},
        {"pullback",
         [&c](const json& v, const std::string& path) {
             merge_object(v, path,
                          {{"schedule", bind(c.pullback.schedule)},
                           {"tol", bind(c.pullback.tol)},
                           {"horizon", bind(c.pullback.horizon)},
                           {"gap_limit", bind(c.pullback.gap_limit)}});
         }},
        {"contraction",
         [&c](const json& v, const std::string& path) {
             merge_object(v, path,
                          {{"horizon", bind(c.contraction.horizon)},
                           {"separation", bind(c.contraction.separation)},
                           {"slack_fraction", bind(c.contraction.slack_fraction)},
                           {"decay_run", bind(c.contraction.decay_run)}});
         }},
        {"lyapunov",
         [&c](const json& v, const std::string& path) {
             merge_object(v, path,
                          {{"horizon", bind(c.lyapunov.horizon)},
                           {"renorm_every", bind(c.lyapunov.renorm_every)},
                           {"transient", bind(c.lyapunov.transient)},
                           {"fd_eps", bind(c.lyapunov.fd_eps)},
                           {"fd_horizon", bind(c.lyapunov.fd_horizon)},
                           {"fd_tolerance", bind(c.lyapunov.fd_tolerance)}});
         }},
        {"moments",
         [&c](const json& v, const std::string& path) {
             merge_object(v, path,
                          {{"ensemble", bind(c.moments.ensemble)},
                           {"times", bind(c.moments.times)},
                           {"powers", bind(c.moments.powers)}});
         }},
        {"oracle",
         [&c](const json& v, const std::string& path) {
             merge_object(v, path,
                          {{"n_modes", bind(c.oracle.n_modes)},
                           {"horizon", bind(c.oracle.horizon)},
                           {"seeds", bind(c.oracle.seeds)},
                           {"u0_norm", bind(c.oracle.u0_norm)},
                           {"max_iterations", bind(c.oracle.max_iterations)},
                           {"budget_factor", bind(c.oracle.budget_factor)},
                           {"kernel_t_min", bind(c.oracle.kernel_t_min)},
                           {"kernel_t_max", bind(c.oracle.kernel_t_max)},
                           {"kernel_n_t", bind(c.oracle.kernel_n_t)},
                           {"kernel_n_xy", bind(c.oracle.kernel_n_xy)}});
         }},
    };
    merge_object(j, "", top);
}

RunConfig from_json(const json& j)
{
    RunConfig c;
    merge_json(c, j);
    return c;
}

json read_json_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ConfigError(path + ":" + std::to_string(line) + ":" + std::to_string(col) + ": JSON parse error");
    }
}

std::string sha256_hex(const std::string& bytes)
{
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw Error("sha256: digest failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xF];
    }
    return out;
}

std::string config_hash(const RunConfig& cfg)
{
    // nlohmann::json objects are key-sorted, so dump() is canonical.
    return sha256_hex(to_json(cfg).dump());
}

} // namespace sburgers
