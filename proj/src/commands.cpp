#include "sburgers/commands.hpp"

#include "sburgers/analysis.hpp"
#include "sburgers/error.hpp"
#include "sburgers/heat_kernel.hpp"
#include "sburgers/io.hpp"
#include "sburgers/parallel.hpp"
#include "sburgers/philox.hpp"
#include "sburgers/stationary.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <limits>
#include <optional>

namespace sburgers {

using nlohmann::json;

namespace {

// JSON has no representation for inf/nan; they are written as strings.
json num(double x)
{
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return "nan";
    return x > 0 ? "inf" : "-inf";
}

json num_array(const std::vector<double>& xs)
{
    json a = json::array();
    for (double x : xs) a.push_back(num(x));
    return a;
}

json condition_json(const ConditionAReport& c)
{
    return {{"nu", c.nu},
            {"epsilon0", c.epsilon0},
            {"gamma", c.gamma},
            {"lambda1", c.lambda1},
            {"delta0", c.delta0},
            {"delta", c.delta()},
            {"viscosity_ratio", num(c.viscosity_ratio)},
            {"threshold", c.threshold},
            {"satisfied", c.satisfied}};
}

ConditionAReport condition_of(const RunConfig& cfg) { return condition_a(cfg.nu, cfg.noise(), cfg.gamma); }

std::string with_condition_note(std::string summary, const ConditionAReport& c)
{
    if (!c.satisfied) summary += "; Condition A unsatisfied";
    return summary;
}

} // namespace

CommandOutcome cmd_simulate(const RunConfig& cfg, const CommandEnv& env)
{
    const SolverConfig sc = cfg.solver();
    const NoisePath path(cfg.seed, cfg.h);
    SolveOptions opts;
    opts.gamma = cfg.gamma;
    const Trajectory tr = solve(cfg.simulate.u0.build(cfg.n_modes), cfg.simulate.t0, cfg.simulate.t1, path,
                                cfg.noise(), sc, opts);

    CommandOutcome out;
    const auto csv = env.out_dir / "simulate.csv";
    const auto bin = env.out_dir / "simulate.bin";
    trajectory_table(tr, cfg.simulate.write_coefficients).write(csv);
    write_trajectory_binary(bin, tr, cfg.h, cfg.seed, config_hash(cfg));
    out.outputs = {csv, bin};

    double max_l2 = 0.0;
    for (const auto& d : tr.diagnostics) max_l2 = std::max(max_l2, d.l2);
    out.metrics = {{"records", tr.size()},
                   {"final_time", tr.final_time},
                   {"final_l2", tr.final_state.l2_norm()},
                   {"max_l2", max_l2},
                   {"max_cfl", tr.max_cfl},
                   {"energy_monitor",
                    {{"constant", tr.energy.constant},
                     {"checks", tr.energy.checks},
                     {"violations", tr.energy.violations},
                     {"max_ratio", tr.energy.max_ratio}}}};
    out.pass = tr.energy.violations == 0;
    out.summary = std::to_string(tr.size()) + " records, energy monitor violations: " +
                  std::to_string(tr.energy.violations);
    return out;
}

CommandOutcome cmd_pullback(const RunConfig& cfg, const CommandEnv& env)
{
    const SolverConfig sc = cfg.solver();
    const NoiseSpec spec = cfg.noise();
    const NoisePath path(cfg.seed, cfg.h);
    const ConditionAReport cond = condition_of(cfg);
    const PullbackResult pb = pullback(path, spec, sc, cfg.pullback_options());

    CsvTable gaps({"n", "gap", "log_gap"});
    for (std::size_t i = 0; i < pb.cauchy_gaps.size(); ++i) {
        gaps.add_row({pb.schedule[i], pb.cauchy_gaps[i], std::log(pb.cauchy_gaps[i])});
    }

    // Residual of the integral equation on [-M, 0] for M in {2, 4, 8}.
    const std::vector<double> horizons{2, 4, 8};
    const double depth = pb.n_used;
    const Trajectory ustar = stationary_trajectory(path, spec, sc, -horizons.back(), 0.0, depth);
    CsvTable residuals({"M", "residual", "predicted_tail", "budget"});
    json residual_json = json::array();
    bool residuals_ok = true;
    for (double M : horizons) {
        const ResidualReport r = integral_residual(pb.y, ustar, path, spec, sc, M);
        residuals.add_row({M, r.residual, r.predicted_tail, r.budget});
        residual_json.push_back({{"M", M},
                                 {"residual", r.residual},
                                 {"predicted_tail", r.predicted_tail},
                                 {"quadrature_error", r.quadrature_error},
                                 {"budget", r.budget},
                                 {"within_budget", r.within_budget()}});
        residuals_ok = residuals_ok && r.within_budget();
    }

    CommandOutcome out;
    const auto gaps_csv = env.out_dir / "pullback_gaps.csv";
    const auto res_csv = env.out_dir / "pullback_residuals.csv";
    gaps.write(gaps_csv);
    residuals.write(res_csv);
    out.outputs = {gaps_csv, res_csv};

    const double last_gap = pb.cauchy_gaps.empty() ? std::numeric_limits<double>::infinity() : pb.cauchy_gaps.back();
    const bool rate_resolved = pb.fit_points >= 2;
    const bool rate_ok = !rate_resolved || pb.fitted_rate <= -0.5 * cond.delta0;
    out.pass = cond.satisfied && pb.converged && last_gap <= cfg.pullback.gap_limit && rate_ok && residuals_ok;

    out.metrics = {{"condition_a", condition_json(cond)},
                   {"schedule", pb.schedule},
                   {"gaps", num_array(pb.cauchy_gaps)},
                   {"roundoff_floor", pb.roundoff_floor},
                   {"fit_points", pb.fit_points},
                   {"fitted_rate", num(pb.fitted_rate)},
                   {"rate_target", -0.5 * cond.delta0},
                   {"n_star", pb.n_star ? json(*pb.n_star) : json(nullptr)},
                   {"converged", pb.converged},
                   {"n_used", pb.n_used},
                   {"y_l2", pb.y.l2_norm()},
                   {"y", pb.y.vector()},
                   {"residuals", residual_json}};
    std::string s = "last gap " + format_double(last_gap) + ", fitted rate " +
                    (rate_resolved ? format_double(pb.fitted_rate) : std::string("unresolved (gaps at roundoff)"));
    out.summary = with_condition_note(s, cond);
    return out;
}

CommandOutcome cmd_contraction(const RunConfig& cfg, const CommandEnv& env)
{
    const SolverConfig sc = cfg.solver();
    const NoisePath path(cfg.seed, cfg.h);
    InitialCondition ic;
    ic.kind = InitialCondition::Kind::random;
    ic.amplitude = cfg.contraction.separation;
    ic.seed = split_seed(cfg.seed, 1);
    const SpectralField a(cfg.n_modes);
    const SpectralField b = ic.build(cfg.n_modes);
    ContractionOptions opts;
    opts.gamma = cfg.gamma;
    opts.slack_fraction = cfg.contraction.slack_fraction;
    opts.decay_run = cfg.contraction.decay_run;
    const RateReport rep = contraction_experiment(a, b, path, cfg.noise(), sc, cfg.contraction.horizon, opts);

    CsvTable series({"time", "gap", "log_gap_sq"});
    for (std::size_t i = 0; i < rep.times.size(); ++i) {
        series.add_row({rep.times[i], std::exp(0.5 * rep.log_gap_sq[i]), rep.log_gap_sq[i]});
    }
    CommandOutcome out;
    const auto csv = env.out_dir / "contraction.csv";
    series.write(csv);
    out.outputs = {csv};
    out.pass = rep.pass;
    out.metrics = {{"condition_a", condition_json(rep.condition)},
                   {"tau", rep.tau ? json(*rep.tau) : json(nullptr)},
                   {"fit_begin", rep.fit_begin},
                   {"fit_end", rep.fit_end},
                   {"truncated_at_floor", rep.truncated_at_floor},
                   {"fitted_slope", num(rep.fitted_slope)},
                   {"target", rep.target},
                   {"slack", rep.slack},
                   {"note", rep.note}};
    out.summary = "fitted slope " + format_double(rep.fitted_slope) + " vs target " +
                  format_double(rep.target + rep.slack);
    if (!rep.note.empty()) out.summary += "; " + rep.note;
    return out;
}

CommandOutcome cmd_lyapunov(const RunConfig& cfg, const CommandEnv& env)
{
    const SolverConfig sc = cfg.solver();
    const NoiseSpec spec = cfg.noise();
    const NoisePath path(cfg.seed, cfg.h);
    const ConditionAReport cond = condition_of(cfg);
    const PullbackResult pb = pullback(path, spec, sc, cfg.pullback_options());

    LyapunovOptions lo;
    lo.renorm_every = cfg.lyapunov.renorm_every;
    lo.transient = cfg.lyapunov.transient;
    lo.tangent_seed = split_seed(cfg.seed, 2);
    const LyapunovReport ly = lyapunov_top(pb, path, spec, sc, cfg.lyapunov.horizon, lo);

    InitialCondition dir;
    dir.kind = InitialCondition::Kind::random;
    dir.seed = split_seed(cfg.seed, 3);
    const TangentCheckReport fd = tangent_fd_check(pb.y, dir.build(cfg.n_modes), path, spec, sc,
                                                   cfg.lyapunov.fd_horizon, cfg.lyapunov.fd_eps);

    CsvTable table({"exponent", "averaging_time", "renormalisations", "fd_max_relative_error"});
    table.add_row({ly.exponent, ly.averaging_time, double(ly.renormalisations), fd.max_relative_error});
    CommandOutcome out;
    const auto csv = env.out_dir / "lyapunov.csv";
    table.write(csv);
    out.outputs = {csv};

    const double target = -0.5 * cond.delta0;
    out.pass = cond.satisfied && ly.exponent <= target && fd.max_relative_error <= cfg.lyapunov.fd_tolerance;
    out.metrics = {{"condition_a", condition_json(cond)},
                   {"exponent", ly.exponent},
                   {"target", target},
                   {"averaging_time", ly.averaging_time},
                   {"renormalisations", ly.renormalisations},
                   {"pullback_converged", pb.converged},
                   {"fd_eps", fd.eps},
                   {"fd_max_relative_error", fd.max_relative_error}};
    out.summary = with_condition_note("exponent " + format_double(ly.exponent) + " vs target " +
                                          format_double(target) + ", tangent/FD error " +
                                          format_double(fd.max_relative_error),
                                      cond);
    return out;
}

CommandOutcome cmd_moments(const RunConfig& cfg, const CommandEnv& env)
{
    const ConditionAReport cond = condition_of(cfg);
    MomentOptions mo;
    mo.base_seed = cfg.seed;
    mo.workers = env.workers;
    const MomentReport rep =
        moment_scan(cfg.noise(), cfg.solver(), cfg.moments.powers, cfg.moments.ensemble, cfg.moments.times, mo);

    CsvTable table({"p", "t", "mean", "standard_error"});
    json est = json::array();
    for (const auto& e : rep.estimates) {
        table.add_row({double(e.p), e.t, e.mean, e.standard_error});
        est.push_back({{"p", e.p}, {"t", e.t}, {"mean", e.mean}, {"standard_error", e.standard_error}});
    }
    json trends = json::array();
    for (const auto& t : rep.trends) {
        trends.push_back({{"p", t.p},
                          {"slope", t.slope},
                          {"slope_se", t.slope_se},
                          {"no_upward_trend", t.no_upward_trend},
                          {"consistent_across_t", t.consistent_across_t},
                          {"factorial_constant", t.factorial_constant}});
    }
    CommandOutcome out;
    const auto csv = env.out_dir / "moments.csv";
    table.write(csv);
    out.outputs = {csv};
    out.pass = cond.satisfied && rep.pass();
    out.metrics = {{"condition_a", condition_json(cond)},
                   {"ensemble_size", rep.ensemble_size},
                   {"low_power_warning", rep.low_power_warning},
                   {"ou_stationary_energy", rep.ou_stationary_energy},
                   {"estimates", est},
                   {"trends", trends},
                   {"note", "time-uniform bound sampled at finitely many t and p in {1, 2} only"}};
    std::string s = "ensemble " + std::to_string(rep.ensemble_size);
    if (rep.low_power_warning) s += " (low statistical power)";
    for (const auto& t : rep.trends) {
        s += ", p=" + std::to_string(t.p) + (t.no_upward_trend && t.consistent_across_t ? " bounded" : " trending");
    }
    out.summary = with_condition_note(s, cond);
    return out;
}

CommandOutcome cmd_condition_a(const RunConfig& cfg, const CommandEnv& env)
{
    const ConditionAReport cond = condition_of(cfg);
    CsvTable table({"nu", "epsilon0", "gamma", "delta0", "satisfied"});
    table.add_row({cond.nu, cond.epsilon0, cond.gamma, cond.delta0, cond.satisfied ? 1.0 : 0.0});
    CommandOutcome out;
    const auto csv = env.out_dir / "condition_a.csv";
    table.write(csv);
    out.outputs = {csv};
    out.pass = cond.satisfied;
    out.metrics = {{"condition_a", condition_json(cond)}};
    out.summary = with_condition_note("delta0 = " + format_double(cond.delta0), cond);
    return out;
}

CommandOutcome cmd_oracle_check(const RunConfig& cfg, const CommandEnv& env)
{
    SolverConfig sc = cfg.solver();
    sc.n_modes = cfg.oracle.n_modes;
    sc.record_every = 1;
    const NoiseSpec spec = NoiseSpec::from_profile(cfg.sigma_profile, sc.n_modes);

    struct Member {
        double difference, budget, residual, quadrature_error;
        std::size_t iterations;
    };
    auto member = [&](std::size_t i) {
        const std::uint64_t seed = split_seed(cfg.seed, i);
        InitialCondition ic;
        ic.kind = InitialCondition::Kind::random;
        ic.amplitude = cfg.oracle.u0_norm;
        ic.seed = seed;
        const SpectralField u0 = ic.build(sc.n_modes);
        const NoisePath path(seed, sc.h);
        const SpectralField direct = solve_endpoint(u0, 0.0, cfg.oracle.horizon, path, spec, sc);
        const PicardResult pr = picard_mild_oracle(u0, 0.0, cfg.oracle.horizon, path, spec, sc,
                                                   cfg.oracle.max_iterations);
        return Member{distance(direct, pr.endpoint), cfg.oracle.budget_factor * (sc.h + pr.quadrature_error),
                      pr.residual, pr.quadrature_error, pr.iterations};
    };
    const auto members = ensemble_map(cfg.oracle.seeds, member, env.workers);

    const KernelGrid grid = KernelGrid::uniform(cfg.oracle.kernel_t_min, cfg.oracle.kernel_t_max,
                                                cfg.oracle.kernel_n_t, cfg.oracle.kernel_n_xy);
    const HeatKernelParams kp = search_kernel_constants(cfg.nu, grid);
    const KernelBoundReport kb = kernel_bound_check(kp, grid);

    CsvTable table({"member", "difference", "budget", "picard_residual", "quadrature_error", "iterations"});
    json rows = json::array();
    std::size_t passed = 0;
    for (std::size_t i = 0; i < members.size(); ++i) {
        const auto& m = members[i];
        table.add_row({double(i), m.difference, m.budget, m.residual, m.quadrature_error, double(m.iterations)});
        rows.push_back({{"member", i},
                        {"difference", m.difference},
                        {"budget", m.budget},
                        {"picard_residual", m.residual},
                        {"quadrature_error", m.quadrature_error},
                        {"iterations", m.iterations}});
        if (m.difference <= m.budget) ++passed;
    }
    CommandOutcome out;
    const auto csv = env.out_dir / "oracle_check.csv";
    table.write(csv);
    out.outputs = {csv};
    out.pass = passed == members.size() && kb.pass();
    out.metrics = {{"picard", rows},
                   {"picard_passed", passed},
                   {"kernel",
                    {{"c1", kp.c1},
                     {"c2", kp.c2},
                     {"c3", kp.c3},
                     {"max_ratio", kb.max_ratio},
                     {"at", {kb.at_t, kb.at_x, kb.at_y}},
                     {"diagonal_max_ratio", kb.diagonal_max_ratio},
                     {"c3_max_integral", kb.c3_max_integral},
                     {"n_terms", kb.n_terms},
                     {"pass", kb.pass()}}}};
    out.summary = "Picard agreement " + std::to_string(passed) + "/" + std::to_string(members.size()) +
                  ", kernel bound max ratio " + format_double(kb.max_ratio);
    return out;
}

// ---------------------------------------------------------------------------

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Spectral Galerkin simulator for the stochastic Burgers equation", "burgers"};
    std::string config_path, out_dir = ".", preset;
    std::optional<std::uint64_t> seed;
    int workers = 0;
    app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "base seed of the noise path");
    app.add_option("--out", out_dir, "output directory (BURGERS_OUT overrides)");
    app.add_option("--workers", workers, "worker threads, 0 = available parallelism")->check(CLI::NonNegativeNumber);
    app.add_option("--preset", preset, "parameter preset")->check(CLI::IsMember(preset_names()));
    app.require_subcommand(1);

    using Handler = CommandOutcome (*)(const RunConfig&, const CommandEnv&);
    const std::vector<std::pair<std::string, Handler>> commands{
        {"simulate", cmd_simulate},       {"pullback", cmd_pullback}, {"contraction", cmd_contraction},
        {"lyapunov", cmd_lyapunov},       {"moments", cmd_moments},   {"condition-a", cmd_condition_a},
        {"oracle-check", cmd_oracle_check}};
    const std::vector<std::string> help{
        "solve from the configured initial datum and write the trajectory",
        "pull-back estimate of the stationary point with integral-equation residuals",
        "synchronisation rate of two solutions on the same noise path",
        "top Lyapunov exponent along the stationary trajectory",
        "Monte-Carlo moments of |u(t)|_2^2 and |u(t)|_2^4",
        "evaluate the large-viscosity condition",
        "solver vs Picard oracle and the heat-kernel gradient bound"};
    for (std::size_t i = 0; i < commands.size(); ++i) app.add_subcommand(commands[i].first, help[i])->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitPass;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }

    const CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (const char* env_out = std::getenv("BURGERS_OUT"); env_out && *env_out) out_dir = env_out;

    try {
        RunConfig cfg;
        if (!preset.empty()) apply_preset(cfg, preset);
        if (!config_path.empty()) merge_json(cfg, read_json_file(config_path));
        if (seed) cfg.seed = *seed;
        cfg.validate();

        CommandEnv env;
        env.out_dir = out_dir;
        env.workers = workers;
        std::filesystem::create_directories(env.out_dir);

        RunRecord record;
        record.command = name;
        record.config = to_json(cfg);
        record.config_hash = config_hash(cfg);
        record.seed = cfg.seed;
        record.started = utc_timestamp();

        Handler handler = nullptr;
        for (const auto& [n, h] : commands)
            if (n == name) handler = h;
        CommandOutcome outcome = handler(cfg, env);

        record.finished = utc_timestamp();
        record.status = outcome.pass ? "PASS" : "FAIL";
        record.metrics = outcome.metrics;
        record.metrics["summary"] = outcome.summary;
        record.outputs = outcome.outputs;
        std::string file = name;
        for (char& c : file)
            if (c == '-') c = '_';
        const auto report = env.out_dir / (file + ".json");
        write_text(report, record.to_json().dump(2) + "\n");

        out << record.status << " " << name << ": " << outcome.summary << "\n";
        out << "report: " << report.string() << "\n";
        return outcome.pass ? kExitPass : kExitFail;
    } catch (const std::exception& e) {
        err << "error: " << name << ": " << e.what() << "\n";
        return kExitError;
    }
}

} // namespace sburgers
