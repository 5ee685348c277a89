#include "sburgers/stationary.hpp"

#include "sburgers/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sburgers {

namespace {

constexpr double kFloorFactor = 1024.0 * std::numeric_limits<double>::epsilon();

void require_stride_aligned(const NoisePath& path, const SolverConfig& cfg, double t, const char* what)
{
    const std::int64_t slots = path.slot_of(t);
    if (slots % std::int64_t(cfg.record_every) != 0) {
        throw AlignmentError(std::string(what) + " is not a multiple of record_every * h");
    }
}

// Least-squares slope of ys against xs.
double ls_slope(const std::vector<double>& xs, const std::vector<double>& ys)
{
    const double n = double(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    return sxy / sxx;
}

} // namespace

PullbackResult pullback(const NoisePath& path, const NoiseSpec& spec, const SolverConfig& cfg,
                        const PullbackOptions& opts)
{
    cfg.validate();
    if (!(opts.tol > 0.0)) throw DomainError("pullback: tol must be > 0");
    if (opts.schedule.size() < 2) throw DomainError("pullback: schedule needs at least two windows");
    for (std::size_t i = 0; i < opts.schedule.size(); ++i) {
        if (!(opts.schedule[i] > 0.0) || (i > 0 && !(opts.schedule[i] > opts.schedule[i - 1]))) {
            throw DomainError("pullback: schedule must be positive and strictly increasing");
        }
        require_stride_aligned(path, cfg, opts.schedule[i], "pull-back window length");
    }
    if (!(opts.horizon >= 0.0)) throw DomainError("pullback: horizon must be >= 0");
    require_stride_aligned(path, cfg, opts.horizon, "pull-back horizon");
    path.slot_of(opts.target_time);

    const double t_end = opts.target_time + std::max(opts.horizon, cfg.h * double(cfg.record_every));
    SolveOptions sopts;
    sopts.record_from = opts.target_time;
    sopts.monitor_energy = false;

    const SpectralField zero(cfg.n_modes);
    auto window = [&](double n) {
        Trajectory tr = solve(zero, opts.target_time - n, t_end, path, spec, cfg, sopts);
        // Keep records within [target, target + horizon].
        while (!tr.times.empty() && tr.times.back() > opts.target_time + opts.horizon + 0.5 * cfg.h) {
            tr.times.pop_back();
            tr.states.pop_back();
            tr.diagnostics.pop_back();
        }
        return tr;
    };

    PullbackResult res;
    Trajectory prev = window(opts.schedule[0]);
    res.schedule.push_back(opts.schedule[0]);
    auto track_norm = [&](const Trajectory& tr) {
        for (const auto& d : tr.diagnostics) res.max_norm = std::max(res.max_norm, d.l2);
    };
    track_norm(prev);

    for (std::size_t i = 1; i < opts.schedule.size(); ++i) {
        Trajectory cur = window(opts.schedule[i]);
        track_norm(cur);
        double gap = 0.0;
        for (std::size_t r = 0; r < cur.size(); ++r) gap = std::max(gap, distance(cur.states[r], prev.states[r]));
        res.cauchy_gaps.push_back(gap);
        res.schedule.push_back(opts.schedule[i]);
        prev = std::move(cur);
        if (gap < opts.tol) {
            res.converged = true;
            if (opts.early_stop) break;
        }
    }
    res.y = prev.states.front();
    res.n_used = res.schedule.back();
    res.roundoff_floor = kFloorFactor * std::max(res.max_norm, std::numeric_limits<double>::min());

    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < res.cauchy_gaps.size(); ++i) {
        if (res.cauchy_gaps[i] > res.roundoff_floor) {
            xs.push_back(res.schedule[i]);
            ys.push_back(std::log(res.cauchy_gaps[i]));
        }
    }
    res.fit_points = xs.size();
    res.fitted_rate = xs.size() >= 2 ? ls_slope(xs, ys) : std::numeric_limits<double>::quiet_NaN();

    // Empirical random time: gaps at the floor count as non-increasing.
    const auto& g = res.cauchy_gaps;
    for (std::size_t i = 0; i + 3 < g.size(); ++i) {
        bool shrinking = true;
        for (std::size_t j = i; j < i + 3; ++j) shrinking = shrinking && g[j + 1] <= std::max(g[j], res.roundoff_floor);
        if (shrinking) {
            res.n_star = res.schedule[i];
            break;
        }
    }
    return res;
}

Trajectory stationary_trajectory(const NoisePath& path, const NoiseSpec& spec, const SolverConfig& cfg,
                                 double t_start, double t_end, double depth)
{
    SolverConfig c = cfg;
    c.record_every = 1;
    SolveOptions sopts;
    sopts.record_from = t_start - 0.5 * cfg.h;
    return solve(SpectralField(cfg.n_modes), t_start - depth, t_end, path, spec, c, sopts);
}

namespace {

SpectralField trapezoid_convolution(const Trajectory& ustar, std::size_t first, std::size_t stride,
                                    const EtdStepper& stepper, double nu)
{
    const std::size_t n = stepper.config().n_modes;
    SpectralField integral(n);
    const std::size_t last = ustar.size() - 1;
    SpectralField prev_nl = stepper.nonlinear(ustar.states[first]);
    for (std::size_t i = first + stride; i <= last; i += stride) {
        const double dt = ustar.times[i] - ustar.times[i - stride];
        const SpectralField nl = stepper.nonlinear(ustar.states[i]);
        for (std::size_t k = 1; k <= n; ++k) {
            const double e = std::exp(-mode_rate(k, nu) * dt);
            integral[k - 1] = e * integral[k - 1] + 0.5 * dt * (e * prev_nl[k - 1] + nl[k - 1]);
        }
        prev_nl = nl;
    }
    return integral;
}

} // namespace

ResidualReport integral_residual(const SpectralField& y, const Trajectory& ustar, const NoisePath& path,
                                 const NoiseSpec& spec, const SolverConfig& cfg, double M)
{
    if (!(M > 0.0)) throw DomainError("integral_residual: M must be > 0");
    if (ustar.size() < 2 || ustar.states.size() != ustar.size()) {
        throw DomainError("integral_residual: trajectory with stored states required");
    }
    const double t_end = ustar.times.back();
    const std::int64_t s_end = path.slot_of(t_end);
    const std::int64_t s_start = s_end - path.slot_of(M);
    std::size_t first = ustar.size();
    for (std::size_t i = 0; i < ustar.size(); ++i) {
        if (path.slot_of(ustar.times[i]) == s_start) {
            first = i;
            break;
        }
    }
    if (first == ustar.size()) throw DomainError("integral_residual: M exceeds the recorded window");

    const EtdStepper stepper(cfg);
    const SpectralField fine = trapezoid_convolution(ustar, first, 1, stepper, cfg.nu);
    const SpectralField conv =
        stochastic_convolution_window(path, spec.resized(cfg.n_modes), cfg.nu, path.time_of(s_start), t_end)
            .back()
            .w;

    ResidualReport r;
    r.horizon = M;
    r.residual = distance(y.resized(cfg.n_modes), fine + conv);
    double max_norm = 0.0;
    for (std::size_t i = first; i < ustar.size(); ++i) max_norm = std::max(max_norm, ustar.states[i].l2_norm());
    r.predicted_tail = std::exp(-cfg.nu * kLambda1 * M) * max_norm;
    if ((ustar.size() - 1 - first) % 2 == 0 && ustar.size() - 1 - first >= 2) {
        const SpectralField coarse = trapezoid_convolution(ustar, first, 2, stepper, cfg.nu);
        r.quadrature_error = distance(fine, coarse) / 3.0;
    }
    r.budget = cfg.h + r.quadrature_error;
    return r;
}

ShiftReport shift_equivariance_check(const NoisePath& path, const NoiseSpec& spec, const SolverConfig& cfg,
                                     double r, const PullbackOptions& opts)
{
    const std::int64_t r_slots = path.slot_of(r);
    ShiftReport rep;
    rep.r = r;
    rep.budget = 2.0 * (opts.tol + solver_budget(cfg));
    const PullbackResult here = pullback(path, spec, cfg, opts);
    rep.shifted_pullback = r_slots == 0 ? here.y : pullback(path.shifted(r_slots), spec, cfg, opts).y;
    rep.flowed = solve_endpoint(here.y, 0.0, r, path, spec, cfg);
    rep.difference = distance(rep.shifted_pullback, rep.flowed);
    return rep;
}

UniquenessReport uniqueness_check(const NoisePath& path, const NoiseSpec& spec, const SolverConfig& cfg,
                                  const SpectralField& alt_initial, double n, double delta)
{
    const SpectralField zero(cfg.n_modes);
    const SpectralField a = solve_endpoint(zero, -n, 0.0, path, spec, cfg);
    const SpectralField b = solve_endpoint(alt_initial, -n, 0.0, path, spec, cfg);
    UniquenessReport rep;
    rep.n = n;
    rep.gap = distance(a, b);
    rep.bound = alt_initial.l2_norm() * std::exp(-delta * n) + solver_budget(cfg);
    return rep;
}

} // namespace sburgers
