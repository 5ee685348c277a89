#include "sburgers/analysis.hpp"

#include "sburgers/error.hpp"
#include "sburgers/parallel.hpp"
#include "sburgers/philox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sburgers {

namespace {

constexpr double kFloorFactor = 1024.0 * std::numeric_limits<double>::epsilon();

double ls_slope(std::span<const double> xs, std::span<const double> ys)
{
    const double n = double(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    return sxy / sxx;
}

} // namespace

ConditionAReport condition_a(double nu, double epsilon0, double gamma)
{
    if (!(nu > 0.0)) throw DomainError("condition_a: nu must be > 0");
    if (!(gamma > 0.0)) throw DomainError("condition_a: gamma must be > 0");
    if (!(epsilon0 >= 0.0)) throw DomainError("condition_a: epsilon0 must be >= 0");
    ConditionAReport r;
    r.nu = nu;
    r.epsilon0 = epsilon0;
    r.gamma = gamma;
    r.threshold = gamma / (2.0 * kLambda1);
    r.viscosity_ratio = epsilon0 > 0.0 ? nu * nu * nu / epsilon0 : std::numeric_limits<double>::infinity();
    // Both forms reduce to the sign of 2 lambda1 nu^3 - gamma eps0; computing
    // delta0 from that difference keeps the two tests consistent at the boundary.
    const double lhs = 2.0 * kLambda1 * nu * nu * nu;
    const double rhs = gamma * epsilon0;
    r.delta0 = (lhs - rhs) / (2.0 * nu * nu);
    r.satisfied = lhs > rhs;
    return r;
}

ConditionAReport condition_a(double nu, const NoiseSpec& spec, double gamma)
{
    return condition_a(nu, spec.epsilon0(), gamma);
}

// ---------------------------------------------------------------------------

RateReport contraction_experiment(const SpectralField& u0_a, const SpectralField& u0_b, const NoisePath& path,
                                  const NoiseSpec& spec, const SolverConfig& cfg, double horizon,
                                  const ContractionOptions& opts)
{
    RateReport rep;
    rep.condition = condition_a(cfg.nu, spec.resized(cfg.n_modes), opts.gamma);
    rep.target = -2.0 * rep.condition.delta();
    rep.slack = opts.slack_fraction * std::abs(rep.condition.delta0);

    SolveOptions sopts;
    sopts.monitor_energy = false;
    sopts.gamma = opts.gamma;
    const Trajectory a = solve(u0_a, 0.0, horizon, path, spec, cfg, sopts);
    const Trajectory b = solve(u0_b, 0.0, horizon, path, spec, cfg, sopts);

    std::vector<double> gaps(a.size()), floors(a.size());
    rep.times = a.times;
    for (std::size_t i = 0; i < a.size(); ++i) {
        gaps[i] = distance(a.states[i], b.states[i]);
        floors[i] = kFloorFactor * std::max({a.diagnostics[i].l2, b.diagnostics[i].l2, 1e-300});
        rep.log_gap_sq.push_back(gaps[i] > 0.0 ? 2.0 * std::log(gaps[i]) : -std::numeric_limits<double>::infinity());
    }

    if (gaps.front() == 0.0) {
        rep.fitted_slope = -std::numeric_limits<double>::infinity();
        rep.note = "identical initial data: gap is identically zero";
        rep.pass = rep.condition.satisfied;
        if (!rep.condition.satisfied) rep.note += "; Condition A unsatisfied";
        return rep;
    }

    // tau: start of the first run of `decay_run` consecutive decreases.
    std::size_t start = gaps.size();
    for (std::size_t i = 0; i + opts.decay_run < gaps.size(); ++i) {
        bool decaying = true;
        for (std::size_t j = i; j < i + opts.decay_run && decaying; ++j) decaying = gaps[j + 1] < gaps[j];
        if (decaying) {
            start = i;
            break;
        }
    }
    if (start == gaps.size()) {
        rep.fitted_slope = std::numeric_limits<double>::quiet_NaN();
        rep.note = "no decaying run found within the horizon";
    } else {
        rep.tau = rep.times[start];
        std::size_t end = start;
        while (end < gaps.size() && gaps[end] > floors[end]) ++end;
        rep.truncated_at_floor = end < gaps.size();
        rep.fit_begin = start;
        rep.fit_end = end;
        if (end - start >= 2) {
            rep.fitted_slope = ls_slope(std::span(rep.times).subspan(start, end - start),
                                        std::span(rep.log_gap_sq).subspan(start, end - start));
        } else {
            rep.fitted_slope = std::numeric_limits<double>::quiet_NaN();
            rep.note = "fewer than two records above the roundoff floor";
        }
    }
    const bool slope_ok = std::isfinite(rep.fitted_slope) && rep.fitted_slope <= rep.target + rep.slack;
    rep.pass = rep.condition.satisfied && slope_ok;
    if (!rep.condition.satisfied) {
        rep.note = rep.note.empty() ? "Condition A unsatisfied" : rep.note + "; Condition A unsatisfied";
    }
    return rep;
}

// ---------------------------------------------------------------------------

namespace {

SpectralField random_unit_field(std::size_t n, std::uint64_t seed)
{
    SpectralField f(n);
    for (std::size_t k = 1; k <= n; ++k) f[k - 1] = philox_standard_normal(seed, 0xA11CEULL, k);
    f *= 1.0 / f.l2_norm();
    return f;
}

} // namespace

LyapunovReport lyapunov_top(const SpectralField& y, const NoisePath& path, const NoiseSpec& spec,
                            const SolverConfig& cfg, double horizon, const LyapunovOptions& opts)
{
    cfg.validate();
    if (opts.renorm_every == 0) throw ConfigError("lyapunov_top: renorm_every must be >= 1");
    if (!(horizon > opts.transient)) throw DomainError("lyapunov_top: horizon must exceed the transient");
    const std::size_t n = cfg.n_modes;
    const EtdStepper stepper(cfg);
    const OUPropagator ou(spec.resized(n), cfg.nu, cfg.h);
    const std::int64_t s1 = path.slot_of(horizon);
    const std::int64_t s_transient = path.slot_of(opts.transient);

    SpectralField v = y.resized(n);
    SpectralField psi = random_unit_field(n, opts.tangent_seed);
    SpectralField w(n), w_next(n);

    LyapunovReport rep;
    double log_sum = 0.0;
    std::int64_t interval_start = 0;
    for (std::int64_t j = 0; j < s1; ++j) {
        w_next = w;
        ou.advance(w_next.coeffs(), path, j);
        stepper.step_with_tangent(v, psi, w, w_next, path.time_of(j + 1));
        std::swap(w, w_next);
        const bool end_of_interval = (j + 1) % std::int64_t(opts.renorm_every) == 0 || j + 1 == s1;
        if (!end_of_interval) continue;
        const double g = psi.l2_norm();
        if (!(g > 1e-280)) {
            throw ConfigError("lyapunov_top: tangent vector underflowed; decrease renorm_every");
        }
        if (interval_start >= s_transient) {
            log_sum += std::log(g);
            rep.averaging_time += path.time_of(j + 1 - interval_start);
        }
        psi *= 1.0 / g;
        ++rep.renormalisations;
        interval_start = j + 1;
    }
    rep.exponent = log_sum / rep.averaging_time;
    return rep;
}

LyapunovReport lyapunov_top(const PullbackResult& y_source, const NoisePath& path, const NoiseSpec& spec,
                            const SolverConfig& cfg, double horizon, const LyapunovOptions& opts)
{
    return lyapunov_top(y_source.y, path, spec, cfg, horizon, opts);
}

TangentCheckReport tangent_fd_check(const SpectralField& y, const SpectralField& phi, const NoisePath& path,
                                    const NoiseSpec& spec, const SolverConfig& cfg, double horizon, double eps)
{
    cfg.validate();
    if (!(eps > 0.0)) throw DomainError("tangent_fd_check: eps must be > 0");
    const std::size_t n = cfg.n_modes;
    const EtdStepper stepper(cfg);
    const OUPropagator ou(spec.resized(n), cfg.nu, cfg.h);
    const std::int64_t s1 = path.slot_of(horizon);

    SpectralField v = y.resized(n);
    SpectralField v_eps = v + eps * phi.resized(n);
    SpectralField psi = phi.resized(n);
    SpectralField w(n), w_next(n);

    TangentCheckReport rep;
    rep.eps = eps;
    for (std::int64_t j = 0; j < s1; ++j) {
        w_next = w;
        ou.advance(w_next.coeffs(), path, j);
        stepper.step_with_tangent(v, psi, w, w_next);
        stepper.step(v_eps, w, w_next);
        std::swap(w, w_next);
        if ((j + 1) % std::int64_t(cfg.record_every) != 0 && j + 1 != s1) continue;
        SpectralField fd = v_eps - v;
        fd *= 1.0 / eps;
        rep.max_relative_error = std::max(rep.max_relative_error, distance(fd, psi) / psi.l2_norm());
    }
    return rep;
}

// ---------------------------------------------------------------------------

bool MomentReport::pass() const
{
    return std::all_of(trends.begin(), trends.end(),
                       [](const Trend& t) { return t.no_upward_trend && t.consistent_across_t; });
}

MomentReport moment_scan(const NoiseSpec& spec, const SolverConfig& cfg, const std::vector<int>& p_list,
                         std::size_t ensemble_size, const std::vector<double>& t_list, const MomentOptions& opts)
{
    cfg.validate();
    for (int p : p_list)
        if (p != 1 && p != 2) throw DomainError("moment_scan: p must be 1 or 2");
    if (t_list.empty() || ensemble_size == 0) throw DomainError("moment_scan: empty t_list or ensemble");
    if (!std::is_sorted(t_list.begin(), t_list.end()) || !(t_list.front() > 0.0)) {
        throw DomainError("moment_scan: t_list must be positive and increasing");
    }

    const NoisePath probe(0, cfg.h);
    std::int64_t stride = 0;
    for (double t : t_list) stride = std::gcd(stride, probe.slot_of(t));
    SolverConfig c = cfg;
    c.record_every = std::size_t(stride);
    SolveOptions sopts;
    sopts.store_states = false;
    sopts.monitor_energy = false;

    // Member i: energies |u(t)|_2^2 at each t of t_list.
    auto member = [&](std::size_t i) {
        const NoisePath path(split_seed(opts.base_seed, i), cfg.h);
        const Trajectory tr = solve(SpectralField(cfg.n_modes), 0.0, t_list.back(), path, spec, c, sopts);
        std::vector<double> energies;
        for (double t : t_list) {
            const auto idx = std::size_t(probe.slot_of(t) / stride);
            energies.push_back(tr.diagnostics.at(idx).l2 * tr.diagnostics.at(idx).l2);
        }
        return energies;
    };
    const auto samples = opts.serial_reference ? ensemble_map_serial(ensemble_size, member)
                                               : ensemble_map(ensemble_size, member, opts.workers);

    MomentReport rep;
    rep.ensemble_size = ensemble_size;
    rep.low_power_warning = ensemble_size < 100;
    for (std::size_t k = 1; k <= cfg.n_modes; ++k) {
        rep.ou_stationary_energy += spec.sigma(k) * spec.sigma(k) / (2.0 * mode_rate(k, cfg.nu));
    }

    for (int p : p_list) {
        std::vector<MomentEstimate> row;
        for (std::size_t ti = 0; ti < t_list.size(); ++ti) {
            std::vector<double> xs(ensemble_size);
            for (std::size_t i = 0; i < ensemble_size; ++i) xs[i] = std::pow(samples[i][ti], p);
            const SampleStats s = sample_stats(xs);
            row.push_back({p, t_list[ti], s.mean, s.standard_error});
        }

        MomentReport::Trend trend;
        trend.p = p;
        // Weighted least squares of the moment against t, weights 1 / se^2.
        bool all_se_positive = std::all_of(row.begin(), row.end(), [](const auto& e) { return e.standard_error > 0; });
        if (all_se_positive && row.size() >= 2) {
            double sw = 0, swt = 0, swm = 0;
            for (const auto& e : row) {
                const double wgt = 1.0 / (e.standard_error * e.standard_error);
                sw += wgt;
                swt += wgt * e.t;
                swm += wgt * e.mean;
            }
            const double tbar = swt / sw, mbar = swm / sw;
            double stt = 0, stm = 0;
            for (const auto& e : row) {
                const double wgt = 1.0 / (e.standard_error * e.standard_error);
                stt += wgt * (e.t - tbar) * (e.t - tbar);
                stm += wgt * (e.t - tbar) * (e.mean - mbar);
            }
            trend.slope = stm / stt;
            trend.slope_se = std::sqrt(1.0 / stt);
        }
        trend.no_upward_trend = trend.slope - 3.0 * trend.slope_se <= 0.0;
        trend.consistent_across_t = true;
        for (std::size_t i = 0; i < row.size(); ++i) {
            for (std::size_t j = i + 1; j < row.size(); ++j) {
                const double tol = 3.0 * std::hypot(row[i].standard_error, row[j].standard_error);
                if (std::abs(row[i].mean - row[j].mean) > tol) trend.consistent_across_t = false;
            }
        }
        const double factorial = p == 1 ? 1.0 : 1.0;  // (p - 1)! for p in {1, 2}
        trend.factorial_constant = std::pow(row.back().mean / factorial, 1.0 / p);
        rep.trends.push_back(trend);
        rep.estimates.insert(rep.estimates.end(), row.begin(), row.end());
    }
    return rep;
}

} // namespace sburgers
