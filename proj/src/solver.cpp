#include "sburgers/solver.hpp"

#include "sburgers/error.hpp"

#include <algorithm>
#include <cmath>

namespace sburgers {

std::string to_string(Scheme s) { return s == Scheme::etd1 ? "etd1" : "etd2-heun"; }

Scheme parse_scheme(const std::string& name)
{
    if (name == "etd1") return Scheme::etd1;
    if (name == "etd2-heun" || name == "etd2") return Scheme::etd2_heun;
    throw ConfigError("unknown scheme '" + name + "' (expected etd1 or etd2-heun)");
}

int scheme_order(Scheme s) { return s == Scheme::etd1 ? 1 : 2; }

void SolverConfig::validate() const
{
    if (!(nu > 0.0) || !std::isfinite(nu)) throw DomainError("nu must be > 0");
    if (n_modes == 0) throw ConfigError("n_modes must be >= 1");
    if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("h must be > 0");
    if (record_every == 0) throw ConfigError("record_every must be >= 1");
}

double solver_budget(const SolverConfig& cfg) { return std::pow(cfg.h, scheme_order(cfg.scheme)); }

SpectralField rhs_v(const SpectralField& v, const SpectralField& w, double nu, bool dealias)
{
    if (v.n_modes() != w.n_modes()) throw GridError("rhs_v: v and w differ in mode count");
    SpectralField out = nonlinearity(v + w, dealias);
    for (std::size_t k = 1; k <= v.n_modes(); ++k) out[k - 1] -= mode_rate(k, nu) * v[k - 1];
    return out;
}

// ---------------------------------------------------------------------------

namespace {

// phi_2(z) = (e^z - 1 - z) / z^2, with a series near 0 where the direct form cancels.
double phi2(double z)
{
    if (std::abs(z) < 0.1) {
        double term = 0.5, sum = 0.5;
        for (int n = 3; n < 20; ++n) {
            term *= z / double(n);
            sum += term;
        }
        return sum;
    }
    return (std::expm1(z) - z) / (z * z);
}

void ensure_finite(const SpectralField& v, double t)
{
    double s = 0.0;
    for (double a : v.coeffs()) s += a;
    if (!std::isfinite(s)) throw BlowUpError("non-finite state at t = " + std::to_string(t), t);
}

} // namespace

EtdStepper::EtdStepper(const SolverConfig& cfg)
    : cfg_(cfg), decay_(cfg.n_modes), phi1_(cfg.n_modes), phi2_(cfg.n_modes)
{
    cfg.validate();
    const std::size_t m = cfg.dealias ? dealiased_grid_size(cfg.n_modes) : cfg.n_modes;
    transform_ = std::make_shared<const SineTransform>(cfg.n_modes, m);
    for (std::size_t k = 1; k <= cfg.n_modes; ++k) {
        const double L = -mode_rate(k, cfg.nu);
        const double z = L * cfg.h;
        decay_[k - 1] = std::exp(z);
        phi1_[k - 1] = std::expm1(z) / L;
        phi2_[k - 1] = cfg.h * phi2(z);
    }
}

SpectralField EtdStepper::nonlinear(const SpectralField& u) const { return transform_->nonlinearity(u); }

SpectralField EtdStepper::linearized(const SpectralField& u, const SpectralField& psi) const
{
    SpectralField out = transform_->bilinear(u, psi);
    out *= 2.0;
    return out;
}

void EtdStepper::step(SpectralField& v, const SpectralField& w_now, const SpectralField& w_next, double t_next) const
{
    const std::size_t n = cfg_.n_modes;
    const SpectralField n0 = nonlinear(v + w_now);
    SpectralField a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = decay_[i] * v[i] + phi1_[i] * n0[i];
    if (cfg_.scheme == Scheme::etd2_heun) {
        const SpectralField n1 = nonlinear(a + w_next);
        for (std::size_t i = 0; i < n; ++i) a[i] += phi2_[i] * (n1[i] - n0[i]);
    }
    v = std::move(a);
    ensure_finite(v, t_next);
}

void EtdStepper::step_with_tangent(SpectralField& v, SpectralField& psi, const SpectralField& w_now,
                                   const SpectralField& w_next, double t_next) const
{
    const std::size_t n = cfg_.n_modes;
    const SpectralField u0 = v + w_now;
    const SpectralField n0 = nonlinear(u0);
    const SpectralField d0 = linearized(u0, psi);
    SpectralField a(n), alpha(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = decay_[i] * v[i] + phi1_[i] * n0[i];
        alpha[i] = decay_[i] * psi[i] + phi1_[i] * d0[i];
    }
    if (cfg_.scheme == Scheme::etd2_heun) {
        const SpectralField b = a + w_next;
        const SpectralField n1 = nonlinear(b);
        const SpectralField d1 = linearized(b, alpha);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] += phi2_[i] * (n1[i] - n0[i]);
            alpha[i] += phi2_[i] * (d1[i] - d0[i]);
        }
    }
    v = std::move(a);
    psi = std::move(alpha);
    ensure_finite(v, t_next);
    ensure_finite(psi, t_next);
}

SpectralField step(const SpectralField& v, const SpectralField& w_now, const SpectralField& w_next,
                   const SolverConfig& cfg)
{
    if (v.n_modes() != cfg.n_modes || w_now.n_modes() != cfg.n_modes || w_next.n_modes() != cfg.n_modes) {
        throw GridError("step: field mode counts must equal cfg.n_modes");
    }
    SpectralField out = v;
    EtdStepper(cfg).step(out, w_now, w_next);
    return out;
}

// ---------------------------------------------------------------------------

namespace {

RecordDiagnostics diagnose(const SpectralField& u, const SpectralField& w, const SineTransform& grid)
{
    RecordDiagnostics d;
    d.l2 = u.l2_norm();
    d.h1 = u.h1_seminorm();
    std::vector<double> g(grid.grid_size());
    grid.synthesize(w.coeffs(), g);
    double s4 = 0.0;
    for (double x : g) s4 += x * x * x * x;
    d.w_l4 = std::pow(s4 / double(g.size() + 1), 0.25);
    grid.synthesize(u.coeffs(), g);
    for (double x : g) d.max_abs_u = std::max(d.max_abs_u, std::abs(x));
    return d;
}

} // namespace

Trajectory solve(const SpectralField& u0, double t0, double t1, const NoisePath& path, const NoiseSpec& spec,
                 const SolverConfig& cfg, const SolveOptions& opts)
{
    cfg.validate();
    if (std::abs(cfg.h - path.h()) > 1e-15 * path.h()) {
        throw ConfigError("solver step h differs from the noise path slot size");
    }
    if (u0.n_modes() > cfg.n_modes) throw GridError("solve: u0 has more modes than the solver resolves");
    const std::int64_t s0 = path.slot_of(t0);
    const std::int64_t s1 = path.slot_of(t1);
    if (s1 <= s0) throw DomainError("solve: need t0 < t1");

    const std::size_t n = cfg.n_modes;
    const EtdStepper stepper(cfg);
    const OUPropagator ou(spec.resized(n), cfg.nu, cfg.h);
    const SineTransform diag_grid(n, dealiased_grid_size(n));

    SpectralField v = u0.resized(n);
    SpectralField w(n), w_next(n);

    Trajectory traj;
    const double c_gronwall = 27.0 * opts.gamma * opts.gamma / (2.0 * cfg.nu * cfg.nu * cfg.nu);
    traj.energy.constant = c_gronwall;
    double prev_v2 = 0.0, prev_w4 = 0.0, prev_t = 0.0;
    bool have_prev = false;

    auto record = [&](std::int64_t slot) {
        const double t = path.time_of(slot);
        const SpectralField u = v + w;
        const RecordDiagnostics d = diagnose(u, w, diag_grid);
        traj.max_cfl = std::max(traj.max_cfl, cfg.h * d.max_abs_u * double(n) * kPi);
        if (opts.monitor_energy) {
            const double v2 = v.l2_norm_squared();
            const double w4 = std::pow(d.w_l4, 4);
            if (have_prev) {
                const double dt = t - prev_t;
                const double growth = std::exp(c_gronwall * 0.5 * dt * (prev_w4 + w4));
                const double bound = prev_v2 * growth + 0.5 * dt * (growth * prev_w4 + w4) / (2.0 * cfg.nu);
                const double ratio = bound > 0.0 ? v2 / bound : (v2 > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
                ++traj.energy.checks;
                traj.energy.max_ratio = std::max(traj.energy.max_ratio, ratio);
                if (ratio > 1.0 + 1e-9) ++traj.energy.violations;
            }
            prev_v2 = v2;
            prev_w4 = w4;
            prev_t = t;
            have_prev = true;
        }
        if (t < opts.record_from) return;
        traj.times.push_back(t);
        traj.diagnostics.push_back(d);
        if (opts.store_states) traj.states.push_back(u);
    };

    record(s0);
    for (std::int64_t j = s0; j < s1; ++j) {
        w_next = w;
        ou.advance(w_next.coeffs(), path, j);
        stepper.step(v, w, w_next, path.time_of(j + 1));
        std::swap(w, w_next);
        if ((j + 1 - s0) % std::int64_t(cfg.record_every) == 0) record(j + 1);
    }
    traj.final_state = v + w;
    traj.final_time = path.time_of(s1);
    return traj;
}

SpectralField solve_endpoint(const SpectralField& u0, double t0, double t1, const NoisePath& path,
                             const NoiseSpec& spec, const SolverConfig& cfg)
{
    if (path.slot_of(t1) == path.slot_of(t0)) return u0.resized(cfg.n_modes);
    SolverConfig c = cfg;
    c.record_every = std::size_t(path.slot_of(t1) - path.slot_of(t0));
    SolveOptions opts;
    opts.store_states = false;
    opts.monitor_energy = false;
    return solve(u0, t0, t1, path, spec, c, opts).final_state;
}

} // namespace sburgers
