#include "sburgers/error.hpp"
#include "sburgers/solver.hpp"

#include <cmath>

namespace sburgers {

namespace {

struct PicardRun {
    std::vector<SpectralField> path_u;  // u^{(m)} on the quadrature grid
    double residual = 0.0;
    std::vector<double> history;
    std::size_t iterations = 0;
};

// Fixed-point sweeps on a grid of `nodes` + 1 points spaced dt apart; conv[i]
// is W_{nu Delta}(t0, t0 + i dt).
PicardRun run_picard(const SpectralField& u0, const std::vector<SpectralField>& conv, double dt, double nu,
                     std::size_t iterations, double tol)
{
    const std::size_t n = u0.n_modes();
    const std::size_t nodes = conv.size();
    std::vector<double> decay(n);
    for (std::size_t k = 1; k <= n; ++k) decay[k - 1] = std::exp(-mode_rate(k, nu) * dt);

    // Free part T(t - t0) u0 + W(t0, t).
    std::vector<SpectralField> free(nodes);
    SpectralField lin = u0;
    for (std::size_t i = 0; i < nodes; ++i) {
        free[i] = lin + conv[i];
        for (std::size_t k = 0; k < n; ++k) lin[k] *= decay[k];
    }

    PicardRun run;
    run.path_u = free;
    std::size_t growth_streak = 0;
    for (std::size_t it = 0; it < iterations; ++it) {
        std::vector<SpectralField> nl(nodes);
        for (std::size_t i = 0; i < nodes; ++i) nl[i] = nonlinearity_direct(run.path_u[i]);

        // I_i = e^{-mu dt} I_{i-1} + dt/2 (e^{-mu dt} N_{i-1} + N_i): the
        // trapezoidal rule for int_{t0}^{t_i} T(t_i - s) N(s) ds.
        SpectralField integral(n);
        double sup = 0.0;
        std::vector<SpectralField> next(nodes);
        for (std::size_t i = 0; i < nodes; ++i) {
            if (i > 0) {
                for (std::size_t k = 0; k < n; ++k) {
                    integral[k] = decay[k] * integral[k] + 0.5 * dt * (decay[k] * nl[i - 1][k] + nl[i][k]);
                }
            }
            next[i] = free[i] + integral;
            sup = std::max(sup, distance(next[i], run.path_u[i]));
        }
        if (!std::isfinite(sup)) throw OracleDivergenceError("picard_mild_oracle: non-finite iterate");
        if (!run.history.empty() && sup > run.history.back()) {
            if (++growth_streak >= 3) {
                throw OracleDivergenceError("picard_mild_oracle: residual grew for three sweeps; horizon too long");
            }
        } else {
            growth_streak = 0;
        }
        run.history.push_back(sup);
        run.path_u = std::move(next);
        run.residual = sup;
        run.iterations = it + 1;
        if (sup <= tol) break;
    }
    return run;
}

} // namespace

PicardResult picard_mild_oracle(const SpectralField& u0, double t0, double t1, const NoisePath& path,
                                const NoiseSpec& spec, const SolverConfig& cfg, std::size_t iterations, double tol,
                                bool estimate_quadrature)
{
    cfg.validate();
    if (iterations == 0) throw DomainError("picard_mild_oracle: iterations must be >= 1");
    if (!(t1 > t0)) throw DomainError("picard_mild_oracle: need t0 < t1");
    if (t1 - t0 > 0.5) throw DomainError("picard_mild_oracle: horizon above 0.5 is outside the contraction regime");
    if (std::abs(cfg.h - path.h()) > 1e-15 * path.h()) throw ConfigError("picard_mild_oracle: h differs from path");
    if (u0.n_modes() > cfg.n_modes) throw GridError("picard_mild_oracle: u0 has more modes than cfg.n_modes");

    const SpectralField start = u0.resized(cfg.n_modes);
    const auto window = stochastic_convolution_window(path, spec.resized(cfg.n_modes), cfg.nu, t0, t1);
    std::vector<SpectralField> conv;
    conv.reserve(window.size());
    for (const auto& s : window) conv.push_back(s.w);

    PicardRun fine = run_picard(start, conv, cfg.h, cfg.nu, iterations, tol);
    PicardResult r;
    r.endpoint = fine.path_u.back();
    r.residual = fine.residual;
    r.residual_history = fine.history;
    r.iterations = fine.iterations;

    if (estimate_quadrature && conv.size() >= 3 && (conv.size() - 1) % 2 == 0) {
        std::vector<SpectralField> coarse_conv;
        for (std::size_t i = 0; i < conv.size(); i += 2) coarse_conv.push_back(conv[i]);
        PicardRun coarse = run_picard(start, coarse_conv, 2.0 * cfg.h, cfg.nu, iterations, tol);
        // Second-order rule: error(h) ~ (Q_2h - Q_h) / 3.
        r.quadrature_error = distance(coarse.path_u.back(), r.endpoint) / 3.0;
    }
    return r;
}

} // namespace sburgers
