#pragma once

#include "sburgers/noise.hpp"
#include "sburgers/spectral.hpp"

#include <cstddef>
#include <limits>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

namespace sburgers {

enum class Scheme { etd1, etd2_heun };

std::string to_string(Scheme s);
/// Accepts "etd1" and "etd2-heun"; throws ConfigError otherwise.
Scheme parse_scheme(const std::string& name);
/// Global order of accuracy of the scheme in h.
int scheme_order(Scheme s);

struct SolverConfig {
    double nu = 1.0;
    std::size_t n_modes = 64;
    double h = 1e-3;
    Scheme scheme = Scheme::etd2_heun;
    bool dealias = true;
    std::size_t record_every = 1;

    /// Throws ConfigError / DomainError on invalid values.
    void validate() const;
};

/// Additive tolerance attributed to the time discretisation: h^order.
double solver_budget(const SolverConfig& cfg);

/// Default embedding constant: max|u| <= gamma |u_x|_2 on [0,1] with u(0) = u(1) = 0.
inline constexpr double kDefaultGamma = 1.0 / std::numbers::sqrt2;

/// nu Delta v + P_n [ 1/2 d/dx (v + w)^2 ], Delta diagonal with -pi^2 k^2.
/// Throws GridError when v and w differ in mode count.
SpectralField rhs_v(const SpectralField& v, const SpectralField& w, double nu, bool dealias = true);

/// Exponential time differencing for dv/dt = L v + N(v + w(t)), L = nu Delta.
///
/// The linear part is integrated exactly with e^{L h}. etd1 freezes N at the
/// left end of the step; etd2-heun is the Cox-Matthews ETD2RK predictor/corrector
/// with the trapezoidal correction phi_2 (N(a + w_{n+1}) - N_n).
class EtdStepper {
public:
    explicit EtdStepper(const SolverConfig& cfg);

    const SolverConfig& config() const noexcept { return cfg_; }

    /// P_n [ 1/2 d/dx u^2 ] on the configured grid.
    SpectralField nonlinear(const SpectralField& u) const;
    /// d/dx (u psi) projected, the derivative of nonlinear() at u along psi.
    SpectralField linearized(const SpectralField& u, const SpectralField& psi) const;

    /// Advances v by one step; w_now / w_next are the stochastic convolution
    /// at the two ends of the step. Throws BlowUpError (time = t_next) if the
    /// state stops being finite.
    void step(SpectralField& v, const SpectralField& w_now, const SpectralField& w_next, double t_next = 0.0) const;

    /// Advances v and a tangent vector psi together. The tangent update is the
    /// exact derivative of the discrete step map, evaluated on the same stages.
    void step_with_tangent(SpectralField& v, SpectralField& psi, const SpectralField& w_now,
                           const SpectralField& w_next, double t_next = 0.0) const;

    double decay(std::size_t k) const { return decay_[k - 1]; }

private:
    SolverConfig cfg_;
    std::shared_ptr<const SineTransform> transform_;
    std::vector<double> decay_;  // e^{L h}
    std::vector<double> phi1_;   // (e^{L h} - 1) / L
    std::vector<double> phi2_;   // (e^{L h} - 1 - L h) / (h L^2)
};

/// Single step of the v-equation (see EtdStepper::step).
SpectralField step(const SpectralField& v, const SpectralField& w_now, const SpectralField& w_next,
                   const SolverConfig& cfg);

struct RecordDiagnostics {
    double l2 = 0.0;         ///< |u|_2
    double h1 = 0.0;         ///< |u_x|_2
    double w_l4 = 0.0;       ///< |W_{nu Delta}|_4
    double max_abs_u = 0.0;  ///< max over the dealiased grid, for the CFL monitor
};

/// Runtime monitor of the Gronwall bound for the v-equation,
///   |v(t)|^2 <= |v(r)|^2 exp(C int_r^t |W|_4^4) + (1/(2 nu)) int_r^t exp(C int_s^t |W|_4^4) |W(s)|_4^4 ds,
/// with C = 27 gamma^2 / (2 nu^3) from Young's inequality with exponents 4/3 and 4.
/// Checked between consecutive records, integrals by the trapezoidal rule.
struct EnergyMonitor {
    double constant = 0.0;
    std::size_t checks = 0;
    std::size_t violations = 0;
    double max_ratio = 0.0;  ///< max |v(t)|^2 / bound
};

/// u(t; t0, u0, omega) at record times t0 + i * record_every * h.
struct Trajectory {
    std::vector<double> times;
    std::vector<SpectralField> states;
    std::vector<RecordDiagnostics> diagnostics;
    SpectralField final_state;
    double final_time = 0.0;
    double max_cfl = 0.0;  ///< max over records of h * max|u| * n pi
    EnergyMonitor energy;

    std::size_t size() const noexcept { return times.size(); }
};

struct SolveOptions {
    /// Records strictly before this time are not kept.
    double record_from = -std::numeric_limits<double>::infinity();
    bool store_states = true;
    bool monitor_energy = true;
    double gamma = kDefaultGamma;
};

/// Mild solution of the stochastic Burgers equation on [t0, t1] from u0,
/// driven by `path`. Internally integrates v = u - W_{nu Delta}(t0, .), with
/// v(t0) = u0, and reconstructs u = v + W. The noise spec is truncated or
/// padded to cfg.n_modes.
///
/// Throws AlignmentError for off-grid times, ConfigError if cfg.h differs from
/// the path slot size, DomainError if t1 <= t0, GridError if u0 has more modes
/// than cfg.n_modes, BlowUpError from the stepper.
Trajectory solve(const SpectralField& u0, double t0, double t1, const NoisePath& path, const NoiseSpec& spec,
                 const SolverConfig& cfg, const SolveOptions& opts = {});

/// u(t1) only; t1 == t0 returns u0 (padded to cfg.n_modes).
SpectralField solve_endpoint(const SpectralField& u0, double t0, double t1, const NoisePath& path,
                             const NoiseSpec& spec, const SolverConfig& cfg);

struct PicardResult {
    SpectralField endpoint;
    double residual = 0.0;                ///< sup_t |u^{(m)} - u^{(m-1)}|_2 of the last iteration
    std::vector<double> residual_history;
    std::size_t iterations = 0;
    double quadrature_error = 0.0;        ///< Richardson estimate from the 2h grid (0 if not computed)
};

/// Independent fixed-point solver of the mild equation
///   u(t) = T(t - t0) u0 + 1/2 int_{t0}^t T(t - s) d/dx u(s)^2 ds + W_{nu Delta}(t0, t)
/// on the slot grid, trapezoidal rule in s, direct-convolution nonlinearity.
/// Stops when the residual drops below tol or after `iterations` sweeps.
///
/// Throws DomainError if t1 - t0 > 0.5 or iterations == 0, and
/// OracleDivergenceError when the residual grows for three sweeps in a row.
PicardResult picard_mild_oracle(const SpectralField& u0, double t0, double t1, const NoisePath& path,
                                const NoiseSpec& spec, const SolverConfig& cfg, std::size_t iterations,
                                double tol = 1e-14, bool estimate_quadrature = true);

} // namespace sburgers
