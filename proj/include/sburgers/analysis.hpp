#pragma once

#include "sburgers/noise.hpp"
#include "sburgers/solver.hpp"
#include "sburgers/stationary.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sburgers {

/// Large-viscosity condition: nu^3 / eps0 > gamma / (2 lambda1), equivalently
/// delta0 = lambda1 nu - eps0 gamma / (2 nu^2) > 0.
struct ConditionAReport {
    double nu = 0.0;
    double epsilon0 = 0.0;
    double gamma = 0.0;
    double lambda1 = kLambda1;
    double delta0 = 0.0;
    double viscosity_ratio = 0.0;  ///< nu^3 / eps0 (infinite when eps0 = 0)
    double threshold = 0.0;        ///< gamma / (2 lambda1)
    bool satisfied = false;

    /// The rate delta in (0, delta0) used by the pass/fail criteria: delta0 / 2.
    double delta() const { return 0.5 * delta0; }
};

/// Throws DomainError for nu <= 0 or gamma <= 0.
ConditionAReport condition_a(double nu, double epsilon0, double gamma = kDefaultGamma);
ConditionAReport condition_a(double nu, const NoiseSpec& spec, double gamma = kDefaultGamma);

struct RateReport {
    std::vector<double> times;
    std::vector<double> log_gap_sq;   ///< log |u - ubar|_2^2 (-inf once the gap is exactly 0)
    std::optional<double> tau;        ///< first time after which the gap decays for 10 records
    std::size_t fit_begin = 0, fit_end = 0;  ///< records [fit_begin, fit_end) used by the fit
    bool truncated_at_floor = false;  ///< fit stopped where the gap reached roundoff
    double fitted_slope = 0.0;
    double target = 0.0;              ///< -2 delta
    double slack = 0.0;
    ConditionAReport condition;
    bool pass = false;
    std::string note;
};

struct ContractionOptions {
    double gamma = kDefaultGamma;
    double slack_fraction = 0.1;      ///< slack = slack_fraction * delta0
    std::size_t decay_run = 10;       ///< consecutive decaying records that define tau
};

/// Co-evolves two solutions on the same noise path from t0 = 0 and fits the
/// slope of log |u - ubar|_2^2 past the empirical tau. Passes iff Condition A
/// holds and slope <= -2 delta + slack with delta = delta0 / 2.
RateReport contraction_experiment(const SpectralField& u0_a, const SpectralField& u0_b, const NoisePath& path,
                                  const NoiseSpec& spec, const SolverConfig& cfg, double horizon,
                                  const ContractionOptions& opts = {});

struct LyapunovOptions {
    std::size_t renorm_every = 10;
    double transient = 1.0;       ///< growth before this time is not averaged
    std::uint64_t tangent_seed = 0x5eedULL;
};

struct LyapunovReport {
    double exponent = 0.0;        ///< (1/T) sum log growth factors after the transient
    double averaging_time = 0.0;
    std::size_t renormalisations = 0;
};

/// Top Lyapunov exponent of the linearisation d psi = [nu Delta psi + d/dx(u* psi)] dt
/// along the trajectory started at `y` (the pull-back estimate of Y(omega)) at t = 0.
/// Throws ConfigError when psi underflows between renormalisations.
LyapunovReport lyapunov_top(const SpectralField& y, const NoisePath& path, const NoiseSpec& spec,
                            const SolverConfig& cfg, double horizon, const LyapunovOptions& opts = {});
LyapunovReport lyapunov_top(const PullbackResult& y_source, const NoisePath& path, const NoiseSpec& spec,
                            const SolverConfig& cfg, double horizon, const LyapunovOptions& opts = {});

struct TangentCheckReport {
    double max_relative_error = 0.0;  ///< max_t |FD(t) - psi(t)| / |psi(t)|
    double eps = 0.0;
};

/// Compares the tangent solution psi(t) from phi with the finite difference
/// (u(t; y + eps phi) - u(t; y)) / eps over [0, horizon], at every record.
TangentCheckReport tangent_fd_check(const SpectralField& y, const SpectralField& phi, const NoisePath& path,
                                    const NoiseSpec& spec, const SolverConfig& cfg, double horizon, double eps);

struct MomentEstimate {
    int p = 1;
    double t = 0.0;
    double mean = 0.0;            ///< E |u(t)|_2^{2p}
    double standard_error = 0.0;
};

struct MomentReport {
    std::vector<MomentEstimate> estimates;  ///< ordered by p, then t
    std::size_t ensemble_size = 0;
    bool low_power_warning = false;         ///< ensemble_size < 100
    double ou_stationary_energy = 0.0;      ///< sum sigma_k^2 / (2 nu pi^2 k^2), for reference
    struct Trend {
        int p = 1;
        double slope = 0.0;
        double slope_se = 0.0;
        bool no_upward_trend = false;       ///< slope - 3 se <= 0
        bool consistent_across_t = false;   ///< pairwise |m_i - m_j| <= 3 sqrt(se_i^2 + se_j^2)
        double factorial_constant = 0.0;    ///< c with E|u|^{2p} = c^p (p-1)!, at the largest t
    };
    std::vector<Trend> trends;
    bool pass() const;
};

struct MomentOptions {
    std::uint64_t base_seed = 1;
    int workers = 0;
    bool serial_reference = false;  ///< run the ensemble with the serial kernel
};

/// Monte-Carlo E|u(t)|_2^{2p} from u(0) = 0 over an ensemble of split seeds.
/// Throws DomainError for p outside {1, 2} or unsorted/negative t_list.
MomentReport moment_scan(const NoiseSpec& spec, const SolverConfig& cfg, const std::vector<int>& p_list,
                         std::size_t ensemble_size, const std::vector<double>& t_list,
                         const MomentOptions& opts = {});

} // namespace sburgers
