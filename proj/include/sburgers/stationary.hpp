#pragma once

#include "sburgers/noise.hpp"
#include "sburgers/solver.hpp"

#include <optional>
#include <vector>

namespace sburgers {

struct PullbackOptions {
    std::vector<double> schedule{1, 2, 4, 8, 12, 16};  ///< increasing window lengths n
    double tol = 1e-9;
    double horizon = 1.0;      ///< Cauchy gaps are measured on the records of [0, horizon]
    bool early_stop = true;    ///< stop at the first gap below tol
    double target_time = 0.0;  ///< Y is estimated at this time (windows start at target_time - n)
};

/// Pull-back estimate of the stationary point Y(omega) = u*(target_time, omega).
struct PullbackResult {
    SpectralField y;
    double n_used = 0.0;                   ///< longest window actually run
    std::vector<double> schedule;          ///< window lengths run, in order
    std::vector<double> cauchy_gaps;       ///< d_i = sup_t |u_{n_{i+1}}(t) - u_{n_i}(t)|_2
    double roundoff_floor = 0.0;           ///< gaps at or below this are resolution-limited
    std::size_t fit_points = 0;
    double fitted_rate = 0.0;              ///< slope of log d_i against n_i (NaN if < 2 points)
    std::optional<double> n_star;          ///< first n_i after which gaps shrink three times in a row
    bool converged = false;                ///< some d_i < tol
    double max_norm = 0.0;                 ///< max record |u|_2 over the windows
};

/// Runs solve(0, target - n, target + horizon) for each n of the schedule on
/// the same noise path and scans the Cauchy gaps. Non-convergence is reported
/// through `converged`, never thrown.
///
/// Throws AlignmentError if a window length or the horizon is not a multiple
/// of record_every * h, DomainError for tol <= 0 or a non-increasing schedule.
PullbackResult pullback(const NoisePath& path, const NoiseSpec& spec, const SolverConfig& cfg,
                        const PullbackOptions& opts = {});

/// Stationary trajectory u* on [t_start, t_end], recorded every step, from a
/// zero start at t_start - depth.
Trajectory stationary_trajectory(const NoisePath& path, const NoiseSpec& spec, const SolverConfig& cfg,
                                 double t_start, double t_end, double depth);

struct ResidualReport {
    double horizon = 0.0;         ///< M
    double residual = 0.0;        ///< |Y - 1/2 int_{-M}^0 T(-s) d/dx u*^2 ds - W(-M, 0)|_2
    double predicted_tail = 0.0;  ///< e^{-nu pi^2 M} max_record |u*|_2
    double quadrature_error = 0.0;
    double budget = 0.0;          ///< h + quadrature_error
    bool within_budget(double factor = 10.0) const { return residual <= predicted_tail + factor * budget; }
};

/// Residual of the infinite-horizon integral equation truncated at -M, with the
/// trapezoidal rule over the records of `ustar` (which must cover [-M, 0] with
/// slot-spaced records ending at time 0) and the exact OU convolution.
/// Throws DomainError when M exceeds the recorded window.
ResidualReport integral_residual(const SpectralField& y, const Trajectory& ustar, const NoisePath& path,
                                 const NoiseSpec& spec, const SolverConfig& cfg, double M);

struct ShiftReport {
    double r = 0.0;
    double difference = 0.0;  ///< |Y(theta_r omega) - u(r; 0, Y(omega), omega)|_2
    double budget = 0.0;      ///< 2 (tol + solver budget)
    SpectralField shifted_pullback;
    SpectralField flowed;
    bool pass() const { return difference <= budget; }
};

/// Stationarity u(r, Y(omega), omega) = Y(theta(r, omega)), computed by pull-back
/// on the shifted path and by flowing Y forward. Throws AlignmentError for
/// off-grid r.
ShiftReport shift_equivariance_check(const NoisePath& path, const NoiseSpec& spec, const SolverConfig& cfg,
                                     double r, const PullbackOptions& opts = {});

struct UniquenessReport {
    double n = 0.0;
    double gap = 0.0;    ///< |u(0; -n, 0) - u(0; -n, alt)|_2
    double bound = 0.0;  ///< |alt|_2 e^{-delta n} + budget
    bool within_bound() const { return gap <= bound; }
};

/// Pull-back from 0 and from alt_initial at time -n on the same path. delta is
/// the contraction rate the bound uses (delta0 / 2 in the reports).
UniquenessReport uniqueness_check(const NoisePath& path, const NoiseSpec& spec, const SolverConfig& cfg,
                                  const SpectralField& alt_initial, double n, double delta);

} // namespace sburgers
