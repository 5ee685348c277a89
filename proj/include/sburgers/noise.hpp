#pragma once

#include "sburgers/spectral.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace sburgers {

/// Named sigma_k profile, resolvable at any mode count.
struct NoiseProfile {
    enum class Kind { constant, power_decay };
    Kind kind = Kind::power_decay;
    double sigma = 0.1;
    double q = 1.0;             ///< power_decay: sigma_k = sigma k^-q, q > 1/2
    std::size_t count = 0;      ///< constant: number of forced modes (0 = all resolved)

    static NoiseProfile constant(double sigma, std::size_t count = 0) { return {Kind::constant, sigma, 0.0, count}; }
    static NoiseProfile power_decay(double sigma, double q) { return {Kind::power_decay, sigma, q, 0}; }

    std::string name() const { return kind == Kind::constant ? "constant" : "power-decay"; }
    double sigma_k(std::size_t k) const;
    /// sum_{k > n} sigma_k^2, the intensity dropped by truncating at n modes.
    double dropped_tail(std::size_t n_modes) const;
};

/// Per-mode intensities sigma_1..sigma_n of W(t) = sum_k sigma_k e_k B_k(t).
class NoiseSpec {
public:
    NoiseSpec() = default;
    explicit NoiseSpec(std::vector<double> sigmas);
    static NoiseSpec from_profile(const NoiseProfile& profile, std::size_t n_modes);
    static NoiseSpec zero(std::size_t n_modes) { return NoiseSpec(std::vector<double>(n_modes, 0.0)); }

    std::size_t n_modes() const noexcept { return sigmas_.size(); }
    double sigma(std::size_t k) const { return k <= sigmas_.size() ? sigmas_[k - 1] : 0.0; }
    const std::vector<double>& sigmas() const noexcept { return sigmas_; }
    /// epsilon_0 = sum sigma_k^2 = E|W_1 - W_0|_2^2, recomputed on each call.
    double epsilon0() const noexcept;
    /// Copy truncated or zero-padded to n modes.
    NoiseSpec resized(std::size_t n_modes) const;
    NoiseSpec scaled(double alpha) const;

private:
    std::vector<double> sigmas_;
};

/// Replayable Brownian increments. The increment of B_k over slot
/// [j h, (j+1) h) is sqrt(h) * Phi^{-1}(U), with U drawn from Philox4x32-10 at
/// counter (k, origin + j) under key seed. Shifting the origin by r slots gives
/// the path of the Wiener shift theta(r h, omega).
class NoisePath {
public:
    NoisePath(std::uint64_t seed, double h, std::int64_t origin = 0);

    std::uint64_t seed() const noexcept { return seed_; }
    double h() const noexcept { return h_; }
    std::int64_t origin() const noexcept { return origin_; }

    /// Standard normal xi_k(j); increment(k, j) = sqrt(h) xi_k(j).
    double standard_normal(std::size_t k, std::int64_t j) const;
    double increment(std::size_t k, std::int64_t j) const;

    /// Path of theta(r h, omega).
    NoisePath shifted(std::int64_t r) const { return NoisePath(seed_, h_, origin_ + r); }

    /// Slot index of time t; throws AlignmentError if t is not a multiple of h.
    std::int64_t slot_of(double t) const;
    double time_of(std::int64_t slot) const noexcept { return double(slot) * h_; }

private:
    std::uint64_t seed_;
    double h_;
    std::int64_t origin_;
};

/// Standard normal from the counter-based stream; exposed for tests.
double philox_standard_normal(std::uint64_t seed, std::uint64_t counter_hi, std::uint64_t counter_lo);

/// Current value of the stochastic convolution W_{nu Delta}(t0, t).
struct OUState {
    SpectralField w;
    double t = 0.0;
};

/// Exact one-slot OU transition of every mode:
///   w_k <- e^{-mu_k h} w_k + sigma_k xi_k sqrt((1 - e^{-2 mu_k h}) / (2 mu_k)),
/// mu_k = nu pi^2 k^2, xi_k the slot's standard normal. Precomputes the factors.
class OUPropagator {
public:
    OUPropagator(const NoiseSpec& spec, double nu, double h);

    std::size_t n_modes() const noexcept { return decay_.size(); }
    double h() const noexcept { return h_; }
    /// Advances w over slot j of `path` in place.
    void advance(std::span<double> w, const NoisePath& path, std::int64_t slot) const;
    /// The xi_k of slot j scaled by sigma_k sqrt((1 - e^{-2 mu h})/(2 mu)).
    double forcing(std::size_t k, double xi) const { return scale_[k - 1] * xi; }

private:
    double h_;
    std::vector<double> decay_;
    std::vector<double> scale_;
};

/// One exact OU step of the state. Throws ConfigError if h differs from the
/// path's slot size.
OUState ou_step(const OUState& state, const NoisePath& path, const NoiseSpec& spec, double nu, double h);

/// W_{nu Delta}(t0, t) at every slot time of [t0, t1], starting from zero at t0.
/// Windows with different t0 reuse the same increments on their overlap.
/// Throws AlignmentError if t0 or t1 is off the slot grid, DomainError if t0 >= t1.
std::vector<OUState> stochastic_convolution_window(const NoisePath& path, const NoiseSpec& spec, double nu,
                                                   double t0, double t1);

/// Both sides of the Ito energy identity for the truncated convolution,
///   |W(t)|^2 + 2 nu int_0^t |W_x|^2 ds = 2 sum_k sigma_k int_0^t W_k dB_k + t eps0,
/// discretised with the left-point stochastic integral and trapezoidal time
/// integral on the slot grid.
struct OUEnergyReport {
    double t = 0.0;
    double energy = 0.0;             ///< |W(t)|^2
    double gradient_integral = 0.0;  ///< int |W_x|^2 ds
    double martingale = 0.0;         ///< sum_k sigma_k int W_k dB_k
    double lhs = 0.0;
    double rhs = 0.0;
    double abs_discrepancy = 0.0;
    double rel_discrepancy = 0.0;
};

/// `trajectory` must be slot-spaced and start from zero (as produced by
/// stochastic_convolution_window). Throws Error on an empty trajectory.
OUEnergyReport ou_energy_identity_check(const std::vector<OUState>& trajectory, const NoisePath& path,
                                        const NoiseSpec& spec, double nu);

} // namespace sburgers
