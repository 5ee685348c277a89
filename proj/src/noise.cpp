#include "sburgers/noise.hpp"

#include "sburgers/error.hpp"
#include "sburgers/philox.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/zeta.hpp>

#include <cmath>
#include <limits>
#include <numbers>

namespace sburgers {

namespace {

using NoPromote = boost::math::policies::policy<boost::math::policies::promote_double<false>>;

double inverse_normal_cdf(double u)
{
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u, NoPromote{});
}

} // namespace

double NoiseProfile::sigma_k(std::size_t k) const
{
    if (kind == Kind::constant) return (count == 0 || k <= count) ? sigma : 0.0;
    return sigma * std::pow(double(k), -q);
}

double NoiseProfile::dropped_tail(std::size_t n_modes) const
{
    if (kind == Kind::constant) {
        if (count == 0) return 0.0;  // forces exactly the resolved modes
        return count > n_modes ? sigma * sigma * double(count - n_modes) : 0.0;
    }
    if (!(q > 0.5)) return std::numeric_limits<double>::infinity();
    // sigma^2 (zeta(2q) - sum_{k<=n} k^{-2q}); partial sum added smallest first.
    double partial = 0.0;
    for (std::size_t k = n_modes; k >= 1; --k) partial += std::pow(double(k), -2.0 * q);
    return sigma * sigma * std::max(0.0, boost::math::zeta(2.0 * q) - partial);
}

NoiseSpec::NoiseSpec(std::vector<double> sigmas) : sigmas_(std::move(sigmas))
{
    for (double s : sigmas_)
        if (!std::isfinite(s) || s < 0.0) throw ConfigError("NoiseSpec: sigma_k must be finite and >= 0");
}

NoiseSpec NoiseSpec::from_profile(const NoiseProfile& profile, std::size_t n_modes)
{
    if (!(profile.sigma >= 0.0)) throw ConfigError("NoiseProfile: sigma must be >= 0");
    if (profile.kind == NoiseProfile::Kind::power_decay && !(profile.q > 0.5)) {
        throw ConfigError("NoiseProfile: power-decay exponent q must exceed 1/2");
    }
    std::vector<double> s(n_modes);
    for (std::size_t k = 1; k <= n_modes; ++k) s[k - 1] = profile.sigma_k(k);
    return NoiseSpec(std::move(s));
}

double NoiseSpec::epsilon0() const noexcept
{
    double e = 0.0;
    for (double s : sigmas_) e += s * s;
    return e;
}

NoiseSpec NoiseSpec::resized(std::size_t n_modes) const
{
    std::vector<double> s(n_modes, 0.0);
    std::copy_n(sigmas_.begin(), std::min(n_modes, sigmas_.size()), s.begin());
    return NoiseSpec(std::move(s));
}

NoiseSpec NoiseSpec::scaled(double alpha) const
{
    std::vector<double> s = sigmas_;
    for (double& x : s) x *= std::abs(alpha);
    return NoiseSpec(std::move(s));
}

// ---------------------------------------------------------------------------

double philox_standard_normal(std::uint64_t seed, std::uint64_t counter_hi, std::uint64_t counter_lo)
{
    const Philox4x32::Counter ctr{std::uint32_t(counter_hi), std::uint32_t(counter_lo),
                                  std::uint32_t(counter_lo >> 32), std::uint32_t(counter_hi >> 32)};
    const Philox4x32::Key key{std::uint32_t(seed), std::uint32_t(seed >> 32)};
    const auto out = Philox4x32::block(ctr, key);
    const std::uint64_t bits = ((std::uint64_t(out[0]) << 32) | out[1]) >> 11;
    const double u = (double(bits) + 0.5) * 0x1.0p-53;  // in (0, 1)
    return inverse_normal_cdf(u);
}

NoisePath::NoisePath(std::uint64_t seed, double h, std::int64_t origin) : seed_(seed), h_(h), origin_(origin)
{
    if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("NoisePath: slot size h must be > 0");
}

double NoisePath::standard_normal(std::size_t k, std::int64_t j) const
{
    return philox_standard_normal(seed_, k, std::uint64_t(origin_ + j));
}

double NoisePath::increment(std::size_t k, std::int64_t j) const { return std::sqrt(h_) * standard_normal(k, j); }

std::int64_t NoisePath::slot_of(double t) const
{
    const double q = t / h_;
    const double r = std::round(q);
    if (std::abs(q - r) > 1e-9 * std::max(1.0, std::abs(q))) {
        throw AlignmentError("time " + std::to_string(t) + " is not a multiple of the slot size " + std::to_string(h_));
    }
    return std::int64_t(r);
}

// ---------------------------------------------------------------------------

OUPropagator::OUPropagator(const NoiseSpec& spec, double nu, double h)
    : h_(h), decay_(spec.n_modes()), scale_(spec.n_modes())
{
    if (!(nu > 0.0)) throw DomainError("OUPropagator: nu must be > 0");
    if (!(h > 0.0)) throw ConfigError("OUPropagator: h must be > 0");
    for (std::size_t k = 1; k <= spec.n_modes(); ++k) {
        const double mu = mode_rate(k, nu);
        decay_[k - 1] = std::exp(-mu * h);
        scale_[k - 1] = spec.sigma(k) * std::sqrt(-std::expm1(-2.0 * mu * h) / (2.0 * mu));
    }
}

void OUPropagator::advance(std::span<double> w, const NoisePath& path, std::int64_t slot) const
{
    for (std::size_t i = 0; i < decay_.size(); ++i) {
        const double xi = scale_[i] != 0.0 ? path.standard_normal(i + 1, slot) : 0.0;
        w[i] = decay_[i] * w[i] + scale_[i] * xi;
    }
}

OUState ou_step(const OUState& state, const NoisePath& path, const NoiseSpec& spec, double nu, double h)
{
    if (std::abs(h - path.h()) > 1e-15 * path.h()) throw ConfigError("ou_step: h differs from the path slot size");
    if (state.w.n_modes() != spec.n_modes()) throw GridError("ou_step: state and noise mode counts differ");
    const OUPropagator prop(spec, nu, h);
    OUState next = state;
    prop.advance(next.w.coeffs(), path, path.slot_of(state.t));
    next.t = path.time_of(path.slot_of(state.t) + 1);
    return next;
}

std::vector<OUState> stochastic_convolution_window(const NoisePath& path, const NoiseSpec& spec, double nu,
                                                   double t0, double t1)
{
    const std::int64_t s0 = path.slot_of(t0);
    const std::int64_t s1 = path.slot_of(t1);
    if (s0 >= s1) throw DomainError("stochastic_convolution_window: need t0 < t1");
    const OUPropagator prop(spec, nu, path.h());
    std::vector<OUState> out;
    out.reserve(std::size_t(s1 - s0 + 1));
    OUState cur{SpectralField(spec.n_modes()), path.time_of(s0)};
    out.push_back(cur);
    for (std::int64_t j = s0; j < s1; ++j) {
        prop.advance(cur.w.coeffs(), path, j);
        cur.t = path.time_of(j + 1);
        out.push_back(cur);
    }
    return out;
}

OUEnergyReport ou_energy_identity_check(const std::vector<OUState>& trajectory, const NoisePath& path,
                                        const NoiseSpec& spec, double nu)
{
    if (trajectory.empty()) throw Error("ou_energy_identity_check: empty trajectory");
    const double h = path.h();
    const std::int64_t s0 = path.slot_of(trajectory.front().t);
    OUEnergyReport r;
    r.t = trajectory.back().t - trajectory.front().t;
    for (std::size_t i = 0; i + 1 < trajectory.size(); ++i) {
        const auto& a = trajectory[i].w;
        const auto& b = trajectory[i + 1].w;
        r.gradient_integral += 0.5 * h * (a.h1_seminorm_squared() + b.h1_seminorm_squared());
        for (std::size_t k = 1; k <= spec.n_modes(); ++k) {
            if (spec.sigma(k) == 0.0) continue;
            r.martingale += spec.sigma(k) * a.coeff(k) * path.increment(k, s0 + std::int64_t(i));
        }
    }
    r.energy = trajectory.back().w.l2_norm_squared();
    r.lhs = r.energy + 2.0 * nu * r.gradient_integral;
    r.rhs = 2.0 * r.martingale + r.t * spec.epsilon0();
    r.abs_discrepancy = std::abs(r.lhs - r.rhs);
    const double scale = std::max(std::abs(r.lhs), std::abs(r.rhs));
    r.rel_discrepancy = scale > 0.0 ? r.abs_discrepancy / scale : 0.0;
    return r;
}

} // namespace sburgers
