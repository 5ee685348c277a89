#include "sburgers/spectral.hpp"

#include "sburgers/error.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <string>

namespace sburgers {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

void require_same_size(const SpectralField& a, const SpectralField& b, const char* op)
{
    if (a.n_modes() != b.n_modes()) {
        throw GridError(std::string(op) + ": mode count mismatch (" + std::to_string(a.n_modes()) +
                        " vs " + std::to_string(b.n_modes()) + ")");
    }
}

// Shared immutable transforms, one per (n, m).
const SineTransform& cached_transform(std::size_t n, std::size_t m)
{
    static std::mutex mutex;
    static std::map<std::pair<std::size_t, std::size_t>, std::unique_ptr<SineTransform>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[{n, m}];
    if (!slot) slot = std::make_unique<SineTransform>(n, m);
    return *slot;
}

} // namespace

SpectralField SpectralField::mode(std::size_t n_modes, std::size_t k, double amplitude)
{
    if (k == 0 || k > n_modes) throw GridError("SpectralField::mode: k out of range");
    SpectralField f(n_modes);
    f[k - 1] = amplitude;
    return f;
}

double SpectralField::l2_norm_squared() const noexcept
{
    return std::inner_product(coeffs_.begin(), coeffs_.end(), coeffs_.begin(), 0.0);
}

double SpectralField::l2_norm() const noexcept { return std::sqrt(l2_norm_squared()); }

double SpectralField::h1_seminorm_squared() const noexcept
{
    double s = 0.0;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        const double kpi = double(i + 1) * kPi;
        s += kpi * kpi * coeffs_[i] * coeffs_[i];
    }
    return s;
}

double SpectralField::h1_seminorm() const noexcept { return std::sqrt(h1_seminorm_squared()); }

bool SpectralField::all_finite() const noexcept
{
    for (double a : coeffs_)
        if (!std::isfinite(a)) return false;
    return true;
}

SpectralField SpectralField::resized(std::size_t n_modes) const
{
    std::vector<double> c(n_modes, 0.0);
    std::copy_n(coeffs_.begin(), std::min(n_modes, coeffs_.size()), c.begin());
    return SpectralField(std::move(c));
}

SpectralField& SpectralField::operator+=(const SpectralField& other)
{
    require_same_size(*this, other, "operator+=");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other)
{
    require_same_size(*this, other, "operator-=");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
    return *this;
}

SpectralField& SpectralField::operator*=(double s) noexcept
{
    for (double& a : coeffs_) a *= s;
    return *this;
}

double inner(const SpectralField& a, const SpectralField& b)
{
    require_same_size(a, b, "inner");
    return std::inner_product(a.coeffs().begin(), a.coeffs().end(), b.coeffs().begin(), 0.0);
}

double distance(const SpectralField& a, const SpectralField& b)
{
    require_same_size(a, b, "distance");
    double s = 0.0;
    for (std::size_t i = 0; i < a.n_modes(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

// ---------------------------------------------------------------------------

SineTransform::SineTransform(std::size_t n_modes, std::size_t m)
    : n_(n_modes), m_(m), synth_(m * n_modes), anal_(n_modes * m), dcos_(n_modes * m)
{
    if (n_modes == 0) throw GridError("SineTransform: n_modes must be positive");
    if (m < n_modes) throw GridError("SineTransform: grid size smaller than mode count");
    const double inv = 1.0 / double(m + 1);
    for (std::size_t j = 1; j <= m; ++j) {
        for (std::size_t k = 1; k <= n_modes; ++k) {
            // Reduce the angle argument k*j mod 2(m+1) to keep the tables accurate.
            const std::size_t r = (k * j) % (2 * (m + 1));
            const double angle = kPi * double(r) * inv;
            const double s = kSqrt2 * std::sin(angle);
            synth_[(j - 1) * n_modes + (k - 1)] = s;
            anal_[(k - 1) * m + (j - 1)] = s * inv;
            dcos_[(k - 1) * m + (j - 1)] = -(double(k) * kPi / kSqrt2) * std::cos(angle) * inv;
        }
    }
}

void SineTransform::synthesize(std::span<const double> a, std::span<double> values) const
{
    for (std::size_t j = 0; j < m_; ++j) {
        const double* row = &synth_[j * n_];
        double s = 0.0;
        for (std::size_t k = 0; k < n_; ++k) s += row[k] * a[k];
        values[j] = s;
    }
}

void SineTransform::analyze(std::span<const double> values, std::span<double> a) const
{
    for (std::size_t k = 0; k < n_; ++k) {
        const double* row = &anal_[k * m_];
        double s = 0.0;
        for (std::size_t j = 0; j < m_; ++j) s += row[j] * values[j];
        a[k] = s;
    }
}

void SineTransform::half_derivative_of_product(std::span<const double> f, std::span<double> out) const
{
    // 1/2 <f', e_k> = -(k pi / sqrt2) int f cos(k pi x) dx after integrating by
    // parts (f vanishes at both ends); the integral is the trapezoidal rule.
    for (std::size_t k = 0; k < n_; ++k) {
        const double* row = &dcos_[k * m_];
        double s = 0.0;
        for (std::size_t j = 0; j < m_; ++j) s += row[j] * f[j];
        out[k] = s;
    }
}

SpectralField SineTransform::bilinear(const SpectralField& u, const SpectralField& w) const
{
    if (u.n_modes() != n_ || w.n_modes() != n_) throw GridError("SineTransform::bilinear: mode count mismatch");
    std::vector<double> gu(m_);
    synthesize(u.coeffs(), gu);
    if (&u == &w) {
        for (double& x : gu) x *= x;
    } else {
        std::vector<double> gw(m_);
        synthesize(w.coeffs(), gw);
        for (std::size_t j = 0; j < m_; ++j) gu[j] *= gw[j];
    }
    SpectralField out(n_);
    half_derivative_of_product(gu, out.coeffs());
    return out;
}

// ---------------------------------------------------------------------------

GridField to_grid(const SpectralField& u, std::size_t m)
{
    if (m < u.n_modes()) {
        throw GridError("to_grid: grid size " + std::to_string(m) + " < mode count " + std::to_string(u.n_modes()));
    }
    GridField g{std::vector<double>(m)};
    if (u.n_modes() > 0) cached_transform(u.n_modes(), m).synthesize(u.coeffs(), g.values);
    return g;
}

SpectralField from_grid(const GridField& g, std::size_t n)
{
    if (n > g.size()) {
        throw GridError("from_grid: mode count " + std::to_string(n) + " > grid size " + std::to_string(g.size()));
    }
    SpectralField a(n);
    if (n > 0) cached_transform(n, g.size()).analyze(g.values, a.coeffs());
    return a;
}

SpectralField bilinear(const SpectralField& u, const SpectralField& w, bool dealias)
{
    require_same_size(u, w, "bilinear");
    const std::size_t n = u.n_modes();
    if (n == 0) return {};
    const std::size_t m = dealias ? dealiased_grid_size(n) : n;
    return cached_transform(n, m).bilinear(u, w);
}

SpectralField nonlinearity(const SpectralField& u, bool dealias) { return bilinear(u, u, dealias); }

SpectralField bilinear_direct(const SpectralField& u, const SpectralField& w)
{
    require_same_size(u, w, "bilinear_direct");
    const std::size_t n = u.n_modes();
    // Coefficient j: (pi / (2 sqrt2)) j [ sum_{k+l=j} a_k b_l - sum_{|k-l|=j} a_k b_l ].
    SpectralField out(n);
    for (std::size_t j = 1; j <= n; ++j) {
        double sum = 0.0;
        for (std::size_t k = 1; k < j; ++k) sum += u.coeff(k) * w.coeff(j - k);
        double diff = 0.0;
        for (std::size_t k = 1; k + j <= n; ++k) {
            diff += u.coeff(k) * w.coeff(k + j) + u.coeff(k + j) * w.coeff(k);
        }
        out[j - 1] = kPi / (2.0 * kSqrt2) * double(j) * (sum - diff);
    }
    return out;
}

SpectralField nonlinearity_direct(const SpectralField& u) { return bilinear_direct(u, u); }

SpectralField semigroup_apply(const SpectralField& u, double t, double nu)
{
    if (!(t >= 0.0)) throw DomainError("semigroup_apply: t must be >= 0");
    SpectralField out = u;
    for (std::size_t i = 0; i < out.n_modes(); ++i) out[i] *= std::exp(-mode_rate(i + 1, nu) * t);
    return out;
}

double l4_norm(const SpectralField& u)
{
    if (u.n_modes() == 0) return 0.0;
    const std::size_t m = dealiased_grid_size(u.n_modes());
    const GridField g = to_grid(u, m);
    double s = 0.0;
    for (double v : g.values) s += v * v * v * v;
    return std::pow(s / double(m + 1), 0.25);
}

} // namespace sburgers
