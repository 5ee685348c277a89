#pragma once

#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace sburgers {

inline constexpr double kPi = std::numbers::pi;
/// First Dirichlet eigenvalue of -d^2/dx^2 on [0,1].
inline constexpr double kLambda1 = kPi * kPi;

/// Function on [0,1] in the span of e_k(x) = sqrt(2) sin(k pi x), k = 1..n.
///
/// The basis is orthonormal in L^2[0,1], so |u|_2^2 = sum a_k^2 and
/// |u_x|_2^2 = sum (k pi)^2 a_k^2. Index i of coeffs() holds mode k = i + 1.
class SpectralField {
public:
    SpectralField() = default;
    explicit SpectralField(std::size_t n_modes) : coeffs_(n_modes, 0.0) {}
    explicit SpectralField(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {}

    /// amplitude * e_k in an n-mode field.
    static SpectralField mode(std::size_t n_modes, std::size_t k, double amplitude = 1.0);

    std::size_t n_modes() const noexcept { return coeffs_.size(); }
    bool empty() const noexcept { return coeffs_.empty(); }

    double operator[](std::size_t i) const noexcept { return coeffs_[i]; }
    double& operator[](std::size_t i) noexcept { return coeffs_[i]; }
    /// Coefficient of mode k (1-based).
    double coeff(std::size_t k) const { return coeffs_.at(k - 1); }

    std::span<const double> coeffs() const noexcept { return coeffs_; }
    std::span<double> coeffs() noexcept { return coeffs_; }
    const std::vector<double>& vector() const noexcept { return coeffs_; }

    double l2_norm_squared() const noexcept;
    double l2_norm() const noexcept;
    /// |u_x|_2^2
    double h1_seminorm_squared() const noexcept;
    double h1_seminorm() const noexcept;
    bool all_finite() const noexcept;

    /// Zero-padded or truncated copy (truncation is the projection P_n).
    SpectralField resized(std::size_t n_modes) const;

    SpectralField& operator+=(const SpectralField& other);
    SpectralField& operator-=(const SpectralField& other);
    SpectralField& operator*=(double s) noexcept;

    friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
    friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
    friend SpectralField operator*(SpectralField a, double s) { return a *= s; }
    friend SpectralField operator*(double s, SpectralField a) { return a *= s; }
    friend bool operator==(const SpectralField&, const SpectralField&) = default;

private:
    std::vector<double> coeffs_;
};

/// L^2[0,1] inner product; both fields must have the same mode count.
double inner(const SpectralField& a, const SpectralField& b);
/// |a - b|_2
double distance(const SpectralField& a, const SpectralField& b);

/// Point values at the interior nodes x_j = j / (m + 1), j = 1..m.
/// Values at x = 0 and x = 1 are zero and not stored.
struct GridField {
    std::vector<double> values;

    std::size_t size() const noexcept { return values.size(); }
    static double node(std::size_t j, std::size_t m) { return double(j) / double(m + 1); }
};

/// Synthesis u(x_j) = sum_k a_k sqrt(2) sin(k pi x_j). Requires m >= n_modes.
GridField to_grid(const SpectralField& u, std::size_t m);

/// Projection of the grid data onto the first n sine modes using the
/// trapezoidal rule on the m + 1 uniform intervals (the DST-I). Exact inverse
/// of to_grid whenever n <= m. Requires n <= m.
SpectralField from_grid(const GridField& g, std::size_t n);

/// Default dealiased grid for quadratic products of n-mode fields.
constexpr std::size_t dealiased_grid_size(std::size_t n) { return 2 * n + 1; }

/// Precomputed tables for the pseudospectral Burgers term of an n-mode field
/// on an m-point grid. Immutable after construction, safe to share.
class SineTransform {
public:
    SineTransform(std::size_t n_modes, std::size_t m);

    std::size_t n_modes() const noexcept { return n_; }
    std::size_t grid_size() const noexcept { return m_; }

    void synthesize(std::span<const double> a, std::span<double> values) const;
    void analyze(std::span<const double> values, std::span<double> a) const;
    /// Coefficients of P_n [ 1/2 d/dx f ] for grid data f that vanishes at
    /// both ends and lies in the cosine span (a product of two sine fields).
    void half_derivative_of_product(std::span<const double> f, std::span<double> out) const;

    /// P_n [ 1/2 d/dx (u w) ] via grid products.
    SpectralField bilinear(const SpectralField& u, const SpectralField& w) const;
    SpectralField nonlinearity(const SpectralField& u) const { return bilinear(u, u); }

private:
    std::size_t n_;
    std::size_t m_;
    std::vector<double> synth_;  // [j][k] = sqrt2 sin(k pi x_j)
    std::vector<double> anal_;   // [k][j] = sqrt2 sin(k pi x_j) / (m + 1)
    std::vector<double> dcos_;   // [k][j] = -(k pi / sqrt2) cos(k pi x_j) / (m + 1)
};

/// P_n [ 1/2 d/dx (u^2) ].
///
/// dealias = true uses the pseudospectral route on m = 2n + 1 nodes, which is
/// exact for this quadratic term; dealias = false uses m = n and aliases.
SpectralField nonlinearity(const SpectralField& u, bool dealias = true);

/// P_n [ 1/2 d/dx (u w) ], same routes as nonlinearity().
SpectralField bilinear(const SpectralField& u, const SpectralField& w, bool dealias = true);

/// Direct O(n^2) coefficient convolution of P_n [ 1/2 d/dx (u w) ] using
/// sin a sin b = [cos(a - b) - cos(a + b)] / 2. Independent of the grid route.
SpectralField bilinear_direct(const SpectralField& u, const SpectralField& w);
SpectralField nonlinearity_direct(const SpectralField& u);

/// T_nu(t) u: a_k -> exp(-nu pi^2 k^2 t) a_k. Throws DomainError for t < 0.
SpectralField semigroup_apply(const SpectralField& u, double t, double nu);

/// nu pi^2 k^2, the decay rate of mode k.
inline double mode_rate(std::size_t k, double nu) { return nu * kLambda1 * double(k) * double(k); }

/// L^4 norm, by exact quadrature of u^4 on a grid of 2n + 1 nodes.
double l4_norm(const SpectralField& u);

} // namespace sburgers
