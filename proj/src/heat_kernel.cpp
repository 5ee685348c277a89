#include "sburgers/heat_kernel.hpp"

#include "sburgers/error.hpp"
#include "sburgers/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sburgers {

namespace {

void require_positive_time(double t, const char* op)
{
    if (!(t > 0.0)) throw DomainError(std::string(op) + ": t must be > 0");
}

// sum_{k > K} k^power e^{-a k^2}, bounded by the first dropped term times a
// geometric factor (ratio of consecutive terms is <= e^{-a(2K+3)} (1+1/K)^power).
double tail_estimate(std::size_t K, double a, int power)
{
    const double k = double(K + 1);
    const double first = std::pow(k, power) * std::exp(-a * k * k);
    const double ratio = std::pow((k + 1.0) / k, power) * std::exp(-a * (2.0 * k + 1.0));
    if (ratio >= 1.0) return std::numeric_limits<double>::infinity();
    return first / (1.0 - ratio);
}

} // namespace

std::size_t heat_kernel_terms(double t, double nu, double tol, int power)
{
    require_positive_time(t, "heat_kernel_terms");
    const double a = nu * kLambda1 * t;
    std::size_t K = 1;
    while (2.0 * std::pow(kPi, power) * tail_estimate(K, a, power) > tol) {
        ++K;
        if (K > 100000) throw DomainError("heat_kernel_terms: t too small for eigen-expansion");
    }
    return K;
}

HeatKernelValue heat_kernel(double t, double x, double y, double nu, std::size_t n_terms)
{
    require_positive_time(t, "heat_kernel");
    if (n_terms == 0) n_terms = heat_kernel_terms(t, nu, 1e-14, 0);
    const double a = nu * kLambda1 * t;
    double s = 0.0;
    for (std::size_t k = 1; k <= n_terms; ++k) {
        const double kk = double(k);
        s += std::exp(-a * kk * kk) * std::sin(kk * kPi * x) * std::sin(kk * kPi * y);
    }
    return {2.0 * s, 2.0 * tail_estimate(n_terms, a, 0), n_terms};
}

HeatKernelValue heat_kernel_dy(double t, double x, double y, double nu, std::size_t n_terms)
{
    require_positive_time(t, "heat_kernel_dy");
    if (n_terms == 0) n_terms = heat_kernel_terms(t, nu, 1e-14, 1);
    const double a = nu * kLambda1 * t;
    double s = 0.0;
    for (std::size_t k = 1; k <= n_terms; ++k) {
        const double kk = double(k);
        s += std::exp(-a * kk * kk) * kk * kPi * std::sin(kk * kPi * x) * std::cos(kk * kPi * y);
    }
    return {2.0 * s, 2.0 * kPi * tail_estimate(n_terms, a, 1), n_terms};
}

KernelGrid KernelGrid::uniform(double t_min, double t_max, std::size_t n_t, std::size_t n_xy)
{
    KernelGrid g;
    for (std::size_t i = 0; i < n_t; ++i) {
        const double f = n_t == 1 ? 0.0 : double(i) / double(n_t - 1);
        g.ts.push_back(t_min * std::pow(t_max / t_min, f));
    }
    for (std::size_t j = 0; j < n_xy; ++j) {
        const double x = n_xy == 1 ? 0.5 : double(j) / double(n_xy - 1);
        g.xs.push_back(x);
        g.ys.push_back(x);
    }
    return g;
}

namespace {

// |dp/dy| on the (x, y) grid for one t, row-major [x][y].
std::vector<double> derivative_table(double t, double nu, const KernelGrid& grid, std::size_t n_terms)
{
    const std::size_t nx = grid.xs.size(), ny = grid.ys.size();
    const double a = nu * kLambda1 * t;
    std::vector<double> weight(n_terms), sx(nx * n_terms), cy(ny * n_terms);
    for (std::size_t k = 1; k <= n_terms; ++k) {
        const double kk = double(k);
        weight[k - 1] = 2.0 * kk * kPi * std::exp(-a * kk * kk);
        for (std::size_t i = 0; i < nx; ++i) sx[i * n_terms + k - 1] = std::sin(kk * kPi * grid.xs[i]);
        for (std::size_t j = 0; j < ny; ++j) cy[j * n_terms + k - 1] = std::cos(kk * kPi * grid.ys[j]);
    }
    std::vector<double> out(nx * ny);
    for (std::size_t i = 0; i < nx; ++i) {
        for (std::size_t j = 0; j < ny; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n_terms; ++k) s += weight[k] * sx[i * n_terms + k] * cy[j * n_terms + k];
            out[i * ny + j] = std::abs(s);
        }
    }
    return out;
}

double normalisation_integral(double c3, double c2, double t)
{
    return c3 / t * gaussian_mass_unit_interval(c2, t);
}

} // namespace

double gaussian_mass_unit_interval(double c2, double t)
{
    const double s = std::sqrt(2.0 * c2 * t);
    return 0.5 * std::sqrt(kPi) * s * std::erf(1.0 / s);
}

KernelBoundReport kernel_bound_check(const HeatKernelParams& params, const KernelGrid& grid)
{
    if (grid.ts.empty()) throw DomainError("kernel_bound_check: empty time grid");
    const double t_min = *std::min_element(grid.ts.begin(), grid.ts.end());
    if (!(t_min > 0.0)) throw DomainError("kernel_bound_check: t_min must be > 0");

    KernelBoundReport r;
    r.n_terms = heat_kernel_terms(t_min, params.nu, 1e-14, 1);
    const std::size_t ny = grid.ys.size();
    for (double t : grid.ts) {
        const auto table = derivative_table(t, params.nu, grid, r.n_terms);
        for (std::size_t i = 0; i < grid.xs.size(); ++i) {
            for (std::size_t j = 0; j < ny; ++j) {
                const double d = grid.xs[i] - grid.ys[j];
                const double bound = params.c2 > 0.0 ? params.c1 / t * std::exp(-d * d / (2.0 * params.c2 * t)) : 0.0;
                const double value = table[i * ny + j];
                double ratio;
                if (bound > 0.0) ratio = value / bound;
                else ratio = value > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
                if (ratio > r.max_ratio) {
                    r.max_ratio = ratio;
                    r.at_t = t;
                    r.at_x = grid.xs[i];
                    r.at_y = grid.ys[j];
                }
                if (grid.xs[i] == grid.ys[j]) r.diagonal_max_ratio = std::max(r.diagonal_max_ratio, ratio);
            }
        }
        if (params.c2 > 0.0) {
            r.c3_max_integral = std::max(r.c3_max_integral, normalisation_integral(params.c3, params.c2, t));
        }
    }
    r.derivative_bound_ok = params.c1 > 0.0 && params.c2 > 0.0 && r.max_ratio <= 1.0;
    r.normalisation_ok = params.c3 > 0.0 && params.c2 > 0.0 && r.c3_max_integral <= 1.0;
    return r;
}

HeatKernelParams search_kernel_constants(double nu, const KernelGrid& grid, double margin)
{
    if (grid.ts.empty()) throw DomainError("search_kernel_constants: empty time grid");
    const double t_min = *std::min_element(grid.ts.begin(), grid.ts.end());
    if (!(t_min > 0.0)) throw DomainError("search_kernel_constants: t_min must be > 0");
    const std::size_t n_terms = heat_kernel_terms(t_min, nu, 1e-14, 1);

    std::vector<std::vector<double>> tables;
    tables.reserve(grid.ts.size());
    for (double t : grid.ts) tables.push_back(derivative_table(t, nu, grid, n_terms));

    // c2 on a geometric ladder around the free-space value 2 nu.
    HeatKernelParams best{nu, std::numeric_limits<double>::infinity(), 0.0, 0.0};
    const std::size_t ny = grid.ys.size();
    for (int e = -40; e <= 40; ++e) {
        const double c2 = 2.0 * nu * std::pow(2.0, e / 8.0);
        double c1 = 0.0;
        for (std::size_t it = 0; it < grid.ts.size(); ++it) {
            const double t = grid.ts[it];
            for (std::size_t i = 0; i < grid.xs.size(); ++i) {
                for (std::size_t j = 0; j < ny; ++j) {
                    const double d = grid.xs[i] - grid.ys[j];
                    c1 = std::max(c1, tables[it][i * ny + j] * t * std::exp(d * d / (2.0 * c2 * t)));
                }
            }
        }
        if (c1 < best.c1) {
            best.c1 = c1;
            best.c2 = c2;
        }
    }
    best.c1 *= margin;
    double worst = 0.0;
    for (double t : grid.ts) worst = std::max(worst, normalisation_integral(1.0, best.c2, t));
    best.c3 = 1.0 / (worst * margin);
    return best;
}

} // namespace sburgers
