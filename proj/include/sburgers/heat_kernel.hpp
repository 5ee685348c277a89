#pragma once

#include <cstddef>
#include <vector>

namespace sburgers {

/// Constants of the Gaussian bound on the y-derivative of the Dirichlet heat
/// kernel: |d/dy p(t,x,y)| <= (c1/t) exp(-(x-y)^2 / (2 c2 t)), together with
/// the normalisation int_0^1 (c3/t) exp(-y^2 / (2 c2 t)) dy <= 1.
struct HeatKernelParams {
    double nu = 1.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double c3 = 0.0;
};

struct HeatKernelValue {
    double value = 0.0;
    double tail_bound = 0.0;  ///< bound on the dropped eigen-terms
    std::size_t n_terms = 0;
};

/// Number of eigen-terms after which the tail of sum_k k^power exp(-nu pi^2 k^2 t)
/// is below tol.
std::size_t heat_kernel_terms(double t, double nu, double tol = 1e-14, int power = 1);

/// p(t,x,y) = 2 sum_k exp(-nu pi^2 k^2 t) sin(k pi x) sin(k pi y).
/// n_terms = 0 picks the truncation automatically. Throws DomainError for t <= 0.
HeatKernelValue heat_kernel(double t, double x, double y, double nu, std::size_t n_terms = 0);

/// d/dy p(t,x,y) by term-wise differentiation.
HeatKernelValue heat_kernel_dy(double t, double x, double y, double nu, std::size_t n_terms = 0);

/// Sample points for kernel_bound_check.
struct KernelGrid {
    std::vector<double> ts;
    std::vector<double> xs;
    std::vector<double> ys;

    /// n_t log-spaced times in [t_min, t_max] and an n_xy uniform grid on [0,1].
    static KernelGrid uniform(double t_min, double t_max, std::size_t n_t, std::size_t n_xy);
};

struct KernelBoundReport {
    double max_ratio = 0.0;  ///< max |dp/dy| / bound over the grid
    double at_t = 0.0, at_x = 0.0, at_y = 0.0;
    double diagonal_max_ratio = 0.0;  ///< same maximum restricted to x == y
    double c3_max_integral = 0.0;     ///< max_t int_0^1 (c3/t) exp(-y^2/(2 c2 t)) dy
    std::size_t n_terms = 0;
    bool derivative_bound_ok = false;
    bool normalisation_ok = false;
    bool pass() const { return derivative_bound_ok && normalisation_ok; }
};

/// Evaluates the derivative bound and the c3 normalisation on a grid.
/// Throws DomainError when the smallest sampled time is <= 0.
KernelBoundReport kernel_bound_check(const HeatKernelParams& params, const KernelGrid& grid);

/// Grid search over c2 for the smallest admissible c1 on the given grid, then
/// the largest c3 allowed by the normalisation. margin > 1 inflates c1.
HeatKernelParams search_kernel_constants(double nu, const KernelGrid& grid, double margin = 1.01);

/// int_0^1 exp(-y^2 / (2 c2 t)) dy in closed form (error function).
double gaussian_mass_unit_interval(double c2, double t);

} // namespace sburgers
