#include "gcph/spline.hpp"

#include <cmath>
#include <string>

#include "gcph/errors.hpp"

namespace gcph {

bool KnotGrid::valid() const {
    return std::isfinite(lo) && std::isfinite(hi) && lo < hi &&
           num_intervals >= 1 && order >= 1;
}

void validate_grid(const KnotGrid& grid) {
    if (!grid.valid()) {
        throw config_error("invalid knot grid: require finite lo < hi, num_intervals >= 1, order >= 1 (got lo=" +
                           std::to_string(grid.lo) + ", hi=" + std::to_string(grid.hi) +
                           ", G=" + std::to_string(grid.num_intervals) +
                           ", K=" + std::to_string(grid.order) + ")");
    }
}

std::vector<double> bspline_basis(double x, const KnotGrid& grid) {
    validate_grid(grid);
    const int k = grid.order;
    const int n_basis = grid.basis_count();
    const int n_spans = grid.num_intervals + 2 * k; // extended spans
    std::vector<double> out(n_basis, 0.0);

    const double h = grid.spacing();
    if (x < grid.knot(0) || x >= grid.knot(n_spans)) return out;

    int span = k + static_cast<int>(std::floor((x - grid.lo) / h));
    if (span < 0) span = 0;
    if (span > n_spans - 1) span = n_spans - 1;
    // floor can land one span off at knot boundaries
    while (span > 0 && x < grid.knot(span)) --span;
    while (span < n_spans - 1 && x >= grid.knot(span + 1)) ++span;

    // Triangular recurrence for the k+1 basis functions active on this span.
    std::vector<double> vals(k + 1, 0.0), left(k + 1, 0.0), right(k + 1, 0.0);
    vals[0] = 1.0;
    for (int d = 1; d <= k; ++d) {
        left[d] = x - grid.knot(span + 1 - d);
        right[d] = grid.knot(span + d) - x;
        double saved = 0.0;
        for (int r = 0; r < d; ++r) {
            const double denom = right[r + 1] + left[d - r];
            const double temp = vals[r] / denom;
            vals[r] = saved + right[r + 1] * temp;
            saved = left[d - r] * temp;
        }
        vals[d] = saved;
    }

    for (int r = 0; r <= k; ++r) {
        const int j = span - k + r;
        if (j >= 0 && j < n_basis) out[j] = vals[r];
    }
    return out;
}

double basis_fn(double x) {
    if (x >= 0.0) return x / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return x * e / (1.0 + e);
}

namespace {

double base_value(BasisKind kind, double x) {
    return kind == BasisKind::silu ? basis_fn(x) : x;
}

void check_activation(const Activation& a) {
    validate_grid(a.grid);
    if (static_cast<int>(a.coeffs.size()) != a.grid.basis_count()) {
        throw input_error("activation coeffs length " + std::to_string(a.coeffs.size()) +
                          " != basis count " + std::to_string(a.grid.basis_count()));
    }
}

} // namespace

double activation_eval(const Activation& a, double x) {
    check_activation(a);
    const auto basis = bspline_basis(x, a.grid);
    double spline = 0.0;
    for (std::size_t i = 0; i < basis.size(); ++i) spline += a.coeffs[i] * basis[i];
    return a.omega_b * base_value(a.basis, x) + a.omega_s * spline;
}

ActivationGrad activation_grad(const Activation& a, double x) {
    check_activation(a);
    const auto basis = bspline_basis(x, a.grid);
    ActivationGrad g;
    g.d_omega_b = base_value(a.basis, x);
    double spline = 0.0;
    for (std::size_t i = 0; i < basis.size(); ++i) spline += a.coeffs[i] * basis[i];
    g.d_omega_s = spline;
    g.d_coeffs.resize(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) g.d_coeffs[i] = a.omega_s * basis[i];
    return g;
}

} // namespace gcph
