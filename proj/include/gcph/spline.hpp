#pragma once

#include <cstddef>
#include <vector>

namespace gcph {

// Uniform B-spline grid on [lo, hi] with `num_intervals` interior intervals
// and order `order` (the KAN convention: order k means degree-k pieces).
// The extended knot vector replicates the interior spacing `order` times on
// each side, giving num_intervals + 2*order + 1 knots and
// num_intervals + order basis functions.
struct KnotGrid {
    double lo = -1.0;
    double hi = 1.0;
    int num_intervals = 5;
    int order = 3;

    int basis_count() const { return num_intervals + order; }
    double spacing() const { return (hi - lo) / num_intervals; }
    // Knot i of the extended vector, i in [0, num_intervals + 2*order].
    double knot(int i) const { return lo + (i - order) * spacing(); }

    bool valid() const;
};

// Throws config_error if the grid violates its invariants.
void validate_grid(const KnotGrid& grid);

// How an activation maps its input through the fixed basis part.
// GCPH uses silu; the linear-restricted variant swaps in the identity and
// freezes the spline, leaving one trainable slope per feature.
enum class BasisKind { silu, identity };

// One covariate's learnable activation: omega_b * b(x) + omega_s * sum_k c_k B_k(x).
struct Activation {
    double omega_b = 1.0;
    double omega_s = 1.0;
    std::vector<double> coeffs; // length grid.basis_count()
    KnotGrid grid;
    BasisKind basis = BasisKind::silu;
};

// All basis values B_1..B_{G+K} at x, evaluated against the extended knots
// (points outside [lo, hi] are not clamped). Non-negative; sums to 1 on [lo, hi].
std::vector<double> bspline_basis(double x, const KnotGrid& grid);

// Fixed basis function b(x) = x * sigmoid(x) (silu).
double basis_fn(double x);

double activation_eval(const Activation& a, double x);

struct ActivationGrad {
    double d_omega_b = 0.0;
    double d_omega_s = 0.0;
    std::vector<double> d_coeffs;
};

// Analytic parameter gradients: d/d omega_b = b(x), d/d omega_s = S(x),
// d/d c_k = omega_s * B_k(x).
ActivationGrad activation_grad(const Activation& a, double x);

} // namespace gcph
