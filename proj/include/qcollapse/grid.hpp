#pragma once

#include <complex>
#include <vector>

#include "qcollapse/errors.hpp"

namespace qc {

using cdouble = std::complex<double>;

// Uniform 1-D spatial grid, node-based: x_j = x_min + j*dx, j = 0..n_points-1.
struct Grid1D {
    double x_min = -1.0;
    double x_max = 1.0;
    int n_points = 0;

    Grid1D() = default;
    Grid1D(double xmin, double xmax, int n);

    double dx() const { return (x_max - x_min) / static_cast<double>(n_points - 1); }
    double x(int j) const { return x_min + static_cast<double>(j) * dx(); }

    bool operator==(const Grid1D& o) const = default;
};

// Complex amplitude field on a Grid1D. Square modulus uses the rectangle
// rule sum |amp_j|^2 * dx throughout the engine.
struct GridWavefunction {
    Grid1D grid;
    std::vector<cdouble> amps;

    GridWavefunction() = default;
    explicit GridWavefunction(const Grid1D& g) : grid(g), amps(g.n_points, cdouble{0.0, 0.0}) {}
    GridWavefunction(const Grid1D& g, std::vector<cdouble> a);

    int size() const { return static_cast<int>(amps.size()); }
};

bool all_finite(const GridWavefunction& psi);
void require_finite(const GridWavefunction& psi, const char* where);

// sum |psi_j|^2 dx
double squared_norm(const GridWavefunction& psi);

// Scales amplitudes so squared_norm == 1. Throws MetricUndefined on zero norm.
void normalize(GridWavefunction& psi);

// First and second moments of the normalized density |psi|^2 dx.
double position_mean(const GridWavefunction& psi);
double position_variance(const GridWavefunction& psi);

// Index range [lo, hi] where the density exceeds kSupportFloor * peak.
// Returns {-1, -1} for an identically-zero field.
struct SupportRange {
    int lo = -1;
    int hi = -1;
};
SupportRange density_support(const GridWavefunction& psi, double floor_fraction);

// Normalized Gaussian packet: position sd sigma (Var(x) = sigma^2),
// centered at x0 with mean momentum k0.
GridWavefunction gaussian_packet(const Grid1D& grid, double x0, double sigma, double k0);

} // namespace qc
