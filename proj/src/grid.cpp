#include "qcollapse/grid.hpp"

#include <cmath>
#include <string>

#include "qcollapse/tolerances.hpp"

namespace qc {

Grid1D::Grid1D(double xmin, double xmax, int n) : x_min(xmin), x_max(xmax), n_points(n) {
    if (n < 8) {
        throw ArgumentError("Grid1D: n_points must be >= 8, got " + std::to_string(n));
    }
    if (!(xmax > xmin)) {
        throw ArgumentError("Grid1D: x_max must exceed x_min");
    }
    if (!std::isfinite(xmin) || !std::isfinite(xmax)) {
        throw ArgumentError("Grid1D: bounds must be finite");
    }
}

GridWavefunction::GridWavefunction(const Grid1D& g, std::vector<cdouble> a)
    : grid(g), amps(std::move(a)) {
    if (static_cast<int>(amps.size()) != g.n_points) {
        throw StructuralError("GridWavefunction: amplitude count does not match grid");
    }
}

bool all_finite(const GridWavefunction& psi) {
    for (const cdouble& a : psi.amps) {
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) return false;
    }
    return true;
}

void require_finite(const GridWavefunction& psi, const char* where) {
    if (!all_finite(psi)) {
        throw NumericalError(std::string(where) + ": non-finite amplitude encountered");
    }
}

double squared_norm(const GridWavefunction& psi) {
    double acc = 0.0;
    for (const cdouble& a : psi.amps) {
        acc += std::norm(a);
    }
    return acc * psi.grid.dx();
}

void normalize(GridWavefunction& psi) {
    const double n2 = squared_norm(psi);
    if (!(n2 > 0.0)) {
        throw MetricUndefined("normalize: zero-norm wavefunction");
    }
    const double inv = 1.0 / std::sqrt(n2);
    for (cdouble& a : psi.amps) a *= inv;
}

double position_mean(const GridWavefunction& psi) {
    const double dx = psi.grid.dx();
    double n2 = 0.0;
    double m1 = 0.0;
    for (int j = 0; j < psi.size(); ++j) {
        const double w = std::norm(psi.amps[j]);
        n2 += w;
        m1 += w * psi.grid.x(j);
    }
    if (!(n2 * dx > 0.0)) {
        throw MetricUndefined("position_mean: zero-norm wavefunction");
    }
    return m1 / n2;
}

double position_variance(const GridWavefunction& psi) {
    const double dx = psi.grid.dx();
    double n2 = 0.0;
    double m1 = 0.0;
    double m2 = 0.0;
    for (int j = 0; j < psi.size(); ++j) {
        const double w = std::norm(psi.amps[j]);
        const double x = psi.grid.x(j);
        n2 += w;
        m1 += w * x;
        m2 += w * x * x;
    }
    if (!(n2 * dx > 0.0)) {
        throw MetricUndefined("position_variance: zero-norm wavefunction");
    }
    const double mean = m1 / n2;
    return m2 / n2 - mean * mean;
}

SupportRange density_support(const GridWavefunction& psi, double floor_fraction) {
    double peak = 0.0;
    for (const cdouble& a : psi.amps) peak = std::max(peak, std::norm(a));
    if (peak <= 0.0) return {};
    const double floor = floor_fraction * peak;
    SupportRange r;
    for (int j = 0; j < psi.size(); ++j) {
        if (std::norm(psi.amps[j]) > floor) {
            if (r.lo < 0) r.lo = j;
            r.hi = j;
        }
    }
    return r;
}

GridWavefunction gaussian_packet(const Grid1D& grid, double x0, double sigma, double k0) {
    if (!(sigma > 0.0)) {
        throw ArgumentError("gaussian_packet: sigma must be positive");
    }
    GridWavefunction psi(grid);
    const double norm_factor = std::pow(2.0 * M_PI * sigma * sigma, -0.25);
    for (int j = 0; j < grid.n_points; ++j) {
        const double d = grid.x(j) - x0;
        const double envelope = norm_factor * std::exp(-d * d / (4.0 * sigma * sigma));
        psi.amps[j] = envelope * std::exp(cdouble{0.0, k0 * grid.x(j)});
    }
    normalize(psi); // exact unit norm on the discrete grid
    return psi;
}

} // namespace qc
