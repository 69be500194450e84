#pragma once

#include <vector>

#include "qcollapse/grid.hpp"

namespace qc {

enum class Boundary {
    Reflecting, // hard wall: psi = 0 beyond the grid ends
    Periodic,
};

// H = -(1/2m) d^2/dx^2 + V(x), natural units (hbar = 1).
struct Hamiltonian1D {
    Grid1D grid;
    std::vector<double> potential; // per grid point, energy units
    double mass = 1.0;
    Boundary boundary = Boundary::Reflecting;

    Hamiltonian1D() = default;
    Hamiltonian1D(const Grid1D& g, std::vector<double> v, double m, Boundary b);
};

Hamiltonian1D free_hamiltonian(const Grid1D& grid, double mass = 1.0,
                               Boundary boundary = Boundary::Reflecting);

// V(x) = 0.5 * mass * omega^2 * (x - center)^2
Hamiltonian1D harmonic_hamiltonian(const Grid1D& grid, double omega, double center = 0.0,
                                   double mass = 1.0,
                                   Boundary boundary = Boundary::Reflecting);

} // namespace qc
