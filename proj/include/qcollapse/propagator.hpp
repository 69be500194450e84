#pragma once

#include <vector>

#include "qcollapse/grid.hpp"
#include "qcollapse/hamiltonian.hpp"

namespace qc {

// Crank-Nicolson propagator for one fixed (hamiltonian, dt) pair:
//   (I + i dt/2 H) psi_new = (I - i dt/2 H) psi_old
// Unconditionally stable and norm-preserving to round-off for Hermitian H.
// Coefficients are precomputed once so the per-step cost is one tridiagonal
// solve (plus a Sherman-Morrison correction under periodic boundaries).
class CrankNicolson {
public:
    CrankNicolson(const Hamiltonian1D& h, double dt);

    void step(GridWavefunction& psi) const;   // in place
    void step_n(GridWavefunction& psi, int n) const;

    double dt() const { return dt_; }
    const Grid1D& grid() const { return grid_; }

private:
    Grid1D grid_;
    Boundary boundary_;
    double dt_ = 0.0;
    cdouble off_;                  // constant off-diagonal of (I + i dt/2 H)
    std::vector<cdouble> diag_;    // diagonal of (I + i dt/2 H)
    std::vector<cdouble> rhs_diag_;
    // Thomas back-substitution coefficients, precomputed.
    std::vector<cdouble> inv_denom_;
    std::vector<cdouble> upper_ratio_;
    // Periodic boundary helpers (Sherman-Morrison).
    std::vector<cdouble> sm_z_;
    cdouble sm_corner_{0.0, 0.0};
    mutable std::vector<cdouble> work_;

    void solve(std::vector<cdouble>& rhs_into_solution) const;
};

// One-shot evolution by dt. dt = 0 returns the input unchanged; dt < 0 or
// non-finite input is an error. Builds a propagator internally, so prefer
// CrankNicolson directly in loops.
GridWavefunction step_unitary(const GridWavefunction& psi, const Hamiltonian1D& h, double dt);

} // namespace qc
