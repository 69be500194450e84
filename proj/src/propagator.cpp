#include "qcollapse/propagator.hpp"

#include <cmath>

namespace qc {

Hamiltonian1D::Hamiltonian1D(const Grid1D& g, std::vector<double> v, double m, Boundary b)
    : grid(g), potential(std::move(v)), mass(m), boundary(b) {
    if (static_cast<int>(potential.size()) != g.n_points) {
        throw StructuralError("Hamiltonian1D: potential size does not match grid");
    }
    if (!(mass > 0.0)) {
        throw ArgumentError("Hamiltonian1D: mass must be positive");
    }
    for (double p : potential) {
        if (!std::isfinite(p)) throw NumericalError("Hamiltonian1D: non-finite potential");
    }
}

Hamiltonian1D free_hamiltonian(const Grid1D& grid, double mass, Boundary boundary) {
    return Hamiltonian1D(grid, std::vector<double>(grid.n_points, 0.0), mass, boundary);
}

Hamiltonian1D harmonic_hamiltonian(const Grid1D& grid, double omega, double center, double mass,
                                   Boundary boundary) {
    std::vector<double> v(grid.n_points);
    for (int j = 0; j < grid.n_points; ++j) {
        const double d = grid.x(j) - center;
        v[j] = 0.5 * mass * omega * omega * d * d;
    }
    return Hamiltonian1D(grid, std::move(v), mass, boundary);
}

CrankNicolson::CrankNicolson(const Hamiltonian1D& h, double dt)
    : grid_(h.grid), boundary_(h.boundary), dt_(dt) {
    if (!(dt >= 0.0) || !std::isfinite(dt)) {
        throw ArgumentError("CrankNicolson: dt must be finite and >= 0");
    }
    const int n = grid_.n_points;
    const double dx = grid_.dx();
    const double c = 1.0 / (2.0 * h.mass * dx * dx); // hopping magnitude of H
    const cdouble itheta{0.0, 0.5 * dt};

    off_ = -itheta * c;
    diag_.resize(n);
    rhs_diag_.resize(n);
    for (int j = 0; j < n; ++j) {
        const cdouble hd = 2.0 * c + h.potential[j];
        diag_[j] = 1.0 + itheta * hd;
        rhs_diag_[j] = 1.0 - itheta * hd;
    }

    std::vector<cdouble> adjusted = diag_;
    if (boundary_ == Boundary::Periodic) {
        // Sherman-Morrison split: A = A' + u v^T with u = (gamma,0,..,off),
        // v = (1,0,..,off/gamma), gamma = -diag_0.
        const cdouble gamma = -diag_[0];
        sm_corner_ = off_ / gamma;
        adjusted[0] = diag_[0] - gamma;
        adjusted[n - 1] = diag_[n - 1] - off_ * sm_corner_;
        sm_z_.assign(n, cdouble{0.0, 0.0});
        sm_z_[0] = gamma;
        sm_z_[n - 1] = off_;
    }

    // Thomas factorization of the (possibly adjusted) tridiagonal matrix.
    inv_denom_.resize(n);
    upper_ratio_.resize(n);
    cdouble beta = adjusted[0];
    inv_denom_[0] = 1.0 / beta;
    upper_ratio_[0] = cdouble{0.0, 0.0};
    for (int j = 1; j < n; ++j) {
        upper_ratio_[j] = off_ / beta;
        beta = adjusted[j] - off_ * upper_ratio_[j];
        inv_denom_[j] = 1.0 / beta;
    }

    if (boundary_ == Boundary::Periodic) {
        solve(sm_z_); // z = A'^{-1} u, reused every step
    }
    work_.resize(n);
}

// Solves the factorized tridiagonal system in place (no periodic correction).
void CrankNicolson::solve(std::vector<cdouble>& r) const {
    const int n = static_cast<int>(r.size());
    r[0] *= inv_denom_[0];
    for (int j = 1; j < n; ++j) {
        r[j] = (r[j] - off_ * r[j - 1]) * inv_denom_[j];
    }
    for (int j = n - 2; j >= 0; --j) {
        r[j] -= upper_ratio_[j + 1] * r[j + 1];
    }
}

void CrankNicolson::step(GridWavefunction& psi) const {
    if (psi.grid != grid_) {
        throw StructuralError("CrankNicolson::step: wavefunction grid mismatch");
    }
    require_finite(psi, "CrankNicolson::step");
    if (dt_ == 0.0) return;

    const int n = grid_.n_points;
    const cdouble roff = -off_; // RHS off-diagonal = +i dt/2 c
    std::vector<cdouble>& r = work_;
    r[0] = rhs_diag_[0] * psi.amps[0] + roff * psi.amps[1];
    for (int j = 1; j < n - 1; ++j) {
        r[j] = rhs_diag_[j] * psi.amps[j] + roff * (psi.amps[j - 1] + psi.amps[j + 1]);
    }
    r[n - 1] = rhs_diag_[n - 1] * psi.amps[n - 1] + roff * psi.amps[n - 2];
    if (boundary_ == Boundary::Periodic) {
        r[0] += roff * psi.amps[n - 1];
        r[n - 1] += roff * psi.amps[0];
    }

    solve(r);

    if (boundary_ == Boundary::Periodic) {
        const cdouble vy = r[0] + sm_corner_ * r[n - 1];
        const cdouble vz = sm_z_[0] + sm_corner_ * sm_z_[n - 1];
        const cdouble factor = vy / (1.0 + vz);
        for (int j = 0; j < n; ++j) r[j] -= factor * sm_z_[j];
    }

    psi.amps.swap(work_);
}

void CrankNicolson::step_n(GridWavefunction& psi, int n) const {
    for (int i = 0; i < n; ++i) step(psi);
}

GridWavefunction step_unitary(const GridWavefunction& psi, const Hamiltonian1D& h, double dt) {
    if (dt < 0.0 || !std::isfinite(dt)) {
        throw ArgumentError("step_unitary: dt must be finite and >= 0");
    }
    require_finite(psi, "step_unitary");
    if (dt == 0.0) return psi;
    GridWavefunction out = psi;
    CrankNicolson prop(h, dt);
    prop.step(out);
    return out;
}

} // namespace qc
