#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "qcollapse/propagator.hpp"

using namespace qc;

namespace {

// Test-side oracle: discrete ground state of H by inverse power iteration on
// the real symmetric matrix, independent of the Crank-Nicolson path.
struct DiscreteEigenstate {
    std::vector<double> vec;
    double energy = 0.0;
};

DiscreteEigenstate ground_state_oracle(const Hamiltonian1D& h) {
    const int n = h.grid.n_points;
    const double dx = h.grid.dx();
    const double c = 1.0 / (2.0 * h.mass * dx * dx);

    // (H + shift I) x = b solved by a real Thomas pass; shift keeps the
    // matrix positive definite.
    const double shift = 1.0;
    std::vector<double> diag(n), lower(n, -c);
    for (int j = 0; j < n; ++j) diag[j] = 2.0 * c + h.potential[j] + shift;

    auto solve = [&](std::vector<double> r) {
        std::vector<double> gam(n), x(n);
        double beta = diag[0];
        x[0] = r[0] / beta;
        for (int j = 1; j < n; ++j) {
            gam[j] = -c / beta;
            beta = diag[j] + c * gam[j];
            x[j] = (r[j] + c * x[j - 1]) / beta;
        }
        for (int j = n - 2; j >= 0; --j) x[j] -= gam[j + 1] * x[j + 1];
        return x;
    };

    std::vector<double> v(n);
    for (int j = 0; j < n; ++j) v[j] = std::exp(-h.grid.x(j) * h.grid.x(j));
    for (int it = 0; it < 200; ++it) {
        v = solve(std::move(v));
        double norm = 0.0;
        for (double a : v) norm += a * a;
        norm = std::sqrt(norm * dx);
        for (double& a : v) a /= norm;
    }

    // Rayleigh quotient of the unshifted H.
    double num = 0.0;
    for (int j = 0; j < n; ++j) {
        const double left = j > 0 ? v[j - 1] : 0.0;
        const double right = j + 1 < n ? v[j + 1] : 0.0;
        const double hv = -c * (left + right) + (2.0 * c + h.potential[j]) * v[j];
        num += v[j] * hv;
    }
    return DiscreteEigenstate{std::move(v), num * dx};
}

} // namespace

TEST_CASE("dt = 0 returns the input unchanged") {
    const Grid1D g(-10.0, 10.0, 201);
    const Hamiltonian1D h = free_hamiltonian(g);
    const GridWavefunction psi = gaussian_packet(g, 0.0, 1.0, 0.5);
    const GridWavefunction out = step_unitary(psi, h, 0.0);
    for (int j = 0; j < psi.size(); ++j) {
        CHECK(out.amps[j] == psi.amps[j]);
    }
}

TEST_CASE("negative or non-finite dt is rejected") {
    const Grid1D g(-10.0, 10.0, 64);
    const Hamiltonian1D h = free_hamiltonian(g);
    const GridWavefunction psi = gaussian_packet(g, 0.0, 1.0, 0.0);
    CHECK_THROWS_AS(step_unitary(psi, h, -0.1), ArgumentError);
    CHECK_THROWS_AS(step_unitary(psi, h, std::nan("")), ArgumentError);
}

TEST_CASE("non-finite input amplitudes are a numerical error") {
    const Grid1D g(-10.0, 10.0, 64);
    const Hamiltonian1D h = free_hamiltonian(g);
    GridWavefunction psi = gaussian_packet(g, 0.0, 1.0, 0.0);
    psi.amps[10] = cdouble{1.0 / 0.0, 0.0};
    CHECK_THROWS_AS(step_unitary(psi, h, 0.01), NumericalError);
}

TEST_CASE("free Gaussian spreads per the analytic variance formula") {
    // Var(t) = sigma0^2 (1 + (t / (2 sigma0^2))^2); sigma0 = 1, t = 2 -> 2.0.
    const Grid1D g(-20.0, 20.0, 1001); // dx = 0.04
    const Hamiltonian1D h = free_hamiltonian(g);
    GridWavefunction psi = gaussian_packet(g, 0.0, 1.0, 0.0);
    const CrankNicolson prop(h, 0.01);
    prop.step_n(psi, 200);
    CHECK(position_variance(psi) == doctest::Approx(2.0).epsilon(0.01));
    CHECK(std::abs(squared_norm(psi) - 1.0) < 1e-10);
}

TEST_CASE("harmonic ground state only rotates by the global phase") {
    const Grid1D g(-12.0, 12.0, 601);
    const Hamiltonian1D h = harmonic_hamiltonian(g, 1.0);
    const DiscreteEigenstate gs = ground_state_oracle(h);
    CHECK(gs.energy == doctest::Approx(0.5).epsilon(1e-3)); // 0.5 + O(dx^2)

    GridWavefunction psi(g);
    for (int j = 0; j < g.n_points; ++j) psi.amps[j] = cdouble{gs.vec[j], 0.0};

    const double dt = 0.005;
    const int steps = 100;
    const CrankNicolson prop(h, dt);
    GridWavefunction evolved = psi;
    prop.step_n(evolved, steps);

    const cdouble expected_phase = std::exp(cdouble{0.0, -gs.energy * dt * steps});
    double worst = 0.0;
    for (int j = 0; j < g.n_points; ++j) {
        worst = std::max(worst, std::abs(evolved.amps[j] - expected_phase * psi.amps[j]));
        CHECK(std::abs(std::abs(evolved.amps[j]) - std::abs(psi.amps[j])) < 1e-6);
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("unitarity holds for randomized states, potentials and steps") {
    std::mt19937_64 gen(1234);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const Grid1D g(-8.0, 8.0, 101 + 10 * trial);
        std::vector<double> v(g.n_points);
        for (double& p : v) p = 2.0 * std::abs(unif(gen));
        const Boundary b = trial % 2 == 0 ? Boundary::Reflecting : Boundary::Periodic;
        const Hamiltonian1D h(g, v, 0.5 + std::abs(unif(gen)), b);

        GridWavefunction psi(g);
        for (cdouble& a : psi.amps) a = cdouble{unif(gen), unif(gen)};
        const double before = squared_norm(psi);

        const double dt = 0.001 + 0.02 * std::abs(unif(gen));
        CrankNicolson prop(h, dt);
        prop.step_n(psi, 25);
        CHECK(std::abs(squared_norm(psi) - before) / before < 1e-10);
    }
}

TEST_CASE("periodic boundary transports a moving packet across the seam") {
    const Grid1D g(-10.0, 10.0, 501);
    const Hamiltonian1D h = free_hamiltonian(g, 1.0, Boundary::Periodic);
    GridWavefunction psi = gaussian_packet(g, 8.0, 0.7, 4.0);
    const CrankNicolson prop(h, 0.005);
    prop.step_n(psi, 200); // t = 1, mean moves by ~v t = 4 -> wraps to -8
    CHECK(std::abs(squared_norm(psi) - 1.0) < 1e-10);
    CHECK(position_mean(psi) < 0.0); // crossed the boundary instead of reflecting
}
