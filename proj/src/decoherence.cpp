#include "qcollapse/decoherence.hpp"

#include <cmath>
#include <string>

#include "qcollapse/tolerances.hpp"

namespace qc {

BatchPartition partition_batches(double lo, double hi, int n) {
    if (!(hi > lo)) {
        throw ArgumentError("partition_batches: empty extent [" + std::to_string(lo) + ", " +
                            std::to_string(hi) + "]");
    }
    if (n < 1) {
        throw ArgumentError("partition_batches: batch count must be >= 1");
    }
    std::vector<double> b(static_cast<std::size_t>(n) + 1);
    const double width = (hi - lo) / static_cast<double>(n);
    for (int i = 0; i <= n; ++i) {
        b[i] = (i == n) ? hi : lo + static_cast<double>(i) * width;
    }
    return BatchPartition{std::move(b)};
}

BatchPartition partition_batches(std::vector<double> boundaries) {
    if (boundaries.size() < 2) {
        throw ArgumentError("partition_batches: need at least two boundaries");
    }
    for (std::size_t i = 1; i < boundaries.size(); ++i) {
        if (!(boundaries[i] > boundaries[i - 1])) {
            throw ArgumentError("partition_batches: boundaries must be strictly increasing (" +
                                std::to_string(boundaries[i - 1]) + " then " +
                                std::to_string(boundaries[i]) + ")");
        }
    }
    return BatchPartition{std::move(boundaries)};
}

CaptureKernel gaussian_capture_kernel(double g, double lambda) {
    if (!(g >= 0.0)) throw ArgumentError("gaussian_capture_kernel: g must be >= 0");
    if (!(lambda > 0.0)) throw ArgumentError("gaussian_capture_kernel: lambda must be > 0");
    const double inv2l2 = 1.0 / (2.0 * lambda * lambda);
    return [g, inv2l2](double x, double u) {
        const double d = x - u;
        return g * std::exp(-d * d * inv2l2);
    };
}

BatchChannelSet build_batch_channels(const BatchPartition& partition,
                                     const CaptureKernel& kernel,
                                     const DetectorDensity& density, const Grid1D& grid,
                                     const std::vector<ComponentId>& targets, int n_panels,
                                     const std::string& label_prefix) {
    const int n_batches = partition.n_batches();
    if (static_cast<int>(targets.size()) != n_batches) {
        throw StructuralError("build_batch_channels: need one target per batch");
    }
    if (n_panels < n_batches) {
        throw ArgumentError("build_batch_channels: fewer quadrature panels than batches");
    }

    const double lo = partition.extent_min();
    const double hi = partition.extent_max();
    const double du = (hi - lo) / static_cast<double>(n_panels);

    // Global quadrature nodes (panel midpoints), assigned whole to batches.
    std::vector<double> u(n_panels);
    std::vector<double> w(n_panels);
    std::vector<int> batch_of(n_panels);
    double total_mass = 0.0;
    int batch = 0;
    for (int j = 0; j < n_panels; ++j) {
        u[j] = lo + (static_cast<double>(j) + 0.5) * du;
        w[j] = density(u[j]);
        if (!(w[j] >= 0.0) || !std::isfinite(w[j])) {
            throw ArgumentError("build_batch_channels: detector density negative or non-finite at u = " +
                                std::to_string(u[j]));
        }
        total_mass += w[j] * du;
        while (batch + 1 < n_batches && u[j] >= partition.hi(batch)) ++batch;
        batch_of[j] = batch;
    }
    if (!(total_mass > 0.0)) {
        throw ArgumentError("build_batch_channels: detector density has zero total mass");
    }

    std::vector<std::vector<double>> gammas(n_batches,
                                            std::vector<double>(grid.n_points, 0.0));
    std::vector<double> full(grid.n_points, 0.0);
    for (int i = 0; i < grid.n_points; ++i) {
        const double x = grid.x(i);
        for (int j = 0; j < n_panels; ++j) {
            const double k = kernel(x, u[j]);
            if (!(k >= 0.0) || !std::isfinite(k)) {
                throw ArgumentError("build_batch_channels: kernel negative or non-finite at (x, u) = (" +
                                    std::to_string(x) + ", " + std::to_string(u[j]) + ")");
            }
            const double term = k * w[j] * du;
            gammas[batch_of[j]][i] += term;
            full[i] += term;
        }
    }

    // Partition of unity in the detector coordinate.
    for (int i = 0; i < grid.n_points; ++i) {
        double summed = 0.0;
        for (int a = 0; a < n_batches; ++a) summed += gammas[a][i];
        const double scale = std::max(std::abs(full[i]), 1e-300);
        if (std::abs(summed - full[i]) > tol::kPartitionUnityRel * scale) {
            throw NumericalError("build_batch_channels: batch profiles do not sum to the "
                                 "full-extent profile at x = " + std::to_string(grid.x(i)));
        }
    }

    BatchChannelSet set;
    set.partition = partition;
    set.channels.reserve(n_batches);
    for (int a = 0; a < n_batches; ++a) {
        set.channels.emplace_back(targets[a], grid, std::move(gammas[a]),
                                  label_prefix + "_" + std::to_string(a + 1));
    }
    return set;
}

} // namespace qc
