#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qcollapse/channel.hpp"
#include "qcollapse/grid.hpp"

namespace qc {

// Partition of a detector (or atom) coordinate extent into decoherent
// batches: boundaries[a] .. boundaries[a+1] is batch a.
struct BatchPartition {
    std::vector<double> boundaries; // strictly increasing, >= 2 entries

    int n_batches() const { return static_cast<int>(boundaries.size()) - 1; }
    double lo(int a) const { return boundaries[a]; }
    double hi(int a) const { return boundaries[a + 1]; }
    double extent_min() const { return boundaries.front(); }
    double extent_max() const { return boundaries.back(); }
};

// Uniform partition of [lo, hi] into n batches.
BatchPartition partition_batches(double lo, double hi, int n);
// Explicit boundaries (validated strictly increasing).
BatchPartition partition_batches(std::vector<double> boundaries);

// Correlated capture kernel k(x_obj, u_det) >= 0, units 1/time per unit
// detector length, and the detector configuration density w(u) >= 0.
using CaptureKernel = std::function<double(double, double)>;
using DetectorDensity = std::function<double(double)>;

// k(x, u) = g exp(-(x-u)^2 / (2 lambda^2))
CaptureKernel gaussian_capture_kernel(double g, double lambda);

struct BatchChannelSet {
    BatchPartition partition;
    std::vector<CaptureChannel> channels; // one per batch, in batch order
};

// Builds one capture channel per batch with
//   gamma_a(x) = integral over batch a of k(x, u) w(u) du,
// evaluated on a single global midpoint quadrature grid of n_panels panels
// spanning the full extent. Panels are assigned to batches whole (by
// midpoint), so summing gamma over any partition of the same extent
// reproduces the full-extent profile up to float associativity; the builder
// verifies this partition of unity to kPartitionUnityRel.
BatchChannelSet build_batch_channels(const BatchPartition& partition,
                                     const CaptureKernel& kernel,
                                     const DetectorDensity& density, const Grid1D& grid,
                                     const std::vector<ComponentId>& targets,
                                     int n_panels = 1200,
                                     const std::string& label_prefix = "batch");

} // namespace qc
