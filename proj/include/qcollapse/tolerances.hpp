#pragma once

namespace qc::tol {

// Norm conservation budgets.
inline constexpr double kNormDriftPerStep = 1e-10;   // relative, per engine step
inline constexpr double kNormDriftPerTrajectory = 1e-7;
inline constexpr double kConservationRel = 1e-10;    // drain/fill square-modulus ledger

// Maximum total trigger hazard sum_n (J_n/s)*dt allowed in one step.
inline constexpr double kStepHazardGuard = 0.1;

// Frozen (ready) components may differ from their recorded inflow state by
// at most this much in L2 norm between steps.
inline constexpr double kFreezeTol = 1e-12;

// Density below this fraction of the peak counts as outside the support.
inline constexpr double kSupportFloor = 1e-12;

// Per-batch capture profiles must sum to the full-extent profile this tightly.
inline constexpr double kPartitionUnityRel = 1e-9;

// Total first-hit CDFs across refined partitions must agree this tightly.
inline constexpr double kRefinementRel = 1e-9;

} // namespace qc::tol
