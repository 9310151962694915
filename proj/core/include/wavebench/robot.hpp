#pragma once

#include <vector>

#include "wavebench/common.hpp"
#include "wavebench/config.hpp"

namespace wavebench {

// Per-mode action layout (rates, m/s):
//   R: [dr_1 .. dr_M]
//   P: [dx_1, dy_1, .. dx_M, dy_M]
//   F: [dx_1, dy_1, .. dx_M, dy_M, dr_1 .. dr_M]
struct ActuationSpace {
    ActuationMode mode = ActuationMode::Position;
    int scatterers = 1;
    double position_bound = 0.0;  // m/s per center coordinate
    double radius_bound = 0.0;    // m/s per radius

    int action_dim() const;
    double bound_for(int component) const;
};

ActuationSpace actuation_space(const RobotConfig& rc);

struct ActionSpec {
    std::vector<double> rates;  // per-mode layout above
};

// Axis-aligned square the scatterer disks must stay inside:
// the non-PML interior shrunk by design_margin.
struct DesignRegion {
    double lo = 0.0;
    double hi = 0.0;
};

DesignRegion design_region(const SimConfig& sim, const RobotConfig& rc);

struct DesignState {
    std::vector<double> cx, cy, r;
    ActuationSpace space;

    int count() const { return static_cast<int>(r.size()); }
    // Serialization order used in dataset files and encoder inputs:
    // [x1, y1, x2, y2, ..., r1, ..., rM].
    std::vector<double> flat() const;
    static DesignState from_flat(const std::vector<double>& v, const ActuationSpace& space);
};

// Feasibility projection. Radii clamp to [r_min, r_max], centers clamp into
// the design region, and overlapping pairs separate along their center line
// (mode R shrinks radii instead, centers being fixed). Throws
// ProjectionFailure if constraints remain violated after the sweep limit.
DesignState project(DesignState d, const DesignRegion& region, const RobotConfig& rc);

bool is_feasible(const DesignState& d, const DesignRegion& region, const RobotConfig& rc);

// d(t) = project(d0 + rates * (t - t0)) sampled at substep boundaries;
// returns substeps+1 states, the first being project(d0).
std::vector<DesignState> integrate_design(const DesignState& d0, const ActionSpec& a,
                                          double interval, int substeps,
                                          const DesignRegion& region, const RobotConfig& rc);

// M scatterers equally spaced on a circle, first at angle 0 (+x axis).
DesignState ring_layout(int scatterers, double ring_radius, double r_init,
                        const ActuationSpace& space);

// Initial layout for a scenario: ring for mode R, otherwise seeded uniform
// rejection sampling over the feasible set.
DesignState initial_design(const Scenario& sc, Rng& rng);

ActionSpec random_action(const ActuationSpace& space, Rng& rng);
ActionSpec zero_action(const ActuationSpace& space);
ActionSpec clamp_action(ActionSpec a, const ActuationSpace& space);

// Expands a per-mode action into design-space rates [dcx,dcy...,dr...] in
// flat() ordering; fixed coordinates become zero.
std::vector<double> action_to_design_rates(const ActionSpec& a, const ActuationSpace& space);
ActionSpec action_from_design_rates(const std::vector<double>& rates, const ActuationSpace& space);

}  // namespace wavebench
