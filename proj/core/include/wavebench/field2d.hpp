#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "wavebench/common.hpp"
#include "wavebench/config.hpp"
#include "wavebench/robot.hpp"

namespace wavebench {

struct Signal {
    std::vector<double> values;
    double dt = 0.0;
    std::string label;
};

struct SensorImage {
    int d1 = 0, d2 = 0;
    std::vector<double> v;  // row-major, d1 rows (y) by d2 cols (x)
};

// First-order pressure/velocity acoustics on a collocated grid with split-PML
// pressure (p = px + py). Two synchronized runs share every code path: the
// "total" twin carries the scatterer mask, the "free" twin never does, and
// their difference is the scattered field.
struct SimState {
    int n = 0;
    long long substep_count = 0;

    std::vector<double> px_tot, py_tot, vx_tot, vy_tot;
    std::vector<double> px_free, py_free, vx_free, vy_free;
    std::vector<double> sigma_x, sigma_y;  // absorption profiles per axis index
    std::vector<std::uint8_t> mask;        // scatterer cells, total twin only

    std::vector<double> scratch;  // p = px + py staging, not part of the state

    double time(const SimConfig& cfg) const;
    double p_tot(int ix, int iy) const { return px_tot[iy * n + ix] + py_tot[iy * n + ix]; }
    double p_free(int ix, int iy) const { return px_free[iy * n + ix] + py_free[iy * n + ix]; }
};

double cfl_dt(const SimConfig& cfg);
int substeps_per_action(const SimConfig& cfg);
// Actual substep length: action_period / substeps_per_action (<= cfl_dt).
double substep_dt(const SimConfig& cfg);

// Cubic absorption ramp over the pml_width outermost cells on each side.
std::pair<std::vector<double>, std::vector<double>> build_pml(const SimConfig& cfg);

SimState make_state(const SimConfig& cfg);

// Cell is masked iff its center lies inside some disk. Throws
// ConstraintViolation if any disk reaches into the PML frame.
std::vector<std::uint8_t> rasterize_scatterers(const DesignState& d, const SimConfig& cfg);

// Advances both twins by `substeps` CFL substeps under the current mask.
void step(SimState& state, const SimConfig& cfg, int substeps);

// p_tot - p_free over the non-PML interior (interior_n^2, row-major by y).
std::vector<double> scattered_field(const SimState& state, const SimConfig& cfg);

// Sum of field^2 * dx^2 over the region; `field` spans the interior grid.
double field_energy(const std::vector<double>& field, const SimConfig& cfg, Region region);

// field_energy(scattered_field(...)) without materializing the field.
double scattered_energy(const SimState& state, const SimConfig& cfg, Region region);

// Block-average downsample of the interior total-pressure field. Exact
// area weighting, so the image mean equals the interior field mean.
SensorImage sensor_read(const SimState& state, const SimConfig& cfg);

struct WindowResult {
    Signal sigma;       // scattered energy at each substep end
    SensorImage x_end;  // sensor image at the interval end
};

// One action interval: re-rasterizes the mask from the design trajectory at
// every substep, steps both twins, and records the region's scattered energy.
// `traj` holds substeps+1 design samples (see integrate_design).
WindowResult run_window(SimState& state, const std::vector<DesignState>& traj,
                        const SimConfig& cfg, Region region);

// Discrete energy of one twin: sum(p^2/c^2 + vx^2 + vy^2) * dx^2 / 2.
// Velocities live at half steps; tests time-center them as needed.
double twin_energy(const std::vector<double>& px, const std::vector<double>& py,
                   const std::vector<double>& vx, const std::vector<double>& vy,
                   const SimConfig& cfg, bool interior_only);

}  // namespace wavebench
