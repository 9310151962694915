#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "wavebench/common.hpp"

namespace wavebench {

// Region over which scattered energy is accumulated.
enum class Region { FullInterior, UpperRightQuadrant };

enum class ActuationMode { Radii, Position, Full };  // R / P / F

const char* to_string(Region r);
const char* to_string(ActuationMode m);
Region region_from_string(const std::string& s);
ActuationMode mode_from_string(const std::string& s);

struct SimConfig {
    double domain_half_width = 15.0;  // m; domain is [-hw, hw]^2
    int grid_n = 128;                 // cells per axis
    double sound_speed = 1000.0;      // m/s
    int pml_width = 16;               // cells per side
    double pml_strength = 6000.0;     // 1/s at the outermost cell
    double source_x = -10.0;          // m
    double source_y = 0.0;            // m
    double source_frequency = 500.0;  // Hz
    double source_amplitude = 1.0e4;  // injected pressure rate
    double cfl_safety = 0.7;
    double action_period = 1.0e-3;    // s per action interval
    double blowup_bound = 1.0e6;      // |field| limit before NumericalBlowup
    int sensor_n = 64;                // sensor image is sensor_n x sensor_n

    double dx() const { return 2.0 * domain_half_width / grid_n; }
    int interior_n() const { return grid_n - 2 * pml_width; }
    // Lowest grid coordinate of a cell center on either axis.
    double cell_center(int i) const { return -domain_half_width + (i + 0.5) * dx(); }

    void validate() const;  // throws ConfigError
};

struct RobotConfig {
    ActuationMode mode = ActuationMode::Position;
    int scatterer_count = 1;
    double r_min = 0.2;                  // m
    double r_max = 1.0;                  // m
    double r_init = 0.5;                 // m
    double gap = 0.1;                    // m, minimum surface separation
    double position_rate_bound = 150.0;  // m/s per coordinate
    double radius_rate_bound = 20.0;     // m/s
    double ring_radius = 5.0;            // m, mode R layout
    double design_margin = 3.0;          // m inside the interior box

    void validate() const;
};

// One flat key=value file drives the whole pipeline.
struct Scenario {
    SimConfig sim;
    RobotConfig robot;
    Region task_region = Region::FullInterior;
    int episode_steps = 200;

    // Latent surrogate geometry.
    int latent_cells = 128;
    double latent_span = 30.0;    // m covered by the latent axis
    int param_target = 300000;    // total trainable parameter budget

    void validate() const;

    static Scenario from_file(const std::filesystem::path& p);
    static Scenario from_text(const std::string& text);
    // Canonical serialization (fixed key order); hash() is FNV-1a over it.
    std::string canonical() const;
    std::uint64_t hash() const;
    // Hash of the environment-facing part only (simulation, robot, task,
    // episode length). Datasets and checkpoints are keyed by this, so model
    // hyperparameters can change without invalidating recorded data.
    std::uint64_t env_hash() const;
    void write_file(const std::filesystem::path& p) const;
};

// Applies "P1"-style actuation-space tags (R, P1, P2, P4, F2, ...).
void apply_space_tag(Scenario& sc, const std::string& tag);

}  // namespace wavebench
