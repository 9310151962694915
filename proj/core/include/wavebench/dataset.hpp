#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "wavebench/config.hpp"
#include "wavebench/field2d.hpp"
#include "wavebench/robot.hpp"

namespace wavebench {

// WVDS dataset: header, then per-episode blocks. Payloads are 32-bit
// little-endian floats in the order (per step): sensor image X(t_i), design
// d(t_i) as [x1,y1,..,r1,..], action as design-space rates of the same
// layout, then the substep sigma samples of the interval.
struct DatasetHeader {
    std::uint32_t episodes = 0;
    std::uint32_t steps = 0;
    std::uint32_t substeps = 0;
    std::uint32_t d1 = 0;
    std::uint32_t d2 = 0;
    std::uint32_t design_dim = 0;
    std::uint64_t config_hash = 0;
    std::uint8_t region = 0;      // 0 full, 1 quadrant
    std::uint8_t mode = 0;        // 0 R, 1 P, 2 F
    std::uint16_t scatterers = 0;
    double action_period = 0.0;
    std::uint64_t base_seed = 0;
};

struct EpisodeData {
    std::uint64_t seed = 0;
    std::vector<float> X;       // steps * d1 * d2
    std::vector<float> design;  // steps * design_dim
    std::vector<float> action;  // steps * design_dim (design-space rates)
    std::vector<float> sigma;   // steps * substeps
};

struct Dataset {
    DatasetHeader header;
    std::vector<EpisodeData> episodes;

    SensorImage sensor_image(int ep, int step) const;
    DesignState design_state(int ep, int step, const ActuationSpace& space) const;
    ActionSpec action(int ep, int step, const ActuationSpace& space) const;
    // sigma samples over [step, step+horizon) action intervals.
    std::vector<double> sigma_window(int ep, int step, int horizon) const;
    double max_abs_sigma(int ep_begin, int ep_end) const;
    double max_abs_sensor(int ep_begin, int ep_end) const;
};

// One 200-step random-policy episode under the scenario's actuation space.
EpisodeData simulate_random_episode(const Scenario& sc, std::uint64_t episode_seed);

// Episodes run in parallel with per-episode substreams of `seed`; output is
// byte-identical for any worker count.
Dataset generate_dataset(const Scenario& sc, int episodes, std::uint64_t seed, int threads = 0);

void write_dataset(const Dataset& ds, const std::filesystem::path& p);
Dataset load_dataset(const std::filesystem::path& p);

// Uniform (episode, offset) pair; the window never crosses an episode end.
struct WindowRef {
    int episode = 0;
    int offset = 0;
};
WindowRef sample_window(const Dataset& ds, int horizon, Rng& rng);

}  // namespace wavebench
