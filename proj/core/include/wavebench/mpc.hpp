#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "wavebench/aem.hpp"
#include "wavebench/dataset.hpp"

namespace wavebench {

enum class Task { Suppress, Focus };
enum class ControllerKind { Random, MpcAem, MpcNode };

const char* to_string(Task t);
Task task_from_string(const std::string& s);

struct MpcConfig {
    int horizon = 5;        // planned actions per step
    int candidates = 128;   // sampled action sequences per iteration
    double elite_frac = 0.1;
    int iterations = 3;     // 1 = pure random shooting
    double beta = 0.0;      // action magnitude penalty
    Task task = Task::Suppress;
    double sigma_hi = 0.0;  // focus reference; 0 derives 10x the training max

    void validate() const;
};

// suppress -> zeros; focus -> constant sigma_hi (a reference above the
// achievable range, so tracking it maximizes the signal).
std::vector<double> reference_signal(Task task, int total_substeps, double sigma_hi);

struct PlanResult {
    ActionSpec first;
    double best_cost = 0.0;
    std::vector<double> iteration_best;  // best cost after each refinement
};

// Cross-entropy refinement over Gaussian-sampled action sequences, seeded
// with the distribution mean (so a zero mean under beta->inf returns an
// exactly zero action) and the incumbent best. Candidates that blow up cost
// +inf. Deterministic given (model, observation, rng state).
PlanResult plan(const Model& m, const Scenario& sc, const SensorImage& X, const DesignState& d0,
                double t0, const MpcConfig& cfg, Rng& rng);

struct EpisodeMetrics {
    Signal sigma;                               // per-substep scattered energy
    std::vector<std::vector<double>> designs;   // per action step, flat layout
    std::vector<std::vector<double>> actions;   // per action step, design rates
    std::vector<double> plan_ms;                // per action step
    std::uint64_t seed = 0;
};

// Closed loop: sense, plan (or draw a random action), actuate, simulate one
// action period. The Random controller consumes its rng exactly like
// simulate_random_episode, so the two produce identical episodes per seed.
EpisodeMetrics run_controlled_episode(const Scenario& sc, ControllerKind controller,
                                      const Model* model, const MpcConfig& cfg, int steps,
                                      std::uint64_t seed);

// Time-mean of sigma over [t0, t1]; samples sit at t = (k+1)*dt.
double steady_state_energy(const Signal& sigma, double t0 = 0.10, double t1 = 0.20);

void write_metrics_csv(const EpisodeMetrics& m, const std::filesystem::path& p);

}  // namespace wavebench
