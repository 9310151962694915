#pragma once

#include <vector>

#include "wavebench/aem.hpp"
#include "wavebench/dataset.hpp"

namespace wavebench {

struct TrainConfig {
    int horizon_actions = 20;
    int batch = 8;
    double lr = 1e-3;
    int epochs = 30;
    double val_fraction = 0.1;
    std::uint64_t seed = 1;
    int windows_per_epoch = 200;
    int threads = 0;

    void validate() const;
};

struct EpochStats {
    int epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
    int skipped_windows = 0;
    double wall_seconds = 0.0;
};

struct FitResult {
    std::vector<EpochStats> history;
    double initial_val = 0.0;  // validation loss before any update
    double best_val = 0.0;
    int best_epoch = -1;
};

// Mean squared error of the model's prediction against the stored sigma over
// one window (inference path; used for validation and tests).
double window_loss(const Model& m, const Scenario& sc, const Dataset& ds, int episode,
                   int offset, int horizon);

// Minibatch adaptive-moment descent over sampled windows. Keeps the
// best-validation parameters; per-window gradients are accumulated in window
// order, so results do not depend on the worker count. Windows that blow up
// are skipped and counted. Throws NumericalError if validation goes NaN.
FitResult fit(Model& m, const Scenario& sc, const Dataset& ds, const TrainConfig& cfg);

// Relabels every sigma sample with the model's own full-episode prediction
// (teacher-student protocol).
void relabel_sigma(Dataset& ds, const Model& teacher, const Scenario& sc);

struct PredictionCurves {
    // rel_err[e][i]: sum_substep |sigma_hat - sigma| / sum_substep |sigma|
    // for episode e at action step i.
    std::vector<std::vector<double>> per_episode;
    std::vector<double> mean;  // same ratio aggregated over episodes
};

// Full-horizon prediction error per action step over the given episodes.
PredictionCurves evaluate_prediction(const Model& m, const Scenario& sc, const Dataset& ds,
                                     int ep_begin, int ep_end, int horizon,
                                     bool zero_pml = false);

void write_history_csv(const std::vector<EpochStats>& history, const std::filesystem::path& p);

}  // namespace wavebench
