#pragma once

#include <filesystem>
#include <vector>

#include "wavebench/config.hpp"
#include "wavebench/field2d.hpp"
#include "wavebench/params.hpp"
#include "wavebench/robot.hpp"
#include "wavebench/tape.hpp"

namespace wavebench {

enum class ModelKind { Aem, Node };

struct LatentGrid {
    int cells = 128;
    double dx = 0.0;    // latent cell size
    double c0 = 0.0;    // latent base speed
    double dt = 0.0;    // latent step, aligned with the environment substep
    double cfl_safety = 0.7;

    // Largest stable wave-speed multiplier for this dt.
    double max_speed_multiplier() const { return cfl_safety * dx / (c0 * dt); }
};

// Architecture resolved against a scenario. The trunk width is solved so the
// total trainable count hits the scenario's parameter budget; the NODE
// baseline solves its own trunk width to match the AEM count within 1%.
struct ModelDef {
    ModelKind kind = ModelKind::Aem;
    int sensor_n = 64;
    int latent_cells = 128;
    int conv1_ch = 8;
    int conv2_ch = 16;
    int trunk_width = 0;
    int robot_hidden = 128;
    int dyn_hidden = 128;  // NODE dynamics MLP width
    int design_dim = 0;
    LatentGrid grid;
    double f0 = 0.0;          // forcing carrier frequency
    int substeps = 0;         // latent steps per action interval
    double action_period = 0.0;
    double pos_scale = 0.0;   // design-input normalization
    double rad_scale = 0.0;
    // Output scales for the damping and forcing heads. The latent PML must
    // act within one training window (decay rates of order 1e2/s, like the
    // environment's radiation loss), and the forcing must sustain an O(1)
    // latent amplitude against it.
    double l_scale = 100.0;
    double s_scale = 100.0;
    ActuationMode mode = ActuationMode::Position;
    int scatterers = 1;
    std::uint64_t config_hash = 0;

    int flat_dim() const { return conv2_ch * (sensor_n / 8) * (sensor_n / 8); }
    int state_dim() const { return 2 * latent_cells; }  // NODE hidden size

    static ModelDef make(ModelKind kind, const Scenario& sc);
};

std::size_t count_params(const ModelDef& def);

struct Model {
    ModelDef def;
    ParamStore params;

    static Model build(ModelKind kind, const Scenario& sc, std::uint64_t seed);
    // Forces the latent damping field to zero (the no-PML ablation). The
    // parameter count is untouched; the L head's output scale becomes zero.
    void disable_latent_pml();
    void save(const std::filesystem::path& p) const;
    static Model load(const std::filesystem::path& p);

    double sigma_scale() const { return params.meta("meta/sigma_scale"); }
    double sensor_scale() const { return params.meta("meta/sensor_scale"); }
};

// ---- inference path (no tape) ----

struct EncodedWave {
    Tensor u0, v0;  // latent initial condition g
    Tensor L, s;    // exogenous damping (trainable PML) and forcing amplitude
};

EncodedWave encode_wave(const Model& m, const SensorImage& X);

// One softplus-floored wave-speed multiplier field per control instant.
std::vector<Tensor> encode_design(const Model& m, const std::vector<DesignState>& instants);

// Latent trajectory over `instants.size()-1` action intervals; returns the
// post-step states z_1..z_T (T = intervals * substeps). Throws
// NumericalBlowup when a control field exceeds the stability multiplier.
std::vector<Tensor> rollout(const Model& m, const EncodedWave& enc,
                            const std::vector<Tensor>& controls, double t0,
                            bool zero_pml = false);

// sigma_hat(t) = sigma_scale * sum_i w_i (v_i^2 + (c0 du/dx)_i^2) dx
std::vector<double> readout(const Model& m, const std::vector<Tensor>& traj);

// Full pipeline: encode, integrate + encode the design, integrate latent
// dynamics, read out the energy signal. `t0` is the absolute time of X.
std::vector<double> predict(const Model& m, const Scenario& sc, const SensorImage& X,
                            const DesignState& d0, const std::vector<ActionSpec>& actions,
                            double t0, bool zero_pml = false);

// ---- training path (tape) ----

struct PredictTapeResult {
    std::vector<int> sigma_nodes;  // one scalar node per substep
    int loss = -1;                 // mean squared error vs targets
};

// Builds the differentiable graph for one training window and returns the
// loss node (targets constant). Call tape.backward(result.loss) afterwards;
// gradients land in `ps`, which may be a per-worker clone of the model store.
PredictTapeResult predict_loss_tape(Tape& tape, const ModelDef& def, ParamStore& ps,
                                    const Scenario& sc, const SensorImage& X,
                                    const DesignState& d0,
                                    const std::vector<ActionSpec>& actions, double t0,
                                    const std::vector<double>& sigma_target);

inline PredictTapeResult predict_loss_tape(Tape& tape, Model& m, const Scenario& sc,
                                           const SensorImage& X, const DesignState& d0,
                                           const std::vector<ActionSpec>& actions, double t0,
                                           const std::vector<double>& sigma_target) {
    return predict_loss_tape(tape, m.def, m.params, sc, X, d0, actions, t0, sigma_target);
}

// Discrete residuals of the latent dynamics and initial condition evaluated
// on a stored trajectory; both are zero up to rounding by construction.
struct LatentResiduals {
    double pde_residual = 0.0;  // max |z_{k+1} - step(z_k)|
    double ic_residual = 0.0;   // max |z_0 - g|
};
LatentResiduals latent_residuals(const Model& m, const EncodedWave& enc,
                                 const std::vector<Tensor>& controls, double t0,
                                 const std::vector<Tensor>& traj);

// Design instants at action boundaries plus the full substep trajectory for
// the environment (both sides see identical projected designs).
struct DesignPlan {
    std::vector<DesignState> instants;               // actions.size()+1 boundary states
    std::vector<std::vector<DesignState>> intervals; // per action: substeps+1 samples
};
DesignPlan plan_design(const Scenario& sc, const DesignState& d0,
                       const std::vector<ActionSpec>& actions);

}  // namespace wavebench
