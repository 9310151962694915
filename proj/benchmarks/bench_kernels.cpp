// Microbenchmarks for the hot paths: the 2D field substep, scatterer
// rasterization, the latent rollout, the wave-encoder forward pass, and one
// training window (forward + backward).

#include <benchmark/benchmark.h>

#include "wavebench/aem.hpp"
#include "wavebench/dataset.hpp"

using namespace wavebench;

namespace {

Scenario desk_scenario() {
    Scenario sc;
    sc.sim.sensor_n = 32;
    sc.validate();
    return sc;
}

void BM_FieldSubstep(benchmark::State& state) {
    const Scenario sc = desk_scenario();
    SimState st = make_state(sc.sim);
    DesignState d;
    d.space = actuation_space(sc.robot);
    d.cx = {0.0};
    d.cy = {0.0};
    d.r = {0.5};
    st.mask = rasterize_scatterers(d, sc.sim);
    for (auto _ : state) {
        step(st, sc.sim, 1);
        benchmark::DoNotOptimize(st.px_tot.data());
    }
    state.SetItemsProcessed(state.iterations() * sc.sim.grid_n * sc.sim.grid_n * 2);
}
BENCHMARK(BM_FieldSubstep);

void BM_Rasterize(benchmark::State& state) {
    const Scenario sc = desk_scenario();
    DesignState d;
    d.space = actuation_space(sc.robot);
    d.cx = {1.0};
    d.cy = {-2.0};
    d.r = {0.8};
    for (auto _ : state) {
        auto mask = rasterize_scatterers(d, sc.sim);
        benchmark::DoNotOptimize(mask.data());
    }
}
BENCHMARK(BM_Rasterize);

void BM_SensorRead(benchmark::State& state) {
    const Scenario sc = desk_scenario();
    SimState st = make_state(sc.sim);
    step(st, sc.sim, 50);
    for (auto _ : state) {
        auto img = sensor_read(st, sc.sim);
        benchmark::DoNotOptimize(img.v.data());
    }
}
BENCHMARK(BM_SensorRead);

void BM_EncodeWave(benchmark::State& state) {
    const Scenario sc = desk_scenario();
    const Model m = Model::build(ModelKind::Aem, sc, 1);
    Rng rng(2);
    SensorImage X;
    X.d1 = X.d2 = sc.sim.sensor_n;
    X.v.resize(static_cast<std::size_t>(X.d1) * X.d2);
    for (auto& v : X.v) v = rng.uniform(-0.3, 0.3);
    for (auto _ : state) {
        const EncodedWave enc = encode_wave(m, X);
        benchmark::DoNotOptimize(enc.u0.v.data());
    }
}
BENCHMARK(BM_EncodeWave);

void BM_LatentRollout20(benchmark::State& state) {
    const Scenario sc = desk_scenario();
    const Model m = Model::build(ModelKind::Aem, sc, 1);
    Rng rng(2);
    SensorImage X;
    X.d1 = X.d2 = sc.sim.sensor_n;
    X.v.resize(static_cast<std::size_t>(X.d1) * X.d2);
    for (auto& v : X.v) v = rng.uniform(-0.3, 0.3);
    const EncodedWave enc = encode_wave(m, X);
    DesignState d;
    d.space = actuation_space(sc.robot);
    d.cx = {0.0};
    d.cy = {0.0};
    d.r = {0.5};
    std::vector<DesignState> instants(21, d);
    const auto controls = encode_design(m, instants);
    for (auto _ : state) {
        const auto traj = rollout(m, enc, controls, 0.0);
        benchmark::DoNotOptimize(traj.back().v.data());
    }
}
BENCHMARK(BM_LatentRollout20);

void BM_TrainWindow(benchmark::State& state) {
    const Scenario sc = desk_scenario();
    Model m = Model::build(ModelKind::Aem, sc, 1);
    Rng rng(3);
    SensorImage X;
    X.d1 = X.d2 = sc.sim.sensor_n;
    X.v.resize(static_cast<std::size_t>(X.d1) * X.d2);
    for (auto& v : X.v) v = rng.uniform(-0.3, 0.3);
    DesignState d;
    d.space = actuation_space(sc.robot);
    d.cx = {0.0};
    d.cy = {0.0};
    d.r = {0.5};
    std::vector<ActionSpec> actions;
    for (int k = 0; k < 20; ++k) actions.push_back(random_action(d.space, rng));
    std::vector<double> targets(static_cast<std::size_t>(20) * substeps_per_action(sc.sim), 0.1);
    for (auto _ : state) {
        m.params.zero_grad();
        Tape tape;
        const auto res = predict_loss_tape(tape, m, sc, X, d, actions, 0.0, targets);
        tape.backward(res.loss);
        benchmark::DoNotOptimize(m.params.at("enc/trunk_W").grad.v.data());
    }
}
BENCHMARK(BM_TrainWindow);

}  // namespace

BENCHMARK_MAIN();
