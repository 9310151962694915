#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "wavebench/train.hpp"

using namespace wavebench;

namespace {

Scenario sc() {
    Scenario s = testutil::tiny_scenario();
    s.latent_cells = 32;
    s.param_target = 6000;
    return s;
}

struct Fixture {
    Scenario s = sc();
    Dataset ds;
    Fixture() { ds = generate_dataset(s, 6, 17, 0); }
};

}  // namespace

TEST_CASE_FIXTURE(Fixture, "window loss basics") {
    Model m = Model::build(ModelKind::Aem, s, 5);

    SUBCASE("perfect predictions give zero loss") {
        const ActuationSpace space = actuation_space(s.robot);
        const SensorImage X = ds.sensor_image(0, 3);
        const DesignState d0 = ds.design_state(0, 3, space);
        std::vector<ActionSpec> actions = {ds.action(0, 3, space), ds.action(0, 4, space)};
        const auto yhat = predict(m, s, X, d0, actions, 3 * s.sim.action_period);
        Tape tape;
        const auto res =
            predict_loss_tape(tape, m, s, X, d0, actions, 3 * s.sim.action_period, yhat);
        CHECK(tape.value(res.loss).scalar_value() == 0.0);
    }

    SUBCASE("a silenced readout against sigma == k gives loss k^2") {
        Model quiet = Model::build(ModelKind::Aem, s, 5);
        quiet.params.at("read/w_raw").value.fill(-300.0);  // softplus underflows to zero
        const ActuationSpace space = actuation_space(s.robot);
        const SensorImage X = ds.sensor_image(0, 0);
        const DesignState d0 = ds.design_state(0, 0, space);
        std::vector<ActionSpec> actions = {ds.action(0, 0, space)};
        const double k = 1.7;
        std::vector<double> targets(substeps_per_action(s.sim), k);
        Tape tape;
        const auto res = predict_loss_tape(tape, quiet, s, X, d0, actions, 0.0, targets);
        CHECK(tape.value(res.loss).scalar_value() == doctest::Approx(k * k).epsilon(1e-12));
    }
}

TEST_CASE_FIXTURE(Fixture, "fit") {
    SUBCASE("lr = 0 leaves parameters unchanged and history has one row per epoch") {
        Model m = Model::build(ModelKind::Aem, s, 6);
        const auto before = m.params.at("enc/trunk_W").value.v;
        TrainConfig cfg;
        cfg.lr = 0.0;
        cfg.epochs = 3;
        cfg.windows_per_epoch = 4;
        cfg.batch = 2;
        cfg.horizon_actions = 2;
        cfg.val_fraction = 0.2;
        const FitResult fr = fit(m, s, ds, cfg);
        CHECK(fr.history.size() == 3);
        CHECK(m.params.at("enc/trunk_W").value.v == before);
        for (std::size_t i = 1; i < fr.history.size(); ++i)
            CHECK(fr.history[i].val_loss == fr.history[0].val_loss);
    }

    SUBCASE("training does not mutate the dataset") {
        Model m = Model::build(ModelKind::Aem, s, 6);
        std::uint64_t h0 = 0xcbf29ce484222325ULL;
        for (const auto& e : ds.episodes)
            h0 = fnv1a(e.sigma.data(), e.sigma.size() * sizeof(float), h0);
        TrainConfig cfg;
        cfg.epochs = 1;
        cfg.windows_per_epoch = 4;
        cfg.horizon_actions = 2;
        cfg.val_fraction = 0.2;
        fit(m, s, ds, cfg);
        std::uint64_t h1 = 0xcbf29ce484222325ULL;
        for (const auto& e : ds.episodes)
            h1 = fnv1a(e.sigma.data(), e.sigma.size() * sizeof(float), h1);
        CHECK(h0 == h1);
    }

    SUBCASE("fit is deterministic for a fixed seed across worker counts") {
        TrainConfig cfg;
        cfg.epochs = 2;
        cfg.windows_per_epoch = 6;
        cfg.batch = 3;
        cfg.horizon_actions = 2;
        cfg.val_fraction = 0.2;
        cfg.seed = 9;
        Model m1 = Model::build(ModelKind::Aem, s, 6);
        Model m2 = Model::build(ModelKind::Aem, s, 6);
        cfg.threads = 1;
        const FitResult r1 = fit(m1, s, ds, cfg);
        cfg.threads = 2;
        const FitResult r2 = fit(m2, s, ds, cfg);
        CHECK(m1.params.at("enc/trunk_W").value.v == m2.params.at("enc/trunk_W").value.v);
        CHECK(r1.best_val == r2.best_val);
    }

    SUBCASE("NaN targets abort with a divergence diagnostic") {
        Dataset bad = ds;
        for (auto& e : bad.episodes)
            for (auto& x : e.sigma) x = std::numeric_limits<float>::quiet_NaN();
        Model m = Model::build(ModelKind::Aem, s, 6);
        TrainConfig cfg;
        cfg.epochs = 1;
        cfg.windows_per_epoch = 2;
        cfg.horizon_actions = 2;
        cfg.val_fraction = 0.2;
        CHECK_THROWS_AS(fit(m, s, bad, cfg), NumericalError);
    }
}

TEST_CASE_FIXTURE(Fixture, "teacher-student smoke: loss drops and self-evaluation is exact") {
    // Relabel the dataset with a frozen teacher, then check that (a) the
    // teacher evaluates against its own labels with ~zero error, and (b) a
    // few epochs of fitting a student reduces validation loss.
    Model teacher = Model::build(ModelKind::Aem, s, 100);
    teacher.params.set_meta("meta/sigma_scale", 1.0);
    teacher.params.set_meta("meta/sensor_scale", 3.0);
    Dataset labeled = ds;
    relabel_sigma(labeled, teacher, s);

    const PredictionCurves self =
        evaluate_prediction(teacher, s, labeled, 4, 6, s.episode_steps);
    for (double e : self.mean) CHECK(e < 1e-3);  // float32 storage rounding only

    Model student = Model::build(ModelKind::Aem, s, 200);
    TrainConfig cfg;
    cfg.epochs = 8;
    cfg.windows_per_epoch = 24;
    cfg.batch = 4;
    cfg.horizon_actions = 4;
    cfg.val_fraction = 0.34;  // last 2 of 6 episodes
    cfg.lr = 3e-3;
    cfg.seed = 4;
    const FitResult fr = fit(student, s, labeled, cfg);
    REQUIRE(fr.history.size() == 8);
    CHECK(fr.best_val < fr.history.front().val_loss);
}

TEST_CASE_FIXTURE(Fixture, "evaluate_prediction normalization") {
    SUBCASE("a zero model has relative error 1 wherever sigma is nonzero") {
        Model m = Model::build(ModelKind::Aem, s, 5);
        m.params.at("read/w_raw").value.fill(-300.0);
        const PredictionCurves c = evaluate_prediction(m, s, ds, 0, 2, s.episode_steps);
        CHECK(static_cast<int>(c.mean.size()) == s.episode_steps);
        const int S = static_cast<int>(ds.header.substeps);
        int checked = 0;
        for (int i = 0; i < s.episode_steps; ++i) {
            double den = 0.0;
            for (int e = 0; e < 2; ++e) {
                const auto y = ds.sigma_window(e, i, 1);
                for (int k = 0; k < S; ++k) den += std::abs(y[k]);
            }
            if (den > 0.0) {
                CHECK(c.mean[i] == doctest::Approx(1.0).epsilon(1e-9));
                ++checked;
            } else {
                CHECK(c.mean[i] == 0.0);  // no signal, no error
            }
        }
        CHECK(checked > 5);  // the wave does reach the scatterer within the episode
    }

    SUBCASE("per-episode curves have the contracted length") {
        Model m = Model::build(ModelKind::Aem, s, 5);
        const PredictionCurves c = evaluate_prediction(m, s, ds, 0, 3, 10);
        CHECK(c.per_episode.size() == 3);
        for (const auto& curve : c.per_episode) CHECK(curve.size() == 10);
    }
}
