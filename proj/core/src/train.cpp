#include "wavebench/train.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

namespace wavebench {

namespace {

struct WindowInputs {
    SensorImage X;
    DesignState d0;
    std::vector<ActionSpec> actions;
    std::vector<double> sigma;
    double t0 = 0.0;
};

WindowInputs gather_window(const Scenario& sc, const Dataset& ds, int episode, int offset,
                           int horizon) {
    const ActuationSpace space = actuation_space(sc.robot);
    WindowInputs w;
    w.X = ds.sensor_image(episode, offset);
    w.d0 = ds.design_state(episode, offset, space);
    w.actions.reserve(horizon);
    for (int k = 0; k < horizon; ++k) w.actions.push_back(ds.action(episode, offset + k, space));
    w.sigma = ds.sigma_window(episode, offset, horizon);
    w.t0 = offset * ds.header.action_period;
    return w;
}

double mse(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc / static_cast<double>(a.size());
}

}  // namespace

void TrainConfig::validate() const {
    if (horizon_actions < 1) throw ConfigError("horizon_actions must be >= 1");
    if (!(val_fraction > 0.0 && val_fraction < 1.0))
        throw ConfigError("val_fraction must lie in (0,1)");
    if (batch < 1) throw ConfigError("batch must be >= 1");
    if (epochs < 0) throw ConfigError("epochs must be >= 0");
    if (windows_per_epoch < 1) throw ConfigError("windows_per_epoch must be >= 1");
}

double window_loss(const Model& m, const Scenario& sc, const Dataset& ds, int episode,
                   int offset, int horizon) {
    const WindowInputs w = gather_window(sc, ds, episode, offset, horizon);
    const std::vector<double> yhat = predict(m, sc, w.X, w.d0, w.actions, w.t0);
    return mse(yhat, w.sigma);
}

namespace {

// Deterministic validation set: disjoint windows at stride `horizon` over
// each validation episode, identical across epochs.
std::vector<WindowRef> validation_windows(const Dataset& ds, int ep_begin, int ep_end,
                                          int horizon) {
    std::vector<WindowRef> out;
    const int steps = static_cast<int>(ds.header.steps);
    for (int e = ep_begin; e < ep_end; ++e)
        for (int off = 0; off + horizon <= steps; off += horizon) out.push_back({e, off});
    return out;
}

double mean_loss_over(const Model& m, const Scenario& sc, const Dataset& ds,
                      const std::vector<WindowRef>& windows, int horizon, int threads,
                      int* skipped) {
    std::vector<double> losses(windows.size(), std::numeric_limits<double>::quiet_NaN());
    parallel_for(windows.size(), threads, [&](std::size_t i) {
        try {
            losses[i] = window_loss(m, sc, ds, windows[i].episode, windows[i].offset, horizon);
        } catch (const NumericalError&) {
            // left as NaN -> counted below
        }
    });
    double acc = 0.0;
    int n = 0, skip = 0;
    for (double l : losses) {
        if (std::isfinite(l)) {
            acc += l;
            ++n;
        } else {
            ++skip;
        }
    }
    if (skipped) *skipped += skip;
    if (n == 0) return std::numeric_limits<double>::quiet_NaN();
    return acc / n;
}

}  // namespace

FitResult fit(Model& m, const Scenario& sc, const Dataset& ds, const TrainConfig& cfg) {
    cfg.validate();
    if (ds.episodes.empty()) throw ConfigError("fit: empty dataset");
    if (ds.header.config_hash != sc.env_hash())
        throw ConfigError("fit: dataset was generated under a different environment config");
    const int horizon = cfg.horizon_actions;
    if (horizon > static_cast<int>(ds.header.steps))
        throw ConfigError("fit: horizon exceeds episode length");

    const int n_ep = static_cast<int>(ds.header.episodes);
    int n_val = std::max(1, static_cast<int>(std::lround(n_ep * cfg.val_fraction)));
    if (n_val >= n_ep) n_val = n_ep - 1;
    if (n_val < 1) throw ConfigError("fit: need at least two episodes for a validation split");
    const int n_train = n_ep - n_val;

    // Data-dependent scales, fixed before training and kept in the checkpoint.
    const double sig_max = ds.max_abs_sigma(0, n_train);
    const double sen_max = ds.max_abs_sensor(0, n_train);
    m.params.set_meta("meta/sigma_scale", sig_max > 0.0 ? sig_max : 1.0);
    m.params.set_meta("meta/sensor_scale", sen_max > 0.0 ? 1.0 / sen_max : 1.0);
    m.params.set_meta("meta/sigma_max", sig_max);

    const auto val_set = validation_windows(ds, n_train, n_ep, horizon);
    const AdamConfig adam{cfg.lr, 0.9, 0.999, 1e-8};

    // One parameter clone per batch slot: windows evaluate in parallel on any
    // worker count, and gradients accumulate in window order afterwards.
    std::vector<ParamStore> slots;
    for (int i = 0; i < cfg.batch; ++i) slots.push_back(m.params);

    FitResult result;
    result.best_val = std::numeric_limits<double>::infinity();
    std::map<std::string, Tensor> best_values;
    {
        int pre_skip = 0;
        result.initial_val = mean_loss_over(m, sc, ds, val_set, horizon, cfg.threads, &pre_skip);
    }

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto t_start = std::chrono::steady_clock::now();
        Rng rng = Rng::substream(cfg.seed, static_cast<std::uint64_t>(epoch));
        double train_acc = 0.0;
        int train_n = 0;
        int skipped = 0;

        int done = 0;
        while (done < cfg.windows_per_epoch) {
            const int bsz = std::min(cfg.batch, cfg.windows_per_epoch - done);
            std::vector<WindowRef> refs(bsz);
            for (auto& r : refs) {
                r.episode = static_cast<int>(rng.uniform_index(n_train));
                r.offset = static_cast<int>(rng.uniform_index(ds.header.steps - horizon + 1));
            }
            std::vector<double> losses(bsz, std::numeric_limits<double>::quiet_NaN());

            parallel_for(static_cast<std::size_t>(bsz), cfg.threads, [&](std::size_t i) {
                ParamStore& slot = slots[i];
                for (auto& [name, b] : slot.blocks()) b.value = m.params.at(name).value;
                slot.zero_grad();
                try {
                    const WindowInputs w =
                        gather_window(sc, ds, refs[i].episode, refs[i].offset, horizon);
                    Tape tape;
                    const auto res = predict_loss_tape(tape, m.def, slot, sc, w.X, w.d0,
                                                       w.actions, w.t0, w.sigma);
                    const double l = tape.value(res.loss).scalar_value();
                    if (!std::isfinite(l)) return;
                    tape.backward(res.loss);
                    losses[i] = l;
                } catch (const NumericalError&) {
                    // skipped window
                }
            });

            m.params.zero_grad();
            int batch_ok = 0;
            for (int i = 0; i < bsz; ++i)
                if (std::isfinite(losses[i])) ++batch_ok;
            if (batch_ok > 0) {
                for (int i = 0; i < bsz; ++i) {
                    if (!std::isfinite(losses[i])) continue;
                    for (auto& [name, b] : m.params.blocks()) {
                        if (!b.trainable) continue;
                        const auto& g = slots[i].at(name).grad;
                        for (std::size_t j = 0; j < b.grad.numel(); ++j) b.grad.v[j] += g.v[j];
                    }
                }
                const double inv = 1.0 / batch_ok;
                for (auto& [name, b] : m.params.blocks())
                    if (b.trainable)
                        for (auto& g : b.grad.v) g *= inv;
                m.params.adam_step(adam);
            }
            for (int i = 0; i < bsz; ++i) {
                if (std::isfinite(losses[i])) {
                    train_acc += losses[i];
                    ++train_n;
                } else {
                    ++skipped;
                }
            }
            done += bsz;
        }

        const double val = mean_loss_over(m, sc, ds, val_set, horizon, cfg.threads, &skipped);
        if (!std::isfinite(val))
            throw NumericalError("training diverged: validation loss is not finite at epoch " +
                                 std::to_string(epoch));
        if (val < result.best_val) {
            result.best_val = val;
            result.best_epoch = epoch;
            best_values.clear();
            for (const auto& [name, b] : m.params.blocks()) best_values.emplace(name, b.value);
        }

        EpochStats st;
        st.epoch = epoch;
        st.train_loss = train_n > 0 ? train_acc / train_n : std::numeric_limits<double>::quiet_NaN();
        st.val_loss = val;
        st.skipped_windows = skipped;
        st.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        result.history.push_back(st);
    }

    // Keep the best-validation parameters.
    if (!best_values.empty())
        for (auto& [name, b] : m.params.blocks()) b.value = best_values.at(name);
    return result;
}

void relabel_sigma(Dataset& ds, const Model& teacher, const Scenario& sc) {
    const ActuationSpace space = actuation_space(sc.robot);
    const int steps = static_cast<int>(ds.header.steps);
    const int S = static_cast<int>(ds.header.substeps);
    for (int ep = 0; ep < static_cast<int>(ds.episodes.size()); ++ep) {
        const SensorImage X = ds.sensor_image(ep, 0);
        const DesignState d0 = ds.design_state(ep, 0, space);
        std::vector<ActionSpec> actions;
        actions.reserve(steps);
        for (int k = 0; k < steps; ++k) actions.push_back(ds.action(ep, k, space));
        const std::vector<double> yhat = predict(teacher, sc, X, d0, actions, 0.0);
        for (int k = 0; k < steps * S; ++k) ds.episodes[ep].sigma[k] = static_cast<float>(yhat[k]);
    }
}

PredictionCurves evaluate_prediction(const Model& m, const Scenario& sc, const Dataset& ds,
                                     int ep_begin, int ep_end, int horizon, bool zero_pml) {
    const ActuationSpace space = actuation_space(sc.robot);
    const int S = static_cast<int>(ds.header.substeps);
    PredictionCurves curves;
    curves.per_episode.resize(ep_end - ep_begin);
    std::vector<double> num(horizon, 0.0), den(horizon, 0.0);
    for (int e = ep_begin; e < ep_end; ++e) {
        const SensorImage X = ds.sensor_image(e, 0);
        const DesignState d0 = ds.design_state(e, 0, space);
        std::vector<ActionSpec> actions;
        for (int k = 0; k < horizon; ++k) actions.push_back(ds.action(e, k, space));
        const std::vector<double> yhat = predict(m, sc, X, d0, actions, 0.0, zero_pml);
        const std::vector<double> y = ds.sigma_window(e, 0, horizon);
        std::vector<double>& curve = curves.per_episode[e - ep_begin];
        curve.resize(horizon);
        for (int i = 0; i < horizon; ++i) {
            double n = 0.0, d = 0.0;
            for (int k = 0; k < S; ++k) {
                n += std::abs(yhat[i * S + k] - y[i * S + k]);
                d += std::abs(y[i * S + k]);
            }
            curve[i] = d > 0.0 ? n / d : (n > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
            num[i] += n;
            den[i] += d;
        }
    }
    curves.mean.resize(horizon);
    for (int i = 0; i < horizon; ++i)
        curves.mean[i] = den[i] > 0.0 ? num[i] / den[i]
                                      : (num[i] > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    return curves;
}

void write_history_csv(const std::vector<EpochStats>& history, const std::filesystem::path& p) {
    std::ofstream out(p);
    if (!out) throw IoError("cannot open history csv: " + p.string());
    out << "epoch,train_loss,val_loss,skipped_windows,wall_seconds\n";
    for (const auto& h : history)
        out << h.epoch << ',' << h.train_loss << ',' << h.val_loss << ',' << h.skipped_windows
            << ',' << h.wall_seconds << '\n';
}

}  // namespace wavebench
