#include "wavebench/mpc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

namespace wavebench {

const char* to_string(Task t) { return t == Task::Suppress ? "suppress" : "focus"; }

Task task_from_string(const std::string& s) {
    if (s == "suppress") return Task::Suppress;
    if (s == "focus") return Task::Focus;
    throw ConfigError("unknown task '" + s + "' (expected suppress|focus)");
}

void MpcConfig::validate() const {
    if (horizon < 1) throw ConfigError("mpc horizon must be >= 1");
    if (candidates < 2) throw ConfigError("mpc candidates must be >= 2");
    if (!(elite_frac > 0.0 && elite_frac < 1.0))
        throw ConfigError("mpc elite fraction must lie in (0,1)");
    if (iterations < 1) throw ConfigError("mpc iterations must be >= 1");
    if (beta < 0.0) throw ConfigError("mpc beta must be >= 0");
}

std::vector<double> reference_signal(Task task, int total_substeps, double sigma_hi) {
    return std::vector<double>(static_cast<std::size_t>(total_substeps),
                               task == Task::Suppress ? 0.0 : sigma_hi);
}

namespace {

std::vector<ActionSpec> unflatten(const std::vector<double>& flat, const ActuationSpace& space,
                                  int horizon) {
    const int A = space.action_dim();
    std::vector<ActionSpec> actions(horizon);
    for (int h = 0; h < horizon; ++h) {
        actions[h].rates.assign(flat.begin() + static_cast<std::size_t>(h) * A,
                                flat.begin() + static_cast<std::size_t>(h + 1) * A);
        actions[h] = clamp_action(std::move(actions[h]), space);
    }
    return actions;
}

double sequence_cost(const Model& m, const Scenario& sc, const EncodedWave& enc,
                     const std::vector<ActionSpec>& actions, const DesignState& d0, double t0,
                     const std::vector<double>& ref, double beta, double dt_sub,
                     double action_period) {
    try {
        const DesignPlan plan = plan_design(sc, d0, actions);
        const std::vector<Tensor> controls = encode_design(m, plan.instants);
        const std::vector<Tensor> traj = rollout(m, enc, controls, t0);
        const std::vector<double> yhat = readout(m, traj);
        double cost = 0.0;
        for (std::size_t k = 0; k < yhat.size(); ++k) {
            const double d = yhat[k] - ref[k];
            cost += d * d * dt_sub;
        }
        for (const auto& a : actions) {
            double n2 = 0.0;
            for (double r : a.rates) n2 += r * r;
            cost += beta * n2 * action_period;
        }
        return std::isfinite(cost) ? cost : std::numeric_limits<double>::infinity();
    } catch (const NumericalError&) {
        return std::numeric_limits<double>::infinity();
    }
}

}  // namespace

PlanResult plan(const Model& m, const Scenario& sc, const SensorImage& X, const DesignState& d0,
                double t0, const MpcConfig& cfg, Rng& rng) {
    cfg.validate();
    const ActuationSpace space = actuation_space(sc.robot);
    const int A = space.action_dim();
    const int H = cfg.horizon;
    const int dims = H * A;
    const int S = substeps_per_action(sc.sim);
    const double dt_sub = substep_dt(sc.sim);

    double sigma_hi = cfg.sigma_hi;
    if (cfg.task == Task::Focus && sigma_hi <= 0.0)
        sigma_hi = 10.0 * m.params.meta("meta/sigma_max");
    const std::vector<double> ref = reference_signal(cfg.task, H * S, sigma_hi);

    const EncodedWave enc = encode_wave(m, X);

    std::vector<double> mean(dims, 0.0);
    std::vector<double> stddev(dims);
    for (int i = 0; i < dims; ++i) stddev[i] = 0.5 * space.bound_for(i % A);

    std::vector<double> best_flat;
    double best_cost = std::numeric_limits<double>::infinity();
    PlanResult result;

    const int K = cfg.candidates;
    const int n_elite = std::max(1, static_cast<int>(std::lround(cfg.elite_frac * K)));
    std::vector<std::vector<double>> cand(K, std::vector<double>(dims));
    std::vector<double> costs(K);

    for (int iter = 0; iter < cfg.iterations; ++iter) {
        // Candidate 0 is the mean itself; candidate 1 carries the incumbent.
        for (int c = 0; c < K; ++c) {
            if (c == 0) {
                cand[c] = mean;
            } else if (c == 1 && !best_flat.empty()) {
                cand[c] = best_flat;
            } else {
                for (int i = 0; i < dims; ++i) {
                    const double b = space.bound_for(i % A);
                    cand[c][i] = std::clamp(mean[i] + stddev[i] * rng.normal(), -b, b);
                }
            }
        }

        parallel_for(static_cast<std::size_t>(K), 0, [&](std::size_t c) {
            const auto actions = unflatten(cand[c], space, H);
            costs[c] = sequence_cost(m, sc, enc, actions, d0, t0, ref, cfg.beta, dt_sub,
                                     sc.sim.action_period);
        });

        std::vector<int> order(K);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return costs[a] < costs[b]; });

        if (costs[order[0]] < best_cost) {
            best_cost = costs[order[0]];
            best_flat = cand[order[0]];
        }
        result.iteration_best.push_back(best_cost);

        // Refit the sampling distribution on the elites.
        for (int i = 0; i < dims; ++i) {
            double mu = 0.0;
            for (int e = 0; e < n_elite; ++e) mu += cand[order[e]][i];
            mu /= n_elite;
            double var = 0.0;
            for (int e = 0; e < n_elite; ++e) {
                const double d = cand[order[e]][i] - mu;
                var += d * d;
            }
            var /= n_elite;
            mean[i] = mu;
            stddev[i] = std::max(std::sqrt(var), 1e-3 * space.bound_for(i % A));
        }
    }

    if (best_flat.empty()) {
        // Every candidate failed; fall back to the null action.
        result.first = zero_action(space);
        result.best_cost = std::numeric_limits<double>::infinity();
        return result;
    }
    const auto actions = unflatten(best_flat, space, H);
    result.first = actions.front();
    result.best_cost = best_cost;
    return result;
}

EpisodeMetrics run_controlled_episode(const Scenario& sc, ControllerKind controller,
                                      const Model* model, const MpcConfig& cfg, int steps,
                                      std::uint64_t seed) {
    if (controller != ControllerKind::Random) {
        if (model == nullptr) throw ConfigError("MPC controller needs a model checkpoint");
        if (model->def.config_hash != sc.env_hash())
            throw ConfigError("checkpoint was trained under a different environment config");
        if ((controller == ControllerKind::MpcAem) != (model->def.kind == ModelKind::Aem))
            throw ConfigError("controller kind does not match the checkpoint model kind");
    }
    const ActuationSpace space = actuation_space(sc.robot);
    const DesignRegion region = design_region(sc.sim, sc.robot);
    const int S = substeps_per_action(sc.sim);

    EpisodeMetrics out;
    out.seed = seed;
    out.sigma.dt = substep_dt(sc.sim);
    out.sigma.label = to_string(sc.task_region);

    Rng rng(seed);
    SimState state = make_state(sc.sim);
    DesignState design = initial_design(sc, rng);

    for (int step_i = 0; step_i < steps; ++step_i) {
        const SensorImage X = sensor_read(state, sc.sim);
        ActionSpec a;
        const auto t_plan0 = std::chrono::steady_clock::now();
        if (controller == ControllerKind::Random) {
            a = random_action(space, rng);
        } else {
            Rng plan_rng = Rng::substream(seed, 0x9000 + static_cast<std::uint64_t>(step_i));
            const double t0 = step_i * sc.sim.action_period;
            a = plan(*model, sc, X, design, t0, cfg, plan_rng).first;
        }
        out.plan_ms.push_back(
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_plan0)
                .count());

        const auto traj = integrate_design(design, a, sc.sim.action_period, S, region, sc.robot);
        out.designs.push_back(traj.front().flat());
        out.actions.push_back(action_to_design_rates(a, space));
        const WindowResult res = run_window(state, traj, sc.sim, sc.task_region);
        out.sigma.values.insert(out.sigma.values.end(), res.sigma.values.begin(),
                                res.sigma.values.end());
        design = traj.back();
    }
    return out;
}

double steady_state_energy(const Signal& sigma, double t0, double t1) {
    if (sigma.dt <= 0.0 || sigma.values.empty())
        throw WindowOutOfRange("steady_state_energy: empty signal");
    const double duration = sigma.values.size() * sigma.dt;
    const double eps = 1e-9 * sigma.dt;
    if (t0 < -eps || t1 > duration + eps || t0 >= t1)
        throw WindowOutOfRange("steady_state_energy: window outside the signal span");
    double acc = 0.0;
    int n = 0;
    for (std::size_t k = 0; k < sigma.values.size(); ++k) {
        const double t = (static_cast<double>(k) + 1.0) * sigma.dt;
        if (t >= t0 - eps && t <= t1 + eps) {
            acc += sigma.values[k];
            ++n;
        }
    }
    if (n == 0) throw WindowOutOfRange("steady_state_energy: no samples in window");
    return acc / n;
}

void write_metrics_csv(const EpisodeMetrics& m, const std::filesystem::path& p) {
    std::ofstream out(p);
    if (!out) throw IoError("cannot open metrics csv: " + p.string());
    const std::size_t steps = m.designs.size();
    const std::size_t S = steps == 0 ? 0 : m.sigma.values.size() / steps;
    const std::size_t dd = steps == 0 ? 0 : m.designs.front().size();
    out << "step,t,sigma";
    for (std::size_t i = 0; i < dd; ++i) out << ",design" << i;
    for (std::size_t i = 0; i < dd; ++i) out << ",action" << i;
    out << ",plan_ms\n";
    out.precision(17);
    for (std::size_t step_i = 0; step_i < steps; ++step_i) {
        for (std::size_t k = 0; k < S; ++k) {
            const std::size_t idx = step_i * S + k;
            out << step_i << ',' << (static_cast<double>(idx) + 1.0) * m.sigma.dt << ','
                << m.sigma.values[idx];
            for (double x : m.designs[step_i]) out << ',' << x;
            for (double x : m.actions[step_i]) out << ',' << x;
            out << ',' << m.plan_ms[step_i] << '\n';
        }
    }
    if (!out) throw IoError("failed writing metrics csv: " + p.string());
}

}  // namespace wavebench
