#include "wavebench/bench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace wavebench {

void BenchmarkSpec::validate() const {
    scenario.validate();
    mpc.validate();
    if (runs < 2) throw ConfigError("benchmark needs runs >= 2 for mean/stddev reporting");
    if (methods.empty()) throw ConfigError("benchmark needs at least one method");
    for (const auto& m : methods)
        if (m != "random" && m != "mpc-aem" && m != "mpc-node")
            throw ConfigError("unknown benchmark method: " + m);
}

std::string configuration_label(const Scenario& sc) {
    return "M=" + std::to_string(sc.robot.scatterer_count) + " (" + to_string(sc.robot.mode) + ")";
}

BenchmarkResult run_benchmark(const BenchmarkSpec& spec) {
    spec.validate();
    const Scenario& sc = spec.scenario;

    Model aem, node;
    bool have_aem = false, have_node = false;
    for (const auto& method : spec.methods) {
        if (method == "mpc-aem" && !have_aem) {
            if (spec.ckpt_aem.empty()) throw ConfigError("mpc-aem requires an AEM checkpoint");
            aem = Model::load(spec.ckpt_aem);
            have_aem = true;
        }
        if (method == "mpc-node" && !have_node) {
            if (spec.ckpt_node.empty()) throw ConfigError("mpc-node requires a NODE checkpoint");
            node = Model::load(spec.ckpt_node);
            have_node = true;
        }
    }

    MpcConfig mpc = spec.mpc;
    mpc.task = spec.task;

    if (!spec.out_dir.empty()) std::filesystem::create_directories(spec.out_dir);

    BenchmarkResult result;
    for (const auto& method : spec.methods) {
        ControllerKind kind = ControllerKind::Random;
        const Model* model = nullptr;
        if (method == "mpc-aem") {
            kind = ControllerKind::MpcAem;
            model = &aem;
        } else if (method == "mpc-node") {
            kind = ControllerKind::MpcNode;
            model = &node;
        }

        const double t_end = sc.episode_steps * sc.sim.action_period;
        std::vector<double> energies(spec.runs);
        std::vector<EpisodeMetrics> metrics(spec.runs);
        parallel_for(static_cast<std::size_t>(spec.runs), spec.threads, [&](std::size_t r) {
            Rng sub = Rng::substream(spec.seed, r);
            const std::uint64_t run_seed = sub.next_u64();
            metrics[r] = run_controlled_episode(sc, kind, model, mpc, sc.episode_steps, run_seed);
            // window [t/2, t]: the Table-I caption's [0.10 s, 0.20 s] at 200 steps
            energies[r] = steady_state_energy(metrics[r].sigma, 0.5 * t_end, t_end);
        });

        double mean = 0.0;
        for (double e : energies) mean += e;
        mean /= spec.runs;
        double var = 0.0;
        for (double e : energies) var += (e - mean) * (e - mean);
        const double stddev = std::sqrt(var / (spec.runs - 1));

        ReportRow row;
        row.configuration = configuration_label(sc);
        row.task = to_string(spec.task);
        row.method = method;
        row.mean = mean;
        row.stddev = stddev;
        row.runs = spec.runs;
        result.table.rows.push_back(row);
        result.energies.push_back(energies);

        if (!spec.out_dir.empty()) {
            for (int r = 0; r < spec.runs; ++r) {
                const auto p = spec.out_dir / (method + "_run" + std::to_string(r) + ".csv");
                write_metrics_csv(metrics[r], p);
            }
        }
    }

    if (!spec.out_dir.empty()) {
        emit_report_csv(result.table, spec.out_dir / "report.csv");
        emit_report_markdown(result.table, spec.out_dir / "report.md");
    }
    return result;
}

double frozen_design_energy(const Scenario& sc, const DesignState& d, int steps) {
    SimState state = make_state(sc.sim);
    state.mask = rasterize_scatterers(d, sc.sim);
    const int S = substeps_per_action(sc.sim);
    Signal sigma;
    sigma.dt = substep_dt(sc.sim);
    sigma.values.reserve(static_cast<std::size_t>(steps) * S);
    for (int i = 0; i < steps * S; ++i) {
        step(state, sc.sim, 1);
        sigma.values.push_back(scattered_energy(state, sc.sim, sc.task_region));
    }
    const double t_end = steps * sc.sim.action_period;
    return steady_state_energy(sigma, 0.5 * t_end, t_end);
}

namespace {

std::vector<double> lattice(double lo, double hi, int res) {
    std::vector<double> out;
    if (res <= 1) {
        out.push_back(0.5 * (lo + hi));
        return out;
    }
    for (int i = 0; i < res; ++i)
        out.push_back(lo + (hi - lo) * static_cast<double>(i) / (res - 1));
    return out;
}

struct FrozenCandidate {
    DesignState d;
};

}  // namespace

OracleResult oracle_frozen_config(const Scenario& sc, Task task, int grid_res, int radius_levels,
                                  int threads) {
    sc.validate();
    const RobotConfig& rc = sc.robot;
    const DesignRegion region = design_region(sc.sim, rc);
    const ActuationSpace space = actuation_space(rc);
    const int M = rc.scatterer_count;
    const bool maximize = task == Task::Focus;

    std::vector<double> radii;
    if (rc.mode == ActuationMode::Position) {
        radii.push_back(rc.r_init);  // radii are fixed in P mode
    } else {
        radii = lattice(rc.r_min, rc.r_max, radius_levels);
    }

    auto evaluate_all = [&](const std::vector<FrozenCandidate>& cands) {
        std::vector<double> vals(cands.size());
        parallel_for(cands.size(), threads, [&](std::size_t i) {
            vals[i] = frozen_design_energy(sc, cands[i].d, sc.episode_steps);
        });
        return vals;
    };

    auto better = [&](double a, double b) { return maximize ? a > b : a < b; };

    OracleResult result;

    if (M <= 2) {
        // Exhaustive over the lattice (positions x radii per scatterer).
        std::vector<FrozenCandidate> cands;
        if (M == 1) {
            for (double r : radii) {
                const auto xs = lattice(region.lo + r, region.hi - r, grid_res);
                for (double x : xs)
                    for (double y : xs) {
                        DesignState d;
                        d.space = space;
                        d.cx = {x};
                        d.cy = {y};
                        d.r = {r};
                        if (is_feasible(d, region, rc)) cands.push_back({std::move(d)});
                    }
            }
        } else {
            for (double r1 : radii)
                for (double r2 : radii) {
                    const auto xs1 = lattice(region.lo + r1, region.hi - r1, grid_res);
                    const auto xs2 = lattice(region.lo + r2, region.hi - r2, grid_res);
                    for (double x1 : xs1)
                        for (double y1 : xs1)
                            for (double x2 : xs2)
                                for (double y2 : xs2) {
                                    DesignState d;
                                    d.space = space;
                                    d.cx = {x1, x2};
                                    d.cy = {y1, y2};
                                    d.r = {r1, r2};
                                    if (is_feasible(d, region, rc)) cands.push_back({std::move(d)});
                                }
                }
        }
        if (cands.empty()) throw ConstraintViolation("oracle: no feasible lattice design");
        const auto vals = evaluate_all(cands);
        std::size_t best = 0;
        for (std::size_t i = 1; i < vals.size(); ++i)
            if (better(vals[i], vals[best])) best = i;
        result.best = cands[best].d;
        result.energy = vals[best];
        result.evaluated = static_cast<int>(cands.size());
        return result;
    }

    // Coordinate descent for M >= 3: sweep one scatterer at a time over the
    // lattice while the others stay frozen.
    Rng rng(12345);
    DesignState current = initial_design(sc, rng);
    double current_val = frozen_design_energy(sc, current, sc.episode_steps);
    int evaluated = 1;
    for (int sweep = 0; sweep < 3; ++sweep) {
        for (int i = 0; i < M; ++i) {
            std::vector<FrozenCandidate> cands;
            for (double r : radii) {
                const auto xs = lattice(region.lo + r, region.hi - r, grid_res);
                for (double x : xs)
                    for (double y : xs) {
                        DesignState d = current;
                        d.cx[i] = x;
                        d.cy[i] = y;
                        d.r[i] = r;
                        if (is_feasible(d, region, rc)) cands.push_back({std::move(d)});
                    }
            }
            if (cands.empty()) continue;
            const auto vals = evaluate_all(cands);
            evaluated += static_cast<int>(cands.size());
            std::size_t best = 0;
            for (std::size_t k = 1; k < vals.size(); ++k)
                if (better(vals[k], vals[best])) best = k;
            if (better(vals[best], current_val)) {
                current = cands[best].d;
                current_val = vals[best];
            }
        }
    }
    result.best = current;
    result.energy = current_val;
    result.evaluated = evaluated;
    return result;
}

LongTermReport long_term_prediction_report(const Model& aem, const Model& aem_nopml,
                                           const Model& node, const Scenario& sc,
                                           const Dataset& ds, int ep_begin, int ep_end,
                                           int horizon) {
    LongTermReport rep;
    rep.aem = evaluate_prediction(aem, sc, ds, ep_begin, ep_end, horizon, false);
    rep.aem_nopml = evaluate_prediction(aem_nopml, sc, ds, ep_begin, ep_end, horizon, false);
    rep.node = evaluate_prediction(node, sc, ds, ep_begin, ep_end, horizon, false);

    const int S = static_cast<int>(ds.header.substeps);
    rep.gt_mean.assign(horizon, 0.0);
    for (int e = ep_begin; e < ep_end; ++e) {
        const auto y = ds.sigma_window(e, 0, horizon);
        for (int i = 0; i < horizon; ++i) {
            double acc = 0.0;
            for (int k = 0; k < S; ++k) acc += std::abs(y[i * S + k]);
            rep.gt_mean[i] += acc / S;
        }
    }
    for (auto& x : rep.gt_mean) x /= (ep_end - ep_begin);
    return rep;
}

void write_long_term_csv(const LongTermReport& r, const std::filesystem::path& p) {
    std::ofstream out(p);
    if (!out) throw IoError("cannot open long-term csv: " + p.string());
    out << "step,gt_mean,aem_rel_err,aem_nopml_rel_err,node_rel_err\n";
    out.precision(10);
    for (std::size_t i = 0; i < r.gt_mean.size(); ++i)
        out << i << ',' << r.gt_mean[i] << ',' << r.aem.mean[i] << ',' << r.aem_nopml.mean[i]
            << ',' << r.node.mean[i] << '\n';
}

}  // namespace wavebench
