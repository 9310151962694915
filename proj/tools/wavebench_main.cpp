// wavebench: one binary for the full pipeline.
//
//   simulate   uncontrolled episode, sigma CSV + optional field snapshots
//   gen-data   random-policy dataset (WVDS)
//   train      fit an AEM or NODE surrogate on a dataset (WVCK checkpoint)
//   eval-pred  long-horizon prediction error curves
//   control    one closed-loop episode (random, mpc-aem, or mpc-node)
//   bench      multi-run benchmark report
//   oracle     brute-force frozen-design search
//   plot       SVG rendering of emitted CSVs
//
// Exit codes: 0 ok, 2 config error, 3 numerical failure, 4 I/O error.

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "wavebench/bench.hpp"
#include "wavebench/svg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace wavebench;

namespace {

struct ManifestWriter {
    std::string command;
    json args = json::object();
    std::vector<std::string> artifacts;
    std::vector<std::uint64_t> seeds;
    std::uint64_t config_hash = 0;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    void write(const fs::path& dir) const {
        json j;
        j["command"] = command;
        j["tool_version"] = kToolVersion;
        char hex[20];
        std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(config_hash));
        j["config_hash"] = hex;
        j["seeds"] = seeds;
        j["artifacts"] = artifacts;
        j["args"] = args;
        j["wall_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        fs::create_directories(dir);
        const fs::path tmp = dir / ".manifest.json.tmp";
        const fs::path dst = dir / "manifest.json";
        std::ofstream out(tmp);
        if (!out) throw IoError("cannot write manifest: " + tmp.string());
        out << j.dump(2) << '\n';
        out.close();
        fs::rename(tmp, dst);
    }
};

void write_sigma_csv(const Signal& sigma, const fs::path& p) {
    std::ofstream out(p);
    if (!out) throw IoError("cannot open sigma csv: " + p.string());
    out << "t,sigma\n";
    out.precision(17);
    for (std::size_t k = 0; k < sigma.values.size(); ++k)
        out << (static_cast<double>(k) + 1.0) * sigma.dt << ',' << sigma.values[k] << '\n';
}

void write_field_csv(const std::vector<double>& field, int n, const fs::path& p) {
    std::ofstream out(p);
    if (!out) throw IoError("cannot open field csv: " + p.string());
    out.precision(8);
    for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
            out << field[iy * n + ix];
            out << (ix + 1 == n ? '\n' : ',');
        }
    }
}

int cmd_simulate(const Scenario& sc, std::uint64_t seed, const fs::path& out_dir, int steps,
                 int snapshot_stride, ManifestWriter& mw) {
    fs::create_directories(out_dir);
    Rng rng(seed);
    SimState state = make_state(sc.sim);
    DesignState design = initial_design(sc, rng);
    const DesignRegion region = design_region(sc.sim, sc.robot);
    const int S = substeps_per_action(sc.sim);
    const ActionSpec null = zero_action(actuation_space(sc.robot));

    Signal sigma;
    sigma.dt = substep_dt(sc.sim);
    int snapshot_id = 0;
    for (int i = 0; i < steps; ++i) {
        const auto traj = integrate_design(design, null, sc.sim.action_period, S, region, sc.robot);
        const WindowResult res = run_window(state, traj, sc.sim, sc.task_region);
        sigma.values.insert(sigma.values.end(), res.sigma.values.begin(), res.sigma.values.end());
        design = traj.back();
        if (snapshot_stride > 0 && (i + 1) % snapshot_stride == 0) {
            char name[64];
            std::snprintf(name, sizeof(name), "snapshot_%04d.csv", snapshot_id++);
            write_field_csv(scattered_field(state, sc.sim), sc.sim.interior_n(), out_dir / name);
            mw.artifacts.push_back((out_dir / name).string());
        }
    }
    write_sigma_csv(sigma, out_dir / "sigma.csv");
    mw.artifacts.push_back((out_dir / "sigma.csv").string());
    std::cout << "simulate: " << steps << " steps, final sigma " << sigma.values.back() << "\n";
    return 0;
}

Scenario load_scenario(const std::string& path) {
    if (path.empty()) throw ConfigError("missing --config");
    return Scenario::from_file(path);
}

ControllerKind controller_from_string(const std::string& s) {
    if (s == "random") return ControllerKind::Random;
    if (s == "mpc-aem") return ControllerKind::MpcAem;
    if (s == "mpc-node") return ControllerKind::MpcNode;
    throw ConfigError("unknown controller '" + s + "'");
}

std::map<std::string, std::string> read_kv_file(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw IoError("cannot open spec file: " + p.string());
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto h = line.find('#');
        if (h != std::string::npos) line = line.substr(0, h);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
            return s;
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

BenchmarkSpec parse_bench_spec(const fs::path& p) {
    const auto kv = read_kv_file(p);
    const std::set<std::string> known = {
        "config",       "task",      "methods",        "runs",     "seed",
        "ckpt_aem",     "ckpt_node", "out_dir",        "mpc_horizon", "mpc_candidates",
        "mpc_elite",    "mpc_iterations", "mpc_beta",  "sigma_hi"};
    for (const auto& [k, v] : kv)
        if (!known.count(k)) throw ConfigError("unknown bench spec key '" + k + "'");
    BenchmarkSpec spec;
    if (!kv.count("config")) throw ConfigError("bench spec needs config=<scenario file>");
    fs::path base = p.parent_path();
    auto resolve = [&](const std::string& s) {
        fs::path q(s);
        return q.is_absolute() ? q : base / q;
    };
    spec.scenario = Scenario::from_file(resolve(kv.at("config")));
    if (kv.count("task")) spec.task = task_from_string(kv.at("task"));
    if (kv.count("methods")) {
        spec.methods.clear();
        std::stringstream ss(kv.at("methods"));
        std::string tok;
        while (std::getline(ss, tok, ',')) spec.methods.push_back(tok);
    }
    if (kv.count("runs")) spec.runs = std::stoi(kv.at("runs"));
    if (kv.count("seed")) spec.seed = std::stoull(kv.at("seed"));
    if (kv.count("ckpt_aem")) spec.ckpt_aem = resolve(kv.at("ckpt_aem"));
    if (kv.count("ckpt_node")) spec.ckpt_node = resolve(kv.at("ckpt_node"));
    if (kv.count("out_dir")) spec.out_dir = resolve(kv.at("out_dir"));
    if (kv.count("mpc_horizon")) spec.mpc.horizon = std::stoi(kv.at("mpc_horizon"));
    if (kv.count("mpc_candidates")) spec.mpc.candidates = std::stoi(kv.at("mpc_candidates"));
    if (kv.count("mpc_elite")) spec.mpc.elite_frac = std::stod(kv.at("mpc_elite"));
    if (kv.count("mpc_iterations")) spec.mpc.iterations = std::stoi(kv.at("mpc_iterations"));
    if (kv.count("mpc_beta")) spec.mpc.beta = std::stod(kv.at("mpc_beta"));
    if (kv.count("sigma_hi")) spec.mpc.sigma_hi = std::stod(kv.at("sigma_hi"));
    return spec;
}

// Column-wise CSV reader for plotting.
struct CsvData {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;
    std::vector<std::vector<std::string>> raw_rows;
};

CsvData read_csv(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw IoError("cannot open csv: " + p.string());
    CsvData d;
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty csv: " + p.string());
    std::stringstream hs(line);
    std::string tok;
    while (std::getline(hs, tok, ',')) d.header.push_back(tok);
    d.columns.resize(d.header.size());
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::vector<std::string> row;
        while (std::getline(ls, tok, ',')) row.push_back(tok);
        row.resize(d.header.size());
        for (std::size_t c = 0; c < row.size(); ++c) {
            try {
                d.columns[c].push_back(std::stod(row[c]));
            } catch (...) {
                d.columns[c].push_back(std::numeric_limits<double>::quiet_NaN());
            }
        }
        d.raw_rows.push_back(std::move(row));
    }
    return d;
}

int cmd_plot(const fs::path& in, const fs::path& out) {
    const CsvData d = read_csv(in);
    if (!d.header.empty() && d.header.front() == "configuration") {
        std::vector<std::string> labels;
        std::vector<double> values, errors;
        for (const auto& row : d.raw_rows) {
            labels.push_back(row[2] + " " + row[1]);
            values.push_back(std::stod(row[3]));
            errors.push_back(std::stod(row[4]));
        }
        svg_bar_chart(out, "steady-state scattered energy", labels, values, errors);
        return 0;
    }
    std::vector<SvgSeries> series;
    for (std::size_t c = 0; c < d.header.size(); ++c) {
        if (d.header[c] == "step" || d.header[c] == "t" || d.header[c] == "epoch") continue;
        bool numeric = true;
        for (double x : d.columns[c])
            if (std::isnan(x)) numeric = false;
        if (!numeric) continue;
        series.push_back({d.header[c], d.columns[c]});
    }
    if (series.empty()) throw ConfigError("no numeric columns to plot in " + in.string());
    svg_line_plot(out, in.filename().string(), series);
    return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"wavebench: scattered-wave manipulation testbed"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "worker threads (default: WAVEBENCH_THREADS or hardware)");

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "one uncontrolled episode");
    std::string sim_config, sim_out = "sim_out";
    std::uint64_t sim_seed = 1;
    int sim_steps = 200, sim_stride = 0;
    sim_cmd->add_option("--config", sim_config, "scenario file")->required();
    sim_cmd->add_option("--seed", sim_seed, "rng seed");
    sim_cmd->add_option("--out", sim_out, "output directory");
    sim_cmd->add_option("--steps", sim_steps, "action steps");
    sim_cmd->add_option("--snapshot-stride", sim_stride, "field snapshot every N steps (0 = off)");

    // gen-data
    auto* gen_cmd = app.add_subcommand("gen-data", "generate a random-policy dataset");
    std::string gen_config, gen_space, gen_out = "data.wvds";
    int gen_episodes = 10;
    std::uint64_t gen_seed = 1;
    gen_cmd->add_option("--config", gen_config, "scenario file")->required();
    gen_cmd->add_option("--episodes", gen_episodes, "episode count")->required();
    gen_cmd->add_option("--space", gen_space, "actuation space tag (R, P1, P2, P4, F2, ...)");
    gen_cmd->add_option("--out", gen_out, "dataset file");
    gen_cmd->add_option("--seed", gen_seed, "rng seed");

    // train
    auto* train_cmd = app.add_subcommand("train", "fit a surrogate on a dataset");
    std::string tr_data, tr_model = "aem", tr_config, tr_out = "model.wvck";
    TrainConfig tr_cfg;
    train_cmd->add_option("--data", tr_data, "dataset file")->required();
    train_cmd->add_option("--model", tr_model, "aem | node")
        ->check(CLI::IsMember({"aem", "node"}));
    train_cmd->add_option("--config", tr_config, "scenario file")->required();
    train_cmd->add_option("--out", tr_out, "checkpoint file");
    train_cmd->add_option("--epochs", tr_cfg.epochs, "epoch budget");
    train_cmd->add_option("--lr", tr_cfg.lr, "learning rate");
    train_cmd->add_option("--batch", tr_cfg.batch, "windows per update");
    train_cmd->add_option("--horizon", tr_cfg.horizon_actions, "training window (actions)");
    train_cmd->add_option("--val-fraction", tr_cfg.val_fraction, "validation episode fraction");
    train_cmd->add_option("--windows", tr_cfg.windows_per_epoch, "windows per epoch");
    train_cmd->add_option("--seed", tr_cfg.seed, "init + sampling seed");

    // eval-pred
    auto* eval_cmd = app.add_subcommand("eval-pred", "long-horizon prediction error curves");
    std::vector<std::string> ev_ckpts;
    std::string ev_data, ev_config, ev_out = "prediction.csv";
    int ev_horizon = 200, ev_ep_begin = 0, ev_ep_end = -1;
    bool ev_ablation = false;
    eval_cmd->add_option("--ckpt", ev_ckpts, "checkpoint (repeatable)")->required();
    eval_cmd->add_option("--data", ev_data, "dataset file")->required();
    eval_cmd->add_option("--config", ev_config, "scenario file")->required();
    eval_cmd->add_option("--horizon", ev_horizon, "evaluation horizon (actions)");
    eval_cmd->add_option("--ep-begin", ev_ep_begin, "first episode");
    eval_cmd->add_option("--ep-end", ev_ep_end, "one past the last episode (-1: all)");
    eval_cmd->add_flag("--ablation", ev_ablation, "add a zeroed-damping curve for AEM models");
    eval_cmd->add_option("--out", ev_out, "output csv");

    // control
    auto* ctl_cmd = app.add_subcommand("control", "one closed-loop episode");
    std::string ctl_config, ctl_ckpt, ctl_task = "suppress", ctl_controller, ctl_out = "control_out";
    int ctl_steps = 200;
    std::uint64_t ctl_seed = 1;
    MpcConfig ctl_mpc;
    ctl_cmd->add_option("--config", ctl_config, "scenario file")->required();
    ctl_cmd->add_option("--ckpt", ctl_ckpt, "model checkpoint (omit for random)");
    ctl_cmd->add_option("--task", ctl_task, "suppress | focus")
        ->check(CLI::IsMember({"suppress", "focus"}));
    ctl_cmd->add_option("--controller", ctl_controller, "random | mpc-aem | mpc-node");
    ctl_cmd->add_option("--steps", ctl_steps, "action steps");
    ctl_cmd->add_option("--seed", ctl_seed, "episode seed");
    ctl_cmd->add_option("--out", ctl_out, "output directory");
    ctl_cmd->add_option("--mpc-horizon", ctl_mpc.horizon, "planning horizon (actions)");
    ctl_cmd->add_option("--candidates", ctl_mpc.candidates, "sampled sequences per iteration");
    ctl_cmd->add_option("--elite", ctl_mpc.elite_frac, "elite fraction");
    ctl_cmd->add_option("--iterations", ctl_mpc.iterations, "cross-entropy iterations");
    ctl_cmd->add_option("--beta", ctl_mpc.beta, "action penalty weight");
    ctl_cmd->add_option("--sigma-hi", ctl_mpc.sigma_hi, "focus reference level (0: auto)");

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "multi-run benchmark report");
    std::string bench_spec;
    bench_cmd->add_option("--spec", bench_spec, "benchmark spec file")->required();

    // oracle
    auto* oracle_cmd = app.add_subcommand("oracle", "frozen-design brute force");
    std::string or_config, or_task = "suppress", or_out = "oracle_out";
    int or_grid = 9, or_levels = 5;
    oracle_cmd->add_option("--config", or_config, "scenario file")->required();
    oracle_cmd->add_option("--task", or_task, "suppress | focus")
        ->check(CLI::IsMember({"suppress", "focus"}));
    oracle_cmd->add_option("--grid", or_grid, "positions per axis");
    oracle_cmd->add_option("--radius-levels", or_levels, "radius levels (R/F modes)");
    oracle_cmd->add_option("--out", or_out, "output directory");

    // plot
    auto* plot_cmd = app.add_subcommand("plot", "render a CSV as an SVG image");
    std::string plot_in, plot_out = "plot.svg";
    plot_cmd->add_option("--in", plot_in, "input csv")->required();
    plot_cmd->add_option("--out", plot_out, "output svg");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return 2;
    }

    ManifestWriter mw;
    for (const auto& a : std::vector<std::string>(argv + 1, argv + argc))
        mw.args["argv"].push_back(a);

    if (sim_cmd->parsed()) {
        mw.command = "simulate";
        const Scenario sc = load_scenario(sim_config);
        mw.config_hash = sc.hash();
        mw.seeds = {sim_seed};
        const int rc = cmd_simulate(sc, sim_seed, sim_out, sim_steps, sim_stride, mw);
        mw.write(sim_out);
        return rc;
    }

    if (gen_cmd->parsed()) {
        mw.command = "gen-data";
        Scenario sc = load_scenario(gen_config);
        if (!gen_space.empty()) apply_space_tag(sc, gen_space);
        mw.config_hash = sc.hash();
        mw.seeds = {gen_seed};
        const Dataset ds = generate_dataset(sc, gen_episodes, gen_seed, threads);
        write_dataset(ds, gen_out);
        mw.artifacts.push_back(gen_out);
        mw.write(fs::path(gen_out).parent_path().empty() ? "." : fs::path(gen_out).parent_path());
        std::cout << "gen-data: " << gen_episodes << " episodes -> " << gen_out << "\n";
        return 0;
    }

    if (train_cmd->parsed()) {
        mw.command = "train";
        const Scenario sc = load_scenario(tr_config);
        mw.config_hash = sc.hash();
        mw.seeds = {tr_cfg.seed};
        tr_cfg.threads = threads;
        const Dataset ds = load_dataset(tr_data);
        Model m = Model::build(tr_model == "aem" ? ModelKind::Aem : ModelKind::Node, sc, tr_cfg.seed);
        std::cout << "train: " << tr_model << " with " << m.params.trainable_count()
                  << " trainable parameters\n";
        const FitResult fr = fit(m, sc, ds, tr_cfg);
        m.save(tr_out);
        const fs::path hist = fs::path(tr_out).string() + ".history.csv";
        write_history_csv(fr.history, hist);
        mw.artifacts = {tr_out, hist.string()};
        mw.write(fs::path(tr_out).parent_path().empty() ? "." : fs::path(tr_out).parent_path());
        std::cout << "train: best val " << fr.best_val << " at epoch " << fr.best_epoch << " -> "
                  << tr_out << "\n";
        return 0;
    }

    if (eval_cmd->parsed()) {
        mw.command = "eval-pred";
        const Scenario sc = load_scenario(ev_config);
        mw.config_hash = sc.hash();
        const Dataset ds = load_dataset(ev_data);
        if (ev_ep_end < 0) ev_ep_end = static_cast<int>(ds.header.episodes);
        std::ofstream out(ev_out);
        if (!out) throw IoError("cannot open output csv: " + ev_out);
        std::vector<std::pair<std::string, PredictionCurves>> curves;
        for (const auto& cp : ev_ckpts) {
            const Model m = Model::load(cp);
            const std::string stem = fs::path(cp).stem().string();
            curves.emplace_back(stem, evaluate_prediction(m, sc, ds, ev_ep_begin, ev_ep_end,
                                                          ev_horizon, false));
            if (ev_ablation && m.def.kind == ModelKind::Aem)
                curves.emplace_back(stem + "_nopml",
                                    evaluate_prediction(m, sc, ds, ev_ep_begin, ev_ep_end,
                                                        ev_horizon, true));
        }
        out << "step";
        for (const auto& [name, c] : curves) out << ',' << name;
        out << '\n';
        out.precision(10);
        for (int i = 0; i < ev_horizon; ++i) {
            out << i;
            for (const auto& [name, c] : curves) out << ',' << c.mean[i];
            out << '\n';
        }
        mw.artifacts = {ev_out};
        mw.write(fs::path(ev_out).parent_path().empty() ? "." : fs::path(ev_out).parent_path());
        return 0;
    }

    if (ctl_cmd->parsed()) {
        mw.command = "control";
        const Scenario sc = load_scenario(ctl_config);
        mw.config_hash = sc.hash();
        mw.seeds = {ctl_seed};
        ctl_mpc.task = task_from_string(ctl_task);
        Model model;
        const Model* model_ptr = nullptr;
        ControllerKind kind = ControllerKind::Random;
        if (!ctl_ckpt.empty()) {
            model = Model::load(ctl_ckpt);
            model_ptr = &model;
            kind = model.def.kind == ModelKind::Aem ? ControllerKind::MpcAem
                                                    : ControllerKind::MpcNode;
        }
        if (!ctl_controller.empty()) kind = controller_from_string(ctl_controller);
        Scenario run_sc = sc;
        run_sc.task_region =
            ctl_mpc.task == Task::Focus ? Region::UpperRightQuadrant : Region::FullInterior;
        const EpisodeMetrics m =
            run_controlled_episode(run_sc, kind, model_ptr, ctl_mpc, ctl_steps, ctl_seed);
        fs::create_directories(ctl_out);
        write_metrics_csv(m, fs::path(ctl_out) / "metrics.csv");
        mw.artifacts = {(fs::path(ctl_out) / "metrics.csv").string()};
        mw.write(ctl_out);
        std::cout << "control: steady-state energy "
                  << steady_state_energy(m.sigma, 0.5 * ctl_steps * sc.sim.action_period,
                                         ctl_steps * sc.sim.action_period)
                  << "\n";
        return 0;
    }

    if (bench_cmd->parsed()) {
        mw.command = "bench";
        BenchmarkSpec spec = parse_bench_spec(bench_spec);
        spec.threads = threads;
        mw.config_hash = spec.scenario.hash();
        mw.seeds = {spec.seed};
        const BenchmarkResult res = run_benchmark(spec);
        for (const auto& row : res.table.rows)
            std::cout << row.configuration << "  " << row.task << "  " << row.method << "  "
                      << row.mean << " +- " << row.stddev << "  (" << row.runs << " runs)\n";
        if (!spec.out_dir.empty()) {
            mw.artifacts = {(spec.out_dir / "report.csv").string(),
                            (spec.out_dir / "report.md").string()};
            mw.write(spec.out_dir);
        }
        return 0;
    }

    if (oracle_cmd->parsed()) {
        mw.command = "oracle";
        const Scenario sc = load_scenario(or_config);
        mw.config_hash = sc.hash();
        const OracleResult res =
            oracle_frozen_config(sc, task_from_string(or_task), or_grid, or_levels, threads);
        fs::create_directories(or_out);
        std::ofstream out(fs::path(or_out) / "oracle.csv");
        out << "task,energy,evaluated";
        for (int i = 0; i < res.best.count(); ++i) out << ",x" << i << ",y" << i << ",r" << i;
        out << '\n' << or_task << ',' << res.energy << ',' << res.evaluated;
        out.precision(17);
        for (int i = 0; i < res.best.count(); ++i)
            out << ',' << res.best.cx[i] << ',' << res.best.cy[i] << ',' << res.best.r[i];
        out << '\n';
        mw.artifacts = {(fs::path(or_out) / "oracle.csv").string()};
        mw.write(or_out);
        std::cout << "oracle: best " << or_task << " energy " << res.energy << " over "
                  << res.evaluated << " designs\n";
        return 0;
    }

    if (plot_cmd->parsed()) {
        mw.command = "plot";
        const int rc = cmd_plot(plot_in, plot_out);
        mw.artifacts = {plot_out};
        mw.write(fs::path(plot_out).parent_path().empty() ? "." : fs::path(plot_out).parent_path());
        return rc;
    }

    return 0;
}

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
