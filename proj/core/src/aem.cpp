#include "wavebench/aem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace wavebench {

namespace {

constexpr double kTwoPi = 6.2831853071795864769;
constexpr double kControlFloor = 0.1;

struct NamedShape {
    std::string name;
    std::vector<int> shape;
};

std::vector<NamedShape> param_shapes(const ModelDef& def) {
    const int G = def.latent_cells;
    const int flat = def.flat_dim();
    const int W = def.trunk_width;
    const int RH = def.robot_hidden;
    const int D = def.design_dim;
    std::vector<NamedShape> s = {
        {"enc/conv1_k", {def.conv1_ch, 1, 3, 3}},
        {"enc/conv1_b", {def.conv1_ch}},
        {"enc/conv2_k", {def.conv2_ch, def.conv1_ch, 3, 3}},
        {"enc/conv2_b", {def.conv2_ch}},
        {"enc/trunk_W", {W, flat}},
        {"enc/trunk_b", {W}},
        {"rob/W1", {RH, D}},
        {"rob/b1", {RH}},
        {"rob/W2", {RH, RH}},
        {"rob/b2", {RH}},
        {"rob/head_W", {G, RH}},
        {"rob/head_b", {G}},
    };
    if (def.kind == ModelKind::Aem) {
        s.push_back({"enc/u0_W", {G, W}});
        s.push_back({"enc/u0_b", {G}});
        s.push_back({"enc/v0_W", {G, W}});
        s.push_back({"enc/v0_b", {G}});
        s.push_back({"enc/L_W", {G, W}});
        s.push_back({"enc/L_b", {G}});
        s.push_back({"enc/s_W", {G, W}});
        s.push_back({"enc/s_b", {G}});
        s.push_back({"read/w_raw", {G}});
    } else {
        const int H = def.state_dim();
        const int DH = def.dyn_hidden;
        s.push_back({"enc/h0_W", {H, W}});
        s.push_back({"enc/h0_b", {H}});
        s.push_back({"dyn/W1", {DH, H + G}});
        s.push_back({"dyn/b1", {DH}});
        s.push_back({"dyn/W2", {H, DH}});
        s.push_back({"dyn/b2", {H}});
        s.push_back({"read/W", {1, H}});
        s.push_back({"read/b", {1}});
    }
    return s;
}

std::size_t count_for(const ModelDef& def) {
    std::size_t n = 0;
    for (const auto& ns : param_shapes(def)) {
        std::size_t b = 1;
        for (int d : ns.shape) b *= static_cast<std::size_t>(d);
        n += b;
    }
    return n;
}

ModelDef base_def(ModelKind kind, const Scenario& sc) {
    ModelDef def;
    def.kind = kind;
    def.sensor_n = sc.sim.sensor_n;
    if (def.sensor_n % 8 != 0 || def.sensor_n < 16)
        throw ConfigError("sensor_n must be a multiple of 8 and >= 16 for the encoder");
    def.latent_cells = sc.latent_cells;
    def.design_dim = 3 * sc.robot.scatterer_count;
    def.grid.cells = sc.latent_cells;
    def.grid.dx = sc.latent_span / sc.latent_cells;
    def.grid.c0 = sc.sim.sound_speed;
    def.grid.dt = substep_dt(sc.sim);
    def.grid.cfl_safety = sc.sim.cfl_safety;
    def.f0 = sc.sim.source_frequency;
    def.substeps = substeps_per_action(sc.sim);
    def.action_period = sc.sim.action_period;
    def.pos_scale = 1.0 / sc.sim.domain_half_width;
    def.rad_scale = 1.0 / sc.robot.r_max;
    def.mode = sc.robot.mode;
    def.scatterers = sc.robot.scatterer_count;
    def.config_hash = sc.env_hash();
    // Hidden widths scale with the parameter budget so that small test
    // models can still balance AEM and NODE counts.
    const double root = std::sqrt(static_cast<double>(sc.param_target));
    def.robot_hidden = std::clamp(static_cast<int>(root / 4.0), 16, 128);
    def.dyn_hidden = std::clamp(static_cast<int>(root / 8.0), 8, 64);
    return def;
}

int solve_trunk(ModelDef def, std::size_t target) {
    // Monotone in trunk width; closed-form guess then local refinement.
    def.trunk_width = 8;
    const std::size_t base = count_for(def) - 8 * (def.flat_dim() + 1 +
                              (def.kind == ModelKind::Aem ? 4 * def.latent_cells
                                                          : def.state_dim()));
    const std::size_t per = def.flat_dim() + 1 +
                            (def.kind == ModelKind::Aem ? 4 * def.latent_cells : def.state_dim());
    long long guess = (static_cast<long long>(target) - static_cast<long long>(base)) /
                      static_cast<long long>(per);
    guess = std::max(8LL, guess);
    long long best = guess;
    std::size_t best_err = static_cast<std::size_t>(-1);
    for (long long w = std::max(8LL, guess - 2); w <= guess + 2; ++w) {
        def.trunk_width = static_cast<int>(w);
        const std::size_t c = count_for(def);
        const std::size_t err = c > target ? c - target : target - c;
        if (err < best_err) {
            best_err = err;
            best = w;
        }
    }
    return static_cast<int>(best);
}

double xavier_bound(const std::vector<int>& shape) {
    long long fan_in = 1, fan_out = 1;
    if (shape.size() == 2) {
        fan_in = shape[1];
        fan_out = shape[0];
    } else if (shape.size() == 4) {
        fan_in = static_cast<long long>(shape[1]) * shape[2] * shape[3];
        fan_out = static_cast<long long>(shape[0]) * shape[2] * shape[3];
    } else if (shape.size() == 3) {
        fan_in = static_cast<long long>(shape[1]) * shape[2];
        fan_out = static_cast<long long>(shape[0]) * shape[2];
    } else {
        return 0.0;  // biases and 1-D blocks start at zero
    }
    return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

Tensor boundary_mask(int G) {
    Tensor m = Tensor::zeros({G});
    for (int i = 1; i + 1 < G; ++i) m.v[i] = 1.0;
    return m;
}

// ---- eval-path helpers; these mirror the tape ops exactly so that the
// inference pipeline is bitwise identical to the training-time forward ----

Tensor ev_tanh(Tensor x) {
    for (auto& t : x.v) t = std::tanh(t);
    return x;
}
Tensor ev_softplus(Tensor x) {
    for (auto& t : x.v) t = softplus(t);
    return x;
}
Tensor ev_offset(Tensor x, double a) {
    for (auto& t : x.v) t += a;
    return x;
}
Tensor ev_mul(Tensor x, const Tensor& y) {
    for (std::size_t i = 0; i < x.numel(); ++i) x.v[i] *= y.v[i];
    return x;
}
Tensor ev_affine(const Tensor& W, const Tensor& x, const Tensor& b) {
    Tensor y;
    affine_fwd(W, x, b, y);
    return y;
}
Tensor ev_lerp(const Tensor& x, const Tensor& y, double w) {
    Tensor out = x;
    for (std::size_t i = 0; i < out.numel(); ++i) out.v[i] += w * (y.v[i] - x.v[i]);
    return out;
}

Tensor design_input(const ModelDef& def, const DesignState& d) {
    const std::vector<double> flat = d.flat();
    Tensor x = Tensor::zeros({static_cast<int>(flat.size())});
    const int m = d.count();
    for (int i = 0; i < 2 * m; ++i) x.v[i] = flat[i] * def.pos_scale;
    for (int i = 0; i < m; ++i) x.v[2 * m + i] = flat[2 * m + i] * def.rad_scale;
    return x;
}

Tensor sensor_input(const ModelDef& def, double sensor_scale, const SensorImage& X) {
    const int d = def.sensor_n;
    if (X.d1 != d || X.d2 != d) throw ShapeMismatch("sensor image size mismatch");
    Tensor t = Tensor::zeros({1, d, d});
    for (std::size_t i = 0; i < t.numel(); ++i) t.v[i] = X.v[i] * sensor_scale;
    return t;
}

void check_control_stability(const ModelDef& def, const Tensor& C) {
    const double cap = def.grid.max_speed_multiplier();
    for (double c : C.v) {
        if (!(c <= cap))
            throw NumericalBlowup("latent control exceeds the CFL stability multiplier");
    }
}

LatentStepParams step_params(const ModelDef& def, double t_mid) {
    return LatentStepParams{def.grid.dt, def.grid.dx, def.grid.c0, kTwoPi * def.f0, t_mid};
}

}  // namespace

ModelDef ModelDef::make(ModelKind kind, const Scenario& sc) {
    ModelDef def = base_def(kind, sc);
    if (kind == ModelKind::Aem) {
        def.trunk_width = solve_trunk(def, static_cast<std::size_t>(sc.param_target));
        return def;
    }
    ModelDef aem = base_def(ModelKind::Aem, sc);
    aem.trunk_width = solve_trunk(aem, static_cast<std::size_t>(sc.param_target));
    const std::size_t ca = count_for(aem);
    // Shrink the dynamics MLP until the NODE can match the AEM budget.
    for (int dh = def.dyn_hidden; dh >= 8; --dh) {
        def.dyn_hidden = dh;
        def.trunk_width = solve_trunk(def, ca);
        const std::size_t cn = count_for(def);
        const double gap = std::abs(static_cast<double>(ca) - static_cast<double>(cn)) /
                           static_cast<double>(std::max(ca, cn));
        if (gap <= 0.01) return def;
    }
    throw ConfigError("NODE/AEM parameter counts diverge by more than 1% "
                      "(param_target too small for this architecture)");
}

std::size_t count_params(const ModelDef& def) { return count_for(def); }

Model Model::build(ModelKind kind, const Scenario& sc, std::uint64_t seed) {
    Model m;
    m.def = ModelDef::make(kind, sc);
    std::uint64_t block_id = 0;
    for (const auto& ns : param_shapes(m.def)) {
        ParamBlock& b = m.params.add(ns.name, ns.shape);
        const double bound = xavier_bound(ns.shape);
        if (bound > 0.0) {
            Rng rng = Rng::substream(seed, block_id);
            for (auto& x : b.value.v) x = rng.uniform(-bound, bound);
        }
        ++block_id;
    }
    auto& ps = m.params;
    ps.set_meta("meta/kind", kind == ModelKind::Aem ? 0.0 : 1.0);
    ps.set_meta("meta/sensor_n", m.def.sensor_n);
    ps.set_meta("meta/latent_cells", m.def.latent_cells);
    ps.set_meta("meta/trunk_width", m.def.trunk_width);
    ps.set_meta("meta/robot_hidden", m.def.robot_hidden);
    ps.set_meta("meta/dyn_hidden", m.def.dyn_hidden);
    ps.set_meta("meta/design_dim", m.def.design_dim);
    ps.set_meta("meta/latent_dx", m.def.grid.dx);
    ps.set_meta("meta/c0", m.def.grid.c0);
    ps.set_meta("meta/latent_dt", m.def.grid.dt);
    ps.set_meta("meta/cfl_safety", m.def.grid.cfl_safety);
    ps.set_meta("meta/f0", m.def.f0);
    ps.set_meta("meta/substeps", m.def.substeps);
    ps.set_meta("meta/action_period", m.def.action_period);
    ps.set_meta("meta/pos_scale", m.def.pos_scale);
    ps.set_meta("meta/rad_scale", m.def.rad_scale);
    ps.set_meta("meta/l_scale", m.def.l_scale);
    ps.set_meta("meta/s_scale", m.def.s_scale);
    ps.set_meta("meta/mode", static_cast<double>(static_cast<int>(m.def.mode)));
    ps.set_meta("meta/scatterers", m.def.scatterers);
    ps.set_meta("meta/config_hash_lo", static_cast<double>(m.def.config_hash & 0xffffffffULL));
    ps.set_meta("meta/config_hash_hi", static_cast<double>(m.def.config_hash >> 32));
    ps.set_meta("meta/sigma_scale", 1.0);
    ps.set_meta("meta/sensor_scale", 1.0);
    ps.set_meta("meta/sigma_max", 0.0);
    return m;
}

void Model::disable_latent_pml() {
    if (def.kind != ModelKind::Aem) throw ConfigError("the no-PML ablation applies to the AEM");
    def.l_scale = 0.0;
    params.set_meta("meta/l_scale", 0.0);
}

void Model::save(const std::filesystem::path& p) const { params.save(p); }

Model Model::load(const std::filesystem::path& p) {
    Model m;
    m.params = ParamStore::load(p);
    const auto& ps = m.params;
    ModelDef& d = m.def;
    d.kind = ps.meta("meta/kind") == 0.0 ? ModelKind::Aem : ModelKind::Node;
    d.sensor_n = static_cast<int>(ps.meta("meta/sensor_n"));
    d.latent_cells = static_cast<int>(ps.meta("meta/latent_cells"));
    d.trunk_width = static_cast<int>(ps.meta("meta/trunk_width"));
    d.robot_hidden = static_cast<int>(ps.meta("meta/robot_hidden"));
    d.dyn_hidden = static_cast<int>(ps.meta("meta/dyn_hidden"));
    d.design_dim = static_cast<int>(ps.meta("meta/design_dim"));
    d.grid.cells = d.latent_cells;
    d.grid.dx = ps.meta("meta/latent_dx");
    d.grid.c0 = ps.meta("meta/c0");
    d.grid.dt = ps.meta("meta/latent_dt");
    d.grid.cfl_safety = ps.meta("meta/cfl_safety");
    d.f0 = ps.meta("meta/f0");
    d.substeps = static_cast<int>(ps.meta("meta/substeps"));
    d.action_period = ps.meta("meta/action_period");
    d.pos_scale = ps.meta("meta/pos_scale");
    d.rad_scale = ps.meta("meta/rad_scale");
    if (ps.has_meta("meta/l_scale")) d.l_scale = ps.meta("meta/l_scale");
    if (ps.has_meta("meta/s_scale")) d.s_scale = ps.meta("meta/s_scale");
    d.mode = static_cast<ActuationMode>(static_cast<int>(ps.meta("meta/mode")));
    d.scatterers = static_cast<int>(ps.meta("meta/scatterers"));
    d.config_hash = static_cast<std::uint64_t>(ps.meta("meta/config_hash_lo")) |
                    (static_cast<std::uint64_t>(ps.meta("meta/config_hash_hi")) << 32);
    return m;
}

EncodedWave encode_wave(const Model& m, const SensorImage& X) {
    const auto& ps = m.params;
    const Tensor x = sensor_input(m.def, m.sensor_scale(), X);
    Tensor pooled;
    avgpool2d_fwd(x, 2, pooled);
    Tensor c1;
    conv2d_fwd(pooled, ps.at("enc/conv1_k").value, ps.at("enc/conv1_b").value, 2, c1);
    c1 = ev_tanh(std::move(c1));
    Tensor c2;
    conv2d_fwd(c1, ps.at("enc/conv2_k").value, ps.at("enc/conv2_b").value, 2, c2);
    c2 = ev_tanh(std::move(c2));
    const Tensor trunk = ev_tanh(ev_affine(ps.at("enc/trunk_W").value, c2, ps.at("enc/trunk_b").value));

    EncodedWave enc;
    if (m.def.kind == ModelKind::Aem) {
        const Tensor mask = boundary_mask(m.def.latent_cells);
        enc.u0 = ev_mul(ev_affine(ps.at("enc/u0_W").value, trunk, ps.at("enc/u0_b").value), mask);
        enc.v0 = ev_mul(ev_affine(ps.at("enc/v0_W").value, trunk, ps.at("enc/v0_b").value), mask);
        enc.L = ev_softplus(ev_affine(ps.at("enc/L_W").value, trunk, ps.at("enc/L_b").value));
        for (auto& v : enc.L.v) v *= m.def.l_scale;
        enc.s = ev_affine(ps.at("enc/s_W").value, trunk, ps.at("enc/s_b").value);
        for (auto& v : enc.s.v) v *= m.def.s_scale;
    } else {
        // NODE packs its whole latent state into u0 ([2G]); v0/L/s unused.
        enc.u0 = ev_affine(ps.at("enc/h0_W").value, trunk, ps.at("enc/h0_b").value);
    }
    return enc;
}

std::vector<Tensor> encode_design(const Model& m, const std::vector<DesignState>& instants) {
    const auto& ps = m.params;
    std::vector<Tensor> out;
    out.reserve(instants.size());
    for (const auto& d : instants) {
        const Tensor x = design_input(m.def, d);
        const Tensor h1 = ev_tanh(ev_affine(ps.at("rob/W1").value, x, ps.at("rob/b1").value));
        const Tensor h2 = ev_tanh(ev_affine(ps.at("rob/W2").value, h1, ps.at("rob/b2").value));
        Tensor head = ev_affine(ps.at("rob/head_W").value, h2, ps.at("rob/head_b").value);
        if (m.def.kind == ModelKind::Aem)
            head = ev_offset(ev_softplus(std::move(head)), kControlFloor);
        out.push_back(std::move(head));
    }
    return out;
}

namespace {

Tensor node_dynamics(const ParamStore& ps, const Tensor& h, const Tensor& c) {
    Tensor in = Tensor::zeros({h.dim(0) + c.dim(0)});
    std::copy(h.v.begin(), h.v.end(), in.v.begin());
    std::copy(c.v.begin(), c.v.end(), in.v.begin() + h.dim(0));
    const Tensor a = ev_tanh(ev_affine(ps.at("dyn/W1").value, in, ps.at("dyn/b1").value));
    return ev_affine(ps.at("dyn/W2").value, a, ps.at("dyn/b2").value);
}

}  // namespace

std::vector<Tensor> rollout(const Model& m, const EncodedWave& enc,
                            const std::vector<Tensor>& controls, double t0, bool zero_pml) {
    const ModelDef& def = m.def;
    const int S = def.substeps;
    if (controls.empty()) throw ShapeMismatch("rollout needs at least one control instant");
    for (const auto& c : controls)
        if (def.kind == ModelKind::Aem) check_control_stability(def, c);

    std::vector<Tensor> traj;
    traj.reserve(1 + (controls.size() - 1) * static_cast<std::size_t>(S));

    if (def.kind == ModelKind::Aem) {
        Tensor L = enc.L;
        if (zero_pml) L.fill(0.0);
        Tensor z = Tensor::zeros({2, def.latent_cells});
        std::copy(enc.u0.v.begin(), enc.u0.v.end(), z.v.begin());
        std::copy(enc.v0.v.begin(), enc.v0.v.end(), z.v.begin() + def.latent_cells);
        traj.push_back(z);  // the trajectory starts from g exactly
        long long g = 0;
        for (std::size_t tau = 0; tau + 1 < controls.size(); ++tau) {
            for (int k = 0; k < S; ++k, ++g) {
                const double w = (k + 0.5) / S;
                const Tensor c = ev_lerp(controls[tau], controls[tau + 1], w);
                const double t_mid = t0 + (static_cast<double>(g) + 0.5) * def.grid.dt;
                Tensor zn;
                latent_step_fwd(z, c, L, enc.s, step_params(def, t_mid), zn);
                for (double x : zn.v)
                    if (!(std::abs(x) < 1e12)) throw NumericalBlowup("latent state blowup");
                traj.push_back(zn);
                z = std::move(zn);
            }
        }
    } else {
        Tensor h = enc.u0;
        traj.push_back(h);
        const double dt = def.grid.dt;
        for (std::size_t tau = 0; tau + 1 < controls.size(); ++tau) {
            for (int k = 0; k < S; ++k) {
                const Tensor ca = ev_lerp(controls[tau], controls[tau + 1], static_cast<double>(k) / S);
                const Tensor cm = ev_lerp(controls[tau], controls[tau + 1], (k + 0.5) / S);
                const Tensor cb = ev_lerp(controls[tau], controls[tau + 1], (k + 1.0) / S);
                Tensor hn = rk4_step(h, dt, [&](const Tensor& x, int stage) {
                    const Tensor& c = stage == 0 ? ca : (stage == 3 ? cb : cm);
                    return node_dynamics(m.params, x, c);
                });
                for (double x : hn.v)
                    if (!(std::abs(x) < 1e12)) throw NumericalBlowup("NODE state blowup");
                traj.push_back(hn);
                h = std::move(hn);
            }
        }
    }
    return traj;
}

std::vector<double> readout(const Model& m, const std::vector<Tensor>& traj) {
    const ModelDef& def = m.def;
    const auto& ps = m.params;
    const double scale = m.sigma_scale();
    std::vector<double> out;
    if (traj.size() <= 1) return out;
    out.reserve(traj.size() - 1);
    if (def.kind == ModelKind::Aem) {
        const Tensor w = ev_softplus(ps.at("read/w_raw").value);
        const int G = def.latent_cells;
        // traj[0] is the encoded initial condition; sigma samples align with
        // the post-step states, like the environment's recorder. The energy
        // density w^2 + (du)^2 is the physical v^2 + (c0 du)^2 up to the c0^2
        // factor folded into sigma_scale.
        for (std::size_t k = 1; k < traj.size(); ++k) {
            const Tensor& z = traj[k];
            Tensor u = Tensor::zeros({G});
            std::copy(z.v.begin(), z.v.begin() + G, u.v.begin());
            Tensor d;
            diff1d_fwd(u, def.grid.dx, d);
            double acc = 0.0;
            for (int i = 0; i < G; ++i) {
                const double ww = z.v[G + i];
                const double du2 = d.v[i] * d.v[i];
                acc += w.v[i] * (ww * ww + du2);
            }
            out.push_back(acc * (scale * def.grid.dx));
        }
    } else {
        for (std::size_t k = 1; k < traj.size(); ++k) {
            const Tensor y = ev_affine(ps.at("read/W").value, traj[k], ps.at("read/b").value);
            out.push_back(scale * y.v[0]);
        }
    }
    return out;
}

DesignPlan plan_design(const Scenario& sc, const DesignState& d0,
                       const std::vector<ActionSpec>& actions) {
    const DesignRegion region = design_region(sc.sim, sc.robot);
    const int S = substeps_per_action(sc.sim);
    DesignPlan plan;
    DesignState cur = project(d0, region, sc.robot);
    plan.instants.push_back(cur);
    for (const auto& a : actions) {
        auto traj = integrate_design(cur, a, sc.sim.action_period, S, region, sc.robot);
        cur = traj.back();
        plan.instants.push_back(cur);
        plan.intervals.push_back(std::move(traj));
    }
    return plan;
}

std::vector<double> predict(const Model& m, const Scenario& sc, const SensorImage& X,
                            const DesignState& d0, const std::vector<ActionSpec>& actions,
                            double t0, bool zero_pml) {
    const DesignPlan plan = plan_design(sc, d0, actions);
    const EncodedWave enc = encode_wave(m, X);
    const std::vector<Tensor> controls = encode_design(m, plan.instants);
    const std::vector<Tensor> traj = rollout(m, enc, controls, t0, zero_pml);
    return readout(m, traj);
}

PredictTapeResult predict_loss_tape(Tape& tape, const ModelDef& def, ParamStore& ps,
                                    const Scenario& sc, const SensorImage& X,
                                    const DesignState& d0,
                                    const std::vector<ActionSpec>& actions, double t0,
                                    const std::vector<double>& sigma_target) {
    const int S = def.substeps;
    const int G = def.latent_cells;
    const DesignPlan plan = plan_design(sc, d0, actions);
    const std::size_t total = actions.size() * static_cast<std::size_t>(S);
    if (sigma_target.size() != total)
        throw ShapeMismatch("target signal length mismatch for the training window");

    tape.reserve(64 + total * (def.kind == ModelKind::Aem ? 16 : 32));

    // Wave encoder.
    const int x = tape.leaf(sensor_input(def, ps.meta("meta/sensor_scale"), X));
    const int pooled = tape.avgpool2d(x, 2);
    const int c1 = tape.tanh_(tape.conv2d(pooled, tape.param(ps, "enc/conv1_k"),
                                          tape.param(ps, "enc/conv1_b"), 2));
    const int c2 = tape.tanh_(tape.conv2d(c1, tape.param(ps, "enc/conv2_k"),
                                          tape.param(ps, "enc/conv2_b"), 2));
    const int trunk = tape.tanh_(tape.affine(tape.param(ps, "enc/trunk_W"), c2,
                                             tape.param(ps, "enc/trunk_b")));

    // Robot encoder per control instant.
    std::vector<int> controls;
    controls.reserve(plan.instants.size());
    const int rW1 = tape.param(ps, "rob/W1");
    const int rb1 = tape.param(ps, "rob/b1");
    const int rW2 = tape.param(ps, "rob/W2");
    const int rb2 = tape.param(ps, "rob/b2");
    const int rhW = tape.param(ps, "rob/head_W");
    const int rhb = tape.param(ps, "rob/head_b");
    for (const auto& d : plan.instants) {
        const int din = tape.leaf(design_input(def, d));
        const int h1 = tape.tanh_(tape.affine(rW1, din, rb1));
        const int h2 = tape.tanh_(tape.affine(rW2, h1, rb2));
        int head = tape.affine(rhW, h2, rhb);
        if (def.kind == ModelKind::Aem)
            head = tape.offset(tape.softplus_(head), kControlFloor);
        controls.push_back(head);
    }

    PredictTapeResult res;
    res.sigma_nodes.reserve(total);
    const double scale = ps.meta("meta/sigma_scale");

    if (def.kind == ModelKind::Aem) {
        const int mask = tape.leaf(boundary_mask(G));
        const int u0 = tape.mul(tape.affine(tape.param(ps, "enc/u0_W"), trunk,
                                            tape.param(ps, "enc/u0_b")), mask);
        const int v0 = tape.mul(tape.affine(tape.param(ps, "enc/v0_W"), trunk,
                                            tape.param(ps, "enc/v0_b")), mask);
        const int L = tape.scale(tape.softplus_(tape.affine(tape.param(ps, "enc/L_W"), trunk,
                                                            tape.param(ps, "enc/L_b"))),
                                 def.l_scale);
        const int sAmp = tape.scale(tape.affine(tape.param(ps, "enc/s_W"), trunk,
                                                tape.param(ps, "enc/s_b")),
                                    def.s_scale);
        for (const int c : controls) check_control_stability(def, tape.value(c));

        const int w = tape.softplus_(tape.param(ps, "read/w_raw"));
        int z = tape.concat2(u0, v0);
        long long g = 0;
        for (std::size_t tau = 0; tau < actions.size(); ++tau) {
            for (int k = 0; k < S; ++k, ++g) {
                const int c = tape.lerp(controls[tau], controls[tau + 1], (k + 0.5) / S);
                const double t_mid = t0 + (static_cast<double>(g) + 0.5) * def.grid.dt;
                z = tape.latent_step(z, c, L, sAmp, step_params(def, t_mid));
                const int u = tape.slice_row(z, 0);
                const int v = tape.slice_row(z, 1);
                const int du = tape.diff1d(u, def.grid.dx);
                const int e = tape.add(tape.square_(v), tape.square_(du));
                const int sig = tape.scale(tape.dot(w, e), scale * def.grid.dx);
                res.sigma_nodes.push_back(sig);
            }
        }
    } else {
        int h = tape.affine(tape.param(ps, "enc/h0_W"), trunk, tape.param(ps, "enc/h0_b"));
        const int dW1 = tape.param(ps, "dyn/W1");
        const int db1 = tape.param(ps, "dyn/b1");
        const int dW2 = tape.param(ps, "dyn/W2");
        const int db2 = tape.param(ps, "dyn/b2");
        const int roW = tape.param(ps, "read/W");
        const int rob = tape.param(ps, "read/b");
        const double dt = def.grid.dt;
        auto dyn = [&](int hh, int cc) {
            const int in = tape.concatv(hh, cc);
            const int a = tape.tanh_(tape.affine(dW1, in, db1));
            return tape.affine(dW2, a, db2);
        };
        for (std::size_t tau = 0; tau < actions.size(); ++tau) {
            for (int k = 0; k < S; ++k) {
                const int ca = tape.lerp(controls[tau], controls[tau + 1], static_cast<double>(k) / S);
                const int cm = tape.lerp(controls[tau], controls[tau + 1], (k + 0.5) / S);
                const int cb = tape.lerp(controls[tau], controls[tau + 1], (k + 1.0) / S);
                const int k1 = dyn(h, ca);
                const int k2 = dyn(tape.add(h, tape.scale(k1, dt / 2.0)), cm);
                const int k3 = dyn(tape.add(h, tape.scale(k2, dt / 2.0)), cm);
                const int k4 = dyn(tape.add(h, tape.scale(k3, dt)), cb);
                int acc = tape.add(tape.add(k1, tape.scale(k2, 2.0)), tape.scale(k3, 2.0));
                acc = tape.add(acc, k4);
                h = tape.add(h, tape.scale(acc, dt / 6.0));
                for (double xv : tape.value(h).v)
                    if (!(std::abs(xv) < 1e12)) throw NumericalBlowup("NODE state blowup");
                const int sig = tape.scale(tape.affine(roW, h, rob), scale);
                res.sigma_nodes.push_back(sig);
            }
        }
    }

    int acc = -1;
    for (std::size_t k = 0; k < total; ++k) {
        const int d = tape.offset(res.sigma_nodes[k], -sigma_target[k]);
        const int sq = tape.square_(d);
        acc = (acc < 0) ? sq : tape.add(acc, sq);
    }
    res.loss = tape.scale(acc, 1.0 / static_cast<double>(total));
    return res;
}

LatentResiduals latent_residuals(const Model& m, const EncodedWave& enc,
                                 const std::vector<Tensor>& controls, double t0,
                                 const std::vector<Tensor>& traj) {
    if (m.def.kind != ModelKind::Aem)
        throw ShapeMismatch("latent residuals are defined for the AEM surrogate");
    if (traj.empty()) throw ShapeMismatch("latent_residuals: empty trajectory");
    const ModelDef& def = m.def;
    const int S = def.substeps;
    const int G = def.latent_cells;
    LatentResiduals res;

    // Initial-condition residual: traj[0] against the encoded g.
    for (int i = 0; i < G; ++i) {
        res.ic_residual = std::max(res.ic_residual, std::abs(traj[0].v[i] - enc.u0.v[i]));
        res.ic_residual = std::max(res.ic_residual, std::abs(traj[0].v[G + i] - enc.v0.v[i]));
    }

    // Dynamics residual: re-evaluate the stencil on the stored states.
    long long g = 0;
    for (std::size_t tau = 0; tau + 1 < controls.size(); ++tau) {
        for (int k = 0; k < S; ++k, ++g) {
            if (static_cast<std::size_t>(g) + 1 >= traj.size()) return res;
            const double w = (k + 0.5) / S;
            const Tensor c = ev_lerp(controls[tau], controls[tau + 1], w);
            const double t_mid = t0 + (static_cast<double>(g) + 0.5) * def.grid.dt;
            Tensor zn;
            latent_step_fwd(traj[g], c, enc.L, enc.s, step_params(def, t_mid), zn);
            for (std::size_t i = 0; i < zn.numel(); ++i)
                res.pde_residual = std::max(res.pde_residual, std::abs(zn.v[i] - traj[g + 1].v[i]));
        }
    }
    return res;
}

}  // namespace wavebench
