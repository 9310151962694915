#include "wavebench/dataset.hpp"

#include <cstring>
#include <fstream>

namespace wavebench {

namespace {

constexpr char kMagic[4] = {'W', 'V', 'D', 'S'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& out, const T& x) {
    out.write(reinterpret_cast<const char*>(&x), sizeof(T));
}

template <typename T>
T get(std::ifstream& in) {
    T x{};
    in.read(reinterpret_cast<char*>(&x), sizeof(T));
    if (!in) throw IoError("truncated dataset file");
    return x;
}

void put_floats(std::ofstream& out, const std::vector<float>& v) {
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(float)));
}

void get_floats(std::ifstream& in, std::vector<float>& v, std::size_t n) {
    v.resize(n);
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(float)));
    if (!in) throw IoError("truncated dataset payload");
}

}  // namespace

SensorImage Dataset::sensor_image(int ep, int step) const {
    const auto& e = episodes.at(ep);
    SensorImage img;
    img.d1 = static_cast<int>(header.d1);
    img.d2 = static_cast<int>(header.d2);
    const std::size_t px = static_cast<std::size_t>(header.d1) * header.d2;
    img.v.resize(px);
    const float* src = e.X.data() + static_cast<std::size_t>(step) * px;
    for (std::size_t i = 0; i < px; ++i) img.v[i] = static_cast<double>(src[i]);
    return img;
}

DesignState Dataset::design_state(int ep, int step, const ActuationSpace& space) const {
    const auto& e = episodes.at(ep);
    const std::size_t dd = header.design_dim;
    std::vector<double> flat(dd);
    const float* src = e.design.data() + static_cast<std::size_t>(step) * dd;
    for (std::size_t i = 0; i < dd; ++i) flat[i] = static_cast<double>(src[i]);
    return DesignState::from_flat(flat, space);
}

ActionSpec Dataset::action(int ep, int step, const ActuationSpace& space) const {
    const auto& e = episodes.at(ep);
    const std::size_t dd = header.design_dim;
    std::vector<double> rates(dd);
    const float* src = e.action.data() + static_cast<std::size_t>(step) * dd;
    for (std::size_t i = 0; i < dd; ++i) rates[i] = static_cast<double>(src[i]);
    return action_from_design_rates(rates, space);
}

std::vector<double> Dataset::sigma_window(int ep, int step, int horizon) const {
    const auto& e = episodes.at(ep);
    const std::size_t ss = header.substeps;
    std::vector<double> out(static_cast<std::size_t>(horizon) * ss);
    const float* src = e.sigma.data() + static_cast<std::size_t>(step) * ss;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<double>(src[i]);
    return out;
}

double Dataset::max_abs_sigma(int ep_begin, int ep_end) const {
    double m = 0.0;
    for (int e = ep_begin; e < ep_end; ++e)
        for (float x : episodes.at(e).sigma) m = std::max(m, std::abs(static_cast<double>(x)));
    return m;
}

double Dataset::max_abs_sensor(int ep_begin, int ep_end) const {
    double m = 0.0;
    for (int e = ep_begin; e < ep_end; ++e)
        for (float x : episodes.at(e).X) m = std::max(m, std::abs(static_cast<double>(x)));
    return m;
}

EpisodeData simulate_random_episode(const Scenario& sc, std::uint64_t episode_seed) {
    Rng rng(episode_seed);
    const ActuationSpace space = actuation_space(sc.robot);
    const DesignRegion region = design_region(sc.sim, sc.robot);
    const int S = substeps_per_action(sc.sim);
    const int d = sc.sim.sensor_n;
    const int dd = 3 * sc.robot.scatterer_count;

    EpisodeData ep;
    ep.seed = episode_seed;
    ep.X.reserve(static_cast<std::size_t>(sc.episode_steps) * d * d);
    ep.design.reserve(static_cast<std::size_t>(sc.episode_steps) * dd);
    ep.action.reserve(static_cast<std::size_t>(sc.episode_steps) * dd);
    ep.sigma.reserve(static_cast<std::size_t>(sc.episode_steps) * S);

    SimState state = make_state(sc.sim);
    DesignState design = initial_design(sc, rng);
    for (int step_i = 0; step_i < sc.episode_steps; ++step_i) {
        const SensorImage X = sensor_read(state, sc.sim);
        const ActionSpec a = random_action(space, rng);
        const auto traj = integrate_design(design, a, sc.sim.action_period, S, region, sc.robot);

        for (double x : X.v) ep.X.push_back(static_cast<float>(x));
        for (double x : traj.front().flat()) ep.design.push_back(static_cast<float>(x));
        for (double x : action_to_design_rates(a, space)) ep.action.push_back(static_cast<float>(x));

        const WindowResult res = run_window(state, traj, sc.sim, sc.task_region);
        for (double x : res.sigma.values) ep.sigma.push_back(static_cast<float>(x));
        design = traj.back();
    }
    return ep;
}

Dataset generate_dataset(const Scenario& sc, int episodes, std::uint64_t seed, int threads) {
    sc.validate();
    Dataset ds;
    ds.header.episodes = static_cast<std::uint32_t>(episodes);
    ds.header.steps = static_cast<std::uint32_t>(sc.episode_steps);
    ds.header.substeps = static_cast<std::uint32_t>(substeps_per_action(sc.sim));
    ds.header.d1 = static_cast<std::uint32_t>(sc.sim.sensor_n);
    ds.header.d2 = static_cast<std::uint32_t>(sc.sim.sensor_n);
    ds.header.design_dim = static_cast<std::uint32_t>(3 * sc.robot.scatterer_count);
    ds.header.config_hash = sc.env_hash();
    ds.header.region = sc.task_region == Region::FullInterior ? 0 : 1;
    ds.header.mode = static_cast<std::uint8_t>(static_cast<int>(sc.robot.mode));
    ds.header.scatterers = static_cast<std::uint16_t>(sc.robot.scatterer_count);
    ds.header.action_period = sc.sim.action_period;
    ds.header.base_seed = seed;

    ds.episodes.resize(episodes);
    parallel_for(static_cast<std::size_t>(episodes), threads, [&](std::size_t i) {
        Rng sub = Rng::substream(seed, i);
        const std::uint64_t ep_seed = sub.next_u64();
        ds.episodes[i] = simulate_random_episode(sc, ep_seed);
    });
    return ds;
}

void write_dataset(const Dataset& ds, const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot open dataset for writing: " + p.string());
    out.write(kMagic, 4);
    put(out, kVersion);
    put(out, ds.header.episodes);
    put(out, ds.header.steps);
    put(out, ds.header.substeps);
    put(out, ds.header.d1);
    put(out, ds.header.d2);
    put(out, ds.header.design_dim);
    put(out, ds.header.config_hash);
    put(out, ds.header.region);
    put(out, ds.header.mode);
    put(out, ds.header.scatterers);
    put(out, ds.header.action_period);
    put(out, ds.header.base_seed);
    for (const auto& e : ds.episodes) {
        put(out, e.seed);
        put_floats(out, e.X);
        put_floats(out, e.design);
        put_floats(out, e.action);
        put_floats(out, e.sigma);
    }
    if (!out) throw IoError("failed writing dataset: " + p.string());
}

Dataset load_dataset(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot open dataset: " + p.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw IoError("not a WVDS dataset: " + p.string());
    const auto version = get<std::uint32_t>(in);
    if (version != kVersion) throw IoError("unsupported dataset version");
    Dataset ds;
    ds.header.episodes = get<std::uint32_t>(in);
    ds.header.steps = get<std::uint32_t>(in);
    ds.header.substeps = get<std::uint32_t>(in);
    ds.header.d1 = get<std::uint32_t>(in);
    ds.header.d2 = get<std::uint32_t>(in);
    ds.header.design_dim = get<std::uint32_t>(in);
    ds.header.config_hash = get<std::uint64_t>(in);
    ds.header.region = get<std::uint8_t>(in);
    ds.header.mode = get<std::uint8_t>(in);
    ds.header.scatterers = get<std::uint16_t>(in);
    ds.header.action_period = get<double>(in);
    ds.header.base_seed = get<std::uint64_t>(in);

    const std::size_t px = static_cast<std::size_t>(ds.header.d1) * ds.header.d2;
    ds.episodes.resize(ds.header.episodes);
    for (auto& e : ds.episodes) {
        e.seed = get<std::uint64_t>(in);
        get_floats(in, e.X, static_cast<std::size_t>(ds.header.steps) * px);
        get_floats(in, e.design, static_cast<std::size_t>(ds.header.steps) * ds.header.design_dim);
        get_floats(in, e.action, static_cast<std::size_t>(ds.header.steps) * ds.header.design_dim);
        get_floats(in, e.sigma, static_cast<std::size_t>(ds.header.steps) * ds.header.substeps);
    }
    return ds;
}

WindowRef sample_window(const Dataset& ds, int horizon, Rng& rng) {
    if (horizon < 1 || horizon > static_cast<int>(ds.header.steps))
        throw WindowOutOfRange("window horizon exceeds episode length");
    WindowRef w;
    w.episode = static_cast<int>(rng.uniform_index(ds.header.episodes));
    w.offset = static_cast<int>(rng.uniform_index(ds.header.steps - horizon + 1));
    return w;
}

}  // namespace wavebench
