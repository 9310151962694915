#include "wavebench/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace wavebench {

const char* to_string(Region r) {
    return r == Region::FullInterior ? "full" : "quadrant";
}

const char* to_string(ActuationMode m) {
    switch (m) {
        case ActuationMode::Radii: return "R";
        case ActuationMode::Position: return "P";
        default: return "F";
    }
}

Region region_from_string(const std::string& s) {
    if (s == "full") return Region::FullInterior;
    if (s == "quadrant") return Region::UpperRightQuadrant;
    throw ConfigError("unknown task_region '" + s + "' (expected full|quadrant)");
}

ActuationMode mode_from_string(const std::string& s) {
    if (s == "R") return ActuationMode::Radii;
    if (s == "P") return ActuationMode::Position;
    if (s == "F") return ActuationMode::Full;
    throw ConfigError("unknown actuation_mode '" + s + "' (expected R|P|F)");
}

void SimConfig::validate() const {
    if (grid_n < 64) throw ConfigError("grid_n must be >= 64");
    if (pml_width < 8 || pml_width >= grid_n / 4)
        throw ConfigError("pml_width must be >= 8 and < grid_n/4");
    if (!(cfl_safety > 0.0 && cfl_safety < 1.0))
        throw ConfigError("cfl_safety must lie in (0,1)");
    if (domain_half_width <= 0.0) throw ConfigError("domain_half_width must be positive");
    if (sound_speed <= 0.0) throw ConfigError("sound_speed must be positive");
    if (pml_strength < 0.0) throw ConfigError("pml_strength must be non-negative");
    if (action_period <= 0.0) throw ConfigError("action_period must be positive");
    if (blowup_bound <= 0.0) throw ConfigError("blowup_bound must be positive");
    if (sensor_n < 1 || sensor_n > interior_n())
        throw ConfigError("sensor_n must lie in [1, interior_n]");
    const double margin = pml_width * dx();
    if (std::abs(source_x) >= domain_half_width - margin ||
        std::abs(source_y) >= domain_half_width - margin)
        throw ConfigError("source must lie inside the non-PML interior");
}

void RobotConfig::validate() const {
    if (scatterer_count < 1) throw ConfigError("scatterer_count must be >= 1");
    if (!(r_min > 0.0 && r_min <= r_max)) throw ConfigError("need 0 < r_min <= r_max");
    if (r_init < r_min || r_init > r_max) throw ConfigError("r_init must lie in [r_min, r_max]");
    if (gap < 0.0) throw ConfigError("gap must be non-negative");
    if (position_rate_bound < 0.0 || radius_rate_bound < 0.0)
        throw ConfigError("rate bounds must be non-negative");
    if (ring_radius <= 0.0) throw ConfigError("ring_radius must be positive");
    if (design_margin < 0.0) throw ConfigError("design_margin must be non-negative");
}

void Scenario::validate() const {
    sim.validate();
    robot.validate();
    if (episode_steps < 1) throw ConfigError("episode_steps must be >= 1");
    if (latent_cells < 32) throw ConfigError("latent_cells must be >= 32");
    if (latent_span <= 0.0) throw ConfigError("latent_span must be positive");
    if (param_target < 1000) throw ConfigError("param_target must be >= 1000");
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("invalid numeric value for key '" + key + "': " + v);
    }
}

int parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return static_cast<int>(x);
    } catch (const std::exception&) {
        throw ConfigError("invalid integer value for key '" + key + "': " + v);
    }
}

using Setter = std::function<void(Scenario&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"domain_half_width", [](Scenario& s, const std::string& k, const std::string& v) { s.sim.domain_half_width = parse_double(k, v); }},
        {"grid_n", [](Scenario& s, const std::string& k, const std::string& v) { s.sim.grid_n = parse_int(k, v); }},
        {"sound_speed", [](Scenario& s, const std::string& k, const std::string& v) { s.sim.sound_speed = parse_double(k, v); }},
        {"pml_width", [](Scenario& s, const std::string& k, const std::string& v) { s.sim.pml_width = parse_int(k, v); }},
        {"pml_strength", [](Scenario& s, const std::string& k, const std::string& v) { s.sim.pml_strength = parse_double(k, v); }},
        {"source_x", [](Scenario& s, const std::string& k, const std::string& v) { s.sim.source_x = parse_double(k, v); }},
        {"source_y", [](Scenario& s, const std::string& k, const std::string& v) { s.sim.source_y = parse_double(k, v); }},
        {"source_frequency", [](Scenario& s, const std::string& k, const std::string& v) { s.sim.source_frequency = parse_double(k, v); }},
        {"source_amplitude", [](Scenario& s, const std::string& k, const std::string& v) { s.sim.source_amplitude = parse_double(k, v); }},
        {"cfl_safety", [](Scenario& s, const std::string& k, const std::string& v) { s.sim.cfl_safety = parse_double(k, v); }},
        {"action_period", [](Scenario& s, const std::string& k, const std::string& v) { s.sim.action_period = parse_double(k, v); }},
        {"blowup_bound", [](Scenario& s, const std::string& k, const std::string& v) { s.sim.blowup_bound = parse_double(k, v); }},
        {"sensor_n", [](Scenario& s, const std::string& k, const std::string& v) { s.sim.sensor_n = parse_int(k, v); }},
        {"actuation_mode", [](Scenario& s, const std::string&, const std::string& v) { s.robot.mode = mode_from_string(v); }},
        {"scatterer_count", [](Scenario& s, const std::string& k, const std::string& v) { s.robot.scatterer_count = parse_int(k, v); }},
        {"r_min", [](Scenario& s, const std::string& k, const std::string& v) { s.robot.r_min = parse_double(k, v); }},
        {"r_max", [](Scenario& s, const std::string& k, const std::string& v) { s.robot.r_max = parse_double(k, v); }},
        {"r_init", [](Scenario& s, const std::string& k, const std::string& v) { s.robot.r_init = parse_double(k, v); }},
        {"gap", [](Scenario& s, const std::string& k, const std::string& v) { s.robot.gap = parse_double(k, v); }},
        {"position_rate_bound", [](Scenario& s, const std::string& k, const std::string& v) { s.robot.position_rate_bound = parse_double(k, v); }},
        {"radius_rate_bound", [](Scenario& s, const std::string& k, const std::string& v) { s.robot.radius_rate_bound = parse_double(k, v); }},
        {"ring_radius", [](Scenario& s, const std::string& k, const std::string& v) { s.robot.ring_radius = parse_double(k, v); }},
        {"design_margin", [](Scenario& s, const std::string& k, const std::string& v) { s.robot.design_margin = parse_double(k, v); }},
        {"task_region", [](Scenario& s, const std::string&, const std::string& v) { s.task_region = region_from_string(v); }},
        {"episode_steps", [](Scenario& s, const std::string& k, const std::string& v) { s.episode_steps = parse_int(k, v); }},
        {"latent_cells", [](Scenario& s, const std::string& k, const std::string& v) { s.latent_cells = parse_int(k, v); }},
        {"latent_span", [](Scenario& s, const std::string& k, const std::string& v) { s.latent_span = parse_double(k, v); }},
        {"param_target", [](Scenario& s, const std::string& k, const std::string& v) { s.param_target = parse_int(k, v); }},
    };
    return table;
}

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace

Scenario Scenario::from_text(const std::string& text) {
    Scenario sc;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end())
            throw ConfigError("unknown config key '" + key + "' (line " + std::to_string(lineno) + ")");
        it->second(sc, key, value);
    }
    sc.validate();
    return sc;
}

Scenario Scenario::from_file(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw IoError("cannot open config file: " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_text(ss.str());
}

std::string Scenario::canonical() const {
    std::ostringstream out;
    out << "domain_half_width=" << fmt_double(sim.domain_half_width) << '\n'
        << "grid_n=" << sim.grid_n << '\n'
        << "sound_speed=" << fmt_double(sim.sound_speed) << '\n'
        << "pml_width=" << sim.pml_width << '\n'
        << "pml_strength=" << fmt_double(sim.pml_strength) << '\n'
        << "source_x=" << fmt_double(sim.source_x) << '\n'
        << "source_y=" << fmt_double(sim.source_y) << '\n'
        << "source_frequency=" << fmt_double(sim.source_frequency) << '\n'
        << "source_amplitude=" << fmt_double(sim.source_amplitude) << '\n'
        << "cfl_safety=" << fmt_double(sim.cfl_safety) << '\n'
        << "action_period=" << fmt_double(sim.action_period) << '\n'
        << "blowup_bound=" << fmt_double(sim.blowup_bound) << '\n'
        << "sensor_n=" << sim.sensor_n << '\n'
        << "actuation_mode=" << to_string(robot.mode) << '\n'
        << "scatterer_count=" << robot.scatterer_count << '\n'
        << "r_min=" << fmt_double(robot.r_min) << '\n'
        << "r_max=" << fmt_double(robot.r_max) << '\n'
        << "r_init=" << fmt_double(robot.r_init) << '\n'
        << "gap=" << fmt_double(robot.gap) << '\n'
        << "position_rate_bound=" << fmt_double(robot.position_rate_bound) << '\n'
        << "radius_rate_bound=" << fmt_double(robot.radius_rate_bound) << '\n'
        << "ring_radius=" << fmt_double(robot.ring_radius) << '\n'
        << "design_margin=" << fmt_double(robot.design_margin) << '\n'
        << "task_region=" << to_string(task_region) << '\n'
        << "episode_steps=" << episode_steps << '\n'
        << "latent_cells=" << latent_cells << '\n'
        << "latent_span=" << fmt_double(latent_span) << '\n'
        << "param_target=" << param_target << '\n';
    return out.str();
}

std::uint64_t Scenario::hash() const { return fnv1a(canonical()); }

std::uint64_t Scenario::env_hash() const {
    const std::string c = canonical();
    const auto cut = c.find("latent_cells=");
    return fnv1a(cut == std::string::npos ? c : c.substr(0, cut));
}

void Scenario::write_file(const std::filesystem::path& p) const {
    std::ofstream out(p);
    if (!out) throw IoError("cannot write config file: " + p.string());
    out << canonical();
    if (!out) throw IoError("failed writing config file: " + p.string());
}

void apply_space_tag(Scenario& sc, const std::string& tag) {
    if (tag.empty()) throw ConfigError("empty actuation-space tag");
    sc.robot.mode = mode_from_string(tag.substr(0, 1));
    if (tag.size() > 1) {
        sc.robot.scatterer_count = parse_int("space tag", tag.substr(1));
    } else if (sc.robot.mode == ActuationMode::Radii) {
        sc.robot.scatterer_count = 19;  // ring configuration
    }
    sc.robot.validate();
}

}  // namespace wavebench
