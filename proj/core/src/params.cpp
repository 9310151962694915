#include "wavebench/params.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace wavebench {

ParamBlock& ParamStore::add(const std::string& name, const std::vector<int>& shape,
                            bool trainable) {
    if (blocks_.count(name)) throw ConfigError("duplicate parameter block: " + name);
    ParamBlock b;
    b.value.reset(shape);
    b.grad.reset(shape);
    b.trainable = trainable;
    auto [it, ok] = blocks_.emplace(name, std::move(b));
    (void)ok;
    return it->second;
}

ParamBlock& ParamStore::at(const std::string& name) {
    auto it = blocks_.find(name);
    if (it == blocks_.end()) throw ConfigError("unknown parameter block: " + name);
    return it->second;
}

const ParamBlock& ParamStore::at(const std::string& name) const {
    auto it = blocks_.find(name);
    if (it == blocks_.end()) throw ConfigError("unknown parameter block: " + name);
    return it->second;
}

void ParamStore::zero_grad() {
    for (auto& [name, b] : blocks_) b.grad.fill(0.0);
}

std::size_t ParamStore::trainable_count() const {
    std::size_t n = 0;
    for (const auto& [name, b] : blocks_)
        if (b.trainable) n += b.value.numel();
    return n;
}

void ParamStore::adam_step(const AdamConfig& cfg) {
    ++adam_t_;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(adam_t_));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(adam_t_));
    for (auto& [name, b] : blocks_) {
        if (!b.trainable) continue;
        if (b.m.numel() != b.value.numel()) {
            b.m.reset(b.value.shape);
            b.v.reset(b.value.shape);
        }
        for (std::size_t i = 0; i < b.value.numel(); ++i) {
            const double g = b.grad.v[i];
            if (!std::isfinite(g))
                throw NonFiniteGradient("non-finite gradient in block " + name);
            b.m.v[i] = cfg.beta1 * b.m.v[i] + (1.0 - cfg.beta1) * g;
            b.v.v[i] = cfg.beta2 * b.v.v[i] + (1.0 - cfg.beta2) * g * g;
            const double mhat = b.m.v[i] / bc1;
            const double vhat = b.v.v[i] / bc2;
            b.value.v[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
        }
    }
}

void ParamStore::set_meta(const std::string& name, double x) {
    if (has(name)) {
        ParamBlock& b = at(name);
        if (b.value.numel() != 1) throw ShapeMismatch("meta block is not scalar: " + name);
        b.value.v[0] = x;
    } else {
        ParamBlock& b = add(name, {1}, /*trainable=*/false);
        b.value.v[0] = x;
    }
}

double ParamStore::meta(const std::string& name) const {
    const ParamBlock& b = at(name);
    if (b.value.numel() != 1) throw ShapeMismatch("meta block is not scalar: " + name);
    return b.value.v[0];
}

namespace {

constexpr char kMagic[4] = {'W', 'V', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& out, const T& x) {
    out.write(reinterpret_cast<const char*>(&x), sizeof(T));
}

template <typename T>
T get(std::ifstream& in) {
    T x{};
    in.read(reinterpret_cast<char*>(&x), sizeof(T));
    if (!in) throw IoError("truncated checkpoint file");
    return x;
}

}  // namespace

void ParamStore::save(const std::filesystem::path& p) const {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot open checkpoint for writing: " + p.string());
    out.write(kMagic, 4);
    put(out, kVersion);
    put(out, static_cast<std::uint32_t>(blocks_.size()));
    for (const auto& [name, b] : blocks_) {
        put(out, static_cast<std::uint32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        put(out, static_cast<std::uint8_t>(b.trainable ? 1 : 0));
        put(out, static_cast<std::uint32_t>(b.value.rank()));
        for (int d : b.value.shape) put(out, static_cast<std::uint64_t>(d));
        out.write(reinterpret_cast<const char*>(b.value.v.data()),
                  static_cast<std::streamsize>(b.value.numel() * sizeof(double)));
    }
    if (!out) throw IoError("failed writing checkpoint: " + p.string());
}

ParamStore ParamStore::load(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint: " + p.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw IoError("not a WVCK checkpoint: " + p.string());
    const auto version = get<std::uint32_t>(in);
    if (version != kVersion) throw IoError("unsupported checkpoint version");
    const auto count = get<std::uint32_t>(in);
    ParamStore ps;
    for (std::uint32_t i = 0; i < count; ++i) {
        const auto name_len = get<std::uint32_t>(in);
        std::string name(name_len, '\0');
        in.read(name.data(), name_len);
        const auto trainable = get<std::uint8_t>(in);
        const auto rank = get<std::uint32_t>(in);
        std::vector<int> shape(rank);
        for (auto& d : shape) d = static_cast<int>(get<std::uint64_t>(in));
        ParamBlock& b = ps.add(name, shape.empty() ? std::vector<int>{1} : shape,
                               trainable != 0);
        if (!shape.empty()) b.value.shape = shape;
        in.read(reinterpret_cast<char*>(b.value.v.data()),
                static_cast<std::streamsize>(b.value.numel() * sizeof(double)));
        if (!in) throw IoError("truncated checkpoint payload");
    }
    return ps;
}

}  // namespace wavebench
