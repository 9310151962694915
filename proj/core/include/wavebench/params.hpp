#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "wavebench/common.hpp"
#include "wavebench/tensor.hpp"

namespace wavebench {

struct ParamBlock {
    Tensor value;
    Tensor grad;
    Tensor m, v;  // Adam moments, lazily sized
    bool trainable = true;
};

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Named parameter blocks plus their gradients and optimizer state. Blocks are
// kept in name order so iteration, checkpoints, and updates are deterministic.
class ParamStore {
  public:
    ParamBlock& add(const std::string& name, const std::vector<int>& shape, bool trainable = true);
    bool has(const std::string& name) const { return blocks_.count(name) != 0; }
    ParamBlock& at(const std::string& name);
    const ParamBlock& at(const std::string& name) const;

    std::map<std::string, ParamBlock>& blocks() { return blocks_; }
    const std::map<std::string, ParamBlock>& blocks() const { return blocks_; }

    void zero_grad();
    std::size_t trainable_count() const;

    // One adaptive-moment step over every trainable block using the stored
    // gradients. Throws NonFiniteGradient if any gradient is non-finite.
    void adam_step(const AdamConfig& cfg);
    long long adam_t() const { return adam_t_; }

    // Convenience scalar metadata (stored as rank-0 blocks, not trainable).
    void set_meta(const std::string& name, double x);
    double meta(const std::string& name) const;
    bool has_meta(const std::string& name) const { return has(name); }

    void save(const std::filesystem::path& p) const;
    static ParamStore load(const std::filesystem::path& p);

  private:
    std::map<std::string, ParamBlock> blocks_;
    long long adam_t_ = 0;
};

}  // namespace wavebench
