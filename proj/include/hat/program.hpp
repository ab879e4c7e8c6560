#pragma once

#include "hat/model.hpp"
#include "hat/pwl.hpp"

#include <functional>
#include <string>
#include <vector>

namespace hat {

/// Residual-stream assembler used by the compilers. Every layer copies the
/// whole stream and appends fresh coordinates, so a coordinate index stays
/// valid for the rest of the program.
class Program {
public:
    using Emit = std::function<std::vector<Lin>(PwlBuilder&)>;

    Program(std::size_t initial_width, std::size_t max_width);

    std::size_t width() const { return width_; }
    std::size_t layer_count() const { return layers_.size(); }
    const std::vector<Layer>& layers() const { return layers_; }

    /// Appends a PWL layer; returns the index of the first new coordinate.
    std::size_t add_pwl(const Emit& outputs);

    /// Appends an attention layer with score <query(x_i), key(x_j)>. The output
    /// builder sees x_i at 0..w-1 and v at w..2w-1, where w = width() on entry.
    /// Empty query or key gives a uniform layer.
    std::size_t add_attention(Normalizer norm, Masking mask, const Emit& query, const Emit& key, const Emit& outputs);

private:
    void grow(std::size_t added);

    std::size_t width_;
    std::size_t max_width_;
    std::vector<Layer> layers_;
};

}  // namespace hat
