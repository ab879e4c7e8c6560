#include "hat/program.hpp"

#include "hat/error.hpp"

namespace hat {

Program::Program(std::size_t initial_width, std::size_t max_width) : width_(initial_width), max_width_(max_width) {
    if (width_ > max_width_)
        fail(ErrorKind::Resource, "embedding width " + std::to_string(width_) + " exceeds the cap of " +
                                      std::to_string(max_width_));
}

void Program::grow(std::size_t added) {
    if (width_ + added > max_width_)
        fail(ErrorKind::Resource, "residual stream would need " + std::to_string(width_ + added) +
                                      " coordinates, cap is " + std::to_string(max_width_));
    width_ += added;
}

std::size_t Program::add_pwl(const Emit& outputs) {
    const std::size_t w = width_;
    PwlBuilder b(w);
    std::vector<Lin> outs;
    outs.reserve(w);
    for (std::size_t k = 0; k < w; ++k) outs.push_back(b.in(k));
    auto fresh = outputs(b);
    outs.insert(outs.end(), fresh.begin(), fresh.end());
    grow(fresh.size());
    layers_.push_back(Layer{b.build(outs)});
    return w;
}

std::size_t Program::add_attention(Normalizer norm, Masking mask, const Emit& query, const Emit& key,
                                   const Emit& outputs) {
    PwlBuilder qb(width_);
    PwlBuilder kb(width_);
    auto q = query ? query(qb) : std::vector<Lin>{};
    auto k = key ? key(kb) : std::vector<Lin>{};
    if (q.size() != k.size()) fail(ErrorKind::Dimension, "query and key lengths differ");
    if (q.size() > width_) {
        // The score space lives inside the stream; widen with zero coordinates.
        const std::size_t pad = q.size() - width_;
        add_pwl([pad](PwlBuilder&) { return std::vector<Lin>(pad, Lin(0)); });
        return add_attention(norm, mask, query, key, outputs);
    }
    const std::size_t w = width_;
    q.resize(w, Lin(0));
    k.resize(w, Lin(0));

    PwlBuilder cb(2 * w);
    std::vector<Lin> outs;
    outs.reserve(w);
    for (std::size_t j = 0; j < w; ++j) outs.push_back(cb.in(j));
    auto fresh = outputs(cb);
    outs.insert(outs.end(), fresh.begin(), fresh.end());
    grow(fresh.size());

    AttentionLayer att{qb.build(q), kb.build(k), cb.build(outs), norm, mask, false};
    att.declared_uniform = is_uniform(att);
    layers_.push_back(Layer{std::move(att)});
    return w;
}

}  // namespace hat
