#include "hat/pwl.hpp"

#include "hat/error.hpp"

#include <algorithm>

namespace hat {

Affine::Affine(std::size_t in_dim, std::vector<RVec> rows, RVec bias)
    : in_dim_(in_dim), rows_(std::move(rows)), bias_(std::move(bias)) {
    if (bias_.size() != rows_.size())
        fail(ErrorKind::Dimension, "affine bias has dimension " + std::to_string(bias_.size()) + ", expected " +
                                       std::to_string(rows_.size()));
    sparse_.resize(rows_.size());
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        if (rows_[r].size() != in_dim_)
            fail(ErrorKind::Dimension, "affine row " + std::to_string(r) + " has " + std::to_string(rows_[r].size()) +
                                           " columns, expected " + std::to_string(in_dim_));
        for (std::size_t c = 0; c < in_dim_; ++c)
            if (sgn(rows_[r][c]) != 0) sparse_[r].emplace_back(c, rows_[r][c]);
    }
}

bool Affine::zero_matrix() const {
    return std::all_of(sparse_.begin(), sparse_.end(), [](const auto& row) { return row.empty(); });
}

RVec Affine::apply(const RVec& x) const {
    RVec y = bias_;
    for (std::size_t r = 0; r < sparse_.size(); ++r)
        for (const auto& [c, m] : sparse_[r])
            if (sgn(x[c]) != 0) y[r] += m * x[c];
    return y;
}

PwlFn PwlFn::identity(std::size_t dim) { return PwlFn(dim, dim, {}); }

PwlFn PwlFn::then_affine(Affine g) const {
    if (g.in_dim() != out_dim_)
        fail(ErrorKind::Dimension, "affine stage expects input dimension " + std::to_string(g.in_dim()) +
                                       " but the inner map outputs " + std::to_string(out_dim_));
    auto steps = steps_;
    std::size_t out = g.out_dim();
    steps.emplace_back(std::move(g));
    return PwlFn(in_dim_, out, std::move(steps));
}

PwlFn PwlFn::then_relu(std::size_t coord) const {
    if (coord >= out_dim_)
        fail(ErrorKind::Dimension,
             "ReLU coordinate " + std::to_string(coord) + " out of range for dimension " + std::to_string(out_dim_));
    auto steps = steps_;
    steps.emplace_back(ReluAt{coord});
    return PwlFn(in_dim_, out_dim_, std::move(steps));
}

bool PwlFn::is_constant() const {
    for (auto it = steps_.rbegin(); it != steps_.rend(); ++it)
        if (const auto* a = std::get_if<Affine>(&*it)) return a->zero_matrix();
    return out_dim_ == 0;
}

bool PwlFn::is_zero() const {
    if (!is_constant()) return false;
    // A constant map is determined by its bias pushed through the trailing ReLUs.
    const RVec value = eval_pwl(*this, zeros(in_dim_));
    return std::all_of(value.begin(), value.end(), [](const Rational& q) { return sgn(q) == 0; });
}

RVec eval_pwl(const PwlFn& f, const RVec& x, const std::string& where) {
    if (x.size() != f.in_dim())
        fail(ErrorKind::Dimension, where + ": expected input dimension " + std::to_string(f.in_dim()) + ", got " +
                                       std::to_string(x.size()));
    RVec cur = x;
    for (const auto& step : f.steps()) {
        if (const auto* a = std::get_if<Affine>(&step)) {
            cur = a->apply(cur);
        } else {
            auto& w = cur[std::get<ReluAt>(step).coord];
            if (sgn(w) < 0) w = 0;
        }
    }
    return cur;
}

RSeq eval_pwl(const PwlFn& f, const RSeq& xs, const std::string& where) {
    RSeq out;
    out.reserve(xs.size());
    for (const auto& x : xs) out.push_back(eval_pwl(f, x, where));
    return out;
}

std::vector<bool> activation_pattern(const PwlFn& f, const RVec& x) {
    std::vector<bool> pattern;
    RVec cur = x;
    for (const auto& step : f.steps()) {
        if (const auto* a = std::get_if<Affine>(&step)) {
            cur = a->apply(cur);
        } else {
            auto& w = cur[std::get<ReluAt>(step).coord];
            pattern.push_back(sgn(w) >= 0);
            if (sgn(w) < 0) w = 0;
        }
    }
    return pattern;
}

PwlFn compose(const PwlFn& first, const PwlFn& second) {
    if (first.out_dim() != second.in_dim())
        fail(ErrorKind::Dimension, "cannot compose: output dimension " + std::to_string(first.out_dim()) +
                                       " feeds input dimension " + std::to_string(second.in_dim()));
    PwlFn out = first;
    for (const auto& step : second.steps()) {
        if (const auto* a = std::get_if<Affine>(&step))
            out = out.then_affine(*a);
        else
            out = out.then_relu(std::get<ReluAt>(step).coord);
    }
    return out;
}

PwlFn with_passthrough(const PwlFn& f, std::size_t extra) {
    PwlFn out = PwlFn::identity(f.in_dim() + extra);
    std::size_t width = f.in_dim();
    for (const auto& step : f.steps()) {
        if (const auto* a = std::get_if<Affine>(&step)) {
            std::vector<RVec> rows;
            RVec bias = a->bias();
            for (const auto& row : a->rows()) {
                RVec r = row;
                r.resize(width + extra, Rational(0));
                rows.push_back(std::move(r));
            }
            for (std::size_t e = 0; e < extra; ++e) {
                RVec r = zeros(width + extra);
                r[width + e] = 1;
                rows.push_back(std::move(r));
                bias.push_back(0);
            }
            out = out.then_affine(Affine(width + extra, std::move(rows), std::move(bias)));
            width = a->out_dim();
        } else {
            out = out.then_relu(std::get<ReluAt>(step).coord);
        }
    }
    return out;
}

Lin& Lin::operator+=(const Lin& o) {
    for (const auto& [id, k] : o.terms_) {
        auto& slot = terms_[id];
        slot += k;
        if (sgn(slot) == 0) terms_.erase(id);
    }
    c_ += o.c_;
    return *this;
}

Lin& Lin::operator-=(const Lin& o) {
    for (const auto& [id, k] : o.terms_) {
        auto& slot = terms_[id];
        slot -= k;
        if (sgn(slot) == 0) terms_.erase(id);
    }
    c_ -= o.c_;
    return *this;
}

Lin& Lin::operator*=(const Rational& k) {
    if (sgn(k) == 0) {
        terms_.clear();
        c_ = 0;
        return *this;
    }
    for (auto& [id, m] : terms_) m *= k;
    c_ *= k;
    return *this;
}

Lin PwlBuilder::in(std::size_t k) const {
    if (k >= in_dim_)
        fail(ErrorKind::Dimension, "builder input " + std::to_string(k) + " out of range " + std::to_string(in_dim_));
    return Lin::source(k);
}

std::size_t PwlBuilder::level_of(const Lin& l) const {
    std::size_t level = 0;
    for (const auto& [id, k] : l.terms())
        if (id >= in_dim_) level = std::max(level, nodes_[id - in_dim_].level);
    return level;
}

Lin PwlBuilder::relu(const Lin& x) {
    if (x.is_constant()) return Lin(sgn(x.constant()) > 0 ? x.constant() : Rational(0));
    nodes_.push_back(Node{x, level_of(x) + 1});
    return Lin::source(in_dim_ + nodes_.size() - 1);
}

PwlFn PwlBuilder::build(const std::vector<Lin>& outputs) const {
    // coord_of[id] = current coordinate index of a source, once materialised.
    std::vector<std::size_t> coord_of(in_dim_ + nodes_.size(), static_cast<std::size_t>(-1));
    for (std::size_t k = 0; k < in_dim_; ++k) coord_of[k] = k;

    auto row_for = [&](const Lin& l, std::size_t width) {
        RVec row = zeros(width);
        for (const auto& [id, k] : l.terms()) {
            if (coord_of[id] == static_cast<std::size_t>(-1))
                fail(ErrorKind::Dimension, "PWL builder: source used before it is available");
            row[coord_of[id]] += k;
        }
        return row;
    };

    std::size_t max_level = 0;
    for (const auto& n : nodes_) max_level = std::max(max_level, n.level);

    PwlFn f = PwlFn::identity(in_dim_);
    std::size_t width = in_dim_;
    for (std::size_t level = 1; level <= max_level; ++level) {
        std::vector<RVec> rows;
        RVec bias;
        for (std::size_t k = 0; k < width; ++k) {
            RVec r = zeros(width);
            r[k] = 1;
            rows.push_back(std::move(r));
            bias.push_back(0);
        }
        std::vector<std::size_t> fresh;
        for (std::size_t n = 0; n < nodes_.size(); ++n) {
            if (nodes_[n].level != level) continue;
            rows.push_back(row_for(nodes_[n].pre, width));
            bias.push_back(nodes_[n].pre.constant());
            fresh.push_back(n);
        }
        std::size_t new_width = rows.size();
        f = f.then_affine(Affine(width, std::move(rows), std::move(bias)));
        for (std::size_t j = 0; j < fresh.size(); ++j) {
            coord_of[in_dim_ + fresh[j]] = width + j;
            f = f.then_relu(width + j);
        }
        width = new_width;
    }

    std::vector<RVec> rows;
    RVec bias;
    for (const auto& out : outputs) {
        rows.push_back(row_for(out, width));
        bias.push_back(out.constant());
    }
    return f.then_affine(Affine(width, std::move(rows), std::move(bias)));
}

}  // namespace hat
