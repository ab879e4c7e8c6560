#pragma once

#include "hat/rational.hpp"

#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace hat {

/// x -> M x + c. Rows are kept dense (the serialized form) alongside a sparse
/// copy used for evaluation; compiled layers are mostly zeros.
class Affine {
public:
    Affine(std::size_t in_dim, std::vector<RVec> rows, RVec bias);

    std::size_t in_dim() const { return in_dim_; }
    std::size_t out_dim() const { return rows_.size(); }
    const std::vector<RVec>& rows() const { return rows_; }
    const RVec& bias() const { return bias_; }
    bool zero_matrix() const;

    RVec apply(const RVec& x) const;

    bool operator==(const Affine& o) const { return in_dim_ == o.in_dim_ && rows_ == o.rows_ && bias_ == o.bias_; }

private:
    std::size_t in_dim_;
    std::vector<RVec> rows_;
    RVec bias_;
    std::vector<std::vector<std::pair<std::size_t, Rational>>> sparse_;
};

struct ReluAt {
    std::size_t coord;  // 0-based
    bool operator==(const ReluAt&) const = default;
};

using PwlStep = std::variant<Affine, ReluAt>;

/// Piecewise-linear map built inductively: an identity base followed by a
/// chain of affine compositions and single-coordinate ReLUs.
class PwlFn {
public:
    static PwlFn identity(std::size_t dim);

    PwlFn then_affine(Affine g) const;
    PwlFn then_relu(std::size_t coord) const;

    std::size_t in_dim() const { return in_dim_; }
    std::size_t out_dim() const { return out_dim_; }
    const std::vector<PwlStep>& steps() const { return steps_; }

    /// Output is constant in the input: the last affine stage has a zero
    /// matrix (trailing ReLUs of a constant stay constant).
    bool is_constant() const;
    /// Constant and identically zero.
    bool is_zero() const;

    bool operator==(const PwlFn&) const = default;

private:
    PwlFn(std::size_t in, std::size_t out, std::vector<PwlStep> steps)
        : in_dim_(in), out_dim_(out), steps_(std::move(steps)) {}

    std::size_t in_dim_;
    std::size_t out_dim_;
    std::vector<PwlStep> steps_;
};

/// Exact evaluation. `where` names the caller in dimension errors.
RVec eval_pwl(const PwlFn& f, const RVec& x, const std::string& where = "pwl");
RSeq eval_pwl(const PwlFn& f, const RSeq& xs, const std::string& where = "pwl");

/// Sign pattern of every ReLU pre-activation (true = non-negative branch).
std::vector<bool> activation_pattern(const PwlFn& f, const RVec& x);

/// second ∘ first.
PwlFn compose(const PwlFn& first, const PwlFn& second);

/// Same map on the leading coordinates, with `extra` trailing coordinates
/// carried through unchanged.
PwlFn with_passthrough(const PwlFn& f, std::size_t extra);

/// Affine combination of builder sources (inputs or ReLU nodes) plus a constant.
class Lin {
public:
    Lin() = default;
    Lin(Rational c) : c_(std::move(c)) {}  // NOLINT: constants promote implicitly
    Lin(int c) : c_(c) {}                  // NOLINT

    static Lin source(std::size_t id) {
        Lin l;
        l.terms_[id] = 1;
        return l;
    }

    const std::map<std::size_t, Rational>& terms() const { return terms_; }
    const Rational& constant() const { return c_; }
    bool is_constant() const { return terms_.empty(); }

    Lin& operator+=(const Lin& o);
    Lin& operator-=(const Lin& o);
    Lin& operator*=(const Rational& k);

    friend Lin operator+(Lin a, const Lin& b) { return a += b; }
    friend Lin operator-(Lin a, const Lin& b) { return a -= b; }
    friend Lin operator-(Lin a) { return a *= Rational(-1); }
    friend Lin operator*(Lin a, const Rational& k) { return a *= k; }
    friend Lin operator*(const Rational& k, Lin a) { return a *= k; }

private:
    std::map<std::size_t, Rational> terms_;
    Rational c_ = 0;
};

/// Assembles a PwlFn from affine expressions with nested ReLUs. ReLU nodes are
/// grouped by nesting depth; each depth costs one affine stage.
class PwlBuilder {
public:
    explicit PwlBuilder(std::size_t in_dim) : in_dim_(in_dim) {}

    std::size_t in_dim() const { return in_dim_; }
    Lin in(std::size_t k) const;
    Lin relu(const Lin& x);
    Lin min(const Lin& a, const Lin& b) { return a - relu(a - b); }
    Lin max(const Lin& a, const Lin& b) { return a + relu(b - a); }

    PwlFn build(const std::vector<Lin>& outputs) const;

private:
    struct Node {
        Lin pre;
        std::size_t level;
    };
    std::size_t level_of(const Lin& l) const;

    std::size_t in_dim_;
    std::vector<Node> nodes_;
};

}  // namespace hat
