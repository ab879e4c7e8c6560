#pragma once

#include "hat/predicate.hpp"
#include "hat/pwl.hpp"
#include "hat/rational.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace hat {

/// Total orders on the positions {1..n} of a word, one per length. The
/// traversal lists positions in order; rank(p) is p's index in it.
class OrderFamily {
public:
    enum class Kind { Identity, Interleave, Table };

    static OrderFamily identity() { return OrderFamily(Kind::Identity, {}); }
    /// 1, n, 2, n-1, 3, n-2, ...
    static OrderFamily interleave() { return OrderFamily(Kind::Interleave, {}); }
    /// Explicit traversals per length; every entry must be a permutation of {1..n}.
    static OrderFamily table(std::map<std::size_t, std::vector<std::size_t>> traversals);

    Kind kind() const { return kind_; }
    const std::map<std::size_t, std::vector<std::size_t>>& traversals() const { return table_; }

    std::vector<std::size_t> traversal(std::size_t n) const;
    /// 1-based rank of 1-based position p among {1..n}.
    std::size_t rank(std::size_t p, std::size_t n) const;

    std::string name() const;
    bool operator==(const OrderFamily&) const = default;

private:
    OrderFamily(Kind k, std::map<std::size_t, std::vector<std::size_t>> t) : kind_(k), table_(std::move(t)) {}
    Kind kind_;
    std::map<std::size_t, std::vector<std::size_t>> table_;
};

/// One group of positional features written at a fixed offset. Positions are
/// 1..N where N = |w|+1 and N is the EOS slot; ranks come from `order` on the
/// word positions, with the EOS slot always ranked N.
struct PeBlock {
    enum class Kind {
        PowerTwo,     // (1, 2^-r, 2^-2r, [r = N-1])
        Predicates,   // one 0/1 feature per predicate, evaluated at the rank
        PrefixScale,  // ([i = 1], N/(i-1) or 0 at i = 1, 1/N)
        Thermometer,  // one-hot(i) then [i >= k] for k = 1..max_len+1
    };

    Kind kind = Kind::PowerTwo;
    std::size_t offset = 0;
    OrderFamily order = OrderFamily::identity();
    std::vector<MonadicPredicate> predicates;
    std::size_t max_len = 0;

    std::size_t width() const;
    bool operator==(const PeBlock&) const = default;
};

/// p(i, N), added componentwise to the token embedding. No blocks and no
/// table means NoPE. Explicit table entries override the blocks.
struct PositionalEmbedding {
    std::size_t dim = 0;
    std::vector<PeBlock> blocks;
    std::map<std::pair<std::size_t, std::size_t>, RVec> table;

    bool is_nope() const { return blocks.empty() && table.empty(); }
    RVec at(std::size_t i, std::size_t n) const;

    bool operator==(const PositionalEmbedding&) const = default;
};

enum class Normalizer {
    UniqueLeftmost,   // uha: weight 1 on the leftmost maximum
    UniqueRightmost,  // uha with rightmost tie-breaking
    Average,          // aha: 1/|P| on every maximum
};

enum class Masking { None, StrictFuture };

/// y_i = C(x_i, v), v = Σ_j w(j) x_j, w = wt(<A x_i, B x_j>_j).
struct AttentionLayer {
    PwlFn A;
    PwlFn B;
    PwlFn C;
    Normalizer normalizer = Normalizer::UniqueLeftmost;
    Masking masking = Masking::None;
    bool declared_uniform = false;

    std::size_t in_dim() const { return A.in_dim(); }
    std::size_t out_dim() const { return C.out_dim(); }
    void validate(const std::string& where) const;
    bool operator==(const AttentionLayer&) const = default;
};

struct Layer {
    std::variant<AttentionLayer, PwlFn> body;

    std::size_t in_dim() const;
    std::size_t out_dim() const;
    bool is_attention() const { return std::holds_alternative<AttentionLayer>(body); }
    bool operator==(const Layer&) const = default;
};

inline constexpr std::string_view kEosName = "<EOS>";

struct Transformer {
    std::string alphabet;                // one char per token, EOS excluded
    std::map<char, RVec> embedding;      // every token of the alphabet
    RVec eos_embedding;
    PositionalEmbedding pe;
    std::vector<Layer> layers;
    RVec accept;

    std::size_t model_dim() const { return eos_embedding.size(); }
    std::size_t output_dim() const;
    /// Throws Dimension on any ill-typed component.
    void validate() const;
    bool operator==(const Transformer&) const = default;
};

std::vector<Rational> normalize_uha(const std::vector<Rational>& scores);
std::vector<Rational> normalize_uha_rightmost(const std::vector<Rational>& scores);
std::vector<Rational> normalize_aha(const std::vector<Rational>& scores);
std::vector<Rational> normalize(Normalizer kind, const std::vector<Rational>& scores);

/// Per-position attention weights over the attended positions (j < i under
/// masking). An empty row is the masked-empty case.
std::vector<std::vector<Rational>> attention_weights(const AttentionLayer& layer, const RSeq& seq);

RSeq apply_attention(const AttentionLayer& layer, const RSeq& seq);
RSeq apply_layer(const Layer& layer, const RSeq& seq, std::size_t index = 0);

/// em(w EOS) + p(i, |w|+1).
RSeq embed(const Transformer& t, std::string_view word);

struct RunResult {
    bool accepted = false;
    Rational score;            // <t, v_last>
    std::vector<RSeq> trace;   // trace[0] embedded input, trace[k] after layer k
};

RunResult run_transformer(const Transformer& t, std::string_view word);
bool accepts(const Transformer& t, std::string_view word);

bool is_uniform(const AttentionLayer& layer);
bool check_uniform(const Transformer& t);

/// Number of attention layers, and whether every one uses the given normalizer family.
std::size_t attention_depth(const Transformer& t);

}  // namespace hat
