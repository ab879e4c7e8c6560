#include "hat/model.hpp"

#include "hat/error.hpp"

#include <algorithm>
#include <numeric>

namespace hat {

// ---------------------------------------------------------------- predicates

MonadicPredicate MonadicPredicate::mod(std::uint64_t d, std::uint64_t r) {
    if (d == 0) fail(ErrorKind::Domain, "mod predicate needs a positive period");
    MonadicPredicate p;
    p.period = d;
    p.residues = {r % d};
    return p;
}

MonadicPredicate MonadicPredicate::at(std::uint64_t k) {
    MonadicPredicate p;
    p.threshold = k + 1;
    p.period = 1;
    p.exceptions[k] = true;
    return p;
}

bool MonadicPredicate::contains(std::uint64_t i) const {
    if (i < threshold) {
        auto it = exceptions.find(i);
        return it != exceptions.end() && it->second;
    }
    return residues.count(i % period) > 0;
}

std::string MonadicPredicate::to_text() const {
    if (threshold == 0 && exceptions.empty() && residues.size() == 1)
        return "mod(" + std::to_string(period) + "," + std::to_string(*residues.begin()) + ")";
    if (period == 1 && residues.empty() && exceptions.size() == 1 && exceptions.begin()->second &&
        threshold == exceptions.begin()->first + 1)
        return "at(" + std::to_string(exceptions.begin()->first) + ")";
    std::string out = "mon(" + std::to_string(threshold) + "," + std::to_string(period) + ",{";
    bool first = true;
    for (auto r : residues) {
        out += (first ? "" : ",") + std::to_string(r);
        first = false;
    }
    out += "},{";
    first = true;
    for (const auto& [e, in] : exceptions) {
        if (!in) continue;
        out += (first ? "" : ",") + std::to_string(e);
        first = false;
    }
    return out + "})";
}

// ---------------------------------------------------------------- orders

OrderFamily OrderFamily::table(std::map<std::size_t, std::vector<std::size_t>> traversals) {
    for (const auto& [n, t] : traversals) {
        std::vector<std::size_t> sorted = t;
        std::sort(sorted.begin(), sorted.end());
        std::vector<std::size_t> expect(n);
        std::iota(expect.begin(), expect.end(), 1);
        if (sorted != expect)
            fail(ErrorKind::Domain, "order for length " + std::to_string(n) + " is not a permutation of 1.." +
                                        std::to_string(n));
    }
    return OrderFamily(Kind::Table, std::move(traversals));
}

std::vector<std::size_t> OrderFamily::traversal(std::size_t n) const {
    std::vector<std::size_t> t;
    switch (kind_) {
    case Kind::Identity:
        for (std::size_t p = 1; p <= n; ++p) t.push_back(p);
        break;
    case Kind::Interleave:
        for (std::size_t lo = 1, hi = n; lo <= hi; ++lo, --hi) {
            t.push_back(lo);
            if (lo != hi) t.push_back(hi);
        }
        break;
    case Kind::Table: {
        auto it = table_.find(n);
        if (it == table_.end()) fail(ErrorKind::Domain, "order table has no entry for length " + std::to_string(n));
        t = it->second;
        break;
    }
    }
    return t;
}

std::size_t OrderFamily::rank(std::size_t p, std::size_t n) const {
    switch (kind_) {
    case Kind::Identity:
        return p;
    case Kind::Interleave:
        return 2 * p <= n + 1 ? 2 * p - 1 : 2 * (n + 1 - p);
    case Kind::Table: {
        auto t = traversal(n);
        return static_cast<std::size_t>(std::find(t.begin(), t.end(), p) - t.begin()) + 1;
    }
    }
    return p;
}

std::string OrderFamily::name() const {
    switch (kind_) {
    case Kind::Identity: return "identity";
    case Kind::Interleave: return "interleave";
    case Kind::Table: return "table";
    }
    return "identity";
}

// ---------------------------------------------------------------- positional embedding

std::size_t PeBlock::width() const {
    switch (kind) {
    case Kind::PowerTwo: return 4;
    case Kind::Predicates: return predicates.size();
    case Kind::PrefixScale: return 3;
    case Kind::Thermometer: return 2 * (max_len + 1);
    }
    return 0;
}

RVec PositionalEmbedding::at(std::size_t i, std::size_t n) const {
    if (auto it = table.find({i, n}); it != table.end()) return it->second;
    if (!table.empty() && blocks.empty())
        fail(ErrorKind::Domain, "explicit PE table has no entry for (" + std::to_string(i) + "," + std::to_string(n) + ")");
    RVec p = zeros(dim);
    for (const auto& b : blocks) {
        if (b.offset + b.width() > dim) fail(ErrorKind::Dimension, "PE block exceeds PE dimension");
        const std::size_t words = n - 1;
        const std::size_t r = i == n ? n : b.order.rank(i, words);
        switch (b.kind) {
        case PeBlock::Kind::PowerTwo: {
            Rational a = pow2_neg(static_cast<unsigned>(r));
            p[b.offset] = 1;
            p[b.offset + 1] = a;
            p[b.offset + 2] = a * a;
            p[b.offset + 3] = (i != n && r == words) ? 1 : 0;
            break;
        }
        case PeBlock::Kind::Predicates:
            for (std::size_t k = 0; k < b.predicates.size(); ++k)
                p[b.offset + k] = b.predicates[k].contains(r) ? 1 : 0;
            break;
        case PeBlock::Kind::PrefixScale:
            p[b.offset] = i == 1 ? 1 : 0;
            p[b.offset + 1] = i == 1 ? Rational(0) : Rational(static_cast<long>(n), static_cast<long>(i - 1));
            p[b.offset + 2] = Rational(1, static_cast<long>(n));
            break;
        case PeBlock::Kind::Thermometer: {
            if (i > b.max_len + 1)
                fail(ErrorKind::Domain, "position " + std::to_string(i) + " exceeds the thermometer PE range (max length " +
                                            std::to_string(b.max_len) + ")");
            const std::size_t L = b.max_len + 1;
            p[b.offset + (i - 1)] = 1;
            for (std::size_t k = 1; k <= i; ++k) p[b.offset + L + (k - 1)] = 1;
            break;
        }
        }
    }
    return p;
}

// ---------------------------------------------------------------- layers

void AttentionLayer::validate(const std::string& where) const {
    const std::size_t r = A.in_dim();
    if (A.out_dim() != r || B.in_dim() != r || B.out_dim() != r)
        fail(ErrorKind::Dimension, where + ": A and B must both map dimension " + std::to_string(r) + " to itself");
    if (C.in_dim() != 2 * r)
        fail(ErrorKind::Dimension, where + ": C expects input dimension " + std::to_string(C.in_dim()) + ", needs " +
                                       std::to_string(2 * r));
    if (declared_uniform && !is_uniform(*this))
        fail(ErrorKind::Dimension, where + ": declared uniform but the scores are not syntactically constant");
}

std::size_t Layer::in_dim() const {
    return std::visit([](const auto& b) { return b.in_dim(); }, body);
}

std::size_t Layer::out_dim() const {
    return std::visit([](const auto& b) { return b.out_dim(); }, body);
}

std::size_t Transformer::output_dim() const { return layers.empty() ? model_dim() : layers.back().out_dim(); }

void Transformer::validate() const {
    const std::size_t d = model_dim();
    if (d == 0) fail(ErrorKind::Dimension, "model dimension must be positive");
    for (char a : alphabet) {
        auto it = embedding.find(a);
        if (it == embedding.end()) fail(ErrorKind::Dimension, std::string("no embedding for token '") + a + "'");
        if (it->second.size() != d)
            fail(ErrorKind::Dimension, std::string("embedding of '") + a + "' has dimension " +
                                           std::to_string(it->second.size()) + ", expected " + std::to_string(d));
    }
    if (embedding.size() != alphabet.size()) fail(ErrorKind::Dimension, "embedding defines tokens outside the alphabet");
    if (pe.dim != d && !(pe.is_nope() && pe.dim == 0))
        fail(ErrorKind::Dimension, "PE dimension " + std::to_string(pe.dim) + " differs from model dimension " +
                                       std::to_string(d));
    std::size_t cur = d;
    for (std::size_t k = 0; k < layers.size(); ++k) {
        const std::string where = "layer " + std::to_string(k + 1);
        if (layers[k].in_dim() != cur)
            fail(ErrorKind::Dimension, where + ": expects input dimension " + std::to_string(layers[k].in_dim()) +
                                           ", previous layer outputs " + std::to_string(cur));
        if (const auto* att = std::get_if<AttentionLayer>(&layers[k].body)) att->validate(where);
        cur = layers[k].out_dim();
    }
    if (accept.size() != cur)
        fail(ErrorKind::Dimension, "acceptance vector has dimension " + std::to_string(accept.size()) + ", expected " +
                                       std::to_string(cur));
}

// ---------------------------------------------------------------- normalizers

namespace {

void require_nonempty(const std::vector<Rational>& scores, const char* who) {
    if (scores.empty()) fail(ErrorKind::Domain, std::string(who) + " of an empty score list");
}

}  // namespace

std::vector<Rational> normalize_uha(const std::vector<Rational>& scores) {
    require_nonempty(scores, "uha");
    std::size_t best = 0;
    for (std::size_t k = 1; k < scores.size(); ++k)
        if (scores[k] > scores[best]) best = k;
    std::vector<Rational> w(scores.size(), Rational(0));
    w[best] = 1;
    return w;
}

std::vector<Rational> normalize_uha_rightmost(const std::vector<Rational>& scores) {
    require_nonempty(scores, "uha");
    std::size_t best = 0;
    for (std::size_t k = 1; k < scores.size(); ++k)
        if (scores[k] >= scores[best]) best = k;
    std::vector<Rational> w(scores.size(), Rational(0));
    w[best] = 1;
    return w;
}

std::vector<Rational> normalize_aha(const std::vector<Rational>& scores) {
    require_nonempty(scores, "aha");
    const Rational top = *std::max_element(scores.begin(), scores.end());
    const long count = std::count(scores.begin(), scores.end(), top);
    std::vector<Rational> w(scores.size(), Rational(0));
    for (std::size_t k = 0; k < scores.size(); ++k)
        if (scores[k] == top) w[k] = Rational(1, count);
    return w;
}

std::vector<Rational> normalize(Normalizer kind, const std::vector<Rational>& scores) {
    switch (kind) {
    case Normalizer::UniqueLeftmost: return normalize_uha(scores);
    case Normalizer::UniqueRightmost: return normalize_uha_rightmost(scores);
    case Normalizer::Average: return normalize_aha(scores);
    }
    return normalize_uha(scores);
}

// ---------------------------------------------------------------- attention

std::vector<std::vector<Rational>> attention_weights(const AttentionLayer& layer, const RSeq& seq) {
    const std::size_t n = seq.size();
    RSeq queries = eval_pwl(layer.A, seq, "attention query A");
    RSeq keys = eval_pwl(layer.B, seq, "attention key B");
    std::vector<std::vector<Rational>> weights(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t span = layer.masking == Masking::StrictFuture ? i : n;
        if (span == 0) continue;
        std::vector<Rational> scores;
        scores.reserve(span);
        for (std::size_t j = 0; j < span; ++j) scores.push_back(dot(queries[i], keys[j]));
        weights[i] = normalize(layer.normalizer, scores);
    }
    return weights;
}

RSeq apply_attention(const AttentionLayer& layer, const RSeq& seq) {
    const std::size_t r = layer.in_dim();
    for (const auto& x : seq)
        if (x.size() != r)
            fail(ErrorKind::Dimension, "attention layer expects dimension " + std::to_string(r) + ", got " +
                                           std::to_string(x.size()));
    auto weights = attention_weights(layer, seq);
    RSeq out;
    out.reserve(seq.size());
    RVec joined(2 * r);
    for (std::size_t i = 0; i < seq.size(); ++i) {
        RVec v = zeros(r);
        for (std::size_t j = 0; j < weights[i].size(); ++j) {
            const Rational& w = weights[i][j];
            if (sgn(w) == 0) continue;
            for (std::size_t k = 0; k < r; ++k)
                if (sgn(seq[j][k]) != 0) v[k] += w * seq[j][k];
        }
        std::copy(seq[i].begin(), seq[i].end(), joined.begin());
        std::copy(v.begin(), v.end(), joined.begin() + static_cast<std::ptrdiff_t>(r));
        out.push_back(eval_pwl(layer.C, joined, "attention output C"));
    }
    return out;
}

RSeq apply_layer(const Layer& layer, const RSeq& seq, std::size_t index) {
    if (const auto* att = std::get_if<AttentionLayer>(&layer.body)) return apply_attention(*att, seq);
    return eval_pwl(std::get<PwlFn>(layer.body), seq, "layer " + std::to_string(index + 1));
}

RSeq embed(const Transformer& t, std::string_view word) {
    const std::size_t n = word.size() + 1;
    RSeq seq;
    seq.reserve(n);
    for (std::size_t i = 0; i < word.size(); ++i) {
        auto it = t.embedding.find(word[i]);
        if (it == t.embedding.end())
            fail(ErrorKind::Parse, std::string("unknown token '") + word[i] + "' at offset " + std::to_string(i));
        seq.push_back(it->second);
    }
    seq.push_back(t.eos_embedding);
    if (!t.pe.is_nope())
        for (std::size_t i = 0; i < n; ++i) {
            RVec p = t.pe.at(i + 1, n);
            for (std::size_t k = 0; k < p.size(); ++k) seq[i][k] += p[k];
        }
    return seq;
}

RunResult run_transformer(const Transformer& t, std::string_view word) {
    RunResult result;
    result.trace.push_back(embed(t, word));
    for (std::size_t k = 0; k < t.layers.size(); ++k)
        result.trace.push_back(apply_layer(t.layers[k], result.trace.back(), k));
    result.score = dot(t.accept, result.trace.back().back());
    result.accepted = sgn(result.score) > 0;
    return result;
}

bool accepts(const Transformer& t, std::string_view word) {
    RSeq seq = embed(t, word);
    for (std::size_t k = 0; k < t.layers.size(); ++k) seq = apply_layer(t.layers[k], seq, k);
    return sgn(dot(t.accept, seq.back())) > 0;
}

// ---------------------------------------------------------------- uniformity

bool is_uniform(const AttentionLayer& layer) {
    // <Ax, By> is constant when either side is identically zero, or both sides are constant.
    if (layer.A.is_zero() || layer.B.is_zero()) return true;
    return layer.A.is_constant() && layer.B.is_constant();
}

bool check_uniform(const Transformer& t) {
    for (const auto& l : t.layers)
        if (const auto* att = std::get_if<AttentionLayer>(&l.body))
            if (!is_uniform(*att)) return false;
    return true;
}

std::size_t attention_depth(const Transformer& t) {
    return static_cast<std::size_t>(
        std::count_if(t.layers.begin(), t.layers.end(), [](const Layer& l) { return l.is_attention(); }));
}

}  // namespace hat
