#include "compile_common.hpp"

#include "hat/error.hpp"

#include <set>

namespace hat::detail {

namespace {

void collect_tokens(const Formula& f, std::set<char>& out);

void collect_tokens(const Term& t, std::set<char>& out) {
    switch (t.op()) {
    case TermOp::Const: return;
    case TermOp::LeftCount:
    case TermOp::RightCount: collect_tokens(t.body(), out); return;
    default:
        collect_tokens(t.arg(0), out);
        collect_tokens(t.arg(1), out);
    }
}

void collect_tokens(const Formula& f, std::set<char>& out) {
    if (f.op() == FormulaOp::TokenIs) out.insert(f.token_char());
    if (f.op() == FormulaOp::Cmp) {
        collect_tokens(f.lhs_term(), out);
        collect_tokens(f.rhs_term(), out);
    }
    for (std::size_t k = 0; k < f.arity(); ++k) collect_tokens(f.arg(k), out);
}

}  // namespace

void check_alphabet(std::string_view alphabet, const Formula& f) {
    if (alphabet.empty()) fail(ErrorKind::Domain, "alphabet is empty");
    std::set<char> seen;
    for (char c : alphabet)
        if (!seen.insert(c).second) fail(ErrorKind::Domain, std::string("alphabet repeats '") + c + "'");
    std::set<char> used;
    collect_tokens(f, used);
    for (char c : used)
        if (!seen.count(c)) fail(ErrorKind::Domain, std::string("formula mentions token '") + c + "' outside the alphabet");
}

std::size_t Lowering::lower(const Formula& f) {
    const std::string key = to_text(f);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const std::size_t c = emit(f);
    memo_[key] = c;
    info_.subformulas.push_back({f, c, prog_.layer_count()});
    return c;
}

void Lowering::name_aux(const std::string& name, const Formula& f, std::size_t coord) {
    info_.auxiliary.push_back({name, {f, coord, prog_.layer_count()}});
}

std::size_t Lowering::emit_boolean(const Formula& f) {
    switch (f.op()) {
    case FormulaOp::Not: {
        const auto x = lower(f.arg());
        return prog_.add_pwl([&](PwlBuilder& b) { return std::vector<Lin>{Lin(1) - b.in(x)}; });
    }
    case FormulaOp::And: {
        const auto x = lower(f.arg(0));
        const auto y = lower(f.arg(1));
        return prog_.add_pwl([&](PwlBuilder& b) { return std::vector<Lin>{b.min(b.in(x), b.in(y))}; });
    }
    case FormulaOp::Or: {
        const auto x = lower(f.arg(0));
        const auto y = lower(f.arg(1));
        return prog_.add_pwl([&](PwlBuilder& b) { return std::vector<Lin>{b.max(b.in(x), b.in(y))}; });
    }
    default: fail(ErrorKind::Fragment, "not a boolean connective: " + to_text(f));
    }
}

std::size_t emit_search(Program& p, Normalizer norm, const Positions& pos, const KeyFn& stop, std::size_t read) {
    // score(i, j) = -(a_i - a_j)^2 - 2*[not stop(j) and j not last] - 4*[j is EOS]
    auto query = [&](PwlBuilder& b) { return std::vector<Lin>{b.in(pos.one), b.in(pos.a), b.in(pos.a2)}; };
    auto key = [&](PwlBuilder& b) {
        Lin miss = b.relu(Lin(1) - stop(b) - b.in(pos.islast));
        return std::vector<Lin>{Lin(0) - b.in(pos.a2) - Rational(2) * miss - Rational(4) * b.in(pos.eos),
                                Rational(2) * b.in(pos.a), Lin(-1)};
    };
    const std::size_t w = p.width();
    auto out = [&](PwlBuilder& b) {
        Lin at_eos = b.in(pos.eos);
        return std::vector<Lin>{b.relu(b.in(w + read) - at_eos) + b.min(at_eos, b.in(read))};
    };
    return p.add_attention(norm, Masking::None, query, key, out);
}

std::size_t emit_next(Program& p, Normalizer norm, const Positions& pos, std::size_t read) {
    // score(i, j) = -(a_j - a_i/2)^2, maximal at the next rank (EOS after the last word position)
    auto query = [&](PwlBuilder& b) { return std::vector<Lin>{b.in(pos.one), b.in(pos.a), b.in(pos.a2)}; };
    auto key = [&](PwlBuilder& b) {
        return std::vector<Lin>{Lin(0) - b.in(pos.a2), b.in(pos.a), Lin(Rational(-1, 4))};
    };
    const std::size_t w = p.width();
    auto out = [&](PwlBuilder& b) { return std::vector<Lin>{b.relu(b.in(w + read) - b.in(w + pos.eos))}; };
    return p.add_attention(norm, Masking::None, query, key, out);
}

std::size_t emit_route_first(Program& p, Normalizer norm, const Positions& pos, std::size_t bit, bool accepts_empty) {
    auto query = [&](PwlBuilder& b) { return std::vector<Lin>{b.in(pos.one)}; };
    auto key = [&](PwlBuilder& b) { return std::vector<Lin>{b.in(pos.a) - Rational(4) * b.in(pos.eos)}; };
    const std::size_t w = p.width();
    auto out = [&](PwlBuilder& b) {
        Lin eos_v = b.in(w + pos.eos);
        Lin r = Rational(2) * b.relu(b.in(w + bit) - eos_v) - Lin(1);
        if (accepts_empty) r += Rational(2) * eos_v;
        return std::vector<Lin>{r};
    };
    return p.add_attention(norm, Masking::None, query, key, out);
}

std::size_t emit_readout(Program& p, std::size_t bit, std::size_t first, bool accepts_empty) {
    return p.add_pwl([&](PwlBuilder& b) {
        Lin r = Rational(2) * b.relu(b.in(bit) - b.in(first)) - Lin(1);
        if (accepts_empty) r += Rational(2) * b.in(first);
        return std::vector<Lin>{r};
    });
}

Transformer assemble(std::string_view alphabet, std::size_t width0, RVec eos_vec, const RVec& token_extra,
                     PositionalEmbedding pe, const Program& p, std::size_t out) {
    Transformer t;
    t.alphabet = std::string(alphabet);
    for (std::size_t k = 0; k < alphabet.size(); ++k) {
        RVec e = token_extra;
        e.resize(width0, Rational(0));
        e[k] = 1;
        t.embedding[alphabet[k]] = std::move(e);
    }
    eos_vec.resize(width0, Rational(0));
    t.eos_embedding = std::move(eos_vec);
    pe.dim = pe.is_nope() ? 0 : width0;
    t.pe = std::move(pe);
    t.layers = p.layers();
    t.accept = zeros(p.width());
    t.accept[out] = 1;
    t.validate();
    return t;
}

}  // namespace hat::detail
