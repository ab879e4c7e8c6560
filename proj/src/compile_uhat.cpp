#include "compile_common.hpp"
#include "hat/error.hpp"

namespace hat {

using detail::Lowering;
using detail::Positions;

const SubformulaSlot* CompileInfo::find(const Formula& f) const {
    for (const auto& s : subformulas)
        if (s.formula == f) return &s;
    return nullptr;
}

const SubformulaSlot* CompileInfo::find_aux(std::string_view name) const {
    for (const auto& [n, s] : auxiliary)
        if (n == name) return &s;
    return nullptr;
}

namespace {

class FutureLowering : public Lowering {
public:
    FutureLowering(Program& prog, CompileInfo& info, Positions pos, std::size_t pred_offset,
                   std::vector<MonadicPredicate> preds, std::string_view alphabet)
        : Lowering(prog, info), pos_(pos), pred_offset_(pred_offset), preds_(std::move(preds)), alphabet_(alphabet) {}

protected:
    std::size_t emit(const Formula& f) override {
        switch (f.op()) {
        case FormulaOp::TokenIs: return alphabet_.find(f.token_char());
        case FormulaOp::Pred:
            for (std::size_t k = 0; k < preds_.size(); ++k)
                if (preds_[k] == f.predicate()) return pred_offset_ + k;
            fail(ErrorKind::Fragment, "predicate missing from the PE block");
        case FormulaOp::Not:
        case FormulaOp::And:
        case FormulaOp::Or: return emit_boolean(f);
        case FormulaOp::Next: return detail::emit_next(prog_, Normalizer::UniqueLeftmost, pos_, lower(f.arg()));
        case FormulaOp::Future: {
            const auto x = lower(f.arg());
            return detail::emit_search(prog_, Normalizer::UniqueLeftmost, pos_, [x](PwlBuilder& b) { return b.in(x); }, x);
        }
        case FormulaOp::Globally: {
            const auto x = lower(f.arg());
            return detail::emit_search(prog_, Normalizer::UniqueLeftmost, pos_,
                                       [x](PwlBuilder& b) { return Lin(1) - b.in(x); }, x);
        }
        case FormulaOp::Until: {
            const auto x = lower(f.arg(0));
            const auto y = lower(f.arg(1));
            return detail::emit_search(prog_, Normalizer::UniqueLeftmost, pos_,
                                       [x, y](PwlBuilder& b) { return b.max(b.in(y), Lin(1) - b.in(x)); }, y);
        }
        default:
            fail(ErrorKind::Fragment, "operator not supported by the UHAT compiler: " + to_text(f));
        }
    }

private:
    Positions pos_;
    std::size_t pred_offset_;
    std::vector<MonadicPredicate> preds_;
    std::string_view alphabet_;
};

}  // namespace

Transformer compile_with_order(const Formula& f, std::string_view alphabet, const OrderFamily& order,
                               const CompileOptions& opt, CompileInfo* info) {
    if (classify_fragment(f) != Fragment::LTLMon)
        fail(ErrorKind::Fragment, "compile_ltl_uhat needs an LTL[Mon] formula, got " + fragment_name(classify_fragment(f)));
    if (has_past_ops(f))
        fail(ErrorKind::Fragment, "past operators need the masked backend (compile_ltl_masked_uhat)");
    detail::check_alphabet(alphabet, f);

    const auto preds = predicates_of(f);
    const std::size_t sigma = alphabet.size();
    Positions pos;
    pos.eos = sigma;
    pos.one = sigma + 1;
    pos.a = sigma + 2;
    pos.a2 = sigma + 3;
    pos.islast = sigma + 4;
    const std::size_t pred_offset = sigma + 5;
    const std::size_t width0 = pred_offset + preds.size();

    PositionalEmbedding pe;
    pe.blocks.push_back({PeBlock::Kind::PowerTwo, pos.one, order, {}, 0});
    if (!preds.empty()) pe.blocks.push_back({PeBlock::Kind::Predicates, pred_offset, order, preds, 0});

    CompileInfo local;
    CompileInfo& inf = info ? *info : local;
    inf = {};
    Program prog(width0, opt.max_width);
    FutureLowering low(prog, inf, pos, pred_offset, preds, alphabet);
    const std::size_t bit = low.lower(f);
    const std::size_t out = detail::emit_route_first(prog, Normalizer::UniqueLeftmost, pos, bit, opt.accepts_empty);
    inf.output_coord = out;

    RVec eos = zeros(width0);
    eos[pos.eos] = 1;
    return detail::assemble(alphabet, width0, eos, {}, std::move(pe), prog, out);
}

Transformer compile_ltl_uhat(const Formula& f, std::string_view alphabet, const CompileOptions& opt,
                             CompileInfo* info) {
    return compile_with_order(f, alphabet, OrderFamily::identity(), opt, info);
}

// ---------------------------------------------------------------- masked past fragment

namespace {

class PastLowering : public Lowering {
public:
    PastLowering(Program& prog, CompileInfo& info, std::string_view alphabet)
        : Lowering(prog, info), alphabet_(alphabet) {}

protected:
    std::size_t emit(const Formula& f) override {
        switch (f.op()) {
        case FormulaOp::TokenIs: return alphabet_.find(f.token_char());
        case FormulaOp::Not:
        case FormulaOp::And:
        case FormulaOp::Or: return emit_boolean(f);
        case FormulaOp::Prev: {
            // Constant score with rightmost ties picks i-1.
            const auto x = lower(f.arg());
            const std::size_t w1 = prog_.width();
            return prog_.add_attention(Normalizer::UniqueRightmost, Masking::StrictFuture, nullptr, nullptr,
                                       [&](PwlBuilder& b) { return std::vector<Lin>{b.in(w1 + x)}; });
        }
        case FormulaOp::Once: {
            const auto x = lower(f.arg());
            const std::size_t w1 = prog_.width();
            return prog_.add_attention(
                Normalizer::UniqueRightmost, Masking::StrictFuture,
                [&](PwlBuilder& b) { return std::vector<Lin>{b.in(one_)}; },
                [&](PwlBuilder& b) { return std::vector<Lin>{b.in(x)}; },
                [&](PwlBuilder& b) { return std::vector<Lin>{b.max(b.in(x), b.in(w1 + x))}; });
        }
        case FormulaOp::Since: {
            // The latest j < i where ψ holds or φ fails decides the strict past.
            const auto x = lower(f.arg(0));
            const auto y = lower(f.arg(1));
            const std::size_t w1 = prog_.width();
            return prog_.add_attention(
                Normalizer::UniqueRightmost, Masking::StrictFuture,
                [&](PwlBuilder& b) { return std::vector<Lin>{b.in(one_)}; },
                [&](PwlBuilder& b) { return std::vector<Lin>{b.max(b.in(y), Lin(1) - b.in(x))}; },
                [&](PwlBuilder& b) { return std::vector<Lin>{b.max(b.in(y), b.min(b.in(x), b.in(w1 + y)))}; });
        }
        default:
            fail(ErrorKind::Fragment, "operator not supported by the masked UHAT compiler: " + to_text(f));
        }
    }

public:
    std::size_t one_ = 0;

private:
    std::string_view alphabet_;
};

}  // namespace

Transformer compile_ltl_masked_uhat(const Formula& f, std::string_view alphabet, const CompileOptions& opt,
                                    CompileInfo* info) {
    if (has_future_ops(f)) fail(ErrorKind::Fragment, "the masked backend accepts only past and boolean operators");
    if (has_predicates(f)) fail(ErrorKind::Fragment, "the masked backend has no positional information for predicates");
    if (has_counting(f)) fail(ErrorKind::Fragment, "counting terms need an AHAT backend");
    detail::check_alphabet(alphabet, f);

    const std::size_t sigma = alphabet.size();
    const std::size_t one = sigma;
    const std::size_t width0 = sigma + 1;

    CompileInfo local;
    CompileInfo& inf = info ? *info : local;
    inf = {};
    Program prog(width0, opt.max_width);
    PastLowering low(prog, inf, alphabet);
    low.one_ = one;

    // first = 1 exactly where nothing can be attended.
    const std::size_t w = prog.width();
    const std::size_t first =
        prog.add_attention(Normalizer::UniqueRightmost, Masking::StrictFuture, nullptr, nullptr,
                           [&](PwlBuilder& b) { return std::vector<Lin>{Lin(1) - b.in(w + one)}; });
    low.name_aux("first", f, first);

    const std::size_t bit = low.lower(f);
    const std::size_t out = detail::emit_readout(prog, bit, first, opt.accepts_empty);
    inf.output_coord = out;

    RVec extra = zeros(width0);
    extra[one] = 1;
    RVec eos = extra;
    return detail::assemble(alphabet, width0, eos, extra, PositionalEmbedding{}, prog, out);
}

// ---------------------------------------------------------------- builtins

Formula builtin_formula(const Builtin& b) {
    switch (b.kind) {
    case Builtin::Kind::Palindrome: {
        if (b.alphabet.empty()) fail(ErrorKind::Domain, "alphabet is empty");
        Formula any = Formula::token(b.alphabet[0]);
        Formula same = Formula::conj(Formula::token(b.alphabet[0]), Formula::next(Formula::token(b.alphabet[0])));
        for (std::size_t k = 1; k < b.alphabet.size(); ++k) {
            Formula q = Formula::token(b.alphabet[k]);
            any = Formula::disj(any, q);
            same = Formula::disj(same, Formula::conj(q, Formula::next(q)));
        }
        // At every odd rank, either the partner rank does not exist or it carries the same letter.
        Formula body = Formula::disj(Formula::negate(Formula::next(any)), same);
        return Formula::globally(Formula::implies(Formula::pred(MonadicPredicate::mod(2, 1)), body));
    }
    case Builtin::Kind::RegularMod:
        if (b.alphabet.find(b.letter) == std::string::npos)
            fail(ErrorKind::Domain, std::string("letter '") + b.letter + "' is not in the alphabet");
        return Formula::globally(Formula::implies(Formula::pred(MonadicPredicate::mod(b.d, b.r)), Formula::token(b.letter)));
    }
    fail(ErrorKind::Domain, "unknown builtin");
}

Transformer builtin_language(const Builtin& b) {
    CompileOptions opt;
    opt.accepts_empty = true;
    const Formula f = builtin_formula(b);
    if (b.kind == Builtin::Kind::Palindrome) return compile_with_order(f, b.alphabet, OrderFamily::interleave(), opt);
    return compile_ltl_uhat(f, b.alphabet, opt);
}

}  // namespace hat
