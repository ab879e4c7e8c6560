#include "compile_common.hpp"
#include "hat/error.hpp"

#include <map>

namespace hat {

using detail::Lowering;
using detail::Positions;

namespace {

/// D = Σ coeff·←#ψ + Σ coeff·→#ψ + constant, keyed by the printed ψ.
struct Linear {
    std::map<std::string, std::pair<Formula, long>> left;
    std::map<std::string, std::pair<Formula, long>> right;
    long constant = 0;
};

void flatten(const Term& t, long sign, Linear& out) {
    switch (t.op()) {
    case TermOp::Const: out.constant += sign * t.value(); return;
    case TermOp::LeftCount:
    case TermOp::RightCount: {
        auto& side = t.op() == TermOp::LeftCount ? out.left : out.right;
        auto [it, fresh] = side.try_emplace(to_text(t.body()), t.body(), 0);
        (void)fresh;
        it->second.second += sign;
        return;
    }
    case TermOp::Add:
        flatten(t.arg(0), sign, out);
        flatten(t.arg(1), sign, out);
        return;
    case TermOp::Sub:
        flatten(t.arg(0), sign, out);
        flatten(t.arg(1), -sign, out);
        return;
    }
}

Linear difference(const Formula& cmp) {
    Linear d;
    flatten(cmp.lhs_term(), 1, d);
    flatten(cmp.rhs_term(), -1, d);
    return d;
}

bool holds(CmpOp op, long d) {
    switch (op) {
    case CmpOp::Le: return d <= 0;
    case CmpOp::Lt: return d < 0;
    case CmpOp::Eq: return d == 0;
    }
    return false;
}

// ---------------------------------------------------------------- AHAT with PEs

class CountingLowering : public Lowering {
public:
    struct Layout {
        Positions pos;
        std::size_t first;
        std::size_t scale;  // N/(i-1), 0 at i = 1
        std::size_t inv_n;  // 1/N
        std::size_t pred_offset;
    };

    CountingLowering(Program& prog, CompileInfo& info, Layout lay, std::vector<MonadicPredicate> preds,
                     std::string_view alphabet)
        : Lowering(prog, info), lay_(lay), preds_(std::move(preds)), alphabet_(alphabet) {}

protected:
    std::size_t emit(const Formula& f) override {
        const Normalizer avg = Normalizer::Average;
        switch (f.op()) {
        case FormulaOp::TokenIs: return alphabet_.find(f.token_char());
        case FormulaOp::Pred:
            for (std::size_t k = 0; k < preds_.size(); ++k)
                if (preds_[k] == f.predicate()) return lay_.pred_offset + k;
            fail(ErrorKind::Fragment, "predicate missing from the PE block");
        case FormulaOp::Not:
        case FormulaOp::And:
        case FormulaOp::Or: return emit_boolean(f);
        case FormulaOp::Next: return detail::emit_next(prog_, avg, lay_.pos, lower(f.arg()));
        case FormulaOp::Future: {
            const auto x = lower(f.arg());
            return detail::emit_search(prog_, avg, lay_.pos, [x](PwlBuilder& b) { return b.in(x); }, x);
        }
        case FormulaOp::Globally: {
            const auto x = lower(f.arg());
            return detail::emit_search(prog_, avg, lay_.pos, [x](PwlBuilder& b) { return Lin(1) - b.in(x); }, x);
        }
        case FormulaOp::Until: {
            const auto x = lower(f.arg(0));
            const auto y = lower(f.arg(1));
            return detail::emit_search(prog_, avg, lay_.pos,
                                       [x, y](PwlBuilder& b) { return b.max(b.in(y), Lin(1) - b.in(x)); }, y);
        }
        case FormulaOp::Prev: {
            // Masked; -a_j is largest at j = i-1.
            const auto x = lower(f.arg());
            const std::size_t w = prog_.width();
            return prog_.add_attention(
                avg, Masking::StrictFuture, [&](PwlBuilder& b) { return std::vector<Lin>{b.in(lay_.pos.one)}; },
                [&](PwlBuilder& b) { return std::vector<Lin>{Lin(0) - b.in(lay_.pos.a)}; },
                [&](PwlBuilder& b) { return std::vector<Lin>{b.in(w + x)}; });
        }
        case FormulaOp::Once: {
            // All maximisers carry the bit, so the average is the bit.
            const auto x = lower(f.arg());
            const std::size_t w = prog_.width();
            return prog_.add_attention(
                avg, Masking::StrictFuture, [&](PwlBuilder& b) { return std::vector<Lin>{b.in(lay_.pos.one)}; },
                [&](PwlBuilder& b) { return std::vector<Lin>{b.in(x)}; },
                [&](PwlBuilder& b) { return std::vector<Lin>{b.max(b.in(x), b.in(w + x))}; });
        }
        case FormulaOp::Since: {
            const auto x = lower(f.arg(0));
            const auto y = lower(f.arg(1));
            const std::size_t w = prog_.width();
            return prog_.add_attention(
                avg, Masking::StrictFuture, [&](PwlBuilder& b) { return std::vector<Lin>{b.in(lay_.pos.one)}; },
                [&](PwlBuilder& b) {
                    return std::vector<Lin>{b.max(b.in(y), Lin(1) - b.in(x)) - b.in(lay_.pos.a)};
                },
                [&](PwlBuilder& b) { return std::vector<Lin>{b.max(b.in(y), b.min(b.in(x), b.in(w + y)))}; });
        }
        case FormulaOp::Cmp: return emit_cmp(f);
        }
        fail(ErrorKind::Fragment, "unsupported operator");
    }

private:
    struct Counted {
        std::size_t bit;       // ψ with EOS forced to 0
        std::size_t fraction;  // ←#ψ / (i-1)
        std::size_t total;     // |w|_ψ / N, kNone until needed
    };

    std::size_t inv() {
        if (inv_ == detail::kNone) {
            const std::size_t w = prog_.width();
            inv_ = prog_.add_attention(Normalizer::Average, Masking::StrictFuture, nullptr, nullptr,
                                       [&](PwlBuilder& b) { return std::vector<Lin>{b.in(w + lay_.first)}; });
        }
        return inv_;
    }

    Counted& counted(const Formula& psi, bool need_total) {
        const std::size_t x = lower(psi);
        auto it = counted_.find(x);
        if (it == counted_.end()) {
            const auto bit = prog_.add_pwl([&](PwlBuilder& b) {
                return std::vector<Lin>{b.min(b.in(x), Lin(1) - b.in(lay_.pos.eos))};
            });
            const std::size_t w = prog_.width();
            const auto frac = prog_.add_attention(Normalizer::Average, Masking::StrictFuture, nullptr, nullptr,
                                                  [&](PwlBuilder& b) { return std::vector<Lin>{b.in(w + bit)}; });
            name_aux("fraction:" + to_text(psi), psi, frac);
            it = counted_.emplace(x, Counted{bit, frac, detail::kNone}).first;
        }
        if (need_total && it->second.total == detail::kNone) {
            const std::size_t w = prog_.width();
            const std::size_t bit = it->second.bit;
            it->second.total = prog_.add_attention(Normalizer::Average, Masking::None, nullptr, nullptr,
                                                   [&](PwlBuilder& b) { return std::vector<Lin>{b.in(w + bit)}; });
            name_aux("total:" + to_text(psi), psi, it->second.total);
        }
        return it->second;
    }

    // One sign gadget: 1 where (s0 - 2D)/(i-1) > 0 (or the i = 1 analogue), else 0.
    std::size_t gadget(const Linear& d, int s0, std::size_t inv_c, std::size_t combine_with) {
        std::vector<std::pair<long, Counted>> left, right;
        for (const auto& [k, v] : d.left) left.push_back({v.second, counted(v.first, false)});
        for (const auto& [k, v] : d.right) right.push_back({v.second, counted(v.first, true)});
        const Rational gamma(d.constant);
        const auto& L = lay_;

        auto query = [&](PwlBuilder& b) {
            Lin inv = b.in(inv_c);
            Lin first = b.in(L.first);
            auto gate = [&](const Lin& t) { return b.min(t, first); };
            Lin inv_n = gate(b.in(L.inv_n));
            // i >= 2 part: (s0 - 2D)/(i-1) without the total terms.
            Lin g = Rational(s0) * inv - Rational(2) * gamma * inv;
            for (const auto& [c, cnt] : left) g -= Rational(2 * c) * b.in(cnt.fraction);
            for (const auto& [c, cnt] : right) {
                Lin cur = b.in(cnt.bit);
                g += Rational(2 * c) * (b.in(cnt.fraction) + b.min(cur, inv));
            }
            // i = 1 part, gated by first.
            g += Rational(s0) * inv_n - Rational(2) * gamma * inv_n;
            for (const auto& [c, cnt] : right) {
                Lin cur_n = b.min(b.in(cnt.bit), b.in(L.inv_n));
                g -= Rational(2 * c) * (gate(b.in(cnt.total)) - gate(cur_n));
            }
            std::vector<Lin> q{g};
            for (const auto& [c, cnt] : right) q.push_back(Rational(-2 * c) * b.in(L.scale));
            return q;
        };
        auto key = [&](PwlBuilder& b) {
            Lin first = b.in(L.first);
            std::vector<Lin> k{Rational(2) * first - Lin(1)};
            for (const auto& [c, cnt] : right) {
                Lin t = b.in(cnt.total);
                k.push_back(Rational(2) * b.min(t, first) - t);
            }
            return k;
        };
        const std::size_t w = prog_.width();
        auto out = [&](PwlBuilder& b) {
            Lin bit = b.in(w + L.first);
            if (combine_with != detail::kNone) bit = b.min(b.in(combine_with), Lin(1) - bit);
            return std::vector<Lin>{bit};
        };
        return prog_.add_attention(Normalizer::Average, Masking::None, query, key, out);
    }

    std::size_t emit_cmp(const Formula& f) {
        const Linear d = difference(f);
        // Prepare every count before the gadget so the gadget's builders only read coordinates.
        for (const auto& [k, v] : d.left) counted(v.first, false);
        for (const auto& [k, v] : d.right) counted(v.first, true);
        const std::size_t inv_c = inv();
        switch (f.cmp_op()) {
        case CmpOp::Le: return gadget(d, 1, inv_c, detail::kNone);
        case CmpOp::Lt: return gadget(d, -1, inv_c, detail::kNone);
        case CmpOp::Eq: {
            const std::size_t le = gadget(d, 1, inv_c, detail::kNone);
            return gadget(d, -1, inv_c, le);
        }
        }
        fail(ErrorKind::Fragment, "unknown comparison");
    }

    Layout lay_;
    std::vector<MonadicPredicate> preds_;
    std::string_view alphabet_;
    std::size_t inv_ = detail::kNone;
    std::map<std::size_t, Counted> counted_;
};

// ---------------------------------------------------------------- masked NoPE-AHAT for K_t[#]

class KtLowering : public Lowering {
public:
    KtLowering(Program& prog, CompileInfo& info, std::string_view alphabet, std::size_t first, std::size_t inv,
               Rational scale)
        : Lowering(prog, info), alphabet_(alphabet), first_(first), inv_(inv), scale_(std::move(scale)) {}

protected:
    std::size_t emit(const Formula& f) override {
        switch (f.op()) {
        case FormulaOp::TokenIs: return alphabet_.find(f.token_char());
        case FormulaOp::Not:
        case FormulaOp::And:
        case FormulaOp::Or: return emit_boolean(f);
        case FormulaOp::Cmp: return emit_cmp(f);
        default: fail(ErrorKind::Fragment, "K_t[#] has no operator " + to_text(f));
        }
    }

private:
    std::size_t fraction(const Formula& psi) {
        const std::size_t x = lower(psi);
        if (auto it = fractions_.find(x); it != fractions_.end()) return it->second;
        const std::size_t w = prog_.width();
        const std::size_t c = prog_.add_attention(Normalizer::Average, Masking::StrictFuture, nullptr, nullptr,
                                                  [&](PwlBuilder& b) { return std::vector<Lin>{b.in(w + x)}; });
        name_aux("fraction:" + to_text(psi), psi, c);
        fractions_[x] = c;
        return c;
    }

    std::size_t emit_cmp(const Formula& f) {
        const Linear d = difference(f);
        if (!d.right.empty()) fail(ErrorKind::Fragment, "K_t[#] has no right counts");
        std::vector<std::pair<long, std::size_t>> terms;
        for (const auto& [k, v] : d.left) terms.push_back({v.second, fraction(v.first)});
        const Rational gamma(d.constant);
        const bool at_first = holds(f.cmp_op(), d.constant);

        // (1 - D)/(i-1) for <=, -D/(i-1) for <; at least 1/(i-1) when the comparison holds, at most 0 otherwise.
        auto g = [&](PwlBuilder& b, int lead) {
            Lin inv = b.in(inv_);
            Lin out = Rational(lead) * inv - gamma * inv;
            for (const auto& [c, fr] : terms) out -= Rational(c) * b.in(fr);
            return out;
        };
        return prog_.add_pwl([&](PwlBuilder& b) {
            auto step = [&](int lead) { return b.min(Lin(1), scale_ * b.relu(g(b, lead))); };
            Lin bit;
            switch (f.cmp_op()) {
            case CmpOp::Le: bit = step(1); break;
            case CmpOp::Lt: bit = step(0); break;
            case CmpOp::Eq: bit = b.min(step(1), Lin(1) - step(0)); break;
            }
            Lin first = b.in(first_);
            Lin r = b.relu(bit - first);
            if (at_first) r += first;
            return std::vector<Lin>{r};
        });
    }

    std::string_view alphabet_;
    std::size_t first_;
    std::size_t inv_;
    Rational scale_;
    std::map<std::size_t, std::size_t> fractions_;
};

}  // namespace

Transformer compile_counting_ahat(const Formula& f, std::string_view alphabet, const CompileOptions& opt,
                                  CompileInfo* info) {
    detail::check_alphabet(alphabet, f);
    const auto preds = predicates_of(f);
    const std::size_t sigma = alphabet.size();
    CountingLowering::Layout lay;
    lay.pos.eos = sigma;
    lay.first = sigma + 1;
    lay.scale = sigma + 2;
    lay.inv_n = sigma + 3;
    lay.pos.one = sigma + 4;
    lay.pos.a = sigma + 5;
    lay.pos.a2 = sigma + 6;
    lay.pos.islast = sigma + 7;
    lay.pred_offset = sigma + 8;
    const std::size_t width0 = lay.pred_offset + preds.size();

    PositionalEmbedding pe;
    pe.blocks.push_back({PeBlock::Kind::PrefixScale, lay.first, OrderFamily::identity(), {}, 0});
    pe.blocks.push_back({PeBlock::Kind::PowerTwo, lay.pos.one, OrderFamily::identity(), {}, 0});
    if (!preds.empty()) pe.blocks.push_back({PeBlock::Kind::Predicates, lay.pred_offset, OrderFamily::identity(), preds, 0});

    CompileInfo local;
    CompileInfo& inf = info ? *info : local;
    inf = {};
    Program prog(width0, opt.max_width);
    CountingLowering low(prog, inf, lay, preds, alphabet);
    const std::size_t bit = low.lower(f);
    const std::size_t out = opt.convention == Convention::LastPos
                                ? detail::emit_readout(prog, bit, lay.first, opt.accepts_empty)
                                : detail::emit_route_first(prog, Normalizer::Average, lay.pos, bit, opt.accepts_empty);
    inf.output_coord = out;

    RVec eos = zeros(width0);
    eos[lay.pos.eos] = 1;
    return detail::assemble(alphabet, width0, eos, {}, std::move(pe), prog, out);
}

Transformer compile_kt_ahat(const Formula& f, std::string_view alphabet, const CompileOptions& opt,
                            CompileInfo* info) {
    if (has_temporal(f)) fail(ErrorKind::Fragment, "K_t[#] has no temporal operators");
    if (has_right_count(f)) fail(ErrorKind::Fragment, "K_t[#] has no right counts");
    if (has_predicates(f)) fail(ErrorKind::Fragment, "a NoPE transformer cannot evaluate position predicates");
    if (opt.exact_up_to == 0) fail(ErrorKind::Domain, "exact_up_to must be positive");
    detail::check_alphabet(alphabet, f);

    const std::size_t sigma = alphabet.size();
    const std::size_t one = sigma;
    const std::size_t width0 = sigma + 1;

    CompileInfo local;
    CompileInfo& inf = info ? *info : local;
    inf = {};
    Program prog(width0, opt.max_width);

    std::size_t w = prog.width();
    const std::size_t first = prog.add_attention(Normalizer::Average, Masking::StrictFuture, nullptr, nullptr,
                                                 [&](PwlBuilder& b) { return std::vector<Lin>{Lin(1) - b.in(w + one)}; });
    w = prog.width();
    const std::size_t inv = prog.add_attention(Normalizer::Average, Masking::StrictFuture, nullptr, nullptr,
                                               [&](PwlBuilder& b) { return std::vector<Lin>{b.in(w + first)}; });

    KtLowering low(prog, inf, alphabet, first, inv, Rational(static_cast<long>(opt.exact_up_to)));
    low.name_aux("first", f, first);
    low.name_aux("inv", f, inv);
    const std::size_t bit = low.lower(f);
    const std::size_t out = detail::emit_readout(prog, bit, first, opt.accepts_empty);
    inf.output_coord = out;

    RVec extra = zeros(width0);
    extra[one] = 1;
    return detail::assemble(alphabet, width0, extra, extra, PositionalEmbedding{}, prog, out);
}

}  // namespace hat
