#include "support.hpp"

#include "hat/acceptor.hpp"
#include "hat/compile.hpp"
#include "hat/error.hpp"

#include <doctest.h>

#include <algorithm>

using namespace hat;

namespace {

Formula P(const std::string& text, std::string_view alphabet = "ab") { return parse_formula(text, alphabet); }

// Every recorded subformula coordinate carries the formula's truth value.
void check_slots(const Transformer& t, const CompileInfo& info, std::string_view w) {
    const auto run = run_transformer(t, w);
    for (const auto& slot : info.subformulas) {
        const auto truth = eval_positions(slot.formula, w);
        for (std::size_t i = 0; i < run.trace[slot.layer].size(); ++i) {
            const Rational expect = truth[i] ? 1 : 0;
            CHECK_MESSAGE(run.trace[slot.layer][i][slot.coord] == expect,
                          to_text(slot.formula) << " on '" << w << "' at " << i + 1);
        }
    }
}

void check_kind(ErrorKind expected, auto&& fn) {
    try {
        fn();
        FAIL("no error");
    } catch (const Error& e) {
        CHECK_MESSAGE(e.kind() == expected, e.what());
    }
}

}  // namespace

TEST_CASE("layer-0 truth coordinates for G(mod(2,2) -> Qa) on abaa") {
    const Formula f = P("G(mod(2,2) -> Qa)");
    CompileInfo info;
    const Transformer t = compile_ltl_uhat(f, "ab", {}, &info);
    // Letters are read straight off their one-hot slots.
    auto slot_of = [&](char c) {
        const auto& e = t.embedding.at(c);
        return static_cast<std::size_t>(std::find(e.begin(), e.end(), Rational(1)) - e.begin());
    };
    const std::size_t qa = slot_of('a'), qb = slot_of('b');
    const auto* mod = info.find(Formula::pred(MonadicPredicate::mod(2, 2)));
    REQUIRE(mod);
    CHECK(mod->layer == 0);
    const auto trace = run_transformer(t, "abaa").trace[0];
    const std::vector<std::vector<int>> expected{{1, 0, 0}, {0, 1, 1}, {1, 0, 0}, {1, 0, 1}};
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(trace[i][qa] == expected[i][0]);
        CHECK(trace[i][qb] == expected[i][1]);
        CHECK(trace[i][mod->coord] == expected[i][2]);
    }
    CHECK_FALSE(accepts(t, "abaa"));
    CHECK(accepts(t, "baba"));
    CHECK(accepts(t, "a"));
}

TEST_CASE("fixture formulas compile to matching transformers") {
    for (const auto& c : fixtures::future_cases()) {
        CompileInfo info;
        const Transformer t = compile_ltl_uhat(P(c.text), "ab", {}, &info);
        for (const auto& w : fixtures::words("ab", 0, 6)) {
            CHECK_MESSAGE(accepts(t, w) == c.expected(w), c.text << " on '" << w << "'");
            if (w.size() <= 4) check_slots(t, info, w);
        }
    }
}

TEST_CASE("random future formulas agree with the oracle") {
    fixtures::RandomFormulas gen(41);
    gen.past = false;
    gen.counting = false;
    for (int k = 0; k < 40; ++k) {
        const Formula f = gen.formula(3);
        const Transformer t = compile_ltl_uhat(f, "ab");
        const auto cex = bounded_equiv(Acceptor::machine(t), Acceptor::oracle(Language{f, Convention::FirstPos, false}), 5, "ab");
        CHECK_MESSAGE(!cex, to_text(f) << " differs on '" << cex.value_or("") << "'");
    }
}

TEST_CASE("the compiled search layer has the intended score structure") {
    CompileInfo info;
    const Transformer t = compile_ltl_uhat(P("F Qa"), "ab", {}, &info);
    std::size_t layer = 0;
    while (!t.layers[layer].is_attention()) ++layer;
    const auto& att = std::get<AttentionLayer>(t.layers[layer].body);
    for (const auto& w : fixtures::words("ab", 1, 8)) {
        const std::size_t n = w.size();
        const auto s = fixtures::layer_scores(att, run_transformer(t, w).trace[layer]);
        for (std::size_t i = 1; i <= n; ++i) {
            const auto& row = s[i - 1];
            auto phi = [&](std::size_t j) { return w[j - 1] == 'a'; };
            for (std::size_t j = i; j < n; ++j)
                if (phi(j)) CHECK(row[j - 1] > row[n - 1]);
            for (std::size_t j = 1; j < n; ++j) {
                if (phi(j)) CHECK(row[j - 1] > -1);
                else CHECK(row[j - 1] < -1);
            }
            CHECK(row[n - 1] > -1);
            for (std::size_t j = i + 1; j <= n; ++j)
                if (phi(j) == phi(j - 1) || j == n) CHECK(row[j - 1] <= row[j - 2] + (j == n && !phi(j - 1) ? 2 : 0));
            CHECK(row[n] < row[n - 1]);
        }
    }
    CHECK(fixtures::score_scheme_violation(8).empty());
}

TEST_CASE("interleaved order decides palindromes") {
    const Transformer t = builtin_language(Builtin::palindrome("abc"));
    for (const auto& w : fixtures::words("abc", 0, 6)) CHECK_MESSAGE(accepts(t, w) == fixtures::palindrome(w), w);
    const Transformer ab = builtin_language(Builtin::palindrome("ab"));
    for (const auto& w : fixtures::words("ab", 0, 9)) CHECK_MESSAGE(accepts(ab, w) == fixtures::palindrome(w), w);
}

TEST_CASE("orders change the meaning of temporal operators") {
    const Formula f = P("Qa & X Qb");
    const Transformer t = compile_with_order(f, "ab", OrderFamily::interleave());
    // Position 1, then position n.
    CHECK(accepts(t, "ab"));
    CHECK(accepts(t, "aab"));
    CHECK_FALSE(accepts(t, "aba"));
    CHECK(accepts(compile_with_order(f, "ab", OrderFamily::identity()), "aba"));
}

TEST_CASE("regular languages through mod predicates") {
    const Transformer even = builtin_language(Builtin::regular_mod(2, 0, 'a'));
    for (const auto& w : fixtures::words("ab", 0, 8)) {
        bool ok = true;
        for (std::size_t j = 2; j <= w.size(); j += 2) ok = ok && w[j - 1] == 'a';
        CHECK(accepts(even, w) == ok);
    }
    const Transformer third = builtin_language(Builtin::regular_mod(3, 1, 'b', "abc"));
    for (const auto& w : fixtures::words("abc", 1, 6)) {
        bool ok = true;
        for (std::size_t j = 1; j <= w.size(); j += 3) ok = ok && w[j - 1] == 'b';
        CHECK(accepts(third, w) == ok);
    }
}

TEST_CASE("past fragment compiles to masked NoPE layers") {
    for (const auto& c : fixtures::past_cases()) {
        CompileInfo info;
        const Transformer t = compile_ltl_masked_uhat(P(c.text), "ab", {}, &info);
        CHECK(t.pe.is_nope());
        for (const auto& l : t.layers)
            if (const auto* a = std::get_if<AttentionLayer>(&l.body)) CHECK(a->masking == Masking::StrictFuture);
        for (const auto& w : fixtures::words("ab", 0, 7)) {
            CHECK_MESSAGE(accepts(t, w) == c.expected(w), c.text << " on '" << w << "'");
            if (w.size() <= 4) check_slots(t, info, w);
        }
    }
}

TEST_CASE("random past formulas agree with the oracle") {
    fixtures::RandomFormulas gen(43);
    gen.future = false;
    gen.counting = false;
    gen.predicates = false;
    for (int k = 0; k < 40; ++k) {
        const Formula f = gen.formula(3);
        const Transformer t = compile_ltl_masked_uhat(f, "ab");
        const auto cex = bounded_equiv(Acceptor::machine(t), Acceptor::oracle(Language{f, Convention::LastPos, false}), 5, "ab");
        CHECK_MESSAGE(!cex, to_text(f) << " differs on '" << cex.value_or("") << "'");
    }
}

TEST_CASE("empty word flag") {
    CompileOptions opt;
    opt.accepts_empty = true;
    CHECK(accepts(compile_ltl_uhat(P("Qa"), "ab", opt), ""));
    CHECK_FALSE(accepts(compile_ltl_uhat(P("Qa"), "ab"), ""));
    CHECK(accepts(compile_ltl_masked_uhat(P("Y Qa"), "ab", opt), ""));
    CHECK_FALSE(accepts(compile_ltl_masked_uhat(P("Y Qa"), "ab"), ""));
}

TEST_CASE("compiler errors") {
    check_kind(ErrorKind::Fragment, [] { compile_ltl_uhat(P(fixtures::kMaj), "ab"); });
    check_kind(ErrorKind::Fragment, [] { compile_ltl_uhat(P("Y Qa"), "ab"); });
    check_kind(ErrorKind::Fragment, [] { compile_ltl_masked_uhat(P("F Qa"), "ab"); });
    check_kind(ErrorKind::Fragment, [] { compile_ltl_masked_uhat(P("O mod(2,0)"), "ab"); });
    check_kind(ErrorKind::Domain, [] { compile_ltl_uhat(P("Qc", "abc"), "ab"); });
    check_kind(ErrorKind::Domain, [] { compile_ltl_uhat(P("Qa"), "aab"); });
    CompileOptions tight;
    tight.max_width = 10;
    check_kind(ErrorKind::Resource, [&] { compile_ltl_uhat(P("F(Qa & X(Qb & X Qa))"), "ab", tight); });
}

TEST_CASE("compilation is deterministic") {
    const Formula f = P("G(Qa -> F Qb) & (Qa U Qb)");
    CHECK(compile_ltl_uhat(f, "ab") == compile_ltl_uhat(f, "ab"));
}
