#include "support.hpp"

#include "hat/acceptor.hpp"
#include "hat/compile.hpp"
#include "hat/error.hpp"

#include <doctest.h>

using namespace hat;

namespace {

Formula P(const std::string& text, std::string_view alphabet = "ab") { return parse_formula(text, alphabet); }

CompileOptions with_empty(Convention c = Convention::LastPos) {
    CompileOptions opt;
    opt.accepts_empty = true;
    opt.convention = c;
    return opt;
}

// Hard attention that spreads weight: every nonempty row is uniform over
// its support and the support is the whole attended range.
void check_uniform_weights(const Transformer& t, std::string_view w) {
    const auto run = run_transformer(t, w);
    for (std::size_t k = 0; k < t.layers.size(); ++k) {
        const auto* att = std::get_if<AttentionLayer>(&t.layers[k].body);
        if (!att) continue;
        for (const auto& row : attention_weights(*att, run.trace[k]))
            for (const auto& x : row) CHECK(x == Rational(1, row.size()));
    }
}

void check_slots(const Transformer& t, const CompileInfo& info, std::string_view w, std::size_t from = 1) {
    const auto run = run_transformer(t, w);
    for (const auto& slot : info.subformulas) {
        const auto truth = eval_positions(slot.formula, w);
        for (std::size_t i = from; i <= w.size() + 1; ++i) {
            const Rational expect = truth[i - 1] ? 1 : 0;
            CHECK_MESSAGE(run.trace[slot.layer][i - 1][slot.coord] == expect,
                          to_text(slot.formula) << " on '" << w << "' at " << i);
        }
    }
}

}  // namespace

TEST_CASE("MAJ and Dyck-1 through both counting compilers") {
    const Formula maj = P(fixtures::kMaj);
    const Formula dyck = P(fixtures::kDyck, "()");
    const Transformer maj_a = compile_counting_ahat(maj, "ab", with_empty());
    const Transformer maj_k = compile_kt_ahat(maj, "ab", with_empty());
    const Transformer dyck_a = compile_counting_ahat(dyck, "()", with_empty());
    const Transformer dyck_k = compile_kt_ahat(dyck, "()", with_empty());
    for (const auto& w : fixtures::words("ab", 0, 8)) {
        CHECK_MESSAGE(accepts(maj_a, w) == fixtures::majority(w), w);
        CHECK_MESSAGE(accepts(maj_k, w) == fixtures::majority(w), w);
    }
    for (const auto& w : fixtures::words("()", 0, 8)) {
        CHECK_MESSAGE(accepts(dyck_a, w) == fixtures::dyck(w), w);
        CHECK_MESSAGE(accepts(dyck_k, w) == fixtures::dyck(w), w);
    }
    CHECK(accepts(maj_a, "aab"));
    CHECK_FALSE(accepts(maj_a, "abb"));
}

TEST_CASE("K_t[#] compilations use uniform attention only") {
    for (const char* text : {fixtures::kMaj, "#L[Qa] = 2", "#L[Qa & #L[Qb] < 1] - 1 < #L[Qb]"}) {
        const Transformer t = compile_kt_ahat(P(text), "ab");
        CHECK(check_uniform(t));
        CHECK(t.pe.is_nope());
        for (const auto& l : t.layers)
            if (const auto* a = std::get_if<AttentionLayer>(&l.body)) {
                CHECK(a->normalizer == Normalizer::Average);
                CHECK(a->masking == Masking::StrictFuture);
                CHECK(a->declared_uniform);
            }
        for (const auto& w : fixtures::words("ab", 1, 6)) check_uniform_weights(t, w);
    }
    const Transformer dyck = compile_kt_ahat(P(fixtures::kDyck, "()"), "()");
    CHECK(check_uniform(dyck));
    for (const auto& w : fixtures::words("()", 1, 6)) check_uniform_weights(dyck, w);
}

TEST_CASE("counting formulas read at the first position") {
    for (const auto& c : fixtures::counting_first_cases()) {
        CompileInfo info;
        CompileOptions opt;
        opt.convention = Convention::FirstPos;
        const Transformer t = compile_counting_ahat(P(c.text), "ab", opt, &info);
        for (const auto& w : fixtures::words("ab", 0, 6)) {
            CHECK_MESSAGE(accepts(t, w) == c.expected(w), c.text << " on '" << w << "'");
            if (!w.empty() && w.size() <= 3) check_slots(t, info, w);
        }
    }
}

TEST_CASE("random counting formulas agree with the oracle") {
    fixtures::RandomFormulas gen(59);
    for (int k = 0; k < 40; ++k) {
        const Formula f = gen.formula(3);
        for (Convention c : {Convention::FirstPos, Convention::LastPos}) {
            CompileOptions opt;
            opt.convention = c;
            const Transformer t = compile_counting_ahat(f, "ab", opt);
            const auto cex = bounded_equiv(Acceptor::machine(t), Acceptor::oracle(Language{f, c, false}), 4, "ab");
            CHECK_MESSAGE(!cex, to_text(f) << " differs on '" << cex.value_or("") << "'");
        }
    }
}

TEST_CASE("random K_t[#] formulas agree with the oracle") {
    fixtures::RandomFormulas gen(61);
    gen.future = false;
    gen.past = false;
    gen.predicates = false;
    int compiled = 0;
    for (int k = 0; k < 60; ++k) {
        const Formula f = gen.formula(3);
        if (classify_fragment(f) != Fragment::KtSharp) continue;
        CompileInfo info;
        const Transformer t = compile_kt_ahat(f, "ab", {}, &info);
        const auto cex = bounded_equiv(Acceptor::machine(t), Acceptor::oracle(Language{f, Convention::LastPos, false}), 5, "ab");
        CHECK_MESSAGE(!cex, to_text(f) << " differs on '" << cex.value_or("") << "'");
        for (const auto& w : fixtures::words("ab", 1, 3)) check_slots(t, info, w);
        ++compiled;
    }
    CHECK(compiled > 20);
}

TEST_CASE("left counts are zero at the first position") {
    CompileInfo info;
    const Formula f = P("#L[Qa] < 1");
    const Transformer t = compile_kt_ahat(f, "ab", {}, &info);
    const auto* slot = info.find(f);
    REQUIRE(slot);
    for (const auto& w : {"a", "b", "ab"}) CHECK(run_transformer(t, w).trace[slot->layer][0][slot->coord] == 1);
}

TEST_CASE("counting compiler errors") {
    try {
        compile_kt_ahat(P("#R[Qa] <= 1"), "ab");
        FAIL("accepted a right count");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Fragment);
    }
    try {
        compile_kt_ahat(P("F Qa"), "ab");
        FAIL("accepted a temporal operator");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Fragment);
    }
    CompileOptions tight;
    tight.max_width = 12;
    CHECK_THROWS_AS(compile_counting_ahat(P(fixtures::kDyck, "()"), "()", tight), Error);
}

TEST_CASE("the exactness bound is honoured") {
    CompileOptions opt;
    opt.exact_up_to = 16;
    const Transformer t = compile_kt_ahat(P("#L[Qa] = #L[Qb] + 1"), "ab", opt);
    for (const auto& w : fixtures::words("ab", 1, 10)) CHECK(accepts(t, w) == (fixtures::count(w, 'a') == fixtures::count(w, 'b') + 1));
    std::string big(8, 'a');
    big += std::string(7, 'b');
    CHECK(accepts(t, big));
}
