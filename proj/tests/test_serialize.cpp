#include "support.hpp"

#include "hat/compile.hpp"
#include "hat/error.hpp"
#include "hat/serialize.hpp"

#include <doctest.h>

using namespace hat;

namespace {

void round_trips(const Transformer& t) {
    const std::string text = print_transformer(t);
    const Transformer back = parse_transformer(text);
    CHECK(back == t);
    CHECK(print_transformer(back) == text);
}

}  // namespace

TEST_CASE("rationals print as num/den") {
    CHECK(rational_to_json(Rational(-3, 2)) == "-3/2");
    CHECK(rational_to_json(Rational(4)) == "4/1");
    CHECK(rational_from_json(Json("6/8")) == Rational(3, 4));
    CHECK(rational_from_json(Json("-5")) == Rational(-5));
    CHECK_THROWS_AS(rational_from_json(Json("1/0")), Error);
    CHECK_THROWS_AS(rational_from_json(Json("x")), Error);
}

TEST_CASE("hand-built transformers round-trip") {
    round_trips(fixtures::strict_majority(false));
    round_trips(fixtures::strict_majority(true));
    round_trips(fixtures::has_a());
    round_trips(fixtures::first_equals_last());
}

TEST_CASE("compiled transformers round-trip") {
    round_trips(compile_ltl_uhat(parse_formula("G(mod(2,0) -> Qa) & F Qb", "ab"), "ab"));
    round_trips(compile_ltl_masked_uhat(parse_formula("Qa S Qb", "ab"), "ab"));
    round_trips(compile_counting_ahat(parse_formula(fixtures::kMaj, "ab"), "ab"));
    round_trips(compile_kt_ahat(parse_formula(fixtures::kDyck, "()"), "()"));
    round_trips(builtin_language(Builtin::palindrome("abc")));
    round_trips(strip_masking(fixtures::strict_majority(true), {4, 64}));
}

TEST_CASE("explicit PE tables round-trip") {
    auto t = fixtures::strict_majority(false);
    t.pe.dim = 2;
    t.pe.table[{1, 2}] = {Rational(1, 3), 0};
    t.pe.table[{2, 2}] = {0, -1};
    round_trips(t);
    CHECK(embed(t, "a")[0] == RVec{Rational(4, 3), 0});
}

TEST_CASE("malformed documents are parse errors") {
    auto expect_parse = [](const std::string& text) {
        try {
            parse_transformer(text);
            FAIL("accepted: " << text);
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::Parse);
        }
    };
    expect_parse("{");
    expect_parse("[]");
    expect_parse(R"({"alphabet": ["a"]})");
    Json j = transformer_to_json(fixtures::has_a());
    j["layers"][0]["type"] = "convolution";
    expect_parse(j.dump());
}

TEST_CASE("ill-typed documents are dimension errors") {
    Json j = transformer_to_json(fixtures::has_a());
    j["accept_vec"] = Json::array({"1/1"});
    try {
        transformer_from_json(j);
        FAIL("accepted an ill-typed document");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Dimension);
    }
}

TEST_CASE("pwl functions round-trip") {
    PwlBuilder b(2);
    auto f = b.build({b.max(b.in(0), b.in(1)), b.relu(b.in(0) * Rational(1, 3) - 2)});
    CHECK(pwl_from_json(pwl_to_json(f)) == f);
}
