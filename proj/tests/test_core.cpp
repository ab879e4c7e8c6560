#include "support.hpp"

#include "hat/error.hpp"
#include "hat/model.hpp"
#include "hat/pwl.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace hat;

namespace {

PwlFn affine(std::size_t in, std::vector<RVec> rows, RVec bias) {
    return PwlFn::identity(in).then_affine(Affine(in, std::move(rows), std::move(bias)));
}

std::vector<Rational> ints(std::initializer_list<long> xs) {
    std::vector<Rational> out;
    for (long x : xs) out.emplace_back(x);
    return out;
}

Rational random_rational(std::mt19937& rng) {
    std::uniform_int_distribution<long> num(-20, 20), den(1, 7);
    Rational q(num(rng), den(rng));
    q.canonicalize();
    return q;
}

}  // namespace

TEST_CASE("rationals are kept in lowest terms") {
    Rational q(6, -4);
    q.canonicalize();
    CHECK(to_string(q) == "-3/2");
    CHECK(parse_rational("10/4") == Rational(5, 2));
    CHECK(to_string(parse_rational("7")) == "7/1");
    CHECK(pow2_neg(3) == Rational(1, 8));
}

TEST_CASE("piecewise-linear evaluation") {
    CHECK(eval_pwl(PwlFn::identity(2), RVec{3, Rational(-1, 2)}) == RVec{3, Rational(-1, 2)});
    CHECK(eval_pwl(PwlFn::identity(1).then_relu(0), RVec{-3}) == RVec{0});
    CHECK(eval_pwl(affine(2, {{1, 1}, {0, 1}}, {0, 1}), RVec{2, 3}) == RVec{5, 4});
    CHECK_THROWS_AS(eval_pwl(PwlFn::identity(2), RVec{1}), Error);
    CHECK_THROWS_AS(PwlFn::identity(2).then_relu(2), Error);
}

TEST_CASE("builder min and max") {
    PwlBuilder b(2);
    auto f = b.build({b.min(b.in(0), b.in(1)), b.max(b.in(0), b.in(1))});
    CHECK(eval_pwl(f, RVec{3, -2}) == RVec{-2, 3});
    CHECK(eval_pwl(f, RVec{Rational(1, 3), Rational(1, 2)}) == RVec{Rational(1, 3), Rational(1, 2)});
}

TEST_CASE("pwl maps are affine where the activation pattern is fixed") {
    std::mt19937 rng(7);
    PwlBuilder b(3);
    auto x = b.in(0), y = b.in(1), z = b.in(2);
    auto f = b.build({b.relu(x - y) + z, b.min(b.relu(x + y), z) - b.max(x, Lin(1)), b.relu(b.relu(z) - x)});
    int checked = 0;
    for (int trial = 0; trial < 400; ++trial) {
        RVec u{random_rational(rng), random_rational(rng), random_rational(rng)};
        RVec v{random_rational(rng), random_rational(rng), random_rational(rng)};
        const auto pu = activation_pattern(f, u);
        if (pu != activation_pattern(f, v)) continue;
        const RVec fu = eval_pwl(f, u), fv = eval_pwl(f, v);
        for (Rational lambda : {Rational(0), Rational(1, 3), Rational(1, 2), Rational(5, 7), Rational(1)}) {
            RVec mix(3);
            for (std::size_t k = 0; k < 3; ++k) mix[k] = lambda * u[k] + (1 - lambda) * v[k];
            if (activation_pattern(f, mix) != pu) continue;
            const RVec fm = eval_pwl(f, mix);
            for (std::size_t k = 0; k < fm.size(); ++k) {
                const Rational expect = lambda * fu[k] + (1 - lambda) * fv[k];
                CHECK(fm[k] == expect);
            }
            ++checked;
        }
    }
    CHECK(checked > 100);
}

TEST_CASE("compose and passthrough") {
    auto f = affine(2, {{1, 2}}, {1});
    auto g = PwlFn::identity(1).then_relu(0);
    CHECK(eval_pwl(compose(f, g), RVec{1, -3}) == RVec{0});
    CHECK(eval_pwl(compose(f, g), RVec{1, 3}) == RVec{8});
    CHECK(eval_pwl(with_passthrough(compose(f, g), 2), RVec{1, 3, 9, -9}) == RVec{8, 9, -9});
}

TEST_CASE("normalizer examples") {
    CHECK(normalize_uha(ints({1, 3, 3, 2})) == ints({0, 1, 0, 0}));
    CHECK(normalize_uha(ints({2, 2, 2})) == ints({1, 0, 0}));
    CHECK(normalize_uha(ints({5})) == ints({1}));
    CHECK(normalize_uha_rightmost(ints({1, 3, 3, 2})) == ints({0, 0, 1, 0}));
    CHECK(normalize_aha(ints({1, 3, 3, 2})) == std::vector<Rational>{0, Rational(1, 2), Rational(1, 2), 0});
    CHECK(normalize_aha(ints({2, 2, 2})) == std::vector<Rational>(3, Rational(1, 3)));
    CHECK(normalize_aha(ints({7, 1})) == ints({1, 0}));
    CHECK_THROWS_AS(normalize_uha({}), Error);
    CHECK_THROWS_AS(normalize_aha({}), Error);
}

TEST_CASE("normalizers sum to one on random lists") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<Rational> s(1 + rng() % 9);
        for (auto& x : s) x = random_rational(rng);
        auto u = normalize_uha(s);
        auto h = normalize_aha(s);
        CHECK(std::count(u.begin(), u.end(), Rational(1)) == 1);
        CHECK(std::count(u.begin(), u.end(), Rational(0)) == static_cast<long>(s.size()) - 1);
        Rational total = 0;
        for (const auto& w : h) total += w;
        CHECK(total == 1);
    }
    for (std::size_t n = 1; n <= 12; ++n) CHECK(normalize_aha(std::vector<Rational>(n, Rational(-4))) == std::vector<Rational>(n, Rational(1, n)));
}

TEST_CASE("attention examples") {
    // A = B = identity, C picks v: every position goes to the leftmost largest value.
    auto pick_v = affine(2, {{0, 1}}, {0});
    AttentionLayer l{PwlFn::identity(1), PwlFn::identity(1), pick_v, Normalizer::UniqueLeftmost, Masking::None, false};
    CHECK(apply_attention(l, RSeq{{1}, {2}, {2}}) == RSeq{{2}, {2}, {2}});
    auto w = attention_weights(l, RSeq{{1}, {2}, {2}});
    CHECK(w[0] == ints({0, 1, 0}));

    AttentionLayer uniform{affine(2, {{0, 0}, {0, 0}}, {0, 0}), PwlFn::identity(2),
                           affine(4, {{0, 0, 1, 0}, {0, 0, 0, 1}}, {0, 0}), Normalizer::Average, Masking::None, true};
    RSeq aab{{1, 0}, {1, 0}, {0, 1}};
    for (const auto& y : apply_attention(uniform, aab)) CHECK(y == RVec{Rational(2, 3), Rational(1, 3)});

    // Masked position 1 sees nothing and gets the zero vector.
    AttentionLayer masked = uniform;
    masked.masking = Masking::StrictFuture;
    auto ys = apply_attention(masked, aab);
    CHECK(ys[0] == RVec{0, 0});
    CHECK(ys[1] == RVec{1, 0});
    CHECK(ys[2] == RVec{1, 0});
    CHECK(apply_attention(masked, RSeq{{0, 1}}) == RSeq{{0, 0}});
    CHECK(attention_weights(masked, aab)[0].empty());
}

TEST_CASE("run examples") {
    Transformer t;
    t.alphabet = "ab";
    t.embedding['a'] = {0};
    t.embedding['b'] = {0};
    t.eos_embedding = {1};
    t.accept = {1};
    CHECK(accepts(t, "abba"));
    CHECK(accepts(t, ""));
    t.eos_embedding = {0};
    CHECK_FALSE(accepts(t, "ab"));

    auto maj = fixtures::strict_majority(false);
    auto r = run_transformer(maj, "aab");
    CHECK(r.accepted);
    CHECK(r.score == Rational(1, 4));
    CHECK(r.trace.back().back() == RVec{Rational(1, 2), Rational(1, 4)});
    CHECK_FALSE(accepts(maj, "abb"));
    CHECK_FALSE(accepts(maj, "ab"));

    try {
        run_transformer(maj, "abc");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Parse);
        CHECK(std::string(e.what()).find("'c'") != std::string::npos);
    }
}

TEST_CASE("runs preserve length and are deterministic") {
    auto t = fixtures::first_equals_last();
    for (const auto& w : fixtures::words("ab", 0, 6)) {
        auto r = run_transformer(t, w);
        CHECK(r.trace.size() == t.layers.size() + 1);
        for (const auto& seq : r.trace) CHECK(seq.size() == w.size() + 1);
        CHECK(r.score == run_transformer(t, w).score);
        CHECK(r.accepted == (w.empty() || w.front() == w.back()));
    }
}

TEST_CASE("uniformity check") {
    auto zero = affine(1, {{0}}, {0});
    AttentionLayer constant{zero, PwlFn::identity(1), affine(2, {{0, 1}}, {0}), Normalizer::Average, Masking::None, true};
    CHECK(is_uniform(constant));
    AttentionLayer bilinear{PwlFn::identity(1), PwlFn::identity(1), affine(2, {{0, 1}}, {0}), Normalizer::Average,
                            Masking::None, false};
    CHECK_FALSE(is_uniform(bilinear));
    CHECK(check_uniform(fixtures::strict_majority(true)));
    CHECK_FALSE(check_uniform(fixtures::has_a()));
}

TEST_CASE("ill-typed transformers are rejected") {
    auto t = fixtures::strict_majority(false);
    t.accept = {1, 2, 3};
    CHECK_THROWS_AS(t.validate(), Error);
    t = fixtures::strict_majority(false);
    t.embedding.erase('b');
    CHECK_THROWS_AS(t.validate(), Error);
}

TEST_CASE("NoPE unmasked transformers are permutation invariant") {
    for (const auto& t : {fixtures::strict_majority(false), fixtures::has_a()}) {
        for (const auto& w : fixtures::words("ab", 1, 6)) {
            std::string p = w;
            std::sort(p.begin(), p.end());
            const bool base = accepts(t, w);
            do {
                CHECK(accepts(t, p) == base);
            } while (std::next_permutation(p.begin(), p.end()));
        }
    }
}

TEST_CASE("positional embedding blocks") {
    PeBlock pow;
    PositionalEmbedding pe{4, {pow}, {}};
    CHECK(pe.at(1, 3) == RVec{1, Rational(1, 2), Rational(1, 4), 0});
    CHECK(pe.at(2, 3) == RVec{1, Rational(1, 4), Rational(1, 16), 1});
    PeBlock inter = pow;
    inter.order = OrderFamily::interleave();
    PositionalEmbedding pe2{4, {inter}, {}};
    // interleave over 4 letters: 1, 4, 2, 3
    CHECK(OrderFamily::interleave().traversal(4) == std::vector<std::size_t>{1, 4, 2, 3});
    CHECK(pe2.at(4, 5)[1] == Rational(1, 4));
    CHECK(pe2.at(5, 5)[1] == Rational(1, 32));
}
