#include "support.hpp"

#include "hat/pwl.hpp"

#include <algorithm>
#include <sstream>

namespace fixtures {

using hat::Affine;
using hat::AttentionLayer;
using hat::Layer;
using hat::Masking;
using hat::Normalizer;
using hat::PwlFn;
using hat::Rational;
using hat::RVec;
using hat::Transformer;

std::vector<std::string> words(std::string_view alphabet, std::size_t lo, std::size_t hi) {
    std::vector<std::string> out;
    std::vector<std::string> layer{""};
    for (std::size_t len = 0; len <= hi; ++len) {
        if (len >= lo) out.insert(out.end(), layer.begin(), layer.end());
        std::vector<std::string> next;
        next.reserve(layer.size() * alphabet.size());
        for (const auto& w : layer)
            for (char c : alphabet) next.push_back(w + c);
        layer = std::move(next);
    }
    return out;
}

std::size_t count(std::string_view w, char c) { return static_cast<std::size_t>(std::count(w.begin(), w.end(), c)); }

bool contains(std::string_view w, std::string_view part) { return w.find(part) != std::string_view::npos; }

std::vector<Case> future_cases() {
    auto at = [](std::string_view w, std::size_t pos, char c) { return pos <= w.size() && w[pos - 1] == c; };
    std::vector<Case> cs;
    cs.push_back({"Qa", [=](std::string_view w) { return at(w, 1, 'a'); }});
    cs.push_back({"!Qa", [=](std::string_view w) { return !w.empty() && !at(w, 1, 'a'); }});
    cs.push_back({"Qa & Qb", [](std::string_view) { return false; }});
    cs.push_back({"Qa | X Qb", [=](std::string_view w) { return at(w, 1, 'a') || at(w, 2, 'b'); }});
    cs.push_back({"X X !Qa", [=](std::string_view w) { return at(w, 3, 'b'); }});
    cs.push_back({"F Qb", [](std::string_view w) { return contains(w, "b"); }});
    cs.push_back({"G Qa", [](std::string_view w) { return !w.empty() && !contains(w, "b"); }});
    cs.push_back({"(X Qa) U Qb", [=](std::string_view w) {
                      for (std::size_t j = 1; j <= w.size(); ++j) {
                          if (w[j - 1] == 'b') return true;
                          if (!at(w, j + 1, 'a')) return false;
                      }
                      return false;
                  }});
    cs.push_back({"G(mod(2,0) -> Qb)", [=](std::string_view w) {
                      if (w.empty()) return false;
                      for (std::size_t j = 2; j <= w.size(); j += 2)
                          if (!at(w, j, 'b')) return false;
                      return true;
                  }});
    cs.push_back({"F(Qa & X Qa)", [](std::string_view w) { return contains(w, "aa"); }});
    cs.push_back({"G(Qa -> F Qb)", [](std::string_view w) { return !w.empty() && w.back() == 'b'; }});
    cs.push_back({"!F(Qb & X Qb)", [](std::string_view w) { return !w.empty() && !contains(w, "bb"); }});
    cs.push_back({"F(at(3) & Qa)", [=](std::string_view w) { return at(w, 3, 'a'); }});
    cs.push_back({"G F Qa", [](std::string_view w) { return !w.empty() && w.back() == 'a'; }});
    cs.push_back({"F G Qb", [](std::string_view w) { return !w.empty() && w.back() == 'b'; }});
    cs.push_back({"(Qa | Qb) U (mod(3,0) & Qb)", [=](std::string_view w) {
                      for (std::size_t j = 3; j <= w.size(); j += 3)
                          if (at(w, j, 'b')) return true;
                      return false;
                  }});
    return cs;
}

std::vector<Case> past_cases() {
    std::vector<Case> cs;
    cs.push_back({"Y Qa", [](std::string_view w) { return !w.empty() && w.back() == 'a'; }});
    cs.push_back({"!Y Qa", [](std::string_view w) { return !w.empty() && w.back() != 'a'; }});
    cs.push_back({"O Qb", [](std::string_view w) { return contains(w, "b"); }});
    cs.push_back({"Y Y Qa", [](std::string_view w) { return w.size() >= 2 && w[w.size() - 2] == 'a'; }});
    cs.push_back({"O(Qb & Y Qb)", [](std::string_view w) { return contains(w, "bb"); }});
    cs.push_back({"Y((Qa | Qb) S (Qb & Y Qa))", [](std::string_view w) { return contains(w, "ab"); }});
    cs.push_back({"!Y(O(Qa & Y Qa))", [](std::string_view w) { return !w.empty() && !contains(w, "aa"); }});
    cs.push_back({"Y(Qb S Qa)", [](std::string_view w) { return contains(w, "a"); }});
    cs.push_back({"Y(Qa & Y O Qb)", [](std::string_view w) {
                      return !w.empty() && w.back() == 'a' && contains(w.substr(0, w.size() - 1), "b");
                  }});
    return cs;
}

std::vector<Case> counting_first_cases() {
    std::vector<Case> cs;
    cs.push_back({"#R[Qa] = #R[Qb]", [](std::string_view w) {
                      return !w.empty() && count(w.substr(1), 'a') == count(w.substr(1), 'b');
                  }});
    cs.push_back({"F(#L[Qa] = 2 & Qb)", [](std::string_view w) {
                      for (std::size_t j = 0; j < w.size(); ++j)
                          if (w[j] == 'b' && count(w.substr(0, j), 'a') == 2) return true;
                      return false;
                  }});
    cs.push_back({"G(#L[Qb] <= #L[Qa])", [](std::string_view w) {
                      if (w.empty()) return false;
                      for (std::size_t j = 0; j < w.size(); ++j)
                          if (count(w.substr(0, j), 'b') > count(w.substr(0, j), 'a')) return false;
                      return true;
                  }});
    cs.push_back({"Qa & #R[Qb] < 2", [](std::string_view w) {
                      return !w.empty() && w[0] == 'a' && count(w, 'b') < 2;
                  }});
    cs.push_back({"F(#L[Qa] = #L[Qb] + 2)", [](std::string_view w) {
                      for (std::size_t j = 0; j < w.size(); ++j)
                          if (count(w.substr(0, j), 'a') == count(w.substr(0, j), 'b') + 2) return true;
                      return false;
                  }});
    cs.push_back({"G(Qb -> #L[Qa] >= 1)", [](std::string_view w) {
                      if (w.empty()) return false;
                      auto b = w.find('b');
                      return b == std::string_view::npos || count(w.substr(0, b), 'a') >= 1;
                  }});
    cs.push_back({"F(mod(2,0) & #L[Qa] = 1)", [](std::string_view w) {
                      for (std::size_t j = 2; j <= w.size(); j += 2)
                          if (count(w.substr(0, j - 1), 'a') == 1) return true;
                      return false;
                  }});
    return cs;
}

bool majority(std::string_view w) { return count(w, 'a') >= count(w, 'b'); }

bool dyck(std::string_view w) {
    long depth = 0;
    for (char c : w) {
        depth += c == '(' ? 1 : -1;
        if (depth < 0) return false;
    }
    return depth == 0;
}

bool palindrome(std::string_view w) { return std::equal(w.begin(), w.begin() + w.size() / 2, w.rbegin()); }

namespace {

PwlFn affine(std::size_t in, std::vector<RVec> rows, RVec bias) {
    return PwlFn::identity(in).then_affine(Affine(in, std::move(rows), std::move(bias)));
}

RVec unit(std::size_t dim, std::size_t k) {
    RVec v(dim, Rational(0));
    v[k] = 1;
    return v;
}

// Projection of (x, v) onto v.
PwlFn second_half(std::size_t r) {
    std::vector<RVec> rows;
    for (std::size_t k = 0; k < r; ++k) rows.push_back(unit(2 * r, r + k));
    return affine(2 * r, rows, RVec(r, Rational(0)));
}

Transformer letters_ab() {
    Transformer t;
    t.alphabet = "ab";
    t.embedding['a'] = {1, 0};
    t.embedding['b'] = {0, 1};
    t.eos_embedding = {0, 0};
    return t;
}

}  // namespace

Transformer strict_majority(bool masked) {
    Transformer t = letters_ab();
    const RVec zero(2, Rational(0));
    AttentionLayer l{affine(2, {zero, zero}, zero), PwlFn::identity(2), second_half(2), Normalizer::Average,
                     masked ? Masking::StrictFuture : Masking::None, true};
    t.layers.push_back(Layer{l});
    t.accept = {1, -1};
    t.validate();
    return t;
}

Transformer has_a() {
    Transformer t = letters_ab();
    const RVec zero(2, Rational(0));
    AttentionLayer l{affine(2, {{0, 0}, zero}, {1, 0}), PwlFn::identity(2), second_half(2), Normalizer::UniqueLeftmost,
                     Masking::None, false};
    t.layers.push_back(Layer{l});
    t.accept = {1, 0};
    t.validate();
    return t;
}

Transformer first_equals_last() {
    Transformer t;
    t.alphabet = "ab";
    t.embedding['a'] = {1, 0, 0};
    t.embedding['b'] = {0, 1, 0};
    t.eos_embedding = {0, 0, 1};

    // Every position attends to position 1 and records whether it holds an a.
    const RVec z3(3, Rational(0));
    std::vector<RVec> keep3;
    for (std::size_t k = 0; k < 3; ++k) keep3.push_back(unit(6, k));
    auto rows1 = keep3;
    rows1.push_back(unit(6, 3));
    AttentionLayer first{affine(3, {z3, z3, z3}, z3), PwlFn::identity(3), affine(6, rows1, RVec(4, Rational(0))),
                         Normalizer::UniqueLeftmost, Masking::None, true};

    // Then the rightmost letter (the EOS slot scores lower) is compared with it.
    const RVec z4(4, Rational(0));
    hat::PwlBuilder b(8);
    std::vector<hat::Lin> out;
    for (std::size_t k = 0; k < 4; ++k) out.push_back(b.in(k));
    hat::Lin last_a = b.in(4), first_a = b.in(3);
    out.push_back(hat::Lin(1) - b.relu(last_a - first_a) - b.relu(first_a - last_a));
    AttentionLayer last{affine(4, {z4, z4, z4, z4}, {1, 0, 0, 0}), affine(4, {{0, 0, -1, 0}, z4, z4, z4}, {1, 0, 0, 0}),
                        b.build(out), Normalizer::UniqueRightmost, Masking::None, false};

    t.layers.push_back(Layer{first});
    t.layers.push_back(Layer{last});
    t.accept = {0, 0, 0, 0, 1};
    t.validate();
    return t;
}

std::string score_scheme_violation(std::size_t max_n) {
    std::vector<Rational> a(max_n + 1);
    for (std::size_t i = 1; i <= max_n; ++i) a[i] = Rational(1, 1u << i);
    for (std::size_t n = 1; n <= max_n; ++n) {
        for (std::uint32_t label = 0; label < (1u << n); ++label) {
            auto phi = [&](std::size_t j) { return ((label >> (j - 1)) & 1u) != 0; };
            auto pen = [&](std::size_t j) { return j < n && !phi(j) ? 1 : 0; };
            for (std::size_t i = 1; i <= n; ++i) {
                auto dist = [&](std::size_t j) { return Rational(-(a[i] - a[j]) * (a[i] - a[j])); };
                auto score = [&](std::size_t j) { return Rational(dist(j) - 2 * pen(j)); };
                std::ostringstream where;
                where << "n=" << n << " i=" << i << " labels=" << label;
                for (std::size_t j = i; j <= n; ++j) {
                    for (std::size_t k = 1; k < i; ++k)
                        if (!(dist(j) > dist(k))) return "(a) fails at " + where.str();
                    if (j > i && !(dist(j) < dist(j - 1))) return "(b) fails at " + where.str();
                    if (j < n && phi(j) && !(score(j) > score(n))) return "(c) fails at " + where.str();
                }
                Rational worst_free = 0;
                bool any_free = false;
                for (std::size_t j = 1; j <= n; ++j) {
                    if (pen(j) == 0 && (!any_free || score(j) < worst_free)) {
                        worst_free = score(j);
                        any_free = true;
                    }
                }
                if (!(worst_free > -1)) return "(d) fails at " + where.str();
                for (std::size_t j = 1; j < n; ++j)
                    if (!phi(j) && !(score(j) < -1)) return "(d) fails at " + where.str();
            }
        }
    }
    return "";
}

std::vector<std::vector<Rational>> layer_scores(const AttentionLayer& layer, const hat::RSeq& seq) {
    std::vector<RVec> q, k;
    for (const auto& x : seq) {
        q.push_back(hat::eval_pwl(layer.A, x));
        k.push_back(hat::eval_pwl(layer.B, x));
    }
    std::vector<std::vector<Rational>> s(seq.size(), std::vector<Rational>(seq.size()));
    for (std::size_t i = 0; i < seq.size(); ++i)
        for (std::size_t j = 0; j < seq.size(); ++j) s[i][j] = hat::dot(q[i], k[j]);
    return s;
}

}  // namespace fixtures

namespace fixtures {

using hat::CmpOp;
using hat::Formula;
using hat::MonadicPredicate;
using hat::Term;

Term RandomFormulas::term(int depth) {
    switch (depth <= 0 ? pick(2) : pick(5)) {
    case 0: return Term::constant(static_cast<long>(pick(4)) - 1);
    case 1: return Term::left_count(formula(depth - 1));
    case 2: return future ? Term::right_count(formula(depth - 1)) : Term::left_count(formula(depth - 1));
    case 3: return Term::add(term(depth - 1), term(depth - 1));
    default: return Term::sub(term(depth - 1), term(depth - 1));
    }
}

Formula RandomFormulas::formula(int depth) {
    if (depth <= 0) {
        switch (pick(predicates ? 3 : 2)) {
        case 0: return Formula::token('a');
        case 1: return Formula::token('b');
        default:
            return Formula::pred(pick(2) ? MonadicPredicate::mod(2 + pick(2), pick(3)) : MonadicPredicate::at(1 + pick(4)));
        }
    }
    for (;;) {
        switch (pick(13)) {
        case 0: return Formula::negate(formula(depth - 1));
        case 1: return Formula::conj(formula(depth - 1), formula(depth - 1));
        case 2: return Formula::disj(formula(depth - 1), formula(depth - 1));
        case 3: return formula(0);
        case 4: if (future) return Formula::next(formula(depth - 1)); break;
        case 5: if (future) return Formula::future(formula(depth - 1)); break;
        case 6: if (future) return Formula::globally(formula(depth - 1)); break;
        case 7: if (future) return Formula::until(formula(depth - 1), formula(depth - 1)); break;
        case 8: if (past) return Formula::prev(formula(depth - 1)); break;
        case 9: if (past) return Formula::once(formula(depth - 1)); break;
        case 10: if (past) return Formula::since(formula(depth - 1), formula(depth - 1)); break;
        default:
            if (counting) {
                const CmpOp ops[] = {CmpOp::Le, CmpOp::Lt, CmpOp::Eq};
                return Formula::cmp(term(depth - 1), ops[pick(3)], term(depth - 1));
            }
        }
    }
}

}  // namespace fixtures
