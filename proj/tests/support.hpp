#pragma once

#include "hat/logic.hpp"
#include "hat/model.hpp"

#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace fixtures {

using Pred = std::function<bool(std::string_view)>;

struct Case {
    std::string text;
    Pred expected;
};

/// Every word over `alphabet` of length lo..hi, length-lexicographic.
std::vector<std::string> words(std::string_view alphabet, std::size_t lo, std::size_t hi);

std::size_t count(std::string_view w, char c);
bool contains(std::string_view w, std::string_view part);

/// Future-only LTL[Mon] over {a,b}, read at the first position. Empty words
/// are rejected.
std::vector<Case> future_cases();
/// Past-only formulas over {a,b}, read at the end-of-word slot.
std::vector<Case> past_cases();
/// Counting formulas over {a,b}, read at the first position.
std::vector<Case> counting_first_cases();

bool majority(std::string_view w);  // |w|_a >= |w|_b
bool dyck(std::string_view w);      // over "()"
bool palindrome(std::string_view w);

inline constexpr const char* kMaj = "#L[Qb] <= #L[Qa]";
inline constexpr const char* kDyck = "#L[Q(] = #L[Q)] & #L[#L[Q)] > #L[Q(]] = 0";

/// One uniform average layer over em(a)=(1,0), em(b)=(0,1), em(EOS)=0 with
/// t = (1,-1): accepts |w|_a > |w|_b. NoPE.
hat::Transformer strict_majority(bool masked);
/// NoPE leftmost-hard layer that finds an `a`: accepts words containing a.
hat::Transformer has_a();
/// Two hard-attention layers deciding "first letter equals last letter"; the
/// empty word is accepted.
hat::Transformer first_equals_last();

/// Random formulas over {a,b} with mod/at predicates; each operator family
/// can be switched off.
struct RandomFormulas {
    std::mt19937 rng;
    bool future = true;
    bool past = true;
    bool counting = true;
    bool predicates = true;

    explicit RandomFormulas(unsigned seed) : rng(seed) {}
    hat::Formula formula(int depth);
    hat::Term term(int depth);

private:
    std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }
};

/// Brute-force check of the positional score scheme -(a_i-a_j)^2 - 2 pen(j)
/// with a_i = 2^-i. Returns an empty string or a description of the failure.
std::string score_scheme_violation(std::size_t max_n);

/// Scores <A x_i, B x_j> of one attention layer on a sequence.
std::vector<std::vector<hat::Rational>> layer_scores(const hat::AttentionLayer& layer, const hat::RSeq& seq);

}  // namespace fixtures
