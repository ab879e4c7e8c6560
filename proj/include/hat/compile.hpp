#pragma once

#include "hat/logic.hpp"
#include "hat/model.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hat {

struct CompileOptions {
    std::size_t max_width = 256;
    bool accepts_empty = false;
    /// compile_counting_ahat only: where the top-level formula is read.
    Convention convention = Convention::LastPos;
    /// compile_kt_ahat only: comparisons are exact for words up to this length.
    std::size_t exact_up_to = 1024;
};

/// Where a compiled subformula lives: coordinate `coord` of trace[layer] holds
/// its 0/1 truth value at every position.
struct SubformulaSlot {
    Formula formula;
    std::size_t coord;
    std::size_t layer;
};

struct CompileInfo {
    std::vector<SubformulaSlot> subformulas;
    /// Named auxiliary coordinates ("first", "inv", "fraction:<ψ>", ...).
    std::vector<std::pair<std::string, SubformulaSlot>> auxiliary;
    std::size_t output_coord = 0;

    const SubformulaSlot* find(const Formula& f) const;
    const SubformulaSlot* find_aux(std::string_view name) const;
};

/// LTL[Mon] with future operators into an unmasked UHAT with PEs, accepting
/// under the FirstPos convention.
Transformer compile_ltl_uhat(const Formula& f, std::string_view alphabet, const CompileOptions& opt = {},
                             CompileInfo* info = nullptr);

/// compile_ltl_uhat with temporal operators walking positions in `order`.
Transformer compile_with_order(const Formula& f, std::string_view alphabet, const OrderFamily& order,
                               const CompileOptions& opt = {}, CompileInfo* info = nullptr);

/// Boolean and past operators into a strictly masked NoPE-UHAT read at EOS.
Transformer compile_ltl_masked_uhat(const Formula& f, std::string_view alphabet, const CompileOptions& opt = {},
                                    CompileInfo* info = nullptr);

/// Counting LTL with predicates into an AHAT with PEs.
Transformer compile_counting_ahat(const Formula& f, std::string_view alphabet, const CompileOptions& opt = {},
                                  CompileInfo* info = nullptr);

/// K_t[#] into a strictly masked NoPE-AHAT whose layers are all uniform.
Transformer compile_kt_ahat(const Formula& f, std::string_view alphabet, const CompileOptions& opt = {},
                            CompileInfo* info = nullptr);

struct Builtin {
    enum class Kind { Palindrome, RegularMod };
    Kind kind = Kind::Palindrome;
    std::string alphabet = "abc";
    std::uint64_t d = 2;
    std::uint64_t r = 0;
    char letter = 'a';

    static Builtin palindrome(std::string alphabet) { return {Kind::Palindrome, std::move(alphabet)}; }
    static Builtin regular_mod(std::uint64_t d, std::uint64_t r, char a, std::string alphabet = "ab") {
        return {Kind::RegularMod, std::move(alphabet), d, r, a};
    }
};

/// The formula behind a builtin; for Palindrome it is read over the
/// interleaved order, not left to right.
Formula builtin_formula(const Builtin& b);
Transformer builtin_language(const Builtin& b);

/// Unmasked equivalent of a masked transformer on words of length <= max_len,
/// using a one-hot/thermometer position block and score penalties. Unmasked
/// layers are carried over unchanged.
struct StripOptions {
    std::size_t max_len = 16;
    long penalty = 1024;
};
Transformer strip_masking(const Transformer& t, const StripOptions& opt = {});

}  // namespace hat
