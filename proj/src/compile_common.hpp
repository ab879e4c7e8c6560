#pragma once

#include "hat/compile.hpp"
#include "hat/program.hpp"

#include <functional>
#include <map>
#include <string>

namespace hat::detail {

inline constexpr std::size_t kNone = static_cast<std::size_t>(-1);

/// Embedding-space coordinates shared by the PE-based backends.
struct Positions {
    std::size_t eos = kNone;
    std::size_t one = kNone;
    std::size_t a = kNone;
    std::size_t a2 = kNone;
    std::size_t islast = kNone;
};

void check_alphabet(std::string_view alphabet, const Formula& f);

/// Recursive lowering with one coordinate per distinct subformula.
class Lowering {
public:
    Lowering(Program& prog, CompileInfo& info) : prog_(prog), info_(info) {}
    virtual ~Lowering() = default;

    std::size_t lower(const Formula& f);
    void name_aux(const std::string& name, const Formula& f, std::size_t coord);

protected:
    virtual std::size_t emit(const Formula& f) = 0;
    std::size_t emit_boolean(const Formula& f);

    Program& prog_;
    CompileInfo& info_;

private:
    std::map<std::string, std::size_t> memo_;
};

using KeyFn = std::function<Lin(PwlBuilder&)>;

/// Leftmost position j at or after i (in rank order) where `stop` holds, with
/// the last word position as fallback; the result reads `read` there. At the
/// EOS slot the result is `read` at the slot itself.
std::size_t emit_search(Program& p, Normalizer norm, const Positions& pos, const KeyFn& stop, std::size_t read);

/// Strong next in rank order.
std::size_t emit_next(Program& p, Normalizer norm, const Positions& pos, std::size_t read);

/// Moves the rank-1 truth value to every position as 2*bit - 1, or as the
/// empty-word verdict on the empty word.
std::size_t emit_route_first(Program& p, Normalizer norm, const Positions& pos, std::size_t bit, bool accepts_empty);

/// 2*bit - 1 on nonempty words, the empty-word verdict when `first` is set at EOS.
std::size_t emit_readout(Program& p, std::size_t bit, std::size_t first, bool accepts_empty);

/// Assembles the transformer: one-hot tokens at 0..|Σ|-1, the EOS embedding
/// from `eos_vec`, and t = e_out.
Transformer assemble(std::string_view alphabet, std::size_t width0, RVec eos_vec, const RVec& token_extra,
                     PositionalEmbedding pe, const Program& p, std::size_t out);

}  // namespace hat::detail
