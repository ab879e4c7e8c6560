#pragma once

#include "hat/predicate.hpp"

#include <json.hpp>

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace hat {

enum class FormulaOp { TokenIs, Pred, Not, And, Or, Next, Future, Globally, Until, Prev, Once, Since, Cmp };
enum class CmpOp { Le, Lt, Eq };
enum class TermOp { Const, LeftCount, RightCount, Add, Sub };

struct FormulaNode;
struct TermNode;
class Term;

/// Immutable LTL[Mon] / Counting LTL formula. Copies share structure.
class Formula {
public:
    static Formula token(char a);
    static Formula pred(MonadicPredicate p);
    static Formula negate(Formula f);
    static Formula conj(Formula a, Formula b);
    static Formula disj(Formula a, Formula b);
    static Formula implies(Formula a, Formula b);  // expands to !a | b
    static Formula next(Formula f);
    static Formula future(Formula f);
    static Formula globally(Formula f);
    static Formula until(Formula a, Formula b);
    static Formula prev(Formula f);
    static Formula once(Formula f);
    static Formula since(Formula a, Formula b);
    static Formula cmp(Term lhs, CmpOp op, Term rhs);

    FormulaOp op() const;
    char token_char() const;
    const MonadicPredicate& predicate() const;
    const Formula& arg(std::size_t k = 0) const;
    std::size_t arity() const;
    const Term& lhs_term() const;
    const Term& rhs_term() const;
    CmpOp cmp_op() const;

    /// Stable identity of the shared node, usable as a map key.
    const void* id() const { return node_.get(); }

    bool operator==(const Formula& o) const;

private:
    explicit Formula(std::shared_ptr<const FormulaNode> n) : node_(std::move(n)) {}
    std::shared_ptr<const FormulaNode> node_;
};

class Term {
public:
    static Term constant(long c);
    static Term left_count(Formula f);
    static Term right_count(Formula f);
    static Term add(Term a, Term b);
    static Term sub(Term a, Term b);

    TermOp op() const;
    long value() const;
    const Formula& body() const;
    const Term& arg(std::size_t k) const;

    bool operator==(const Term& o) const;

private:
    explicit Term(std::shared_ptr<const TermNode> n) : node_(std::move(n)) {}
    std::shared_ptr<const TermNode> node_;
};

struct FormulaNode {
    FormulaOp op;
    char token = 0;
    MonadicPredicate predicate;
    std::vector<Formula> args;
    std::vector<Term> terms;
    CmpOp cmp = CmpOp::Le;
};

struct TermNode {
    TermOp op;
    long value = 0;
    std::vector<Formula> body;
    std::vector<Term> args;
};

// ---------------------------------------------------------------- syntax

/// Parses the ASCII grammar documented in docs/formula-grammar.md. Atoms Qc
/// must name tokens of `alphabet`. Errors carry line and column.
Formula parse_formula(std::string_view text, std::string_view alphabet);
MonadicPredicate parse_predicate(std::string_view text);

/// Fully parenthesised concrete syntax; parse(to_text(f)) == f.
std::string to_text(const Formula& f);
std::string to_text(const Term& t);

nlohmann::ordered_json formula_to_json(const Formula& f);
Formula formula_from_json(const nlohmann::ordered_json& j);

// ---------------------------------------------------------------- semantics

/// Positions are 1-based. Position |w|+1 is the EOS slot: no token holds there,
/// future operators see only the slot itself, past operators and ←# see the
/// whole word.
bool eval_formula(const Formula& f, std::string_view w, std::size_t i);
long eval_term(const Term& t, std::string_view w, std::size_t i);
/// Truth values at positions 1..|w|+1 in one bottom-up pass.
std::vector<bool> eval_positions(const Formula& f, std::string_view w);

enum class Convention { FirstPos, LastPos };

/// FirstPos evaluates at position 1, LastPos at the EOS slot |w|+1. The word
/// must be nonempty; the empty word is decided by a Language's flag.
bool language_member(const Formula& f, std::string_view w, Convention conv);

struct Language {
    Formula formula;
    Convention convention = Convention::FirstPos;
    bool accepts_empty = false;

    bool contains(std::string_view w) const;
};

// ---------------------------------------------------------------- structure

enum class Fragment { LTLMon, CountingLTL, KtSharp };

/// LTLMon when no comparison occurs; otherwise KtSharp when there are no
/// temporal operators and no →#; otherwise CountingLTL.
Fragment classify_fragment(const Formula& f);
std::string fragment_name(Fragment f);

bool has_temporal(const Formula& f);
bool has_future_ops(const Formula& f);
bool has_past_ops(const Formula& f);
bool has_predicates(const Formula& f);
bool has_right_count(const Formula& f);
bool has_counting(const Formula& f);

/// Distinct predicates in first-occurrence order.
std::vector<MonadicPredicate> predicates_of(const Formula& f);
/// Number of nodes (formulas and terms).
std::size_t formula_size(const Formula& f);
std::size_t formula_depth(const Formula& f);

}  // namespace hat
