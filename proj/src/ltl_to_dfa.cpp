#include "hat/automata.hpp"
#include "hat/error.hpp"

#include <deque>
#include <map>
#include <numeric>

namespace hat {

namespace {

// An obligation on the next position. Mid-word both strengths mean "holds at
// the next position"; at the end of the word Strong is false and Weak true.
struct Atom {
    Formula formula;
    bool weak;
};

class Progression {
public:
    Progression(const Formula& root, std::string_view alphabet, const DfaOptions& opt)
        : alphabet_(alphabet), opt_(opt) {
        collect(root);
        if (atoms_.size() > opt.max_atoms)
            fail(ErrorKind::Resource, "formula needs " + std::to_string(atoms_.size()) + " obligation atoms, cap is " +
                                          std::to_string(opt.max_atoms));
        for (const auto& p : predicates_of(root)) {
            threshold_ = std::max(threshold_, p.threshold);
            period_ = std::lcm(period_, p.period);
        }
        threshold_ = std::max<std::uint64_t>(threshold_, 1);
    }

    std::size_t atom_count() const { return atoms_.size(); }

    /// Position class: exact below the threshold, then periodic.
    std::uint64_t next_class(std::uint64_t c) const {
        if (c + 1 < threshold_ + period_) return c + 1;
        return threshold_ + ((c + 1 - threshold_) % period_);
    }

    /// Value of `f` at a position with `token` and position class `pos`,
    /// given the truth values of the next-position atoms.
    bool prog(const Formula& f, char token, std::uint64_t pos, const std::vector<bool>& beta) const {
        switch (f.op()) {
        case FormulaOp::TokenIs: return token == f.token_char();
        case FormulaOp::Pred: return f.predicate().contains(pos);
        case FormulaOp::Not: return !prog(f.arg(), token, pos, beta);
        case FormulaOp::And: return prog(f.arg(0), token, pos, beta) && prog(f.arg(1), token, pos, beta);
        case FormulaOp::Or: return prog(f.arg(0), token, pos, beta) || prog(f.arg(1), token, pos, beta);
        case FormulaOp::Next: return beta[atom(f.arg(), false)];
        case FormulaOp::Future: return prog(f.arg(), token, pos, beta) || beta[atom(f, false)];
        case FormulaOp::Globally: return prog(f.arg(), token, pos, beta) && beta[atom(f, true)];
        case FormulaOp::Until:
            return prog(f.arg(1), token, pos, beta) || (prog(f.arg(0), token, pos, beta) && beta[atom(f, false)]);
        default: fail(ErrorKind::Fragment, "ltl_to_dfa handles future-only LTL[Mon], got " + to_text(f));
        }
    }

    const std::vector<Atom>& atoms() const { return atoms_; }

private:
    std::size_t atom(const Formula& f, bool weak) const { return by_node_.at({f.id(), weak}); }

    void add(const Formula& f, bool weak) {
        auto key = std::pair{to_text(f), weak};
        auto [it, fresh] = index_.try_emplace(key, atoms_.size());
        if (fresh) atoms_.push_back({f, weak});
        by_node_[{f.id(), weak}] = it->second;
    }

    void collect(const Formula& f) {
        switch (f.op()) {
        case FormulaOp::Prev:
        case FormulaOp::Once:
        case FormulaOp::Since: fail(ErrorKind::Fragment, "ltl_to_dfa does not handle past operators");
        case FormulaOp::Cmp: fail(ErrorKind::Fragment, "ltl_to_dfa does not handle counting terms");
        case FormulaOp::Next: add(f.arg(), false); break;
        case FormulaOp::Future:
        case FormulaOp::Until: add(f, false); break;
        case FormulaOp::Globally: add(f, true); break;
        default: break;
        }
        for (std::size_t k = 0; k < f.arity(); ++k) collect(f.arg(k));
    }

    std::string_view alphabet_;
    DfaOptions opt_;
    std::vector<Atom> atoms_;
    std::map<std::pair<std::string, bool>, std::size_t> index_;
    std::map<std::pair<const void*, bool>, std::size_t> by_node_;
    std::uint64_t threshold_ = 0;
    std::uint64_t period_ = 1;
};

// State: truth table over atom assignments (the residual obligation), the
// class of the next position to read, and whether nothing was read yet.
struct State {
    std::vector<bool> table;
    std::uint64_t pos = 1;
    bool initial = false;
    auto operator<=>(const State&) const = default;
};

}  // namespace

Dfa ltl_to_dfa(const Formula& f, std::string_view alphabet, const DfaOptions& opt) {
    if (alphabet.empty()) fail(ErrorKind::Domain, "alphabet is empty");
    if (classify_fragment(f) != Fragment::LTLMon) fail(ErrorKind::Fragment, "ltl_to_dfa needs an LTL[Mon] formula");
    Progression pr(f, alphabet, opt);
    const std::size_t k = pr.atom_count();
    const std::size_t cells = std::size_t{1} << k;

    auto assignment = [k](std::size_t m) {
        std::vector<bool> beta(k);
        for (std::size_t b = 0; b < k; ++b) beta[b] = (m >> b) & 1U;
        return beta;
    };
    std::vector<bool> end_beta(k);
    std::size_t end_cell = 0;
    for (std::size_t b = 0; b < k; ++b) {
        end_beta[b] = pr.atoms()[b].weak;
        if (end_beta[b]) end_cell |= std::size_t{1} << b;
    }

    Dfa d;
    d.alphabet = std::string(alphabet);
    std::map<State, std::size_t> id;
    std::deque<State> queue;
    auto visit = [&](State s) {
        auto [it, fresh] = id.try_emplace(s, d.delta.size());
        if (fresh) {
            if (d.delta.size() >= opt.max_states)
                fail(ErrorKind::Resource, "DFA exceeds " + std::to_string(opt.max_states) + " states");
            d.delta.emplace_back(alphabet.size(), 0);
            d.accepting.push_back(s.initial ? opt.accepts_empty : bool(s.table[end_cell]));
            queue.push_back(std::move(s));
        }
        return it->second;
    };
    d.initial = visit(State{{}, 1, true});

    while (!queue.empty()) {
        State s = queue.front();
        queue.pop_front();
        const std::size_t from = id.at(s);
        for (std::size_t t = 0; t < alphabet.size(); ++t) {
            const char a = alphabet[t];
            State next;
            next.pos = pr.next_class(s.pos);
            next.table.resize(cells);
            for (std::size_t m = 0; m < cells; ++m) {
                const auto beta = assignment(m);
                if (s.initial) {
                    next.table[m] = pr.prog(f, a, s.pos, beta);
                } else {
                    // Substitute every obligation by its progression at this position.
                    std::size_t alpha = 0;
                    for (std::size_t b = 0; b < k; ++b)
                        if (pr.prog(pr.atoms()[b].formula, a, s.pos, beta)) alpha |= std::size_t{1} << b;
                    next.table[m] = s.table[alpha];
                }
            }
            d.delta[from][t] = visit(std::move(next));
        }
    }
    return d;
}

}  // namespace hat
