#include "hat/error.hpp"
#include "hat/logic.hpp"

#include <algorithm>

namespace hat {

namespace {

// Future operators look at [i, n] from a word position and at the slot only
// from the slot.
std::pair<std::size_t, std::size_t> future_range(std::size_t i, std::size_t n) {
    return i <= n ? std::pair{i, n} : std::pair{i, i};
}

}  // namespace

bool eval_formula(const Formula& f, std::string_view w, std::size_t i) {
    const std::size_t n = w.size();
    if (i < 1 || i > n + 1)
        fail(ErrorKind::Domain, "position " + std::to_string(i) + " outside 1.." + std::to_string(n + 1));
    switch (f.op()) {
    case FormulaOp::TokenIs: return i <= n && w[i - 1] == f.token_char();
    case FormulaOp::Pred: return f.predicate().contains(i);
    case FormulaOp::Not: return !eval_formula(f.arg(), w, i);
    case FormulaOp::And: return eval_formula(f.arg(0), w, i) && eval_formula(f.arg(1), w, i);
    case FormulaOp::Or: return eval_formula(f.arg(0), w, i) || eval_formula(f.arg(1), w, i);
    case FormulaOp::Next: return i < n && eval_formula(f.arg(), w, i + 1);
    case FormulaOp::Future: {
        auto [lo, hi] = future_range(i, n);
        for (std::size_t j = lo; j <= hi; ++j)
            if (eval_formula(f.arg(), w, j)) return true;
        return false;
    }
    case FormulaOp::Globally: {
        auto [lo, hi] = future_range(i, n);
        for (std::size_t j = lo; j <= hi; ++j)
            if (!eval_formula(f.arg(), w, j)) return false;
        return true;
    }
    case FormulaOp::Until: {
        auto [lo, hi] = future_range(i, n);
        for (std::size_t j = lo; j <= hi; ++j) {
            if (eval_formula(f.arg(1), w, j)) return true;
            if (!eval_formula(f.arg(0), w, j)) return false;
        }
        return false;
    }
    case FormulaOp::Prev: return i > 1 && eval_formula(f.arg(), w, i - 1);
    case FormulaOp::Once:
        for (std::size_t j = i; j >= 1; --j)
            if (eval_formula(f.arg(), w, j)) return true;
        return false;
    case FormulaOp::Since:
        for (std::size_t j = i; j >= 1; --j) {
            if (eval_formula(f.arg(1), w, j)) return true;
            if (!eval_formula(f.arg(0), w, j)) return false;
        }
        return false;
    case FormulaOp::Cmp: {
        long a = eval_term(f.lhs_term(), w, i);
        long b = eval_term(f.rhs_term(), w, i);
        switch (f.cmp_op()) {
        case CmpOp::Le: return a <= b;
        case CmpOp::Lt: return a < b;
        case CmpOp::Eq: return a == b;
        }
    }
    }
    return false;
}

long eval_term(const Term& t, std::string_view w, std::size_t i) {
    const std::size_t n = w.size();
    switch (t.op()) {
    case TermOp::Const: return t.value();
    case TermOp::LeftCount: {
        long c = 0;
        for (std::size_t j = 1; j < i; ++j) c += eval_formula(t.body(), w, j) ? 1 : 0;
        return c;
    }
    case TermOp::RightCount: {
        long c = 0;
        for (std::size_t j = i + 1; j <= n; ++j) c += eval_formula(t.body(), w, j) ? 1 : 0;
        return c;
    }
    case TermOp::Add: return eval_term(t.arg(0), w, i) + eval_term(t.arg(1), w, i);
    case TermOp::Sub: return eval_term(t.arg(0), w, i) - eval_term(t.arg(1), w, i);
    }
    return 0;
}

bool language_member(const Formula& f, std::string_view w, Convention conv) {
    if (w.empty()) fail(ErrorKind::Domain, "language_member needs a nonempty word");
    return eval_formula(f, w, conv == Convention::FirstPos ? 1 : w.size() + 1);
}

bool Language::contains(std::string_view w) const {
    if (w.empty()) return accepts_empty;
    auto t = eval_positions(formula, w);
    return convention == Convention::FirstPos ? t.front() : t.back();
}

}  // namespace hat

namespace hat {

namespace {

std::vector<long> term_table(const Term& t, std::string_view w);

// Index 0 is unused; indices 1..n+1 hold the truth value at each position.
std::vector<char> table(const Formula& f, std::string_view w) {
    const std::size_t n = w.size();
    std::vector<char> out(n + 2, 0);
    switch (f.op()) {
    case FormulaOp::TokenIs:
        for (std::size_t i = 1; i <= n; ++i) out[i] = w[i - 1] == f.token_char();
        break;
    case FormulaOp::Pred:
        for (std::size_t i = 1; i <= n + 1; ++i) out[i] = f.predicate().contains(i);
        break;
    case FormulaOp::Not: {
        auto a = table(f.arg(), w);
        for (std::size_t i = 1; i <= n + 1; ++i) out[i] = !a[i];
        break;
    }
    case FormulaOp::And:
    case FormulaOp::Or: {
        auto a = table(f.arg(0), w);
        auto b = table(f.arg(1), w);
        for (std::size_t i = 1; i <= n + 1; ++i) out[i] = f.op() == FormulaOp::And ? (a[i] && b[i]) : (a[i] || b[i]);
        break;
    }
    case FormulaOp::Next: {
        auto a = table(f.arg(), w);
        for (std::size_t i = 1; i < n; ++i) out[i] = a[i + 1];
        break;
    }
    case FormulaOp::Prev: {
        auto a = table(f.arg(), w);
        for (std::size_t i = 2; i <= n + 1; ++i) out[i] = a[i - 1];
        break;
    }
    case FormulaOp::Future:
    case FormulaOp::Globally: {
        auto a = table(f.arg(), w);
        bool g = f.op() == FormulaOp::Globally;
        bool acc = g;
        for (std::size_t i = n; i >= 1; --i) {
            acc = g ? (acc && a[i]) : (acc || a[i]);
            out[i] = acc;
        }
        out[n + 1] = a[n + 1];
        break;
    }
    case FormulaOp::Until: {
        auto a = table(f.arg(0), w);
        auto b = table(f.arg(1), w);
        bool acc = false;
        for (std::size_t i = n; i >= 1; --i) {
            acc = b[i] || (a[i] && acc);
            out[i] = acc;
        }
        out[n + 1] = b[n + 1];
        break;
    }
    case FormulaOp::Once: {
        auto a = table(f.arg(), w);
        bool acc = false;
        for (std::size_t i = 1; i <= n + 1; ++i) out[i] = acc = acc || a[i];
        break;
    }
    case FormulaOp::Since: {
        auto a = table(f.arg(0), w);
        auto b = table(f.arg(1), w);
        bool acc = false;
        for (std::size_t i = 1; i <= n + 1; ++i) out[i] = acc = b[i] || (a[i] && acc);
        break;
    }
    case FormulaOp::Cmp: {
        auto l = term_table(f.lhs_term(), w);
        auto r = term_table(f.rhs_term(), w);
        for (std::size_t i = 1; i <= n + 1; ++i) {
            switch (f.cmp_op()) {
            case CmpOp::Le: out[i] = l[i] <= r[i]; break;
            case CmpOp::Lt: out[i] = l[i] < r[i]; break;
            case CmpOp::Eq: out[i] = l[i] == r[i]; break;
            }
        }
        break;
    }
    }
    return out;
}

std::vector<long> term_table(const Term& t, std::string_view w) {
    const std::size_t n = w.size();
    std::vector<long> out(n + 2, 0);
    switch (t.op()) {
    case TermOp::Const:
        std::fill(out.begin(), out.end(), t.value());
        break;
    case TermOp::LeftCount: {
        auto a = table(t.body(), w);
        for (std::size_t i = 2; i <= n + 1; ++i) out[i] = out[i - 1] + a[i - 1];
        break;
    }
    case TermOp::RightCount: {
        auto a = table(t.body(), w);
        for (std::size_t i = n; i >= 1; --i) out[i] = out[i + 1] + (i + 1 <= n ? a[i + 1] : 0);
        break;
    }
    case TermOp::Add:
    case TermOp::Sub: {
        auto a = term_table(t.arg(0), w);
        auto b = term_table(t.arg(1), w);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = t.op() == TermOp::Add ? a[i] + b[i] : a[i] - b[i];
        break;
    }
    }
    return out;
}

}  // namespace

std::vector<bool> eval_positions(const Formula& f, std::string_view w) {
    auto t = table(f, w);
    return std::vector<bool>(t.begin() + 1, t.end());
}

}  // namespace hat
