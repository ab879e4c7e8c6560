#include "hat/error.hpp"
#include "hat/logic.hpp"

#include <cctype>
#include <limits>

namespace hat {

namespace {

class Parser {
public:
    Parser(std::string_view text, std::string_view alphabet) : s_(text), alphabet_(alphabet) {}

    Formula formula() {
        Formula f = impl();
        skip();
        if (pos_ < s_.size()) error("unexpected '" + std::string(1, s_[pos_]) + "'");
        return f;
    }

    MonadicPredicate predicate_only() {
        skip();
        MonadicPredicate p;
        if (!predicate(p)) error("expected mod(..), at(..) or mon(..)");
        skip();
        if (pos_ < s_.size()) error("trailing input after predicate");
        return p;
    }

private:
    std::string_view s_;
    std::string_view alphabet_;
    std::size_t pos_ = 0;

    [[noreturn]] void error(const std::string& msg) const {
        std::size_t line = 1, col = 1;
        for (std::size_t k = 0; k < pos_ && k < s_.size(); ++k) {
            if (s_[k] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        fail(ErrorKind::Parse,
             "parse error at line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + msg);
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    char peek(std::size_t ahead = 0) {
        skip();
        return pos_ + ahead < s_.size() ? s_[pos_ + ahead] : '\0';
    }
    bool accept(std::string_view tok) {
        skip();
        if (s_.substr(pos_, tok.size()) == tok) {
            pos_ += tok.size();
            return true;
        }
        return false;
    }
    void expect(std::string_view tok) {
        if (!accept(tok)) error("expected '" + std::string(tok) + "'");
    }
    bool keyword(std::string_view kw) {
        skip();
        if (s_.substr(pos_, kw.size()) != kw) return false;
        std::size_t after = pos_ + kw.size();
        while (after < s_.size() && std::isspace(static_cast<unsigned char>(s_[after]))) ++after;
        if (after >= s_.size() || s_[after] != '(') return false;
        pos_ += kw.size();
        return true;
    }

    std::uint64_t natural() {
        skip();
        if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_]))) error("expected a number");
        std::uint64_t v = 0;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
            auto d = static_cast<std::uint64_t>(s_[pos_] - '0');
            if (v > (std::numeric_limits<std::uint64_t>::max() - d) / 10) error("number too large");
            v = v * 10 + d;
            ++pos_;
        }
        return v;
    }

    Formula impl() {
        Formula a = disj();
        if (accept("->")) return Formula::implies(a, impl());
        return a;
    }
    Formula disj() {
        Formula a = conj();
        while (peek() == '|') {
            ++pos_;
            a = Formula::disj(a, conj());
        }
        return a;
    }
    Formula conj() {
        Formula a = until();
        while (peek() == '&') {
            ++pos_;
            a = Formula::conj(a, until());
        }
        return a;
    }
    Formula until() {
        Formula a = unary();
        char c = peek();
        if (c == 'U') {
            ++pos_;
            return Formula::until(a, until());
        }
        if (c == 'S') {
            ++pos_;
            return Formula::since(a, until());
        }
        return a;
    }
    Formula unary() {
        switch (peek()) {
        case '!':
            ++pos_;
            return Formula::negate(unary());
        case 'X': ++pos_; return Formula::next(unary());
        case 'F': ++pos_; return Formula::future(unary());
        case 'G': ++pos_; return Formula::globally(unary());
        case 'Y': ++pos_; return Formula::prev(unary());
        case 'O': ++pos_; return Formula::once(unary());
        default: return primary();
        }
    }

    bool starts_term() {
        char c = peek();
        if (c == '#' || c == '[' || std::isdigit(static_cast<unsigned char>(c))) return true;
        return c == '-' && std::isdigit(static_cast<unsigned char>(peek(1)));
    }

    Formula primary() {
        char c = peek();
        if (c == '\0') error("unexpected end of input");
        if (c == '(') {
            ++pos_;
            Formula f = impl();
            expect(")");
            return f;
        }
        if (c == 'Q') {
            ++pos_;
            if (pos_ >= s_.size()) error("expected a token after 'Q'");
            char a = s_[pos_];
            if (alphabet_.find(a) == std::string_view::npos)
                error("token '" + std::string(1, a) + "' is not in the alphabet");
            ++pos_;
            return Formula::token(a);
        }
        MonadicPredicate p;
        if (predicate(p)) return Formula::pred(std::move(p));
        if (starts_term()) return comparison();
        error("unexpected '" + std::string(1, c) + "'");
    }

    bool predicate(MonadicPredicate& out) {
        if (keyword("mod")) {
            expect("(");
            auto d = natural();
            expect(",");
            auto r = natural();
            expect(")");
            if (d == 0) error("mod needs a positive period");
            out = MonadicPredicate::mod(d, r);
            return true;
        }
        if (keyword("at")) {
            expect("(");
            auto k = natural();
            expect(")");
            if (k == 0) error("positions start at 1");
            out = MonadicPredicate::at(k);
            return true;
        }
        if (keyword("mon")) {
            expect("(");
            MonadicPredicate p;
            p.threshold = natural();
            expect(",");
            p.period = natural();
            if (p.period == 0) error("mon needs a positive period");
            expect(",");
            for (auto r : number_set()) p.residues.insert(r % p.period);
            expect(",");
            for (auto e : number_set()) {
                if (e >= p.threshold) error("exception " + std::to_string(e) + " is not below the threshold");
                p.exceptions[e] = true;
            }
            expect(")");
            out = std::move(p);
            return true;
        }
        return false;
    }

    std::vector<std::uint64_t> number_set() {
        expect("{");
        std::vector<std::uint64_t> out;
        if (accept("}")) return out;
        do {
            out.push_back(natural());
        } while (accept(","));
        expect("}");
        return out;
    }

    Formula comparison() {
        Term lhs = sum();
        if (accept("<=")) return Formula::cmp(lhs, CmpOp::Le, sum());
        if (accept(">=")) return Formula::cmp(sum(), CmpOp::Le, lhs);
        if (accept("!=")) return Formula::negate(Formula::cmp(lhs, CmpOp::Eq, sum()));
        if (accept("<")) return Formula::cmp(lhs, CmpOp::Lt, sum());
        if (accept(">")) return Formula::cmp(sum(), CmpOp::Lt, lhs);
        if (accept("=")) return Formula::cmp(lhs, CmpOp::Eq, sum());
        error("expected a comparison operator");
    }

    Term sum() {
        Term t = tatom();
        for (;;) {
            char c = peek();
            if (c == '+') {
                ++pos_;
                t = Term::add(t, tatom());
            } else if (c == '-' && peek(1) != '>') {
                ++pos_;
                t = Term::sub(t, tatom());
            } else {
                return t;
            }
        }
    }

    Term tatom() {
        if (accept("#L[")) {
            Formula f = impl();
            expect("]");
            return Term::left_count(f);
        }
        if (accept("#R[")) {
            Formula f = impl();
            expect("]");
            return Term::right_count(f);
        }
        if (accept("[")) {
            Term t = sum();
            expect("]");
            return t;
        }
        bool neg = accept("-");
        if (!std::isdigit(static_cast<unsigned char>(peek()))) error("expected a count term");
        auto v = natural();
        if (v > static_cast<std::uint64_t>(std::numeric_limits<long>::max())) error("constant too large");
        long c = static_cast<long>(v);
        return Term::constant(neg ? -c : c);
    }
};

}  // namespace

Formula parse_formula(std::string_view text, std::string_view alphabet) {
    return Parser(text, alphabet).formula();
}

MonadicPredicate parse_predicate(std::string_view text) { return Parser(text, "").predicate_only(); }

}  // namespace hat
