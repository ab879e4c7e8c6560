#include "hat/error.hpp"
#include "hat/logic.hpp"

#include <algorithm>

namespace hat {

namespace {

std::shared_ptr<const FormulaNode> node(FormulaOp op, std::vector<Formula> args) {
    auto n = std::make_shared<FormulaNode>();
    n->op = op;
    n->args = std::move(args);
    return n;
}

std::shared_ptr<const TermNode> term_node(TermOp op, std::vector<Formula> body, std::vector<Term> args) {
    auto n = std::make_shared<TermNode>();
    n->op = op;
    n->body = std::move(body);
    n->args = std::move(args);
    return n;
}

}  // namespace

Formula Formula::token(char a) {
    auto n = std::make_shared<FormulaNode>();
    n->op = FormulaOp::TokenIs;
    n->token = a;
    return Formula(std::move(n));
}
Formula Formula::pred(MonadicPredicate p) {
    auto n = std::make_shared<FormulaNode>();
    n->op = FormulaOp::Pred;
    n->predicate = std::move(p);
    return Formula(std::move(n));
}
Formula Formula::negate(Formula f) { return Formula(node(FormulaOp::Not, {std::move(f)})); }
Formula Formula::conj(Formula a, Formula b) { return Formula(node(FormulaOp::And, {std::move(a), std::move(b)})); }
Formula Formula::disj(Formula a, Formula b) { return Formula(node(FormulaOp::Or, {std::move(a), std::move(b)})); }
Formula Formula::implies(Formula a, Formula b) { return disj(negate(std::move(a)), std::move(b)); }
Formula Formula::next(Formula f) { return Formula(node(FormulaOp::Next, {std::move(f)})); }
Formula Formula::future(Formula f) { return Formula(node(FormulaOp::Future, {std::move(f)})); }
Formula Formula::globally(Formula f) { return Formula(node(FormulaOp::Globally, {std::move(f)})); }
Formula Formula::until(Formula a, Formula b) { return Formula(node(FormulaOp::Until, {std::move(a), std::move(b)})); }
Formula Formula::prev(Formula f) { return Formula(node(FormulaOp::Prev, {std::move(f)})); }
Formula Formula::once(Formula f) { return Formula(node(FormulaOp::Once, {std::move(f)})); }
Formula Formula::since(Formula a, Formula b) { return Formula(node(FormulaOp::Since, {std::move(a), std::move(b)})); }
Formula Formula::cmp(Term lhs, CmpOp op, Term rhs) {
    auto n = std::make_shared<FormulaNode>();
    n->op = FormulaOp::Cmp;
    n->terms = {std::move(lhs), std::move(rhs)};
    n->cmp = op;
    return Formula(std::move(n));
}

FormulaOp Formula::op() const { return node_->op; }
char Formula::token_char() const { return node_->token; }
const MonadicPredicate& Formula::predicate() const { return node_->predicate; }
const Formula& Formula::arg(std::size_t k) const { return node_->args.at(k); }
std::size_t Formula::arity() const { return node_->args.size(); }
const Term& Formula::lhs_term() const { return node_->terms.at(0); }
const Term& Formula::rhs_term() const { return node_->terms.at(1); }
CmpOp Formula::cmp_op() const { return node_->cmp; }

bool Formula::operator==(const Formula& o) const {
    if (node_ == o.node_) return true;
    const auto& a = *node_;
    const auto& b = *o.node_;
    return a.op == b.op && a.token == b.token && a.predicate == b.predicate && a.cmp == b.cmp && a.args == b.args &&
           a.terms == b.terms;
}

Term Term::constant(long c) {
    auto n = std::make_shared<TermNode>();
    n->op = TermOp::Const;
    n->value = c;
    return Term(std::move(n));
}
Term Term::left_count(Formula f) { return Term(term_node(TermOp::LeftCount, {std::move(f)}, {})); }
Term Term::right_count(Formula f) { return Term(term_node(TermOp::RightCount, {std::move(f)}, {})); }
Term Term::add(Term a, Term b) { return Term(term_node(TermOp::Add, {}, {std::move(a), std::move(b)})); }
Term Term::sub(Term a, Term b) { return Term(term_node(TermOp::Sub, {}, {std::move(a), std::move(b)})); }

TermOp Term::op() const { return node_->op; }
long Term::value() const { return node_->value; }
const Formula& Term::body() const { return node_->body.at(0); }
const Term& Term::arg(std::size_t k) const { return node_->args.at(k); }

bool Term::operator==(const Term& o) const {
    if (node_ == o.node_) return true;
    return node_->op == o.node_->op && node_->value == o.node_->value && node_->body == o.node_->body &&
           node_->args == o.node_->args;
}

// ---------------------------------------------------------------- printing

namespace {

const char* cmp_text(CmpOp op) {
    switch (op) {
    case CmpOp::Le: return "<=";
    case CmpOp::Lt: return "<";
    case CmpOp::Eq: return "=";
    }
    return "<=";
}

bool is_sum(const Term& t) { return t.op() == TermOp::Add || t.op() == TermOp::Sub; }

}  // namespace

std::string to_text(const Term& t) {
    switch (t.op()) {
    case TermOp::Const: return std::to_string(t.value());
    case TermOp::LeftCount: return "#L[" + to_text(t.body()) + "]";
    case TermOp::RightCount: return "#R[" + to_text(t.body()) + "]";
    case TermOp::Add:
    case TermOp::Sub: {
        std::string rhs = to_text(t.arg(1));
        if (is_sum(t.arg(1))) rhs = "[" + rhs + "]";
        return to_text(t.arg(0)) + (t.op() == TermOp::Add ? " + " : " - ") + rhs;
    }
    }
    return "";
}

std::string to_text(const Formula& f) {
    switch (f.op()) {
    case FormulaOp::TokenIs: return std::string("Q") + f.token_char();
    case FormulaOp::Pred: return f.predicate().to_text();
    case FormulaOp::Not: return "!" + to_text(f.arg());
    case FormulaOp::Next: return "X " + to_text(f.arg());
    case FormulaOp::Future: return "F " + to_text(f.arg());
    case FormulaOp::Globally: return "G " + to_text(f.arg());
    case FormulaOp::Prev: return "Y " + to_text(f.arg());
    case FormulaOp::Once: return "O " + to_text(f.arg());
    case FormulaOp::And: return "(" + to_text(f.arg(0)) + " & " + to_text(f.arg(1)) + ")";
    case FormulaOp::Or: return "(" + to_text(f.arg(0)) + " | " + to_text(f.arg(1)) + ")";
    case FormulaOp::Until: return "(" + to_text(f.arg(0)) + " U " + to_text(f.arg(1)) + ")";
    case FormulaOp::Since: return "(" + to_text(f.arg(0)) + " S " + to_text(f.arg(1)) + ")";
    case FormulaOp::Cmp:
        return "(" + to_text(f.lhs_term()) + " " + cmp_text(f.cmp_op()) + " " + to_text(f.rhs_term()) + ")";
    }
    return "";
}

// ---------------------------------------------------------------- json

namespace {

using Json = nlohmann::ordered_json;

const char* op_name(FormulaOp op) {
    switch (op) {
    case FormulaOp::TokenIs: return "token";
    case FormulaOp::Pred: return "pred";
    case FormulaOp::Not: return "not";
    case FormulaOp::And: return "and";
    case FormulaOp::Or: return "or";
    case FormulaOp::Next: return "next";
    case FormulaOp::Future: return "future";
    case FormulaOp::Globally: return "globally";
    case FormulaOp::Until: return "until";
    case FormulaOp::Prev: return "prev";
    case FormulaOp::Once: return "once";
    case FormulaOp::Since: return "since";
    case FormulaOp::Cmp: return "cmp";
    }
    return "";
}

Json term_to_json(const Term& t) {
    switch (t.op()) {
    case TermOp::Const: return Json{{"op", "const"}, {"value", t.value()}};
    case TermOp::LeftCount: return Json{{"op", "left_count"}, {"body", formula_to_json(t.body())}};
    case TermOp::RightCount: return Json{{"op", "right_count"}, {"body", formula_to_json(t.body())}};
    case TermOp::Add: return Json{{"op", "add"}, {"args", {term_to_json(t.arg(0)), term_to_json(t.arg(1))}}};
    case TermOp::Sub: return Json{{"op", "sub"}, {"args", {term_to_json(t.arg(0)), term_to_json(t.arg(1))}}};
    }
    return {};
}

Term term_from_json(const Json& j) {
    const auto op = j.at("op").get<std::string>();
    if (op == "const") return Term::constant(j.at("value").get<long>());
    if (op == "left_count") return Term::left_count(formula_from_json(j.at("body")));
    if (op == "right_count") return Term::right_count(formula_from_json(j.at("body")));
    if (op == "add") return Term::add(term_from_json(j.at("args").at(0)), term_from_json(j.at("args").at(1)));
    if (op == "sub") return Term::sub(term_from_json(j.at("args").at(0)), term_from_json(j.at("args").at(1)));
    fail(ErrorKind::Parse, "unknown term op '" + op + "'");
}

}  // namespace

Json formula_to_json(const Formula& f) {
    Json j;
    j["op"] = op_name(f.op());
    switch (f.op()) {
    case FormulaOp::TokenIs: j["token"] = std::string(1, f.token_char()); break;
    case FormulaOp::Pred: j["predicate"] = f.predicate().to_text(); break;
    case FormulaOp::Cmp:
        j["cmp"] = cmp_text(f.cmp_op());
        j["lhs"] = term_to_json(f.lhs_term());
        j["rhs"] = term_to_json(f.rhs_term());
        break;
    default: {
        Json args = Json::array();
        for (std::size_t k = 0; k < f.arity(); ++k) args.push_back(formula_to_json(f.arg(k)));
        j["args"] = args;
    }
    }
    return j;
}

Formula formula_from_json(const Json& j) {
    try {
        const auto op = j.at("op").get<std::string>();
        auto a = [&](std::size_t k) { return formula_from_json(j.at("args").at(k)); };
        if (op == "token") {
            const auto s = j.at("token").get<std::string>();
            if (s.size() != 1) fail(ErrorKind::Parse, "token must be one character");
            return Formula::token(s[0]);
        }
        if (op == "pred") return Formula::pred(parse_predicate(j.at("predicate").get<std::string>()));
        if (op == "not") return Formula::negate(a(0));
        if (op == "and") return Formula::conj(a(0), a(1));
        if (op == "or") return Formula::disj(a(0), a(1));
        if (op == "next") return Formula::next(a(0));
        if (op == "future") return Formula::future(a(0));
        if (op == "globally") return Formula::globally(a(0));
        if (op == "until") return Formula::until(a(0), a(1));
        if (op == "prev") return Formula::prev(a(0));
        if (op == "once") return Formula::once(a(0));
        if (op == "since") return Formula::since(a(0), a(1));
        if (op == "cmp") {
            const auto c = j.at("cmp").get<std::string>();
            CmpOp cop = c == "<=" ? CmpOp::Le : c == "<" ? CmpOp::Lt : c == "=" ? CmpOp::Eq
                                                                          : (fail(ErrorKind::Parse, "bad cmp " + c), CmpOp::Le);
            return Formula::cmp(term_from_json(j.at("lhs")), cop, term_from_json(j.at("rhs")));
        }
        fail(ErrorKind::Parse, "unknown formula op '" + op + "'");
    } catch (const Json::exception& e) {
        fail(ErrorKind::Parse, std::string("malformed formula document: ") + e.what());
    }
}

// ---------------------------------------------------------------- structure

namespace {

template <class FormulaFn>
bool any_node(const Formula& f, FormulaFn&& pred);

template <class FormulaFn>
bool any_in_term(const Term& t, FormulaFn&& pred) {
    switch (t.op()) {
    case TermOp::Const: return false;
    case TermOp::LeftCount:
    case TermOp::RightCount: return any_node(t.body(), pred);
    default: return any_in_term(t.arg(0), pred) || any_in_term(t.arg(1), pred);
    }
}

template <class FormulaFn>
bool any_node(const Formula& f, FormulaFn&& pred) {
    if (pred(f)) return true;
    if (f.op() == FormulaOp::Cmp) return any_in_term(f.lhs_term(), pred) || any_in_term(f.rhs_term(), pred);
    for (std::size_t k = 0; k < f.arity(); ++k)
        if (any_node(f.arg(k), pred)) return true;
    return false;
}

bool term_has_right(const Term& t) {
    switch (t.op()) {
    case TermOp::Const: return false;
    case TermOp::LeftCount: return has_right_count(t.body());
    case TermOp::RightCount: return true;
    default: return term_has_right(t.arg(0)) || term_has_right(t.arg(1));
    }
}

bool is_future(FormulaOp op) {
    return op == FormulaOp::Next || op == FormulaOp::Future || op == FormulaOp::Globally || op == FormulaOp::Until;
}
bool is_past(FormulaOp op) { return op == FormulaOp::Prev || op == FormulaOp::Once || op == FormulaOp::Since; }

void collect_predicates(const Formula& f, std::vector<MonadicPredicate>& out);

void collect_predicates(const Term& t, std::vector<MonadicPredicate>& out) {
    switch (t.op()) {
    case TermOp::Const: return;
    case TermOp::LeftCount:
    case TermOp::RightCount: collect_predicates(t.body(), out); return;
    default:
        collect_predicates(t.arg(0), out);
        collect_predicates(t.arg(1), out);
    }
}

void collect_predicates(const Formula& f, std::vector<MonadicPredicate>& out) {
    if (f.op() == FormulaOp::Pred) {
        if (std::find(out.begin(), out.end(), f.predicate()) == out.end()) out.push_back(f.predicate());
        return;
    }
    if (f.op() == FormulaOp::Cmp) {
        collect_predicates(f.lhs_term(), out);
        collect_predicates(f.rhs_term(), out);
        return;
    }
    for (std::size_t k = 0; k < f.arity(); ++k) collect_predicates(f.arg(k), out);
}

std::size_t term_size(const Term& t) {
    switch (t.op()) {
    case TermOp::Const: return 1;
    case TermOp::LeftCount:
    case TermOp::RightCount: return 1 + formula_size(t.body());
    default: return 1 + term_size(t.arg(0)) + term_size(t.arg(1));
    }
}

std::size_t term_depth(const Term& t) {
    switch (t.op()) {
    case TermOp::Const: return 0;
    case TermOp::LeftCount:
    case TermOp::RightCount: return formula_depth(t.body());
    default: return std::max(term_depth(t.arg(0)), term_depth(t.arg(1)));
    }
}

}  // namespace

bool has_future_ops(const Formula& f) {
    return any_node(f, [](const Formula& g) { return is_future(g.op()); });
}
bool has_past_ops(const Formula& f) {
    return any_node(f, [](const Formula& g) { return is_past(g.op()); });
}
bool has_temporal(const Formula& f) { return has_future_ops(f) || has_past_ops(f); }
bool has_predicates(const Formula& f) {
    return any_node(f, [](const Formula& g) { return g.op() == FormulaOp::Pred; });
}
bool has_counting(const Formula& f) {
    return any_node(f, [](const Formula& g) { return g.op() == FormulaOp::Cmp; });
}
bool has_right_count(const Formula& f) {
    return any_node(f, [](const Formula& g) {
        return g.op() == FormulaOp::Cmp && (term_has_right(g.lhs_term()) || term_has_right(g.rhs_term()));
    });
}

Fragment classify_fragment(const Formula& f) {
    if (!has_counting(f)) return Fragment::LTLMon;
    if (!has_temporal(f) && !has_right_count(f)) return Fragment::KtSharp;
    return Fragment::CountingLTL;
}

std::string fragment_name(Fragment f) {
    switch (f) {
    case Fragment::LTLMon: return "LTL[Mon]";
    case Fragment::CountingLTL: return "Counting LTL";
    case Fragment::KtSharp: return "K_t[#]";
    }
    return "";
}

std::vector<MonadicPredicate> predicates_of(const Formula& f) {
    std::vector<MonadicPredicate> out;
    collect_predicates(f, out);
    return out;
}

std::size_t formula_size(const Formula& f) {
    if (f.op() == FormulaOp::Cmp) return 1 + term_size(f.lhs_term()) + term_size(f.rhs_term());
    std::size_t s = 1;
    for (std::size_t k = 0; k < f.arity(); ++k) s += formula_size(f.arg(k));
    return s;
}

std::size_t formula_depth(const Formula& f) {
    if (f.op() == FormulaOp::Cmp) return 1 + std::max(term_depth(f.lhs_term()), term_depth(f.rhs_term()));
    std::size_t d = 0;
    for (std::size_t k = 0; k < f.arity(); ++k) d = std::max(d, formula_depth(f.arg(k)));
    return (f.arity() == 0 ? 0 : 1) + d;
}

}  // namespace hat
