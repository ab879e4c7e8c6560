#include "hat/automata.hpp"
#include "hat/error.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

namespace hat {

namespace {

std::size_t token_index(const std::string& alphabet, char c, std::size_t offset) {
    auto k = alphabet.find(c);
    if (k == std::string::npos)
        fail(ErrorKind::Parse, std::string("unknown token '") + c + "' at offset " + std::to_string(offset));
    return k;
}

void same_alphabet(const Dfa& a, const Dfa& b) {
    if (a.alphabet != b.alphabet)
        fail(ErrorKind::Domain, "alphabet mismatch: \"" + a.alphabet + "\" vs \"" + b.alphabet + "\"");
}

Dfa product(const Dfa& a, const Dfa& b, bool want_union) {
    same_alphabet(a, b);
    a.validate();
    b.validate();
    const std::size_t k = a.alphabet.size();
    Dfa out;
    out.alphabet = a.alphabet;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> id;
    std::deque<std::pair<std::size_t, std::size_t>> queue;
    auto visit = [&](std::pair<std::size_t, std::size_t> s) {
        auto [it, fresh] = id.try_emplace(s, out.delta.size());
        if (fresh) {
            out.delta.emplace_back(k, 0);
            out.accepting.push_back(want_union ? (a.accepting[s.first] || b.accepting[s.second])
                                               : (a.accepting[s.first] && b.accepting[s.second]));
            queue.push_back(s);
        }
        return it->second;
    };
    out.initial = visit({a.initial, b.initial});
    while (!queue.empty()) {
        auto s = queue.front();
        queue.pop_front();
        const std::size_t from = id.at(s);
        for (std::size_t t = 0; t < k; ++t) {
            const std::size_t to = visit({a.delta[s.first][t], b.delta[s.second][t]});
            out.delta[from][t] = to;
        }
    }
    return out;
}

}  // namespace

std::size_t Dfa::run(std::string_view w) const {
    std::size_t q = initial;
    for (std::size_t i = 0; i < w.size(); ++i) q = delta[q][token_index(alphabet, w[i], i)];
    return q;
}

void Dfa::validate() const {
    if (alphabet.empty()) fail(ErrorKind::Domain, "DFA alphabet is empty");
    if (delta.empty()) fail(ErrorKind::Domain, "DFA has no states");
    if (accepting.size() != delta.size()) fail(ErrorKind::Domain, "DFA accepting flags do not match the state count");
    if (initial >= delta.size()) fail(ErrorKind::Domain, "DFA initial state out of range");
    for (std::size_t q = 0; q < delta.size(); ++q) {
        if (delta[q].size() != alphabet.size())
            fail(ErrorKind::Domain, "DFA state " + std::to_string(q) + " has a partial transition row");
        for (auto to : delta[q])
            if (to >= delta.size()) fail(ErrorKind::Domain, "DFA transition target out of range");
    }
}

Dfa dfa_minimize(const Dfa& d) {
    d.validate();
    const std::size_t k = d.alphabet.size();

    // Reachable states in BFS order.
    std::vector<std::size_t> order;
    std::vector<long> seen(d.size(), -1);
    order.push_back(d.initial);
    seen[d.initial] = 0;
    for (std::size_t h = 0; h < order.size(); ++h)
        for (std::size_t t = 0; t < k; ++t) {
            auto to = d.delta[order[h]][t];
            if (seen[to] < 0) {
                seen[to] = static_cast<long>(order.size());
                order.push_back(to);
            }
        }

    // Moore refinement on the reachable part.
    std::vector<std::size_t> cls(d.size(), 0);
    for (auto q : order) cls[q] = d.accepting[q] ? 1 : 0;
    std::size_t count = 0;
    for (;;) {
        std::map<std::vector<std::size_t>, std::size_t> sig;
        std::vector<std::size_t> next(d.size(), 0);
        for (auto q : order) {
            std::vector<std::size_t> s{cls[q]};
            for (std::size_t t = 0; t < k; ++t) s.push_back(cls[d.delta[q][t]]);
            next[q] = sig.try_emplace(std::move(s), sig.size()).first->second;
        }
        const bool stable = sig.size() == count;
        count = sig.size();
        cls = std::move(next);
        if (stable) break;
    }

    // Renumber classes in BFS order of the quotient.
    Dfa out;
    out.alphabet = d.alphabet;
    std::map<std::size_t, std::size_t> id;
    std::vector<std::size_t> rep;
    std::deque<std::size_t> queue;
    auto visit = [&](std::size_t q) {
        auto [it, fresh] = id.try_emplace(cls[q], rep.size());
        if (fresh) {
            rep.push_back(q);
            queue.push_back(q);
        }
        return it->second;
    };
    out.initial = visit(d.initial);
    std::vector<std::vector<std::size_t>> delta;
    while (!queue.empty()) {
        auto q = queue.front();
        queue.pop_front();
        const std::size_t from = id.at(cls[q]);
        if (delta.size() <= from) delta.resize(from + 1);
        delta[from].assign(k, 0);
        for (std::size_t t = 0; t < k; ++t) delta[from][t] = visit(d.delta[q][t]);
    }
    out.delta = std::move(delta);
    out.accepting.resize(rep.size());
    for (std::size_t s = 0; s < rep.size(); ++s) out.accepting[s] = d.accepting[rep[s]];
    return out;
}

Dfa dfa_complement(const Dfa& d) {
    d.validate();
    Dfa out = d;
    out.accepting.flip();
    return out;
}

Dfa dfa_intersect(const Dfa& a, const Dfa& b) { return product(a, b, false); }
Dfa dfa_union(const Dfa& a, const Dfa& b) { return product(a, b, true); }

bool dfa_is_empty(const Dfa& d) {
    d.validate();
    std::vector<bool> seen(d.size(), false);
    std::vector<std::size_t> stack{d.initial};
    seen[d.initial] = true;
    while (!stack.empty()) {
        auto q = stack.back();
        stack.pop_back();
        if (d.accepting[q]) return false;
        for (auto to : d.delta[q])
            if (!seen[to]) {
                seen[to] = true;
                stack.push_back(to);
            }
    }
    return true;
}

std::optional<std::string> dfa_equiv(const Dfa& a, const Dfa& b) {
    same_alphabet(a, b);
    a.validate();
    b.validate();
    // BFS expanding tokens in alphabet order reaches each pair first by its
    // length-lexicographically least word.
    std::map<std::pair<std::size_t, std::size_t>, std::pair<std::pair<std::size_t, std::size_t>, char>> parent;
    std::deque<std::pair<std::size_t, std::size_t>> queue;
    const std::pair<std::size_t, std::size_t> start{a.initial, b.initial};
    parent[start] = {start, 0};
    queue.push_back(start);
    while (!queue.empty()) {
        auto s = queue.front();
        queue.pop_front();
        if (a.accepting[s.first] != b.accepting[s.second]) {
            std::string w;
            for (auto cur = s; cur != start; cur = parent[cur].first) w.push_back(parent[cur].second);
            std::reverse(w.begin(), w.end());
            return w;
        }
        for (std::size_t t = 0; t < a.alphabet.size(); ++t) {
            std::pair<std::size_t, std::size_t> to{a.delta[s.first][t], b.delta[s.second][t]};
            if (parent.try_emplace(to, std::pair{s, a.alphabet[t]}).second) queue.push_back(to);
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------- formats

nlohmann::ordered_json dfa_to_json(const Dfa& d) {
    nlohmann::ordered_json j;
    j["alphabet"] = d.alphabet;
    j["states"] = d.size();
    j["initial"] = d.initial;
    std::vector<std::size_t> acc;
    for (std::size_t q = 0; q < d.size(); ++q)
        if (d.accepting[q]) acc.push_back(q);
    j["accepting"] = acc;
    j["delta"] = d.delta;
    return j;
}

Dfa dfa_from_json(const nlohmann::ordered_json& j) {
    try {
        Dfa d;
        d.alphabet = j.at("alphabet").get<std::string>();
        const auto n = j.at("states").get<std::size_t>();
        d.initial = j.at("initial").get<std::size_t>();
        d.delta = j.at("delta").get<std::vector<std::vector<std::size_t>>>();
        d.accepting.assign(n, false);
        for (auto q : j.at("accepting").get<std::vector<std::size_t>>()) {
            if (q >= n) fail(ErrorKind::Parse, "accepting state out of range");
            d.accepting[q] = true;
        }
        if (d.delta.size() != n) fail(ErrorKind::Parse, "delta has " + std::to_string(d.delta.size()) + " rows, expected " + std::to_string(n));
        d.validate();
        return d;
    } catch (const nlohmann::ordered_json::exception& e) {
        fail(ErrorKind::Parse, std::string("malformed DFA document: ") + e.what());
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Domain) fail(ErrorKind::Parse, e.what());
        throw;
    }
}

std::string print_dfa(const Dfa& d) {
    std::ostringstream os;
    os << "dfa\n";
    os << "alphabet " << d.alphabet << "\n";
    os << "states " << d.size() << "\n";
    os << "initial " << d.initial << "\n";
    os << "accepting";
    for (std::size_t q = 0; q < d.size(); ++q)
        if (d.accepting[q]) os << " " << q;
    os << "\n";
    for (std::size_t q = 0; q < d.size(); ++q)
        for (std::size_t t = 0; t < d.alphabet.size(); ++t) os << q << " " << d.alphabet[t] << " " << d.delta[q][t] << "\n";
    return os.str();
}

Dfa parse_dfa(std::string_view text) {
    {
        auto first = text.find_first_not_of(" \t\r\n");
        if (first != std::string_view::npos && text[first] == '{') {
            nlohmann::ordered_json j;
            try {
                j = nlohmann::ordered_json::parse(text);
            } catch (const nlohmann::ordered_json::exception& e) {
                fail(ErrorKind::Parse, std::string("invalid DFA JSON: ") + e.what());
            }
            return dfa_from_json(j);
        }
    }
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    auto bad = [&](const std::string& msg) {
        fail(ErrorKind::Parse, "DFA line " + std::to_string(lineno) + ": " + msg);
    };
    Dfa d;
    bool header = false;
    std::size_t states = 0;
    bool have_states = false;
    std::vector<std::size_t> acc;
    std::vector<std::tuple<std::size_t, char, std::size_t>> edges;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word)) continue;
        if (!header) {
            if (word != "dfa") bad("expected the 'dfa' header");
            header = true;
        } else if (word == "alphabet") {
            if (!(ls >> d.alphabet)) bad("missing alphabet");
        } else if (word == "states") {
            if (!(ls >> states)) bad("missing state count");
            have_states = true;
        } else if (word == "initial") {
            if (!(ls >> d.initial)) bad("missing initial state");
        } else if (word == "accepting") {
            std::size_t q;
            while (ls >> q) acc.push_back(q);
            if (!ls.eof()) bad("accepting list must be state numbers");
        } else {
            std::size_t from = 0, to = 0;
            std::string tok;
            try {
                from = std::stoul(word);
            } catch (...) {
                bad("unknown directive '" + word + "'");
            }
            if (!(ls >> tok >> to) || tok.size() != 1) bad("expected '<from> <token> <to>'");
            edges.emplace_back(from, tok[0], to);
        }
    }
    if (!header) fail(ErrorKind::Parse, "empty DFA document");
    if (!have_states) fail(ErrorKind::Parse, "DFA document has no 'states' line");
    d.delta.assign(states, std::vector<std::size_t>(d.alphabet.size(), states));
    d.accepting.assign(states, false);
    for (auto q : acc) {
        if (q >= states) fail(ErrorKind::Parse, "accepting state " + std::to_string(q) + " out of range");
        d.accepting[q] = true;
    }
    for (auto [from, tok, to] : edges) {
        auto t = d.alphabet.find(tok);
        if (from >= states || to >= states || t == std::string::npos)
            fail(ErrorKind::Parse, "transition " + std::to_string(from) + " " + tok + " " + std::to_string(to) + " is out of range");
        d.delta[from][t] = to;
    }
    try {
        d.validate();
    } catch (const Error& e) {
        fail(ErrorKind::Parse, e.what());
    }
    return d;
}

}  // namespace hat
