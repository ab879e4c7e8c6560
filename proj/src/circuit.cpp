#include "hat/circuit.hpp"
#include "hat/error.hpp"

#include <algorithm>

namespace hat {

std::size_t Circuit::input(std::size_t pos, char token) {
    // The EOS literal carries no token.
    gates.push_back({Gate::Kind::InputLit, pos, pos == n + 1 ? '\0' : token, {}});
    return gates.size() - 1;
}

std::size_t Circuit::constant(bool value) {
    gates.push_back({value ? Gate::Kind::ConstTrue : Gate::Kind::ConstFalse, 0, 0, {}});
    return gates.size() - 1;
}

std::size_t Circuit::negate(std::size_t g) {
    gates.push_back({Gate::Kind::Not, 0, 0, {g}});
    return gates.size() - 1;
}

std::size_t Circuit::all(std::vector<std::size_t> gs) {
    gates.push_back({Gate::Kind::And, 0, 0, std::move(gs)});
    return gates.size() - 1;
}

std::size_t Circuit::any(std::vector<std::size_t> gs) {
    gates.push_back({Gate::Kind::Or, 0, 0, std::move(gs)});
    return gates.size() - 1;
}

void Circuit::validate() const {
    if (gates.empty()) fail(ErrorKind::Domain, "circuit has no gates");
    if (output >= gates.size()) fail(ErrorKind::Domain, "circuit output out of range");
    for (std::size_t g = 0; g < gates.size(); ++g) {
        const auto& gate = gates[g];
        switch (gate.kind) {
        case Gate::Kind::InputLit:
            if (gate.pos < 1 || gate.pos > n + 1)
                fail(ErrorKind::Domain, "gate " + std::to_string(g) + " reads position " + std::to_string(gate.pos));
            if (gate.pos <= n && alphabet.find(gate.token) == std::string::npos)
                fail(ErrorKind::Domain, "gate " + std::to_string(g) + " reads a token outside the alphabet");
            break;
        case Gate::Kind::Not:
            if (gate.inputs.size() != 1) fail(ErrorKind::Domain, "NOT gate " + std::to_string(g) + " needs one input");
            [[fallthrough]];
        default:
            for (auto in : gate.inputs)
                if (in >= g) fail(ErrorKind::Domain, "gate " + std::to_string(g) + " references a later gate");
        }
    }
}

bool eval_circuit(const Circuit& c, std::string_view w) {
    if (w.size() != c.n)
        fail(ErrorKind::Domain, "circuit is for length " + std::to_string(c.n) + ", input has length " +
                                    std::to_string(w.size()));
    for (std::size_t i = 0; i < w.size(); ++i)
        if (c.alphabet.find(w[i]) == std::string::npos)
            fail(ErrorKind::Parse, std::string("unknown token '") + w[i] + "' at offset " + std::to_string(i));
    std::vector<char> val(c.gates.size(), 0);
    for (std::size_t g = 0; g < c.gates.size(); ++g) {
        const auto& gate = c.gates[g];
        switch (gate.kind) {
        case Gate::Kind::InputLit: val[g] = gate.pos == c.n + 1 || w[gate.pos - 1] == gate.token; break;
        case Gate::Kind::ConstTrue: val[g] = 1; break;
        case Gate::Kind::ConstFalse: val[g] = 0; break;
        case Gate::Kind::Not: val[g] = !val[gate.inputs[0]]; break;
        case Gate::Kind::And:
            val[g] = std::all_of(gate.inputs.begin(), gate.inputs.end(), [&](std::size_t k) { return val[k] != 0; });
            break;
        case Gate::Kind::Or:
            val[g] = std::any_of(gate.inputs.begin(), gate.inputs.end(), [&](std::size_t k) { return val[k] != 0; });
            break;
        }
    }
    return val[c.output] != 0;
}

CircuitStats circuit_stats(const Circuit& c) {
    c.validate();
    std::vector<std::size_t> depth(c.gates.size(), 0);
    for (std::size_t g = 0; g < c.gates.size(); ++g) {
        const auto& gate = c.gates[g];
        if (gate.kind == Gate::Kind::InputLit || gate.kind == Gate::Kind::ConstTrue ||
            gate.kind == Gate::Kind::ConstFalse)
            continue;
        std::size_t d = 0;
        for (auto in : gate.inputs) d = std::max(d, depth[in]);
        depth[g] = d + 1;
    }
    std::vector<bool> live(c.gates.size(), false);
    live[c.output] = true;
    std::size_t size = 0;
    for (std::size_t g = c.gates.size(); g-- > 0;) {
        if (!live[g]) continue;
        ++size;
        for (auto in : c.gates[g].inputs) live[in] = true;
    }
    return {size, depth[c.output]};
}

nlohmann::ordered_json circuit_to_json(const Circuit& c) {
    nlohmann::ordered_json j;
    j["n"] = c.n;
    j["alphabet"] = c.alphabet;
    j["output"] = c.output;
    auto gates = nlohmann::ordered_json::array();
    for (const auto& g : c.gates) {
        nlohmann::ordered_json e;
        switch (g.kind) {
        case Gate::Kind::InputLit:
            e["op"] = "input";
            e["pos"] = g.pos;
            e["token"] = g.pos == c.n + 1 ? std::string(kEosName) : std::string(1, g.token);
            break;
        case Gate::Kind::ConstTrue: e["op"] = "true"; break;
        case Gate::Kind::ConstFalse: e["op"] = "false"; break;
        case Gate::Kind::Not: e["op"] = "not"; break;
        case Gate::Kind::And: e["op"] = "and"; break;
        case Gate::Kind::Or: e["op"] = "or"; break;
        }
        if (g.kind == Gate::Kind::Not || g.kind == Gate::Kind::And || g.kind == Gate::Kind::Or) e["in"] = g.inputs;
        gates.push_back(std::move(e));
    }
    j["gates"] = std::move(gates);
    return j;
}

Circuit circuit_from_json(const nlohmann::ordered_json& j) {
    try {
        Circuit c;
        c.n = j.at("n").get<std::size_t>();
        c.alphabet = j.at("alphabet").get<std::string>();
        c.output = j.at("output").get<std::size_t>();
        for (const auto& e : j.at("gates")) {
            const auto op = e.at("op").get<std::string>();
            Gate g;
            if (op == "input") {
                g.kind = Gate::Kind::InputLit;
                g.pos = e.at("pos").get<std::size_t>();
                const auto tok = e.at("token").get<std::string>();
                if (tok == kEosName) {
                    g.token = 0;
                } else if (tok.size() == 1) {
                    g.token = tok[0];
                } else {
                    fail(ErrorKind::Parse, "input token must be one character or " + std::string(kEosName));
                }
            } else if (op == "true") {
                g.kind = Gate::Kind::ConstTrue;
            } else if (op == "false") {
                g.kind = Gate::Kind::ConstFalse;
            } else if (op == "not" || op == "and" || op == "or") {
                g.kind = op == "not" ? Gate::Kind::Not : op == "and" ? Gate::Kind::And : Gate::Kind::Or;
                g.inputs = e.at("in").get<std::vector<std::size_t>>();
            } else {
                fail(ErrorKind::Parse, "unknown gate op '" + op + "'");
            }
            c.gates.push_back(std::move(g));
        }
        c.validate();
        return c;
    } catch (const nlohmann::ordered_json::exception& e) {
        fail(ErrorKind::Parse, std::string("malformed circuit document: ") + e.what());
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Domain) fail(ErrorKind::Parse, e.what());
        throw;
    }
}

}  // namespace hat
