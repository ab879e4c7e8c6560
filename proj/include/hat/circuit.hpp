#pragma once

#include "hat/model.hpp"

#include <json.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace hat {

struct Gate {
    enum class Kind { InputLit, ConstTrue, ConstFalse, Not, And, Or };
    Kind kind = Kind::ConstFalse;
    std::size_t pos = 0;  // InputLit: 1-based position, n+1 is EOS
    char token = 0;       // InputLit
    std::vector<std::size_t> inputs;

    bool operator==(const Gate&) const = default;
};

/// Unbounded fan-in boolean circuit for inputs of one fixed length n. Gates
/// only reference earlier gates.
struct Circuit {
    std::size_t n = 0;
    std::string alphabet;
    std::vector<Gate> gates;
    std::size_t output = 0;

    std::size_t input(std::size_t pos, char token);
    std::size_t constant(bool value);
    std::size_t negate(std::size_t g);
    std::size_t all(std::vector<std::size_t> gs);
    std::size_t any(std::vector<std::size_t> gs);

    void validate() const;
    bool operator==(const Circuit&) const = default;
};

/// InputLit(i, a) is w_i = a; at position n+1 it is the EOS literal, always true.
bool eval_circuit(const Circuit& c, std::string_view w);

struct CircuitStats {
    std::size_t size = 0;   // gates in the cone of the output
    std::size_t depth = 0;  // inputs and constants 0; a gate is 1 + its deepest input
};
CircuitStats circuit_stats(const Circuit& c);

nlohmann::ordered_json circuit_to_json(const Circuit& c);
Circuit circuit_from_json(const nlohmann::ordered_json& j);

/// Possible vectors per position after each layer, for inputs of length n.
struct ValueTable {
    std::size_t n = 0;
    /// values[l][i-1]: distinct vectors position i can hold in trace[l].
    std::vector<std::vector<std::vector<RVec>>> values;
    /// Distinct attention scores per layer (empty for PWL layers).
    std::vector<std::vector<Rational>> scores;

    /// |V_l|: distinct vectors over all positions.
    std::size_t layer_size(std::size_t l) const;
};

struct ExtractOptions {
    std::size_t value_cap = 100000;
};

/// Throws Unsupported on average-hard attention, Resource above the cap.
ValueTable enumerate_values(const Transformer& t, std::size_t n, const ExtractOptions& opt = {});
Circuit extract_circuit(const Transformer& t, std::size_t n, const ExtractOptions& opt = {});

}  // namespace hat
