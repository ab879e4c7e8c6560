#pragma once

#include "hat/logic.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hat {

/// Complete DFA over a single-character alphabet; delta[q][k] follows token alphabet[k].
struct Dfa {
    std::string alphabet;
    std::size_t initial = 0;
    std::vector<std::vector<std::size_t>> delta;
    std::vector<bool> accepting;

    std::size_t size() const { return delta.size(); }
    std::size_t run(std::string_view w) const;
    bool accepts(std::string_view w) const { return accepting[run(w)]; }
    /// Throws Domain if the transition table is partial or out of range.
    void validate() const;
    bool operator==(const Dfa&) const = default;
};

struct DfaOptions {
    bool accepts_empty = false;
    std::size_t max_atoms = 20;
    std::size_t max_states = 100000;
};

/// Future-only LTL[Mon] under the FirstPos convention, by formula progression.
Dfa ltl_to_dfa(const Formula& f, std::string_view alphabet, const DfaOptions& opt = {});

/// Reachable part, merged into the unique minimal DFA with states in BFS order.
Dfa dfa_minimize(const Dfa& d);
Dfa dfa_complement(const Dfa& d);
Dfa dfa_intersect(const Dfa& a, const Dfa& b);
Dfa dfa_union(const Dfa& a, const Dfa& b);
bool dfa_is_empty(const Dfa& d);
/// Shortest, then lexicographically least, word on which the DFAs differ.
std::optional<std::string> dfa_equiv(const Dfa& a, const Dfa& b);

nlohmann::ordered_json dfa_to_json(const Dfa& d);
Dfa dfa_from_json(const nlohmann::ordered_json& j);
std::string print_dfa(const Dfa& d);
Dfa parse_dfa(std::string_view text);

}  // namespace hat
