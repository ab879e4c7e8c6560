#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>

namespace hat {

/// Eventually periodic set of positive integers: an explicit table below
/// `threshold`, then membership by residue modulo `period`.
struct MonadicPredicate {
    std::map<std::uint64_t, bool> exceptions;
    std::uint64_t threshold = 0;
    std::uint64_t period = 1;
    std::set<std::uint64_t> residues;

    /// Mod^d_r: all i with i ≡ r (mod d).
    static MonadicPredicate mod(std::uint64_t d, std::uint64_t r);
    /// The singleton {k}.
    static MonadicPredicate at(std::uint64_t k);

    bool contains(std::uint64_t i) const;

    /// Concrete syntax: "mod(d,r)", "at(k)" or "mon(T,d,{r,..},{e,..})".
    std::string to_text() const;

    bool operator==(const MonadicPredicate&) const = default;
    auto operator<=>(const MonadicPredicate&) const = default;
};

}  // namespace hat
