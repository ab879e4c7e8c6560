#pragma once

#include "hat/automata.hpp"
#include "hat/logic.hpp"
#include "hat/model.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace hat {

/// Anything that decides membership of words: a transformer, a DFA, a formula
/// with its convention, or a plain predicate.
class Acceptor {
public:
    enum class Kind { Machine, Auto, Oracle, Custom };

    static Acceptor machine(Transformer t);
    static Acceptor automaton(Dfa d);
    static Acceptor oracle(Language l);
    static Acceptor custom(std::function<bool(std::string_view)> f, std::string label);

    Kind kind() const { return kind_; }
    bool accepts(std::string_view w) const { return fn_(w); }
    const std::string& label() const { return label_; }

private:
    Acceptor(Kind k, std::function<bool(std::string_view)> f, std::string label)
        : kind_(k), fn_(std::move(f)), label_(std::move(label)) {}

    Kind kind_;
    std::function<bool(std::string_view)> fn_;
    std::string label_;
};

struct EquivOptions {
    std::size_t jobs = 1;
    std::uint64_t budget = 20'000'000;
};

/// Number of words of length 0..max_len over an alphabet of size k, saturating.
std::uint64_t universe_size(std::size_t k, std::size_t max_len);

/// The first word in length-lexicographic order (alphabet order) on which the
/// acceptors disagree, or nullopt. Throws Resource when the universe exceeds
/// the budget. The answer does not depend on `jobs`.
std::optional<std::string> bounded_equiv(const Acceptor& a, const Acceptor& b, std::size_t max_len,
                                         std::string_view alphabet, const EquivOptions& opt = {});

/// Word number `index` among the words of length `len`, in lexicographic order.
std::string nth_word(std::string_view alphabet, std::size_t len, std::uint64_t index);

}  // namespace hat
