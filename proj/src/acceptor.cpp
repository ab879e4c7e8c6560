#include "hat/acceptor.hpp"
#include "hat/error.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <mutex>
#include <thread>

namespace hat {

Acceptor Acceptor::machine(Transformer t) {
    t.validate();
    auto shared = std::make_shared<const Transformer>(std::move(t));
    return Acceptor(Kind::Machine, [shared](std::string_view w) { return hat::accepts(*shared, w); }, "transformer");
}

Acceptor Acceptor::automaton(Dfa d) {
    d.validate();
    auto shared = std::make_shared<const Dfa>(std::move(d));
    return Acceptor(Kind::Auto, [shared](std::string_view w) { return shared->accepts(w); },
                    "dfa(" + std::to_string(shared->size()) + " states)");
}

Acceptor Acceptor::oracle(Language l) {
    std::string label = "formula " + to_text(l.formula);
    return Acceptor(Kind::Oracle, [l = std::move(l)](std::string_view w) { return l.contains(w); }, std::move(label));
}

Acceptor Acceptor::custom(std::function<bool(std::string_view)> f, std::string label) {
    return Acceptor(Kind::Custom, std::move(f), std::move(label));
}

std::uint64_t universe_size(std::size_t k, std::size_t max_len) {
    constexpr auto cap = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t total = 0, layer = 1;
    for (std::size_t len = 0; len <= max_len; ++len) {
        if (total > cap - layer) return cap;
        total += layer;
        if (len < max_len) {
            if (k != 0 && layer > cap / k) return cap;
            layer *= k;
        }
    }
    return total;
}

std::string nth_word(std::string_view alphabet, std::size_t len, std::uint64_t index) {
    std::string w(len, alphabet.empty() ? '\0' : alphabet[0]);
    const std::uint64_t k = alphabet.size();
    for (std::size_t p = len; p-- > 0;) {
        w[p] = alphabet[index % k];
        index /= k;
    }
    return w;
}

std::optional<std::string> bounded_equiv(const Acceptor& a, const Acceptor& b, std::size_t max_len,
                                         std::string_view alphabet, const EquivOptions& opt) {
    if (alphabet.empty()) fail(ErrorKind::Domain, "alphabet is empty");
    const std::uint64_t total = universe_size(alphabet.size(), max_len);
    if (total > opt.budget)
        fail(ErrorKind::Resource, "bounded_equiv would enumerate " + std::to_string(total) +
                                      " words, over the budget of " + std::to_string(opt.budget));
    const std::size_t jobs = std::max<std::size_t>(1, opt.jobs);
    std::uint64_t count = 1;
    for (std::size_t len = 0; len <= max_len; ++len, count *= alphabet.size()) {
        // Each worker scans a strided share and records the least disagreeing index.
        std::atomic<std::uint64_t> best{std::numeric_limits<std::uint64_t>::max()};
        std::exception_ptr error;
        std::mutex error_mu;
        auto work = [&](std::size_t worker) {
            try {
                for (std::uint64_t idx = worker; idx < count && idx < best.load(); idx += jobs) {
                    const std::string w = nth_word(alphabet, len, idx);
                    if (a.accepts(w) != b.accepts(w)) {
                        std::uint64_t cur = best.load();
                        while (idx < cur && !best.compare_exchange_weak(cur, idx)) {
                        }
                        return;
                    }
                }
            } catch (...) {
                std::lock_guard lock(error_mu);
                if (!error) error = std::current_exception();
            }
        };
        if (jobs == 1 || count < 64) {
            work(0);
            if (jobs > 1)
                for (std::size_t wkr = 1; wkr < jobs; ++wkr) work(wkr);
        } else {
            std::vector<std::thread> pool;
            for (std::size_t wkr = 0; wkr < jobs; ++wkr) pool.emplace_back(work, wkr);
            for (auto& t : pool) t.join();
        }
        if (error) std::rethrow_exception(error);
        if (best.load() != std::numeric_limits<std::uint64_t>::max()) return nth_word(alphabet, len, best.load());
    }
    return std::nullopt;
}

}  // namespace hat
