#include "hat/circuit.hpp"
#include "hat/error.hpp"

#include <map>
#include <optional>
#include <set>
#include <tuple>

namespace hat {

std::size_t ValueTable::layer_size(std::size_t l) const {
    std::set<RVec> all;
    for (const auto& pos : values.at(l)) all.insert(pos.begin(), pos.end());
    return all.size();
}

namespace {

// Per-position value sets, with one indicator gate per value when a circuit is built.
struct Level {
    std::vector<std::vector<RVec>> values;
    std::vector<std::map<RVec, std::size_t>> index;
    std::vector<std::vector<std::size_t>> gate;

    explicit Level(std::size_t positions) : values(positions), index(positions), gate(positions) {}

    std::size_t add(std::size_t i, const RVec& v) {
        auto [it, fresh] = index[i].try_emplace(v, values[i].size());
        if (fresh) {
            values[i].push_back(v);
            gate[i].emplace_back();
        }
        return it->second;
    }
    std::size_t total() const {
        std::size_t s = 0;
        for (const auto& v : values) s += v.size();
        return s;
    }
};

class Extractor {
public:
    Extractor(const Transformer& t, std::size_t n, const ExtractOptions& opt, bool build)
        : t_(t), n_(n), big_n_(n + 1), opt_(opt), build_(build) {}

    ValueTable run() {
        t_.validate();
        if (n_ == 0) fail(ErrorKind::Domain, "extraction needs n >= 1");
        for (std::size_t k = 0; k < t_.layers.size(); ++k)
            if (const auto* att = std::get_if<AttentionLayer>(&t_.layers[k].body))
                if (att->normalizer == Normalizer::Average)
                    fail(ErrorKind::Unsupported, "layer " + std::to_string(k + 1) +
                                                     " uses average-hard attention; circuit extraction needs UHA layers");
        circuit_.n = n_;
        circuit_.alphabet = t_.alphabet;

        ValueTable table;
        table.n = n_;
        Level cur = embed_level();
        check_cap(cur, 0);
        table.values.push_back(cur.values);
        table.scores.emplace_back();
        for (std::size_t k = 0; k < t_.layers.size(); ++k) {
            std::vector<Rational> scores;
            if (const auto* att = std::get_if<AttentionLayer>(&t_.layers[k].body)) {
                cur = attention_level(*att, cur, scores);
            } else {
                cur = pwl_level(std::get<PwlFn>(t_.layers[k].body), cur, k);
            }
            check_cap(cur, k + 1);
            table.values.push_back(cur.values);
            table.scores.push_back(std::move(scores));
        }
        if (build_) {
            std::vector<std::size_t> acc;
            const auto& last = cur.values[big_n_ - 1];
            for (std::size_t v = 0; v < last.size(); ++v)
                if (sgn(dot(t_.accept, last[v])) > 0) acc.push_back(cur.gate[big_n_ - 1][v]);
            circuit_.output = circuit_.any(std::move(acc));
        }
        return table;
    }

    Circuit take_circuit() { return std::move(circuit_); }

private:
    void check_cap(const Level& l, std::size_t layer) const {
        if (l.total() > opt_.value_cap)
            fail(ErrorKind::Resource, "layer " + std::to_string(layer) + " has " + std::to_string(l.total()) +
                                          " position values, over the cap of " + std::to_string(opt_.value_cap));
    }

    Level embed_level() {
        Level l(big_n_);
        for (std::size_t i = 1; i <= n_; ++i) {
            std::map<std::size_t, std::vector<std::size_t>> lits;
            const RVec p = t_.pe.is_nope() ? RVec{} : t_.pe.at(i, big_n_);
            for (char a : t_.alphabet) {
                RVec v = t_.embedding.at(a);
                for (std::size_t k = 0; k < p.size(); ++k) v[k] += p[k];
                const auto idx = l.add(i - 1, v);
                if (build_) lits[idx].push_back(circuit_.input(i, a));
            }
            if (build_)
                for (auto& [idx, gs] : lits) l.gate[i - 1][idx] = circuit_.any(std::move(gs));
        }
        RVec eos = t_.eos_embedding;
        if (!t_.pe.is_nope()) {
            const RVec p = t_.pe.at(big_n_, big_n_);
            for (std::size_t k = 0; k < p.size(); ++k) eos[k] += p[k];
        }
        const auto idx = l.add(big_n_ - 1, eos);
        if (build_) l.gate[big_n_ - 1][idx] = circuit_.constant(true);
        return l;
    }

    Level pwl_level(const PwlFn& f, const Level& in, std::size_t k) {
        Level out(big_n_);
        const std::string where = "layer " + std::to_string(k + 1);
        for (std::size_t i = 0; i < big_n_; ++i) {
            std::map<std::size_t, std::vector<std::size_t>> pre;
            for (std::size_t x = 0; x < in.values[i].size(); ++x) {
                const auto idx = out.add(i, eval_pwl(f, in.values[i][x], where));
                if (build_) pre[idx].push_back(in.gate[i][x]);
            }
            if (build_)
                for (auto& [idx, gs] : pre) out.gate[i][idx] = circuit_.any(std::move(gs));
        }
        return out;
    }

    Level attention_level(const AttentionLayer& att, const Level& in, std::vector<Rational>& score_set) {
        const bool rightmost = att.normalizer == Normalizer::UniqueRightmost;
        const bool masked = att.masking == Masking::StrictFuture;
        const std::size_t r = att.in_dim();

        std::vector<std::vector<RVec>> keys(big_n_);
        for (std::size_t j = 0; j < big_n_; ++j)
            for (const auto& u : in.values[j]) keys[j].push_back(eval_pwl(att.B, u, "attention B"));

        std::set<Rational> scores;
        Level out(big_n_);
        std::map<std::tuple<std::size_t, std::size_t, std::size_t, std::string, bool>, std::size_t> beaten;

        auto output = [&](const RVec& x, const RVec& v) {
            RVec joined = x;
            joined.insert(joined.end(), v.begin(), v.end());
            return eval_pwl(att.C, joined, "attention C");
        };

        for (std::size_t i = 0; i < big_n_; ++i) {
            std::map<std::size_t, std::vector<std::size_t>> sources;
            const std::size_t limit = masked ? i : big_n_;
            for (std::size_t x = 0; x < in.values[i].size(); ++x) {
                const RVec& xv = in.values[i][x];
                if (limit == 0) {
                    const auto idx = out.add(i, output(xv, zeros(r)));
                    if (build_) sources[idx].push_back(in.gate[i][x]);
                    continue;
                }
                const RVec q = eval_pwl(att.A, xv, "attention A");
                std::vector<std::vector<Rational>> s(limit);
                for (std::size_t j = 0; j < limit; ++j) {
                    if (j == i) {
                        s[j] = {dot(q, keys[i][x])};
                    } else {
                        for (const auto& kv : keys[j]) s[j].push_back(dot(q, kv));
                    }
                    scores.insert(s[j].begin(), s[j].end());
                }
                // j == i can only hold x itself.
                auto values_at = [&](std::size_t j) -> std::vector<std::size_t> {
                    if (j == i) return {x};
                    std::vector<std::size_t> all(in.values[j].size());
                    for (std::size_t u = 0; u < all.size(); ++u) all[u] = u;
                    return all;
                };
                auto score_of = [&](std::size_t j, std::size_t u) { return j == i ? s[j][0] : s[j][u]; };

                for (std::size_t j = 0; j < limit; ++j) {
                    for (std::size_t u : values_at(j)) {
                        const Rational& su = score_of(j, u);
                        bool feasible = true;
                        std::vector<std::size_t> conj;
                        if (build_) {
                            conj.push_back(in.gate[i][x]);
                            if (j != i) conj.push_back(in.gate[j][u]);
                        }
                        for (std::size_t j2 = 0; j2 < limit && feasible; ++j2) {
                            if (j2 == j) continue;
                            // Before the winner a tie already wins for leftmost; after it, for rightmost.
                            const bool tie_beats = (j2 < j) != rightmost;
                            std::vector<std::size_t> beats;
                            const auto cand = values_at(j2);
                            for (std::size_t u2 : cand) {
                                const Rational& s2 = score_of(j2, u2);
                                if (s2 > su || (tie_beats && s2 == su)) beats.push_back(u2);
                            }
                            if (beats.size() == cand.size()) {
                                feasible = false;
                            } else if (!beats.empty() && build_) {
                                const auto key = std::make_tuple(i, x, j2, to_string(su), tie_beats);
                                auto it = beaten.find(key);
                                if (it == beaten.end()) {
                                    std::vector<std::size_t> gs;
                                    for (auto u2 : beats) gs.push_back(in.gate[j2][u2]);
                                    it = beaten.emplace(key, circuit_.negate(circuit_.any(std::move(gs)))).first;
                                }
                                conj.push_back(it->second);
                            }
                        }
                        if (!feasible) continue;
                        const RVec& uv = j == i ? xv : in.values[j][u];
                        const auto idx = out.add(i, output(xv, uv));
                        if (build_) sources[idx].push_back(circuit_.all(std::move(conj)));
                    }
                }
            }
            if (build_)
                for (auto& [idx, gs] : sources) out.gate[i][idx] = circuit_.any(std::move(gs));
            if (out.total() > opt_.value_cap) return out;
        }
        score_set.assign(scores.begin(), scores.end());
        return out;
    }

    const Transformer& t_;
    std::size_t n_;
    std::size_t big_n_;
    ExtractOptions opt_;
    bool build_;
    Circuit circuit_;
};

}  // namespace

ValueTable enumerate_values(const Transformer& t, std::size_t n, const ExtractOptions& opt) {
    return Extractor(t, n, opt, false).run();
}

Circuit extract_circuit(const Transformer& t, std::size_t n, const ExtractOptions& opt) {
    Extractor ex(t, n, opt, true);
    ex.run();
    return ex.take_circuit();
}

}  // namespace hat
