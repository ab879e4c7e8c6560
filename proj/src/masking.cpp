#include "hat/compile.hpp"
#include "hat/error.hpp"

namespace hat {

namespace {

// [y (r), onehot (L), therm (L)] -> [y, mode-dependent block (L), 0 (L)]
enum class ScoreExtra { None, NegOneHot, Therm };

PwlFn score_side(const PwlFn& f, std::size_t L, ScoreExtra extra, const Rational& k) {
    const std::size_t r = f.out_dim();
    const std::size_t n = r + 2 * L;
    std::vector<RVec> rows(n, zeros(n));
    for (std::size_t c = 0; c < r; ++c) rows[c][c] = 1;
    for (std::size_t c = 0; c < L; ++c) {
        if (extra == ScoreExtra::NegOneHot) rows[r + c][r + c] = -k;
        if (extra == ScoreExtra::Therm) rows[r + c][r + L + c] = 1;
    }
    return compose(with_passthrough(f, 2 * L), PwlFn::identity(n).then_affine(Affine(n, rows, zeros(n))));
}

// Joined input [x (r), xt (2L), v (r), vt (2L)] -> [x, v', xt], where v' is v
// zeroed at position 1 when `gate` is set.
PwlFn output_pre(std::size_t r, std::size_t L, bool gate, const Rational& m) {
    const std::size_t w = r + 2 * L;
    PwlBuilder b(2 * w);
    std::vector<Lin> outs;
    for (std::size_t c = 0; c < r; ++c) outs.push_back(b.in(c));
    const Lin first = b.in(r);  // onehot(i)_1
    for (std::size_t c = 0; c < r; ++c) {
        const Lin v = b.in(w + c);
        outs.push_back(gate ? b.relu(v - m * first) - b.relu(Lin(0) - v - m * first) : v);
    }
    for (std::size_t c = 0; c < 2 * L; ++c) outs.push_back(b.in(r + c));
    return b.build(outs);
}

}  // namespace

Transformer strip_masking(const Transformer& t, const StripOptions& opt) {
    t.validate();
    if (opt.max_len == 0) fail(ErrorKind::Domain, "strip_masking needs a positive max_len");
    if (opt.penalty <= 0) fail(ErrorKind::Domain, "strip_masking needs a positive penalty");
    const std::size_t L = opt.max_len + 1;
    const std::size_t d = t.model_dim();
    const Rational k(opt.penalty);

    Transformer out;
    out.alphabet = t.alphabet;
    for (const auto& [c, e] : t.embedding) {
        RVec v = e;
        v.resize(d + 2 * L, Rational(0));
        out.embedding[c] = std::move(v);
    }
    out.eos_embedding = t.eos_embedding;
    out.eos_embedding.resize(d + 2 * L, Rational(0));

    out.pe = t.pe;
    out.pe.dim = d + 2 * L;
    PeBlock therm;
    therm.kind = PeBlock::Kind::Thermometer;
    therm.offset = d;
    therm.max_len = opt.max_len;
    for (auto& [key, vec] : out.pe.table) {
        vec.resize(d + 2 * L, Rational(0));
        const auto [i, n] = key;
        if (i <= L) {
            vec[d + i - 1] = 1;
            for (std::size_t q = 1; q <= i; ++q) vec[d + L + q - 1] = 1;
        }
    }
    out.pe.blocks.push_back(therm);

    for (const auto& layer : t.layers) {
        if (const auto* att = std::get_if<AttentionLayer>(&layer.body)) {
            const bool masked = att->masking == Masking::StrictFuture;
            AttentionLayer a{score_side(att->A, L, masked ? ScoreExtra::NegOneHot : ScoreExtra::None, k),
                             score_side(att->B, L, masked ? ScoreExtra::Therm : ScoreExtra::None, k),
                             compose(output_pre(att->in_dim(), L, masked, k), with_passthrough(att->C, 2 * L)),
                             att->normalizer, Masking::None, false};
            a.declared_uniform = att->declared_uniform && !masked && is_uniform(a);
            out.layers.push_back(Layer{std::move(a)});
        } else {
            out.layers.push_back(Layer{with_passthrough(std::get<PwlFn>(layer.body), 2 * L)});
        }
    }
    out.accept = t.accept;
    out.accept.resize(t.output_dim() + 2 * L, Rational(0));
    out.validate();
    return out;
}

}  // namespace hat
