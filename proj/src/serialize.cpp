#include "hat/serialize.hpp"

#include "hat/error.hpp"
#include "hat/logic.hpp"

namespace hat {

namespace {

const Json& field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) fail(ErrorKind::Parse, std::string("missing field '") + key + "'");
    return j.at(key);
}

std::size_t as_size(const Json& j, const char* what) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
        fail(ErrorKind::Parse, std::string(what) + " must be a non-negative integer");
    return j.get<std::size_t>();
}

const char* normalizer_name(Normalizer n) {
    switch (n) {
    case Normalizer::UniqueLeftmost: return "uha";
    case Normalizer::UniqueRightmost: return "uha-right";
    case Normalizer::Average: return "aha";
    }
    return "uha";
}

Normalizer normalizer_from(const std::string& s) {
    if (s == "uha") return Normalizer::UniqueLeftmost;
    if (s == "uha-right") return Normalizer::UniqueRightmost;
    if (s == "aha") return Normalizer::Average;
    fail(ErrorKind::Parse, "unknown normalizer '" + s + "'");
}

const char* block_name(PeBlock::Kind k) {
    switch (k) {
    case PeBlock::Kind::PowerTwo: return "power_two";
    case PeBlock::Kind::Predicates: return "predicates";
    case PeBlock::Kind::PrefixScale: return "prefix_scale";
    case PeBlock::Kind::Thermometer: return "thermometer";
    }
    return "power_two";
}

PeBlock::Kind block_from(const std::string& s) {
    if (s == "power_two") return PeBlock::Kind::PowerTwo;
    if (s == "predicates") return PeBlock::Kind::Predicates;
    if (s == "prefix_scale") return PeBlock::Kind::PrefixScale;
    if (s == "thermometer") return PeBlock::Kind::Thermometer;
    fail(ErrorKind::Parse, "unknown PE block kind '" + s + "'");
}

Json order_to_json(const OrderFamily& o) {
    if (o.kind() != OrderFamily::Kind::Table) return o.name();
    Json table = Json::object();
    for (const auto& [n, t] : o.traversals()) table[std::to_string(n)] = t;
    return table;
}

OrderFamily order_from_json(const Json& j) {
    if (j.is_string()) {
        if (j == "identity") return OrderFamily::identity();
        if (j == "interleave") return OrderFamily::interleave();
        fail(ErrorKind::Parse, "unknown order family '" + j.get<std::string>() + "'");
    }
    if (!j.is_object()) fail(ErrorKind::Parse, "order must be a name or a table");
    std::map<std::size_t, std::vector<std::size_t>> table;
    for (const auto& [k, v] : j.items()) table[std::stoul(k)] = v.get<std::vector<std::size_t>>();
    return OrderFamily::table(std::move(table));
}

Json pe_to_json(const PositionalEmbedding& pe) {
    Json j;
    j["dim"] = pe.dim;
    Json blocks = Json::array();
    for (const auto& b : pe.blocks) {
        Json jb;
        jb["kind"] = block_name(b.kind);
        jb["offset"] = b.offset;
        switch (b.kind) {
        case PeBlock::Kind::PowerTwo: jb["order"] = order_to_json(b.order); break;
        case PeBlock::Kind::Predicates: {
            jb["order"] = order_to_json(b.order);
            Json preds = Json::array();
            for (const auto& p : b.predicates) preds.push_back(p.to_text());
            jb["predicates"] = preds;
            break;
        }
        case PeBlock::Kind::PrefixScale: break;
        case PeBlock::Kind::Thermometer: jb["max_len"] = b.max_len; break;
        }
        blocks.push_back(jb);
    }
    j["blocks"] = blocks;
    Json table = Json::array();
    for (const auto& [key, v] : pe.table) table.push_back(Json{{"i", key.first}, {"n", key.second}, {"vec", rvec_to_json(v)}});
    j["table"] = table;
    return j;
}

PositionalEmbedding pe_from_json(const Json& j) {
    PositionalEmbedding pe;
    pe.dim = as_size(field(j, "dim"), "pe.dim");
    if (j.contains("blocks"))
        for (const auto& jb : j.at("blocks")) {
            PeBlock b;
            b.kind = block_from(field(jb, "kind").get<std::string>());
            b.offset = as_size(field(jb, "offset"), "pe block offset");
            if (jb.contains("order")) b.order = order_from_json(jb.at("order"));
            if (jb.contains("predicates"))
                for (const auto& p : jb.at("predicates")) b.predicates.push_back(parse_predicate(p.get<std::string>()));
            if (jb.contains("max_len")) b.max_len = as_size(jb.at("max_len"), "max_len");
            pe.blocks.push_back(std::move(b));
        }
    if (j.contains("table"))
        for (const auto& e : j.at("table"))
            pe.table[{as_size(field(e, "i"), "i"), as_size(field(e, "n"), "n")}] = rvec_from_json(field(e, "vec"));
    return pe;
}

}  // namespace

Json rational_to_json(const Rational& q) { return to_string(q); }

Rational rational_from_json(const Json& j) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long>());
    fail(ErrorKind::Parse, "rational must be a \"num/den\" string");
}

Json rvec_to_json(const RVec& v) {
    Json a = Json::array();
    for (const auto& q : v) a.push_back(rational_to_json(q));
    return a;
}

RVec rvec_from_json(const Json& j) {
    if (!j.is_array()) fail(ErrorKind::Parse, "vector must be an array");
    RVec v;
    for (const auto& e : j) v.push_back(rational_from_json(e));
    return v;
}

Json pwl_to_json(const PwlFn& f) {
    Json j;
    j["in_dim"] = f.in_dim();
    Json steps = Json::array();
    for (const auto& step : f.steps()) {
        if (const auto* a = std::get_if<Affine>(&step)) {
            Json rows = Json::array();
            for (const auto& r : a->rows()) rows.push_back(rvec_to_json(r));
            steps.push_back(Json{{"affine", Json{{"matrix", rows}, {"bias", rvec_to_json(a->bias())}}}});
        } else {
            steps.push_back(Json{{"relu", std::get<ReluAt>(step).coord}});
        }
    }
    j["steps"] = steps;
    return j;
}

PwlFn pwl_from_json(const Json& j) {
    const std::size_t in = as_size(field(j, "in_dim"), "in_dim");
    PwlFn f = PwlFn::identity(in);
    for (const auto& s : field(j, "steps")) {
        if (s.contains("affine")) {
            const auto& a = s.at("affine");
            std::vector<RVec> rows;
            for (const auto& r : field(a, "matrix")) rows.push_back(rvec_from_json(r));
            f = f.then_affine(Affine(f.out_dim(), std::move(rows), rvec_from_json(field(a, "bias"))));
        } else if (s.contains("relu")) {
            f = f.then_relu(as_size(s.at("relu"), "relu coordinate"));
        } else {
            fail(ErrorKind::Parse, "PWL step must be 'affine' or 'relu'");
        }
    }
    return f;
}

Json transformer_to_json(const Transformer& t) {
    Json j;
    Json alphabet = Json::array();
    for (char a : t.alphabet) alphabet.push_back(std::string(1, a));
    j["alphabet"] = alphabet;
    Json em = Json::object();
    for (char a : t.alphabet) em[std::string(1, a)] = rvec_to_json(t.embedding.at(a));
    em[std::string(kEosName)] = rvec_to_json(t.eos_embedding);
    j["embedding"] = em;
    j["pe"] = pe_to_json(t.pe);
    Json layers = Json::array();
    for (const auto& l : t.layers) {
        if (const auto* att = std::get_if<AttentionLayer>(&l.body)) {
            Json jl;
            jl["type"] = "attention";
            jl["normalizer"] = normalizer_name(att->normalizer);
            jl["masking"] = att->masking == Masking::StrictFuture ? "strict_future" : "none";
            jl["uniform"] = att->declared_uniform;
            jl["A"] = pwl_to_json(att->A);
            jl["B"] = pwl_to_json(att->B);
            jl["C"] = pwl_to_json(att->C);
            layers.push_back(jl);
        } else {
            layers.push_back(Json{{"type", "pwl"}, {"fn", pwl_to_json(std::get<PwlFn>(l.body))}});
        }
    }
    j["layers"] = layers;
    j["accept_vec"] = rvec_to_json(t.accept);
    return j;
}

Transformer transformer_from_json(const Json& j) {
    try {
        Transformer t;
        for (const auto& a : field(j, "alphabet")) {
            const auto s = a.get<std::string>();
            if (s.size() != 1) fail(ErrorKind::Parse, "tokens must be single characters, got '" + s + "'");
            if (t.alphabet.find(s[0]) != std::string::npos) fail(ErrorKind::Parse, "duplicate token '" + s + "'");
            t.alphabet.push_back(s[0]);
        }
        const auto& em = field(j, "embedding");
        for (const auto& [k, v] : em.items()) {
            if (k == kEosName)
                t.eos_embedding = rvec_from_json(v);
            else if (k.size() == 1)
                t.embedding[k[0]] = rvec_from_json(v);
            else
                fail(ErrorKind::Parse, "embedding key '" + k + "' is not a token");
        }
        if (!em.contains(std::string(kEosName))) fail(ErrorKind::Parse, "embedding lacks <EOS>");
        t.pe = pe_from_json(field(j, "pe"));
        for (const auto& jl : field(j, "layers")) {
            const auto type = field(jl, "type").get<std::string>();
            if (type == "pwl") {
                t.layers.push_back(Layer{pwl_from_json(field(jl, "fn"))});
            } else if (type == "attention") {
                AttentionLayer att{pwl_from_json(field(jl, "A")), pwl_from_json(field(jl, "B")),
                                   pwl_from_json(field(jl, "C"))};
                att.normalizer = normalizer_from(field(jl, "normalizer").get<std::string>());
                const auto mask = field(jl, "masking").get<std::string>();
                if (mask != "none" && mask != "strict_future") fail(ErrorKind::Parse, "unknown masking '" + mask + "'");
                att.masking = mask == "none" ? Masking::None : Masking::StrictFuture;
                att.declared_uniform = jl.value("uniform", false);
                t.layers.push_back(Layer{std::move(att)});
            } else {
                fail(ErrorKind::Parse, "unknown layer type '" + type + "'");
            }
        }
        t.accept = rvec_from_json(field(j, "accept_vec"));
        t.validate();
        return t;
    } catch (const Json::exception& e) {
        fail(ErrorKind::Parse, std::string("malformed transformer document: ") + e.what());
    }
}

std::string print_transformer(const Transformer& t) { return transformer_to_json(t).dump(1) + "\n"; }

Transformer parse_transformer(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::exception& e) {
        fail(ErrorKind::Parse, std::string("transformer file is not JSON: ") + e.what());
    }
    return transformer_from_json(j);
}

}  // namespace hat
