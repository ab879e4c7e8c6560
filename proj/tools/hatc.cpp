// hatc: compile, run, cross-check and extract hard-attention transformers.

#include "hat/acceptor.hpp"
#include "hat/automata.hpp"
#include "hat/circuit.hpp"
#include "hat/compile.hpp"
#include "hat/error.hpp"
#include "hat/logic.hpp"
#include "hat/serialize.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace hat;

namespace {

enum Exit { kOk = 0, kCounterexample = 1, kParse = 2, kFragment = 3, kResource = 4 };

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Parse, "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::Domain, "cannot write " + path);
    out << text;
}

Convention convention_of(const std::string& s) { return s == "first" ? Convention::FirstPos : Convention::LastPos; }

std::string layer_summary(const Transformer& t) {
    std::ostringstream os;
    std::size_t width = t.model_dim();
    for (const auto& l : t.layers) width = std::max(width, l.out_dim());
    os << "layers=" << t.layers.size() << " attention=" << attention_depth(t) << " width=" << width
       << " uniform=" << (check_uniform(t) ? "yes" : "no") << "\n";
    for (std::size_t k = 0; k < t.layers.size(); ++k) {
        os << "  layer " << (k + 1) << ": ";
        if (const auto* a = std::get_if<AttentionLayer>(&t.layers[k].body)) {
            os << "attention "
               << (a->normalizer == Normalizer::Average           ? "aha"
                   : a->normalizer == Normalizer::UniqueRightmost ? "uha-right"
                                                                  : "uha")
               << (a->masking == Masking::StrictFuture ? " masked" : " unmasked")
               << (is_uniform(*a) ? " uniform" : "");
        } else {
            os << "pwl";
        }
        os << " -> " << t.layers[k].out_dim() << "\n";
    }
    return os.str();
}

// ---------------------------------------------------------------- acceptors

struct AcceptorArg {
    Acceptor acceptor;
    std::string alphabet;
};

AcceptorArg load_acceptor(const std::string& arg, const std::string& alphabet, Convention conv, bool accepts_empty) {
    auto colon = arg.find(':');
    if (colon == std::string::npos) fail(ErrorKind::Parse, "acceptor '" + arg + "' needs a tf:, dfa: or formula: prefix");
    const std::string kind = arg.substr(0, colon);
    const std::string rest = arg.substr(colon + 1);
    if (kind == "tf") {
        Transformer t = parse_transformer(read_file(rest));
        std::string sigma = t.alphabet;
        return {Acceptor::machine(std::move(t)), sigma};
    }
    if (kind == "dfa") {
        Dfa d = parse_dfa(read_file(rest));
        std::string sigma = d.alphabet;
        return {Acceptor::automaton(std::move(d)), sigma};
    }
    if (kind == "formula") {
        if (alphabet.empty()) fail(ErrorKind::Parse, "formula acceptors need --alphabet or another acceptor's alphabet");
        Formula f = parse_formula(rest, alphabet);
        return {Acceptor::oracle(Language{f, conv, accepts_empty}), alphabet};
    }
    fail(ErrorKind::Parse, "unknown acceptor kind '" + kind + "'");
}

std::string peek_alphabet(const std::string& arg) {
    if (arg.rfind("tf:", 0) == 0) return parse_transformer(read_file(arg.substr(3))).alphabet;
    if (arg.rfind("dfa:", 0) == 0) return parse_dfa(read_file(arg.substr(4))).alphabet;
    return "";
}

std::size_t default_jobs(std::size_t flag) {
    if (flag > 0) return flag;
    if (const char* env = std::getenv("HATC_JOBS")) {
        try {
            return std::max<std::size_t>(1, std::stoul(env));
        } catch (...) {
        }
    }
    return 1;
}

// ---------------------------------------------------------------- demos

bool is_palindrome(std::string_view w) { return std::equal(w.begin(), w.end(), w.rbegin()); }

bool is_dyck(std::string_view w) {
    long depth = 0;
    for (char c : w) {
        depth += c == '(' ? 1 : -1;
        if (depth < 0) return false;
    }
    return depth == 0;
}

bool is_majority(std::string_view w) {
    return std::count(w.begin(), w.end(), 'a') >= std::count(w.begin(), w.end(), 'b');
}

int run_demo(const std::string& name, std::size_t max_len, std::size_t jobs) {
    EquivOptions eo;
    eo.jobs = jobs;
    struct Check {
        std::string what;
        Acceptor a;
        Acceptor b;
        std::string alphabet;
    };
    std::vector<Check> checks;
    if (name == "maj" || name == "dyck1") {
        const bool maj = name == "maj";
        const std::string sigma = maj ? "ab" : "()";
        const Formula f = maj ? parse_formula("#L[Qb] <= #L[Qa]", sigma)
                              : parse_formula("#L[Q(] = #L[Q)] & #L[#L[Q)] > #L[Q(]] = 0", sigma);
        CompileOptions opt;
        opt.accepts_empty = true;
        auto reference = Acceptor::custom(maj ? is_majority : is_dyck, maj ? "majority count" : "bracket matching");
        checks.push_back({"oracle", Acceptor::oracle(Language{f, Convention::LastPos, true}), reference, sigma});
        checks.push_back({"ahat", Acceptor::machine(compile_counting_ahat(f, sigma, opt)), reference, sigma});
        checks.push_back({"kt-ahat", Acceptor::machine(compile_kt_ahat(f, sigma, opt)), reference, sigma});
    } else if (name == "palindrome") {
        auto reference = Acceptor::custom(is_palindrome, "string reversal");
        checks.push_back({"uhat", Acceptor::machine(builtin_language(Builtin::palindrome("abc"))), reference, "abc"});
    } else if (name == "regular-mod") {
        const Builtin b = Builtin::regular_mod(2, 0, 'a');
        const Formula f = builtin_formula(b);
        auto oracle = Acceptor::oracle(Language{f, Convention::FirstPos, true});
        DfaOptions dopt;
        dopt.accepts_empty = true;
        checks.push_back({"uhat", Acceptor::machine(builtin_language(b)), oracle, b.alphabet});
        checks.push_back({"dfa", Acceptor::automaton(ltl_to_dfa(f, b.alphabet, dopt)), oracle, b.alphabet});
    } else {
        fail(ErrorKind::Parse, "unknown demo '" + name + "' (maj, dyck1, palindrome, regular-mod)");
    }
    for (const auto& c : checks) {
        if (auto cex = bounded_equiv(c.a, c.b, max_len, c.alphabet, eo)) {
            std::cout << "demo " << name << ": FAIL " << c.what << " counterexample \"" << *cex << "\"\n";
            return kCounterexample;
        }
    }
    std::cout << "demo " << name << ": PASS max-len=" << max_len << "\n";
    return kOk;
}

int exit_for(ErrorKind k) {
    switch (k) {
    case ErrorKind::Fragment:
    case ErrorKind::Unsupported: return kFragment;
    case ErrorKind::Resource: return kResource;
    default: return kParse;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hard-attention transformer toolkit"};
    app.require_subcommand(1);

    // compile
    auto* compile = app.add_subcommand("compile", "compile a formula into a transformer");
    std::string c_formula, c_formula_file, c_target = "uhat", c_alphabet = "ab", c_out, c_conv = "last", c_order = "identity";
    bool c_empty = false;
    std::size_t c_exact = 1024, c_width = 256;
    compile->add_option("--formula", c_formula, "formula text");
    compile->add_option("--formula-file", c_formula_file, "file holding the formula");
    compile->add_option("--target", c_target, "uhat, masked-uhat, ahat or kt-ahat")
        ->check(CLI::IsMember({"uhat", "masked-uhat", "ahat", "kt-ahat"}));
    compile->add_option("--alphabet", c_alphabet, "one character per token");
    compile->add_option("-o,--out", c_out, "output file (default: stdout)");
    compile->add_flag("--accept-empty", c_empty, "accept the empty word");
    compile->add_option("--convention", c_conv, "ahat read-out position")->check(CLI::IsMember({"first", "last"}));
    compile->add_option("--order", c_order, "uhat traversal order")->check(CLI::IsMember({"identity", "interleave"}));
    compile->add_option("--exact-up-to", c_exact, "kt-ahat exactness bound on word length");
    compile->add_option("--max-width", c_width, "residual stream cap");

    // run
    auto* run = app.add_subcommand("run", "run a transformer on a word");
    std::string r_file, r_word;
    bool r_trace = false;
    run->add_option("transformer", r_file, "transformer file")->required();
    run->add_option("word", r_word, "input word");
    run->add_flag("--trace", r_trace, "print every layer's vectors");

    // check
    auto* check = app.add_subcommand("check", "compare two acceptors on all short words");
    std::string k_a, k_b, k_alphabet, k_conv = "first";
    std::size_t k_len = 8, k_jobs = 0;
    bool k_empty = false;
    check->add_option("first", k_a, "tf:PATH, dfa:PATH or formula:TEXT")->required();
    check->add_option("second", k_b, "tf:PATH, dfa:PATH or formula:TEXT")->required();
    check->add_option("--max-len", k_len, "longest word checked");
    check->add_option("--alphabet", k_alphabet, "alphabet for formula acceptors");
    check->add_option("--convention", k_conv, "formula evaluation position")->check(CLI::IsMember({"first", "last"}));
    check->add_flag("--accept-empty", k_empty, "formula acceptors accept the empty word");
    check->add_option("--jobs", k_jobs, "worker threads");

    // to-dfa
    auto* todfa = app.add_subcommand("to-dfa", "build the minimal DFA of a future-only LTL[Mon] formula");
    std::string d_formula, d_alphabet = "ab", d_out, d_format = "text";
    bool d_empty = false;
    todfa->add_option("--formula", d_formula, "formula text")->required();
    todfa->add_option("--alphabet", d_alphabet, "one character per token");
    todfa->add_option("-o,--out", d_out, "output file (default: stdout)");
    todfa->add_option("--format", d_format, "text or json")->check(CLI::IsMember({"text", "json"}));
    todfa->add_flag("--accept-empty", d_empty, "accept the empty word");

    // extract-circuit
    auto* extract = app.add_subcommand("extract-circuit", "extract a boolean circuit for one input length");
    std::string e_file, e_out;
    std::size_t e_len = 4, e_cap = 100000;
    bool e_self = false;
    extract->add_option("transformer", e_file, "transformer file")->required();
    extract->add_option("--len", e_len, "input length n");
    extract->add_option("-o,--out", e_out, "circuit file");
    extract->add_flag("--self-check", e_self, "compare with the transformer on every word of length n");
    extract->add_option("--value-cap", e_cap, "cap on enumerated position values per layer");

    // demo
    auto* demo = app.add_subcommand("demo", "run a built-in construction with its bounded self-check");
    std::string m_name;
    std::size_t m_len = 0, m_jobs = 0;
    demo->add_option("name", m_name, "maj, dyck1, palindrome or regular-mod")->required();
    demo->add_option("--max-len", m_len, "longest word checked");
    demo->add_option("--jobs", m_jobs, "worker threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kParse;
    }

    try {
        if (*compile) {
            if (c_formula.empty() == c_formula_file.empty())
                fail(ErrorKind::Parse, "give exactly one of --formula and --formula-file");
            const std::string text = c_formula.empty() ? read_file(c_formula_file) : c_formula;
            const Formula f = parse_formula(text, c_alphabet);
            CompileOptions opt;
            opt.accepts_empty = c_empty;
            opt.convention = convention_of(c_conv);
            opt.exact_up_to = c_exact;
            opt.max_width = c_width;
            Transformer t;
            if (c_target == "uhat") {
                t = compile_with_order(f, c_alphabet,
                                       c_order == "interleave" ? OrderFamily::interleave() : OrderFamily::identity(), opt);
            } else if (c_target == "masked-uhat") {
                t = compile_ltl_masked_uhat(f, c_alphabet, opt);
            } else if (c_target == "ahat") {
                t = compile_counting_ahat(f, c_alphabet, opt);
            } else {
                if (classify_fragment(f) != Fragment::KtSharp)
                    fail(ErrorKind::Fragment, "kt-ahat needs a K_t[#] formula, got " + fragment_name(classify_fragment(f)));
                t = compile_kt_ahat(f, c_alphabet, opt);
            }
            if (c_out.empty()) {
                std::cout << print_transformer(t);
            } else {
                write_output(c_out, print_transformer(t));
                std::cout << "target=" << c_target << " fragment=" << fragment_name(classify_fragment(f)) << " "
                          << layer_summary(t);
            }
            return kOk;
        }
        if (*run) {
            const Transformer t = parse_transformer(read_file(r_file));
            const RunResult res = run_transformer(t, r_word);
            std::cout << (res.accepted ? "ACCEPT" : "REJECT") << " score=" << to_string(res.score) << "\n";
            if (r_trace) {
                for (std::size_t k = 0; k < res.trace.size(); ++k) {
                    std::cout << "layer " << k << ":\n";
                    for (std::size_t i = 0; i < res.trace[k].size(); ++i)
                        std::cout << "  " << (i + 1) << " " << to_string(res.trace[k][i]) << "\n";
                }
            }
            return kOk;
        }
        if (*check) {
            std::string sigma = k_alphabet;
            if (sigma.empty()) sigma = peek_alphabet(k_a);
            if (sigma.empty()) sigma = peek_alphabet(k_b);
            const auto a = load_acceptor(k_a, sigma, convention_of(k_conv), k_empty);
            const auto b = load_acceptor(k_b, sigma, convention_of(k_conv), k_empty);
            if (a.alphabet != b.alphabet)
                fail(ErrorKind::Parse, "acceptors disagree on the alphabet: \"" + a.alphabet + "\" vs \"" + b.alphabet + "\"");
            EquivOptions eo;
            eo.jobs = default_jobs(k_jobs);
            if (auto cex = bounded_equiv(a.acceptor, b.acceptor, k_len, a.alphabet, eo)) {
                std::cout << "COUNTEREXAMPLE \"" << *cex << "\" first=" << (a.acceptor.accepts(*cex) ? "accept" : "reject")
                          << " second=" << (b.acceptor.accepts(*cex) ? "accept" : "reject") << "\n";
                return kCounterexample;
            }
            std::cout << "OK bounded-verified max-len=" << k_len << "\n";
            return kOk;
        }
        if (*todfa) {
            DfaOptions opt;
            opt.accepts_empty = d_empty;
            const Dfa d = dfa_minimize(ltl_to_dfa(parse_formula(d_formula, d_alphabet), d_alphabet, opt));
            write_output(d_out, d_format == "json" ? dfa_to_json(d).dump(1) + "\n" : print_dfa(d));
            if (!d_out.empty() && d_out != "-") std::cout << "states=" << d.size() << "\n";
            return kOk;
        }
        if (*extract) {
            const Transformer t = parse_transformer(read_file(e_file));
            ExtractOptions eo;
            eo.value_cap = e_cap;
            const Circuit c = extract_circuit(t, e_len, eo);
            if (!e_out.empty()) write_output(e_out, circuit_to_json(c).dump(1) + "\n");
            const auto st = circuit_stats(c);
            std::cout << "size=" << st.size << ", depth=" << st.depth << "\n";
            if (e_self) {
                const std::uint64_t words = universe_size(t.alphabet.size(), e_len) - universe_size(t.alphabet.size(), e_len - 1);
                for (std::uint64_t idx = 0; idx < words; ++idx) {
                    const std::string w = nth_word(t.alphabet, e_len, idx);
                    if (eval_circuit(c, w) != accepts(t, w)) {
                        std::cout << "self-check: FAIL on \"" << w << "\"\n";
                        return kCounterexample;
                    }
                }
                std::cout << "self-check: PASS (" << words << " words)\n";
            }
            return kOk;
        }
        if (*demo) {
            const std::size_t len = m_len > 0 ? m_len : (m_name == "palindrome" ? 8 : 10);
            return run_demo(m_name, len, default_jobs(m_jobs));
        }
    } catch (const Error& e) {
        std::cerr << "hatc: " << e.what() << "\n";
        return exit_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "hatc: " << e.what() << "\n";
        return kParse;
    }
    return kOk;
}
