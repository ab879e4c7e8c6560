#include "hat/rational.hpp"

#include "hat/error.hpp"

#include <cctype>

namespace hat {

std::string to_string(const Rational& q) {
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string to_string(const RVec& v) {
    std::string out = "(";
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (k) out += ", ";
        out += to_string(v[k]);
    }
    return out + ")";
}

namespace {

bool valid_integer(std::string_view s, bool allow_sign) {
    if (s.empty()) return false;
    std::size_t k = 0;
    if (allow_sign && (s[0] == '-' || s[0] == '+')) k = 1;
    if (k == s.size()) return false;
    for (; k < s.size(); ++k)
        if (!std::isdigit(static_cast<unsigned char>(s[k]))) return false;
    return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    auto slash = text.find('/');
    std::string_view num = text.substr(0, slash);
    std::string_view den = slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
    if (!valid_integer(num, true) || !valid_integer(den, false))
        fail(ErrorKind::Parse, "malformed rational '" + std::string(text) + "'");
    std::string n(num);
    if (n[0] == '+') n.erase(0, 1);
    mpz_class zn(n, 10), zd(std::string(den), 10);
    if (zd == 0) fail(ErrorKind::Parse, "zero denominator in '" + std::string(text) + "'");
    Rational q(zn, zd);
    q.canonicalize();
    return q;
}

Rational dot(const RVec& a, const RVec& b) {
    if (a.size() != b.size())
        fail(ErrorKind::Dimension, "dot product of dimensions " + std::to_string(a.size()) + " and " +
                                       std::to_string(b.size()));
    Rational acc = 0;
    for (std::size_t k = 0; k < a.size(); ++k)
        if (sgn(a[k]) != 0 && sgn(b[k]) != 0) acc += a[k] * b[k];
    return acc;
}

RVec zeros(std::size_t dim) { return RVec(dim, Rational(0)); }

Rational pow2_neg(unsigned k) {
    mpz_class den = 1;
    den <<= k;
    return Rational(mpz_class(1), den);
}

}  // namespace hat
