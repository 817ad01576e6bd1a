#include "core/rational.hpp"

#include <cctype>

namespace doflab {

std::string rat_string(const Rat& q) {
    const BigInt num = numerator(q);
    const BigInt den = denominator(q);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

double to_double(const Rat& q) { return q.convert_to<double>(); }

namespace {

bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

[[noreturn]] void bad_rational(const std::string& text) {
    throw std::invalid_argument("not a valid rational: '" + text + "'");
}

}  // namespace

Rat parse_rational(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty()) bad_rational(text);

    bool negative = false;
    if (s[0] == '+' || s[0] == '-') {
        negative = (s[0] == '-');
        s.erase(s.begin());
    }
    if (s.empty()) bad_rational(text);

    Rat value;
    auto slash = s.find('/');
    auto dot = s.find('.');
    if (slash != std::string::npos) {
        std::string num = s.substr(0, slash);
        std::string den = s.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den)) bad_rational(text);
        BigInt d(den);
        if (d == 0) bad_rational(text);
        value = Rat(BigInt(num), d);
    } else if (dot != std::string::npos) {
        std::string whole = s.substr(0, dot);
        std::string frac = s.substr(dot + 1);
        if (whole.empty()) whole = "0";
        if (!all_digits(whole) || (!frac.empty() && !all_digits(frac))) bad_rational(text);
        if (frac.size() > 6)
            throw std::invalid_argument(
                "decimal '" + text + "' is finer than 1e-6; pass an exact p/q instead");
        BigInt scale = 1;
        for (size_t i = 0; i < frac.size(); ++i) scale *= 10;
        BigInt n = BigInt(whole) * scale + (frac.empty() ? BigInt(0) : BigInt(frac));
        value = Rat(n, scale);
    } else {
        if (!all_digits(s)) bad_rational(text);
        value = Rat(BigInt(s));
    }
    if (negative) value = -value;
    return value;
}

BigInt iroot_floor(const BigInt& n, unsigned k) {
    if (n < 0) throw std::domain_error("iroot_floor: negative radicand");
    if (k == 0) throw std::domain_error("iroot_floor: zeroth root");
    if (n <= 1 || k == 1) return n;

    // Initial over-estimate from the bit length, then Newton descent.
    const unsigned bits = static_cast<unsigned>(msb(n)) + 1;
    BigInt x = BigInt(1) << ((bits + k - 1) / k);
    while (true) {
        BigInt xk1 = pow(x, k - 1);
        BigInt y = ((k - 1) * x + n / xk1) / k;
        if (y >= x) break;
        x = y;
    }
    while (pow(x, k) > n) --x;
    while (pow(x + 1, k) <= n) ++x;
    if (!(pow(x, k) <= n && n < pow(x + 1, k)))
        throw std::logic_error("iroot_floor: post-check failed");
    return x;
}

}  // namespace doflab
