#include "qmech/scalar.hpp"

#include <cctype>
#include <cstdlib>

namespace qmech {

namespace {

boost::multiprecision::cpp_int parse_int(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("parse_rational: empty integer part");
    return boost::multiprecision::cpp_int(s);
}

}  // namespace

Rat parse_rational(const std::string& raw) {
    std::string s;
    for (char c : raw)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw std::invalid_argument("parse_rational: empty string");

    if (auto slash = s.find('/'); slash != std::string::npos) {
        Rat num = parse_rational(s.substr(0, slash));
        Rat den = parse_rational(s.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("parse_rational: zero denominator");
        return num / den;
    }

    bool neg = false;
    std::size_t i = 0;
    if (s[i] == '+' || s[i] == '-') neg = (s[i++] == '-');

    std::string digits;
    long frac_len = 0;
    bool seen_dot = false, seen_digit = false;
    long exp10 = 0;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (c == '.') {
            if (seen_dot) throw std::invalid_argument("parse_rational: bad number " + raw);
            seen_dot = true;
        } else if (c == 'e' || c == 'E') {
            exp10 = std::strtol(s.c_str() + i + 1, nullptr, 10);
            if (s.size() == i + 1) throw std::invalid_argument("parse_rational: bad exponent " + raw);
            break;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            digits += c;
            if (seen_dot) ++frac_len;
            seen_digit = true;
        } else {
            throw std::invalid_argument("parse_rational: bad character in " + raw);
        }
    }
    if (!seen_digit) throw std::invalid_argument("parse_rational: no digits in " + raw);

    Rat r(parse_int(digits));
    long shift = exp10 - frac_len;
    if (shift > 0)
        r *= Rat(pow_int(boost::multiprecision::cpp_int(10), shift));
    else if (shift < 0)
        r /= Rat(pow_int(boost::multiprecision::cpp_int(10), -shift));
    return neg ? -r : r;
}

std::string format_rational(const Rat& x) {
    std::string num = numerator(x).str();
    if (denominator(x) == 1) return num;
    return num + "/" + denominator(x).str();
}

}  // namespace qmech
