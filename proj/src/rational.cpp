#include "pcfit/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace pcfit {

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) {
        return false;
    }
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) {
            return false;
        }
    }
    return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    const std::string original(text);
    bool negative = false;
    if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
        negative = text.front() == '-';
        text.remove_prefix(1);
    }
    Rational value;
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        std::string_view num = text.substr(0, slash);
        std::string_view den = text.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den)) {
            throw std::invalid_argument("malformed number '" + original + "'");
        }
        mpz_class d(std::string(den), 10);
        if (d == 0) {
            throw std::invalid_argument("zero denominator in '" + original + "'");
        }
        value = Rational(mpz_class(std::string(num), 10), d);
    } else if (auto dot = text.find('.'); dot != std::string_view::npos) {
        std::string_view whole = text.substr(0, dot);
        std::string_view frac = text.substr(dot + 1);
        if ((whole.empty() && frac.empty()) || (!whole.empty() && !all_digits(whole)) ||
            (!frac.empty() && !all_digits(frac))) {
            throw std::invalid_argument("malformed number '" + original + "'");
        }
        std::string digits = std::string(whole) + std::string(frac);
        mpz_class scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
        value = Rational(mpz_class(digits.empty() ? "0" : digits, 10), scale);
    } else {
        if (!all_digits(text)) {
            throw std::invalid_argument("malformed number '" + original + "'");
        }
        value = Rational(mpz_class(std::string(text), 10));
    }
    value.canonicalize();
    return negative ? Rational(-value) : value;
}

std::string to_string(const Rational& value) {
    Rational v = value;
    v.canonicalize();
    return v.get_str();
}

}  // namespace pcfit
