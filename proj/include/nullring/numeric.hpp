#pragma once

#include <bit>
#include <cstdint>
#include <string>

#include <gmpxx.h>

#include "nullring/errors.hpp"

namespace nullring {

inline mpz_class pow2_z(std::uint64_t e) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), 2, static_cast<unsigned long>(e));
    return r;
}

inline mpz_class pow_z(const mpz_class& base, std::uint64_t e) {
    mpz_class r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), static_cast<unsigned long>(e));
    return r;
}

inline std::uint32_t floor_log2_u64(std::uint64_t v) {
    return static_cast<std::uint32_t>(std::bit_width(v) - 1); // v >= 1
}

/// floor(log2(v)) for v >= 1.
inline std::uint64_t floor_log2_z(const mpz_class& v) {
    return mpz_sizeinbase(v.get_mpz_t(), 2) - 1;
}

inline bool is_power_of_two(const mpz_class& v) {
    return v > 0 && mpz_popcount(v.get_mpz_t()) == 1;
}

/// num / 2^exp2 as an exact rational.
inline mpq_class dyadic_q(const mpz_class& num, std::uint64_t exp2) {
    mpq_class q(num);
    q /= pow2_z(exp2);
    return q;
}

inline mpz_class floor_q(const mpq_class& q) {
    mpz_class r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

/// Parses an exact non-negative-or-negative rational from one of the forms
/// "p/q", "123", "1.25", "1e-9", "2.5e3". Decimal forms convert exactly
/// (no binary floating point on the way).
inline mpq_class parse_rational(const std::string& text) {
    if (text.empty()) throw UsageError("empty rational literal");
    const std::size_t slash = text.find('/');
    if (slash != std::string::npos) {
        const std::string num = text.substr(0, slash);
        const std::string den = text.substr(slash + 1);
        mpz_class n, d;
        if (n.set_str(num, 10) != 0 || d.set_str(den, 10) != 0 || d == 0)
            throw UsageError("bad rational literal '" + text + "'");
        mpq_class q(n);
        q /= mpq_class(d);
        q.canonicalize();
        return q;
    }
    std::size_t i = 0;
    bool negative = false;
    if (text[i] == '+' || text[i] == '-') {
        negative = text[i] == '-';
        ++i;
    }
    std::string digits;
    long frac_digits = 0;
    bool seen_digit = false, seen_dot = false;
    for (; i < text.size() && text[i] != 'e' && text[i] != 'E'; ++i) {
        if (text[i] == '.') {
            if (seen_dot) throw UsageError("bad rational literal '" + text + "'");
            seen_dot = true;
        } else if (text[i] >= '0' && text[i] <= '9') {
            digits += text[i];
            if (seen_dot) ++frac_digits;
            seen_digit = true;
        } else {
            throw UsageError("bad rational literal '" + text + "'");
        }
    }
    long exponent = 0;
    if (i < text.size()) { // exponent part
        try {
            exponent = std::stol(text.substr(i + 1));
        } catch (const std::exception&) {
            throw UsageError("bad rational literal '" + text + "'");
        }
    }
    if (!seen_digit) throw UsageError("bad rational literal '" + text + "'");
    mpz_class mant;
    if (mant.set_str(digits, 10) != 0)
        throw UsageError("bad rational literal '" + text + "'");
    if (negative) mant = -mant;
    const long e10 = exponent - frac_digits;
    mpz_class p10;
    mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(e10 < 0 ? -e10 : e10));
    mpq_class q(mant);
    if (e10 >= 0) q *= mpq_class(p10); else q /= mpq_class(p10);
    q.canonicalize();
    return q;
}

/// "p/q" (or "p" when the denominator is 1), canonical form.
inline std::string rational_str(const mpq_class& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

} // namespace nullring
