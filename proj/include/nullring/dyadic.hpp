#pragma once

#include <cstdint>
#include <string>

#include <gmpxx.h>

#include "nullring/numeric.hpp"

namespace nullring {

/// Exact dyadic rational num / 2^exp2, kept reduced (num odd, or exp2 = 0).
struct DyadicRational {
    mpz_class num;
    std::uint64_t exp2 = 0;

    static DyadicRational make(mpz_class numerator, std::uint64_t exponent) {
        DyadicRational d{std::move(numerator), exponent};
        d.reduce();
        return d;
    }

    void reduce() {
        if (num == 0) {
            exp2 = 0;
            return;
        }
        const std::uint64_t twos = mpz_scan1(num.get_mpz_t(), 0);
        const std::uint64_t shift = twos < exp2 ? twos : exp2;
        if (shift > 0) {
            mpz_fdiv_q_2exp(num.get_mpz_t(), num.get_mpz_t(),
                            static_cast<mp_bitcnt_t>(shift));
            exp2 -= shift;
        }
    }

    mpq_class to_rational() const { return dyadic_q(num, exp2); }

    std::string str() const {
        if (exp2 == 0) return num.get_str();
        return num.get_str() + "/2^" + std::to_string(exp2);
    }

    friend bool operator==(const DyadicRational& a, const DyadicRational& b) {
        return a.exp2 == b.exp2 && a.num == b.num;
    }
};

} // namespace nullring
