#pragma once

#include <utility>

#include <gmpxx.h>
#include <mpfr.h>

#include "nullring/errors.hpp"
#include "nullring/numeric.hpp"

namespace nullring {

/// Move-only RAII handle for an MPFR number. Every operation that touches
/// one states its rounding direction explicitly; nothing here rounds to
/// nearest behind the caller's back.
class Real {
public:
    explicit Real(mpfr_prec_t prec) { mpfr_init2(v_, prec); }
    Real(Real&& other) noexcept {
        mpfr_init2(v_, mpfr_get_prec(other.v_));
        mpfr_swap(v_, other.v_);
    }
    Real& operator=(Real&& other) noexcept {
        mpfr_swap(v_, other.v_);
        return *this;
    }
    Real(const Real&) = delete;
    Real& operator=(const Real&) = delete;
    ~Real() { mpfr_clear(v_); }

    mpfr_ptr raw() { return v_; }
    mpfr_srcptr raw() const { return v_; }

    int sign() const { return mpfr_sgn(v_); }

private:
    mpfr_t v_;
};

/// out <- log2(q) for q > 0, rounded in direction rnd.
inline void log2_q(Real& out, const mpq_class& q, mpfr_rnd_t rnd) {
    const mpfr_rnd_t opp = rnd == MPFR_RNDU ? MPFR_RNDD : MPFR_RNDU;
    Real num(mpfr_get_prec(out.raw())), den(mpfr_get_prec(out.raw()));
    mpfr_set_z(num.raw(), q.get_num_mpz_t(), rnd);
    mpfr_log2(num.raw(), num.raw(), rnd);
    mpfr_set_z(den.raw(), q.get_den_mpz_t(), opp);
    mpfr_log2(den.raw(), den.raw(), opp);
    mpfr_sub(out.raw(), num.raw(), den.raw(), rnd);
}

/// Exact value of an MPFR number as a rational (every finite MPFR value is
/// dyadic).
inline mpq_class to_rational(const Real& x) {
    mpq_class q;
    mpfr_get_q(q.get_mpq_t(), x.raw());
    return q;
}

/// Exact ceil(m * log2(n)) for m >= 1 and n >= 2 not a power of two.
/// Brackets the product between directed roundings and refines the working
/// precision until both ends agree; m * log2(n) is irrational, so the
/// bracket always separates.
inline mpz_class ceil_mul_log2(const mpz_class& m, std::uint64_t n) {
    for (mpfr_prec_t prec = 96; prec <= (mpfr_prec_t{1} << 20); prec *= 2) {
        Real lo(prec), hi(prec);
        mpfr_set_ui(lo.raw(), static_cast<unsigned long>(n), MPFR_RNDD);
        mpfr_log2(lo.raw(), lo.raw(), MPFR_RNDD);
        mpfr_mul_z(lo.raw(), lo.raw(), m.get_mpz_t(), MPFR_RNDD);
        mpfr_set_ui(hi.raw(), static_cast<unsigned long>(n), MPFR_RNDU);
        mpfr_log2(hi.raw(), hi.raw(), MPFR_RNDU);
        mpfr_mul_z(hi.raw(), hi.raw(), m.get_mpz_t(), MPFR_RNDU);
        mpz_class clo, chi;
        mpfr_get_z(clo.get_mpz_t(), lo.raw(), MPFR_RNDU);
        mpfr_get_z(chi.get_mpz_t(), hi.raw(), MPFR_RNDU);
        if (clo == chi) return clo;
    }
    throw Error("directed rounding failed to separate a ceiling bracket");
}

} // namespace nullring
