#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>

#include <gmpxx.h>

#include "nullring/caps.hpp"
#include "nullring/errors.hpp"
#include "nullring/numeric.hpp"
#include "nullring/ring.hpp"
#include "nullring/sumset.hpp"

namespace nullring {

inline std::uint64_t ceil_log2_z(const mpz_class& v) {
    if (v <= 1) return 0;
    return floor_log2_z(v - 1) + 1;
}

// ---------------------------------------------------------------------------
// Head/tail truncation
// ---------------------------------------------------------------------------

/// Truncation of an element at position ell: the head keeps the digits at
/// positions <= ell and the discarded tail is bounded by t / 2^ell in
/// absolute value. For finite sources the actual tail is carried along.
struct HeadTailSplit {
    std::uint64_t ell = 1;
    RingElement head;
    mpq_class tail_bound;
    std::optional<mpq_class> actual_tail;
};

inline HeadTailSplit split_at(const RingElement& x, std::uint64_t ell) {
    if (ell < 1) throw RangeError("split position must be >= 1");
    RingElement::DigitMap head_digits;
    for (const auto& [pos, digit] : x.digits())
        if (pos <= ell) head_digits.emplace(pos, digit);
    RingElement head(x.profile(), std::move(head_digits));
    mpq_class bound = mpq_class(x.profile().t) / pow2_z(ell);
    mpq_class tail =
        value_exact(x).to_rational() - value_exact(head).to_rational();
    if (abs(tail) > bound)
        throw CertificationError("truncation tail exceeds its bound");
    return HeadTailSplit{ell, std::move(head), std::move(bound), std::move(tail)};
}

inline HeadTailSplit split_at(const DigitStream& x, std::uint64_t ell,
                              const Caps& caps = {}) {
    if (ell < 1) throw RangeError("split position must be >= 1");
    RingElement head = x.head(ell, caps);
    mpq_class bound = mpq_class(x.profile().t) / pow2_z(ell);
    std::optional<mpq_class> tail;
    if (x.exactly_zero()) tail = mpq_class(0);
    return HeadTailSplit{ell, std::move(head), std::move(bound), std::move(tail)};
}

// ---------------------------------------------------------------------------
// Certified binary digits
// ---------------------------------------------------------------------------

/// Integer part and the first p fractional digits of a binary expansion,
/// floor convention (the fractional part is in [0, 1) for any sign).
/// Indeterminate means the certifying interval still straddled a digit
/// boundary at the refinement cap; the value may sit exactly on one, where
/// both expansions are admissible.
struct BinaryDigits {
    bool determinate = false;
    mpz_class integer_part;
    std::string fraction;
    std::uint32_t refinements_used = 0;
};

namespace detail {

/// Splits floor(x * 2^p) into integer part and p fraction bits.
inline BinaryDigits digits_from_scaled_floor(const mpz_class& scaled,
                                             std::uint64_t p,
                                             std::uint32_t refinements) {
    BinaryDigits out;
    out.determinate = true;
    out.refinements_used = refinements;
    mpz_class rem;
    mpz_fdiv_q_2exp(out.integer_part.get_mpz_t(), scaled.get_mpz_t(),
                    static_cast<mp_bitcnt_t>(p));
    mpz_fdiv_r_2exp(rem.get_mpz_t(), scaled.get_mpz_t(),
                    static_cast<mp_bitcnt_t>(p));
    out.fraction.reserve(p);
    for (std::uint64_t i = p; i-- > 0;)
        out.fraction.push_back(
            mpz_tstbit(rem.get_mpz_t(), static_cast<mp_bitcnt_t>(i)) ? '1' : '0');
    return out;
}

inline mpz_class scaled_floor(const mpq_class& v, std::uint64_t p) {
    mpq_class scaled = v * pow2_z(p);
    return floor_q(scaled);
}

} // namespace detail

/// Exact path: a finite element's value is known, so its (terminating)
/// expansion is read off the scaled floor directly.
inline BinaryDigits binary_digits(const RingElement& x, std::uint64_t p,
                                  std::uint32_t /*max_refine*/ = 0) {
    if (p < 1) throw RangeError("digit count must be >= 1");
    return detail::digits_from_scaled_floor(
        detail::scaled_floor(value_exact(x).to_rational(), p), p, 0);
}

/// Certified path: the head value at truncation depth ell encloses the
/// stream value within +-t/2^ell; digits are emitted once the enclosure
/// fits inside a single 2^-p cell. The depth starts at p + ceil(log2 t) + 2
/// and doubles per refinement.
inline BinaryDigits binary_digits(const DigitStream& x, std::uint64_t p,
                                  std::uint32_t max_refine = 20,
                                  const Caps& caps = {}) {
    if (p < 1) throw RangeError("digit count must be >= 1");
    if (x.exactly_zero())
        return detail::digits_from_scaled_floor(mpz_class(0), p, 0);
    const mpq_class t(x.profile().t);
    std::uint64_t ell = p + ceil_log2_z(x.profile().t) + 2;
    for (std::uint32_t round = 0;; ++round) {
        const mpq_class head = value_exact(x.head(ell, caps)).to_rational();
        const mpq_class delta = t / pow2_z(ell);
        const mpz_class lo = detail::scaled_floor(head - delta, p);
        const mpz_class hi = detail::scaled_floor(head + delta, p);
        if (lo == hi) return detail::digits_from_scaled_floor(lo, p, round);
        if (round >= max_refine) {
            BinaryDigits out;
            out.refinements_used = round;
            return out; // indeterminate
        }
        if (ell > caps.sumset_limit / 2)
            throw CapacityError("digit refinement exceeded the sumset cap");
        ell *= 2;
    }
}

// ---------------------------------------------------------------------------
// Runs of equal digits
// ---------------------------------------------------------------------------

/// A certified window of equal fractional digits: positions start+1 ..
/// start+length of the expansion all carry `digit`. Forced by a sumset gap
/// (gap_k, gap_k_next) wide enough that 2^(gap) > 2^(length+1) * t.
struct RunWitness {
    std::uint64_t start = 0;
    std::uint64_t length = 0;
    int digit = 0;
    std::uint64_t gap_k = 0;
    std::uint64_t gap_k_next = 0;
};

/// Locates a run of `length` equal digits in a stream's expansion: a gap
/// (k, k') in the sumset with 2^(k'-k) > 2^(length+1) * t pins the value
/// of 2^k * x within 2^-length of an integer, so the digits right after
/// position k agree; the window is then recomputed digit by digit.
inline RunWitness find_run(const DigitStream& x, std::uint64_t length,
                           std::uint32_t max_refine = 20, const Caps& caps = {}) {
    if (length < 1) throw RangeError("run length must be >= 1");
    const mpz_class& t = x.profile().t;
    const std::uint64_t threshold = length + 1 + floor_log2_z(t);
    const GapWitness gap = find_gap(x.base(), x.profile().n, threshold, caps);
    if (pow2_z(gap.k_next - gap.k) <= pow2_z(length + 1) * t)
        throw CertificationError("selected gap is too narrow for the run bound");

    const BinaryDigits digits = binary_digits(x, gap.k + length, max_refine, caps);
    if (!digits.determinate)
        throw CapacityError("run window undetermined at refinement depth " +
                            std::to_string(max_refine) +
                            "; retry with a deeper refinement");
    const std::string window = digits.fraction.substr(gap.k, length);
    for (char c : window)
        if (c != window.front())
            throw CertificationError("digits disagree inside a forced run window");
    return RunWitness{gap.k, length, window.front() - '0', gap.k, gap.k_next};
}

// ---------------------------------------------------------------------------
// Rational expansions and membership
// ---------------------------------------------------------------------------

inline std::uint64_t longest_equal_run(const std::string& s) {
    std::uint64_t best = 0, current = 0;
    char last = '\0';
    for (char c : s) {
        current = c == last ? current + 1 : 1;
        last = c;
        best = std::max(best, current);
    }
    return best;
}

/// Eventually periodic binary expansion of a reduced fraction, fractional
/// part only (floor convention). A power-of-two denominator terminates,
/// recorded as period "0". max_run is taken over the preperiod followed by
/// two copies of the period, which captures every run of the infinite
/// expansion when the period is not a single repeated digit.
struct PeriodicExpansion {
    mpq_class value;
    std::string preperiod;
    std::string period;
    std::uint64_t max_run = 0;
    bool finite = false;
};

inline PeriodicExpansion periodic_expansion(const mpz_class& p, const mpz_class& q,
                                            const Caps& caps = {}) {
    if (q < 1) throw ValidationError("denominator must be >= 1");
    if (gcd(p, q) != 1) throw ValidationError("fraction must be reduced");
    PeriodicExpansion out;
    out.value = mpq_class(p) / mpq_class(q);

    mpz_class r;
    mpz_fdiv_r(r.get_mpz_t(), p.get_mpz_t(), q.get_mpz_t()); // frac numerator
    std::string digits;
    std::map<mpz_class, std::size_t> first_seen;
    std::size_t period_start = 0;
    while (true) {
        const auto [it, inserted] = first_seen.emplace(r, digits.size());
        if (!inserted) {
            period_start = it->second;
            break;
        }
        if (digits.size() > caps.enumeration)
            throw CapacityError("expansion period exceeds the enumeration cap");
        r *= 2;
        if (r >= q) {
            digits.push_back('1');
            r -= q;
        } else {
            digits.push_back('0');
        }
    }
    out.preperiod = digits.substr(0, period_start);
    out.period = digits.substr(period_start);
    if (out.period.empty()) out.period = "0";
    out.finite = out.period == "0";
    out.max_run = longest_equal_run(out.preperiod + out.period + out.period);
    return out;
}

/// Rational membership for the ring: exactly the dyadic rationals belong.
/// A power-of-two denominator yields the witnessing embedding; any other
/// reduced fraction is excluded because its expansion is periodic with a
/// finite maximal digit run, while ring membership forces arbitrarily long
/// runs.
struct MembershipVerdict {
    bool member_dyadic = false;
    std::optional<RingElement> embed;
    std::optional<PeriodicExpansion> expansion;
};

inline MembershipVerdict membership_verdict(const mpz_class& p, const mpz_class& q,
                                            const Caps& caps = {}) {
    if (q < 1) throw ValidationError("denominator must be >= 1");
    if (gcd(p, q) != 1) throw ValidationError("fraction must be reduced");
    MembershipVerdict verdict;
    if (is_power_of_two(q)) {
        verdict.member_dyadic = true;
        verdict.embed = dyadic_embed(p, floor_log2_z(q));
        if (value_exact(*verdict.embed).to_rational() != mpq_class(p) / mpq_class(q))
            throw CertificationError("dyadic embedding failed its value recheck");
    } else {
        verdict.expansion = periodic_expansion(p, q, caps);
    }
    return verdict;
}

} // namespace nullring
