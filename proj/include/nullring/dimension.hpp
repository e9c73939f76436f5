#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>
#include <mpfr.h>

#include "nullring/base_set.hpp"
#include "nullring/caps.hpp"
#include "nullring/errors.hpp"
#include "nullring/expansion.hpp"
#include "nullring/numeric.hpp"
#include "nullring/prng.hpp"
#include "nullring/ring.hpp"
#include "nullring/rounding.hpp"
#include "nullring/sumset.hpp"

namespace nullring {

/// A certified enclosure of a positive real quantity. When `exact` is set
/// the two ends coincide and the value is the rational itself.
struct BoundInterval {
    mpq_class lo;
    mpq_class hi;
    bool exact = false;
};

namespace detail {

/// Directed bracket of X^(1/q) for integer X >= 1 with `frac_bits` binary
/// digits: returns (a, exact) with X^(1/q) in [a, a+1] / 2^frac_bits, and
/// exact when a / 2^frac_bits hits the root.
inline std::pair<mpz_class, bool> root_bracket(const mpz_class& x, std::uint64_t q,
                                               std::uint64_t frac_bits) {
    mpz_class scaled = x << static_cast<mp_bitcnt_t>(q * frac_bits);
    mpz_class root;
    const int exact =
        mpz_root(root.get_mpz_t(), scaled.get_mpz_t(), static_cast<unsigned long>(q));
    return {root, exact != 0};
}

/// Working-size estimate (in bits) of the exact-integer comparison behind
/// the cover bound. Past the budget the comparison falls back to directed
/// logarithms.
inline bool within_bigint_budget(const mpz_class& span, std::uint64_t c,
                                 std::uint64_t q, std::uint64_t ell,
                                 std::uint64_t p) {
    constexpr std::uint64_t budget_bits = std::uint64_t{1} << 26;
    const std::uint64_t span_bits = floor_log2_z(span) + 1;
    return c * q * span_bits < budget_bits && ell * p < budget_bits;
}

/// Exact predicate: (2t+1)^c * t^(p/q) / 2^((ell-1) p/q) < eps, decided by
/// raising both sides to the q-th power, all in integers.
inline bool cover_predicate_exact(std::uint64_t c, const mpz_class& t,
                                  std::uint64_t p, std::uint64_t q,
                                  std::uint64_t ell, const mpq_class& eps) {
    const mpz_class span = 2 * t + 1;
    mpz_class lhs = pow_z(span, c * q) * pow_z(t, p);
    lhs *= pow_z(eps.get_den(), q);
    mpz_class rhs = pow_z(eps.get_num(), q);
    rhs <<= static_cast<mp_bitcnt_t>((ell - 1) * p);
    return lhs < rhs;
}

/// Log-space fallback: decides the same inequality through directed
/// roundings of c*log2(2t+1) + s*log2(t) - (ell-1)s - log2(eps), refining
/// precision until the sign separates.
inline bool cover_predicate_logspace(std::uint64_t c, const mpz_class& t,
                                     const mpq_class& s, std::uint64_t ell,
                                     const mpq_class& eps) {
    const mpq_class span(2 * t + 1);
    const mpq_class tq(t);
    mpq_class shift(static_cast<unsigned long>(ell - 1));
    shift *= s;
    for (mpfr_prec_t prec = 128; prec <= (mpfr_prec_t{1} << 16); prec *= 2) {
        Real hi(prec), lo(prec), term(prec);
        auto eval = [&](Real& out, mpfr_rnd_t rnd) {
            const mpfr_rnd_t opp = rnd == MPFR_RNDU ? MPFR_RNDD : MPFR_RNDU;
            log2_q(out, span, rnd);
            mpfr_mul_ui(out.raw(), out.raw(), static_cast<unsigned long>(c), rnd);
            log2_q(term, tq, rnd);
            mpfr_mul_q(term.raw(), term.raw(), s.get_mpq_t(), rnd);
            mpfr_add(out.raw(), out.raw(), term.raw(), rnd);
            mpfr_set_q(term.raw(), shift.get_mpq_t(), opp);
            mpfr_sub(out.raw(), out.raw(), term.raw(), rnd);
            log2_q(term, eps, opp);
            mpfr_sub(out.raw(), out.raw(), term.raw(), rnd);
        };
        eval(hi, MPFR_RNDU);
        if (hi.sign() < 0) return true;
        eval(lo, MPFR_RNDD);
        if (lo.sign() > 0) return false;
    }
    throw CapacityError("cover comparison did not separate at the precision cap");
}

} // namespace detail

/// Decides cover_bound(n, t, s, ell) < eps with a certified answer.
inline bool cover_bound_below(const BaseSet& base, std::uint32_t n,
                              const mpz_class& t, const mpq_class& s,
                              std::uint64_t ell, const mpq_class& eps,
                              const Caps& caps = {}) {
    if (n < 1 || t < 1 || ell < 1) throw RangeError("cover bound needs n, t, ell >= 1");
    if (s <= 0 || s > 1) throw RangeError("cover exponent must be in (0, 1]");
    if (eps <= 0) throw RangeError("epsilon must be positive");
    const SumsetTable table = build_sumset(base, n, ell, caps);
    const std::uint64_t c = table.prefix_count(ell);
    const std::uint64_t p = mpz_get_ui(s.get_num_mpz_t());
    const std::uint64_t q = mpz_get_ui(s.get_den_mpz_t());
    if (detail::within_bigint_budget(2 * t + 1, c, q, ell, p))
        return detail::cover_predicate_exact(c, t, p, q, ell, eps);
    return detail::cover_predicate_logspace(c, t, s, ell, eps);
}

/// Enclosure of the cover mass bound (2t+1)^c(ell) * (t / 2^(ell-1))^s.
/// Rational powers are bracketed by directed integer roots carrying
/// `frac_bits` binary digits; s = 1 (and every exactly extractable root)
/// collapses the enclosure to the exact rational.
inline BoundInterval cover_bound(const BaseSet& base, std::uint32_t n,
                                 const mpz_class& t, const mpq_class& s,
                                 std::uint64_t ell, const Caps& caps = {},
                                 std::uint64_t frac_bits = 64) {
    if (n < 1 || t < 1 || ell < 1) throw RangeError("cover bound needs n, t, ell >= 1");
    if (s <= 0 || s > 1) throw RangeError("cover exponent must be in (0, 1]");
    const SumsetTable table = build_sumset(base, n, ell, caps);
    const std::uint64_t c = table.prefix_count(ell);
    const std::uint64_t p = mpz_get_ui(s.get_num_mpz_t());
    const std::uint64_t q = mpz_get_ui(s.get_den_mpz_t());
    if (q > 4096) throw CapacityError("cover exponent denominator too large");
    const mpz_class span = 2 * t + 1;

    if (!detail::within_bigint_budget(span, c, q, ell, p)) {
        // Directed logarithm enclosure, exponentiated back.
        const mpq_class tq(t);
        mpq_class shift(static_cast<unsigned long>(ell - 1));
        shift *= s;
        BoundInterval out;
        Real val(256), term(256);
        auto eval = [&](mpfr_rnd_t rnd) {
            const mpfr_rnd_t opp = rnd == MPFR_RNDU ? MPFR_RNDD : MPFR_RNDU;
            log2_q(val, mpq_class(span), rnd);
            mpfr_mul_ui(val.raw(), val.raw(), static_cast<unsigned long>(c), rnd);
            log2_q(term, tq, rnd);
            mpfr_mul_q(term.raw(), term.raw(), s.get_mpq_t(), rnd);
            mpfr_add(val.raw(), val.raw(), term.raw(), rnd);
            mpfr_set_q(term.raw(), shift.get_mpq_t(), opp);
            mpfr_sub(val.raw(), val.raw(), term.raw(), rnd);
            mpfr_exp2(val.raw(), val.raw(), rnd);
            return to_rational(val);
        };
        out.lo = eval(MPFR_RNDD);
        out.hi = eval(MPFR_RNDU);
        out.exact = false;
        return out;
    }

    const mpz_class mass = pow_z(span, c);
    const std::uint64_t exponent = (ell - 1) * p;
    const std::uint64_t whole = exponent / q;
    const std::uint64_t residue = exponent % q;

    const auto [num_root, num_exact] = detail::root_bracket(pow_z(t, p), q, frac_bits);
    const auto [den_root, den_exact] =
        detail::root_bracket(pow2_z(residue), q, frac_bits);

    BoundInterval out;
    out.exact = num_exact && den_exact;
    const mpz_class scale = pow2_z(whole);
    if (out.exact) {
        out.lo = mpq_class(mass * num_root) / mpq_class(scale * den_root);
        out.lo.canonicalize();
        out.hi = out.lo;
    } else {
        out.lo = mpq_class(mass * num_root) / mpq_class(scale * (den_root + 1));
        out.hi = mpq_class(mass * (num_root + 1)) / mpq_class(scale * den_root);
        out.lo.canonicalize();
        out.hi.canonicalize();
    }
    return out;
}

/// An explicit interval-cover certificate: at truncation depth ell the
/// class is covered by at most (2t+1)^c_ell intervals of radius t/2^ell,
/// whose total s-th-power diameter mass is provably below epsilon.
struct CoverCertificate {
    std::uint32_t n = 1;
    mpz_class t = 1;
    mpq_class s;
    std::uint64_t ell = 1;
    std::uint64_t c_ell = 0;
    std::optional<mpz_class> center_bound; // (2t+1)^c_ell when printable
    double center_bound_log2 = 0.0;
    mpq_class hs_bound_upper;
    bool hs_exact = false;
    mpq_class epsilon;
};

/// Finds the smallest truncation depth ell <= ell_cap whose cover mass
/// bound drops below eps. Depths are screened with directed 128-bit
/// logarithms; only sign-ambiguous depths fall through to the exact
/// integer comparison, so the returned depth is minimal with certainty.
/// The bound tends to 0 as ell grows, so a failure means the cap was too
/// small, not that no certificate exists.
inline CoverCertificate certify(const BaseSet& base, std::uint32_t n,
                                const mpz_class& t, const mpq_class& s,
                                const mpq_class& eps, std::uint64_t ell_cap,
                                const Caps& caps = {}) {
    if (n < 1 || t < 1) throw RangeError("certify needs n >= 1 and t >= 1");
    if (s <= 0 || s > 1) throw RangeError("cover exponent must be in (0, 1]");
    if (eps <= 0) throw RangeError("epsilon must be positive");
    if (ell_cap < 1 || ell_cap > caps.sumset_limit)
        throw RangeError("ell cap must lie in [1, sumset cap]");
    const std::uint64_t p = mpz_get_ui(s.get_num_mpz_t());
    const std::uint64_t q = mpz_get_ui(s.get_den_mpz_t());
    if (q > 4096) throw CapacityError("cover exponent denominator too large");

    const mpq_class span_q(2 * t + 1);
    const mpq_class t_q(t);
    constexpr mpfr_prec_t screen_prec = 128;
    Real log_span_lo(screen_prec), log_span_hi(screen_prec);
    Real log_t_lo(screen_prec), log_t_hi(screen_prec);
    Real log_eps_lo(screen_prec), log_eps_hi(screen_prec);
    log2_q(log_span_lo, span_q, MPFR_RNDD);
    log2_q(log_span_hi, span_q, MPFR_RNDU);
    log2_q(log_t_lo, t_q, MPFR_RNDD);
    log2_q(log_t_hi, t_q, MPFR_RNDU);
    log2_q(log_eps_lo, eps, MPFR_RNDD);
    log2_q(log_eps_hi, eps, MPFR_RNDU);

    std::uint64_t table_limit = std::min<std::uint64_t>(ell_cap, 1024);
    SumsetTable table = build_sumset(base, n, table_limit, caps);
    std::size_t cursor = 0;
    std::uint64_t c = 0;

    Real acc(screen_prec), term(screen_prec);
    std::optional<std::uint64_t> found;
    for (std::uint64_t ell = 1; ell <= ell_cap; ++ell) {
        if (ell > table_limit) {
            table_limit = std::min(ell_cap, table_limit * 2);
            table = build_sumset(base, n, table_limit, caps);
        }
        while (cursor < table.elements().size() && table.elements()[cursor] <= ell)
            ++cursor;
        c = cursor;

        mpq_class shift(static_cast<unsigned long>(ell - 1));
        shift *= s;
        auto linear_form = [&](mpfr_rnd_t rnd, const Real& log_span,
                               const Real& log_t, const Real& log_eps) {
            const mpfr_rnd_t opp = rnd == MPFR_RNDU ? MPFR_RNDD : MPFR_RNDU;
            mpfr_mul_ui(acc.raw(), log_span.raw(), static_cast<unsigned long>(c), rnd);
            mpfr_mul_q(term.raw(), log_t.raw(), s.get_mpq_t(), rnd);
            mpfr_add(acc.raw(), acc.raw(), term.raw(), rnd);
            mpfr_set_q(term.raw(), shift.get_mpq_t(), opp);
            mpfr_sub(acc.raw(), acc.raw(), term.raw(), rnd);
            mpfr_sub(acc.raw(), acc.raw(), log_eps.raw(), rnd);
            return acc.sign();
        };
        if (linear_form(MPFR_RNDU, log_span_hi, log_t_hi, log_eps_lo) < 0) {
            found = ell;
            break;
        }
        if (linear_form(MPFR_RNDD, log_span_lo, log_t_lo, log_eps_hi) > 0)
            continue; // certified above eps
        // Ambiguous at screening precision: settle exactly.
        const bool below =
            detail::within_bigint_budget(2 * t + 1, c, q, ell, p)
                ? detail::cover_predicate_exact(c, t, p, q, ell, eps)
                : detail::cover_predicate_logspace(c, t, s, ell, eps);
        if (below) {
            found = ell;
            break;
        }
    }
    if (!found)
        throw CapacityError(
            "no certificate below the requested epsilon within ell cap " +
            std::to_string(ell_cap) +
            "; the bound vanishes as ell grows, so a larger cap will succeed");

    CoverCertificate cert;
    cert.n = n;
    cert.t = t;
    cert.s = s;
    cert.ell = *found;
    cert.c_ell = c;
    cert.epsilon = eps;
    const mpz_class span = 2 * t + 1;
    cert.center_bound_log2 =
        static_cast<double>(c) * std::log2(mpz_get_d(span.get_mpz_t()));
    if (cert.center_bound_log2 <= 4096.0)
        cert.center_bound = pow_z(span, c);

    std::uint64_t bits = 64;
    while (true) {
        const BoundInterval bound = cover_bound(base, n, t, s, cert.ell, caps, bits);
        if (bound.hi < eps) {
            cert.hs_bound_upper = bound.hi;
            cert.hs_exact = bound.exact;
            break;
        }
        if (bits > (std::uint64_t{1} << 16))
            throw CapacityError("cover bound enclosure failed to tighten below epsilon");
        bits *= 2;
    }
    return cert;
}

// ---------------------------------------------------------------------------
// Explicit centers and empirical box counting
// ---------------------------------------------------------------------------

/// All exact values of head sums with digits in [-t, t] on the sumset
/// positions <= ell, sorted and deduplicated. These are the interval
/// centers of the cover; their count is at most (2t+1)^(c_ell).
inline std::vector<mpq_class> enumerate_centers(const BaseSet& base,
                                                std::uint32_t n, const mpz_class& t,
                                                std::uint64_t ell,
                                                const Caps& caps = {}) {
    if (n < 1 || t < 1) throw RangeError("center enumeration needs n, t >= 1");
    const SumsetTable table = build_sumset(base, n, ell, caps);
    std::vector<std::uint64_t> positions(
        table.elements().begin(),
        std::upper_bound(table.elements().begin(), table.elements().end(), ell));
    const std::size_t m = positions.size();
    const mpz_class span = 2 * t + 1;
    if (pow_z(span, m) > caps.enumeration)
        throw CapacityError("center enumeration (2t+1)^" + std::to_string(m) +
                            " exceeds cap " + std::to_string(caps.enumeration));
    const std::int64_t tt = static_cast<std::int64_t>(t.get_ui());
    const std::uint64_t scale = positions.empty() ? 0 : positions.back();

    std::vector<mpz_class> contrib(m);
    for (std::size_t i = 0; i < m; ++i)
        contrib[i] = pow2_z(scale - positions[i]);

    std::vector<mpz_class> sums;
    std::vector<std::int64_t> digit(m, -tt);
    mpz_class current = 0;
    for (std::size_t i = 0; i < m; ++i) current += contrib[i] * (-tt);
    while (true) {
        sums.push_back(current);
        std::size_t i = 0;
        while (i < m && digit[i] == tt) {
            current -= contrib[i] * (2 * tt);
            digit[i] = -tt;
            ++i;
        }
        if (i == m) break;
        ++digit[i];
        current += contrib[i];
    }
    std::sort(sums.begin(), sums.end());
    sums.erase(std::unique(sums.begin(), sums.end()), sums.end());

    std::vector<mpq_class> centers;
    centers.reserve(sums.size());
    const mpz_class denom = pow2_z(scale);
    for (const mpz_class& num : sums) {
        mpq_class v(num);
        v /= denom;
        centers.push_back(std::move(v));
    }
    return centers;
}

struct CoverCheckFailure {
    std::uint64_t sample = 0;
    mpq_class distance;
};

struct CoverCheckReport {
    bool pass = true;
    std::uint64_t samples = 0;
    mpq_class radius;
    mpq_class max_distance;
    std::optional<CoverCheckFailure> first_failure;
};

/// Randomized containment check: sampled elements with support below
/// `depth` must land within t/2^ell of their own truncation center.
inline CoverCheckReport cover_check(const BaseSet& base, std::uint32_t n,
                                    const mpz_class& t, std::uint64_t ell,
                                    std::uint64_t samples, std::uint64_t seed,
                                    std::uint64_t depth = 0, const Caps& caps = {}) {
    if (n < 1 || t < 1 || ell < 1) throw RangeError("cover check needs n, t, ell >= 1");
    if (t > std::numeric_limits<std::uint32_t>::max())
        throw CapacityError("cover check sampling needs t < 2^32");
    if (depth == 0) depth = 2 * ell + 8;
    if (depth <= ell) throw RangeError("support depth must exceed ell");

    CoverCheckReport report;
    report.samples = samples;
    report.radius = mpq_class(t) / pow2_z(ell);
    report.max_distance = 0;

    const SumsetTable table = build_sumset(base, n, depth, caps);
    const std::uint64_t tt = t.get_ui();
    SplitMix64 rng(seed);
    for (std::uint64_t i = 0; i < samples; ++i) {
        RingElement::DigitMap digits;
        for (std::uint64_t pos : table.elements()) {
            const std::int64_t d = rng.next_digit(tt);
            if (d != 0) digits.emplace(pos, mpz_class(static_cast<long>(d)));
        }
        const RingElement x(Profile(n, t), std::move(digits));
        const HeadTailSplit split = split_at(x, ell);
        const mpq_class distance = abs(*split.actual_tail);
        if (distance > report.max_distance) report.max_distance = distance;
        if (distance > report.radius) {
            report.pass = false;
            if (!report.first_failure)
                report.first_failure = CoverCheckFailure{i, distance};
        }
    }
    return report;
}

struct BoxCountRow {
    std::uint32_t j = 0;
    std::uint64_t count = 0;
    double ratio = 0.0;
};

struct BoxCountSeries {
    std::uint32_t n = 1;
    mpz_class t = 1;
    std::uint64_t depth = 0;
    std::vector<BoxCountRow> rows;
};

/// Counts occupied half-open cells [m/2^j, (m+1)/2^j) over the exact
/// truncation values at the given support depth, for j = 1..j_max, along
/// with the log-ratio estimate log2(N)/j. Depth 0 means the empty
/// truncation (the single value 0).
inline BoxCountSeries box_count(const BaseSet& base, std::uint32_t n,
                                const mpz_class& t, std::uint32_t j_max,
                                std::uint64_t depth, const Caps& caps = {}) {
    if (j_max < 1 || j_max > 256) throw RangeError("box scales must lie in [1, 256]");
    BoxCountSeries series;
    series.n = n;
    series.t = t;
    series.depth = depth;

    std::vector<mpq_class> values;
    if (depth == 0)
        values.push_back(mpq_class(0));
    else
        values = enumerate_centers(base, n, t, depth, caps);

    for (std::uint32_t j = 1; j <= j_max; ++j) {
        std::vector<mpz_class> cells;
        cells.reserve(values.size());
        for (const mpq_class& v : values)
            cells.push_back(floor_q(v * pow2_z(j)));
        std::sort(cells.begin(), cells.end());
        cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
        BoxCountRow row;
        row.j = j;
        row.count = cells.size();
        row.ratio = std::log2(static_cast<double>(row.count)) / j;
        series.rows.push_back(row);
    }
    return series;
}

} // namespace nullring
