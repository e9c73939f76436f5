#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "nullring/base_set.hpp"
#include "nullring/caps.hpp"
#include "nullring/errors.hpp"
#include "nullring/numeric.hpp"
#include "nullring/rounding.hpp"

namespace nullring {

/// Sorted enumeration of the n-fold sumset of a base set, cut off at
/// `limit`. Since 0 is a base element, the order-n table is contained in
/// the order-(n+1) table.
class SumsetTable {
public:
    SumsetTable(BaseSet base, std::uint32_t n, std::uint64_t limit,
                std::vector<std::uint64_t> elements)
        : base_(std::move(base)), n_(n), limit_(limit),
          elements_(std::move(elements)) {}

    const BaseSet& base() const { return base_; }
    std::uint32_t order() const { return n_; }
    std::uint64_t limit() const { return limit_; }
    const std::vector<std::uint64_t>& elements() const { return elements_; }

    bool contains(std::uint64_t k) const {
        return std::binary_search(elements_.begin(), elements_.end(), k);
    }

    /// Number of elements <= ell, valid for any ell <= limit.
    std::uint64_t prefix_count(std::uint64_t ell) const {
        return static_cast<std::uint64_t>(
            std::upper_bound(elements_.begin(), elements_.end(), ell) -
            elements_.begin());
    }

    /// The counting function g_n: elements of the sumset that are <= ell.
    /// Range-checked per the operation contract (1 <= ell <= limit).
    std::uint64_t count_upto(std::uint64_t ell) const {
        if (ell < 1 || ell > limit_)
            throw RangeError("count_upto argument " + std::to_string(ell) +
                             " outside tabulated range [1, " +
                             std::to_string(limit_) + "]");
        return prefix_count(ell);
    }

private:
    BaseSet base_;
    std::uint32_t n_;
    std::uint64_t limit_;
    std::vector<std::uint64_t> elements_;
};

/// Enumerates the n-fold sumset up to `limit` by n-1 rounds of pairwise
/// sums against the base, deduplicating each round. Generalized bases are
/// validated against their declared log-density bound here.
inline SumsetTable build_sumset(const BaseSet& base, std::uint32_t n,
                                std::uint64_t limit, const Caps& caps = {}) {
    if (n < 1) throw RangeError("sumset order must be >= 1");
    if (limit > caps.sumset_limit)
        throw CapacityError("sumset limit " + std::to_string(limit) +
                            " exceeds cap " + std::to_string(caps.sumset_limit));
    if (!base.is_default()) base.check_log_density(limit);

    const std::vector<std::uint64_t> first = base.enumerate(limit);
    std::vector<std::uint64_t> current = first;
    for (std::uint32_t round = 2; round <= n; ++round) {
        std::vector<std::uint64_t> next;
        next.reserve(current.size() * 2);
        for (std::uint64_t a : current)
            for (std::uint64_t s : first) {
                if (s > limit - a) break; // base is sorted
                next.push_back(a + s);
            }
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        if (next.size() > caps.enumeration)
            throw CapacityError("sumset enumeration exceeds cap of " +
                                std::to_string(caps.enumeration) + " values");
        current = std::move(next);
    }
    return SumsetTable(base, n, limit, std::move(current));
}

// ---------------------------------------------------------------------------
// Density bound
// ---------------------------------------------------------------------------

struct DensityViolation {
    std::uint32_t n;
    std::uint64_t ell;
    mpz_class actual;
    mpz_class bound;
};

/// Result of a density sweep. `checked` counts individual (n, ell) pairs.
struct DensityReport {
    bool pass = true;
    bool default_base = true;
    std::uint64_t checked = 0;
    std::optional<DensityViolation> first_violation;
};

/// Sweeps g_n(ell) <= g_1(ell)^n for all n <= n_max and ell <= ell_max in
/// exact integer arithmetic. For the default base this additionally pins
/// the closed form g_1(ell) = 2 + floor(log2 ell), which makes the product
/// bound imply the real-valued one.
inline DensityReport verify_density_bound(const BaseSet& base,
                                          std::uint32_t n_max,
                                          std::uint64_t ell_max,
                                          const Caps& caps = {}) {
    if (n_max < 1 || ell_max < 1)
        throw RangeError("density sweep needs n_max >= 1 and ell_max >= 1");
    DensityReport report;
    report.default_base = base.is_default();

    std::vector<SumsetTable> tables;
    tables.reserve(n_max);
    for (std::uint32_t n = 1; n <= n_max; ++n)
        tables.push_back(build_sumset(base, n, ell_max, caps));

    std::vector<std::size_t> cursor(n_max, 0);
    std::vector<std::uint64_t> g(n_max, 0);
    for (std::uint64_t ell = 1; ell <= ell_max; ++ell) {
        for (std::uint32_t i = 0; i < n_max; ++i) {
            const auto& elems = tables[i].elements();
            while (cursor[i] < elems.size() && elems[cursor[i]] <= ell)
                ++cursor[i];
            g[i] = cursor[i];
        }
        if (report.default_base && g[0] != 2 + floor_log2_u64(ell)) {
            report.pass = false;
            report.first_violation =
                DensityViolation{1, ell, mpz_class(static_cast<unsigned long>(g[0])),
                                 mpz_class(2 + floor_log2_u64(ell))};
            return report;
        }
        mpz_class power = 1;
        for (std::uint32_t i = 0; i < n_max; ++i) {
            power *= static_cast<unsigned long>(g[0]);
            ++report.checked;
            if (mpz_class(static_cast<unsigned long>(g[i])) > power) {
                report.pass = false;
                report.first_violation = DensityViolation{
                    i + 1, ell, mpz_class(static_cast<unsigned long>(g[i])), power};
                return report;
            }
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Representation counts
// ---------------------------------------------------------------------------

/// c_n(k) for all k <= k_max: the number of ordered n-tuples of base
/// elements summing to k, by dynamic programming over the order.
/// Counts stay below rep_bound(n), which must fit in 64 bits here.
inline std::vector<std::uint64_t> rep_count_table(const BaseSet& base,
                                                  std::uint32_t n,
                                                  std::uint64_t k_max,
                                                  const Caps& caps = {}) {
    if (n < 1) throw RangeError("representation order must be >= 1");
    if (k_max > caps.rep_limit)
        throw CapacityError("representation table for k <= " +
                            std::to_string(k_max) + " exceeds cap " +
                            std::to_string(caps.rep_limit));
    if (n >= 15) // counts are kept in 64-bit words; the bound outgrows them
        throw CapacityError("representation counts for n >= 15 overflow the table");
    const auto elems = base.enumerate(k_max);
    std::vector<std::uint64_t> counts(k_max + 1, 0);
    for (std::uint64_t s : elems) counts[s] = 1;
    std::vector<std::uint64_t> next(k_max + 1);
    for (std::uint32_t round = 2; round <= n; ++round) {
        std::fill(next.begin(), next.end(), 0);
        for (std::uint64_t s : elems)
            for (std::uint64_t k = s; k <= k_max; ++k)
                next[k] += counts[k - s];
        counts.swap(next);
    }
    return counts;
}

/// c_n(k) for a single k.
inline std::uint64_t rep_count(const BaseSet& base, std::uint32_t n,
                               std::uint64_t k, const Caps& caps = {}) {
    return rep_count_table(base, n, k, caps)[k];
}

/// Canonical uniform bound on c_n: b_1 = 1 and
/// b_n = ceil(n * b_{n-1} * (1 + log2 n)), with the ceiling taken of the
/// true real value (directed rounding, never an undershoot).
inline mpz_class rep_bound(std::uint32_t n) {
    if (n < 1) throw RangeError("rep_bound needs n >= 1");
    mpz_class b = 1;
    for (std::uint32_t i = 2; i <= n; ++i) {
        const mpz_class m = mpz_class(static_cast<unsigned long>(i)) * b;
        if (std::has_single_bit(std::uint64_t{i})) {
            b = m * (1 + floor_log2_u64(i));
        } else {
            b = m + ceil_mul_log2(m, i); // ceil(m + m log2 i), m integral
        }
    }
    return b;
}

struct RepViolation {
    std::uint64_t k;
    std::uint64_t count;
};

struct RepReport {
    bool pass = true;
    std::uint32_t n = 0;
    std::uint64_t checked = 0;
    mpz_class bound;
    std::uint64_t empirical_max = 0;
    std::uint64_t argmax = 0;
    std::optional<RepViolation> first_violation;
};

/// Sweeps c_n(k) <= rep_bound(n) for 1 <= k <= k_max and reports the
/// empirical maximum over the range.
inline RepReport verify_rep_bound(const BaseSet& base, std::uint32_t n,
                                  std::uint64_t k_max, const Caps& caps = {}) {
    RepReport report;
    report.n = n;
    report.bound = rep_bound(n);
    const auto counts = rep_count_table(base, n, k_max, caps);
    for (std::uint64_t k = 1; k <= k_max; ++k) {
        ++report.checked;
        if (counts[k] > report.empirical_max) {
            report.empirical_max = counts[k];
            report.argmax = k;
        }
        if (report.bound < counts[k] && !report.first_violation) {
            report.pass = false;
            report.first_violation = RepViolation{k, counts[k]};
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Gap witnesses
// ---------------------------------------------------------------------------

/// Two consecutive sumset elements separated by more than `threshold`.
struct GapWitness {
    std::uint32_t n;
    std::uint64_t threshold;
    std::uint64_t k;
    std::uint64_t k_next;
};

/// Finds the first (smallest k) pair of consecutive order-n sumset elements
/// with gap > threshold, extending the enumeration limit by doubling. The
/// density bound guarantees such a pair exists; the cap decides whether we
/// reach it.
inline GapWitness find_gap(const BaseSet& base, std::uint32_t n,
                           std::uint64_t threshold, const Caps& caps = {}) {
    if (n < 1 || threshold < 1)
        throw RangeError("find_gap needs n >= 1 and threshold >= 1");
    std::uint64_t limit = 16;
    while (true) {
        const SumsetTable table = build_sumset(base, n, limit, caps);
        const auto& elems = table.elements();
        for (std::size_t i = 0; i + 1 < elems.size(); ++i)
            if (elems[i + 1] - elems[i] > threshold)
                return GapWitness{n, threshold, elems[i], elems[i + 1]};
        if (limit >= caps.sumset_limit)
            throw CapacityError("no gap > " + std::to_string(threshold) +
                                " within sumset cap " +
                                std::to_string(caps.sumset_limit) +
                                "; a larger cap will succeed");
        limit = std::min(caps.sumset_limit, limit * 2);
    }
}

} // namespace nullring
