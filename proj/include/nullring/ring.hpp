#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <gmpxx.h>

#include "nullring/base_set.hpp"
#include "nullring/caps.hpp"
#include "nullring/dyadic.hpp"
#include "nullring/errors.hpp"
#include "nullring/prng.hpp"
#include "nullring/sumset.hpp"

namespace nullring {

/// Which digit-bounded class an element lives in: digit positions range
/// over the order-n sumset and every digit is an integer in [-t, t].
/// Profiles produced by the arithmetic are certificates derived from proven
/// bounds, not observed minima.
struct Profile {
    std::uint32_t n = 1;
    mpz_class t = 1;

    Profile() = default;
    Profile(std::uint32_t order, mpz_class bound) : n(order), t(std::move(bound)) {
        if (n < 1 || t < 1)
            throw ValidationError("profile needs n >= 1 and t >= 1");
    }

    friend bool operator==(const Profile& a, const Profile& b) {
        return a.n == b.n && a.t == b.t;
    }
};

/// A finite-support element: a sorted position -> digit map representing
/// the exact value sum(digit_k / 2^k). Explicit zero digits are kept as
/// given so serialization round-trips digit for digit.
class RingElement {
public:
    using DigitMap = std::map<std::uint64_t, mpz_class>;

    RingElement() = default;
    RingElement(Profile profile, DigitMap digits)
        : profile_(std::move(profile)), digits_(std::move(digits)) {}

    const Profile& profile() const { return profile_; }
    const DigitMap& digits() const { return digits_; }

    std::uint64_t max_position() const {
        return digits_.empty() ? 0 : digits_.rbegin()->first;
    }

    friend bool operator==(const RingElement& a, const RingElement& b) {
        return a.profile_ == b.profile_ && a.digits_ == b.digits_;
    }

private:
    Profile profile_;
    DigitMap digits_;
};

/// Validates and builds an element: every support position must lie in the
/// order-n sumset of `base` and every digit in [-t, t].
inline RingElement make_element(const Profile& profile,
                                RingElement::DigitMap digits,
                                const BaseSet& base = BaseSet::powers_of_two(),
                                const Caps& caps = {}) {
    if (!digits.empty()) {
        const std::uint64_t max_pos = digits.rbegin()->first;
        const SumsetTable table = build_sumset(base, profile.n, max_pos, caps);
        for (const auto& [pos, digit] : digits) {
            if (!table.contains(pos))
                throw ValidationError("position " + std::to_string(pos) +
                                      " is not in the order-" +
                                      std::to_string(profile.n) + " sumset");
            if (abs(digit) > profile.t)
                throw ValidationError("digit " + digit.get_str() + " at position " +
                                      std::to_string(pos) + " exceeds bound t = " +
                                      profile.t.get_str());
        }
    }
    return RingElement(profile, std::move(digits));
}

/// Exact value as a reduced dyadic rational.
inline DyadicRational value_exact(const RingElement& x) {
    const std::uint64_t scale = x.max_position();
    mpz_class num = 0;
    for (const auto& [pos, digit] : x.digits())
        num += digit << static_cast<mp_bitcnt_t>(scale - pos);
    return DyadicRational::make(std::move(num), scale);
}

/// Digit-wise sum. The result lives in the larger-order class with digit
/// bound t_x + t_y; cancelled digits are dropped.
inline RingElement add(const RingElement& x, const RingElement& y) {
    Profile profile(std::max(x.profile().n, y.profile().n),
                    x.profile().t + y.profile().t);
    RingElement::DigitMap digits = x.digits();
    for (const auto& [pos, digit] : y.digits()) {
        auto [it, inserted] = digits.emplace(pos, digit);
        if (!inserted) it->second += digit;
    }
    std::erase_if(digits, [](const auto& kv) { return kv.second == 0; });
    return RingElement(std::move(profile), std::move(digits));
}

/// Digit-wise negation; profile unchanged.
inline RingElement neg(const RingElement& x) {
    RingElement::DigitMap digits = x.digits();
    for (auto& [pos, digit] : digits) digit = -digit;
    return RingElement(x.profile(), std::move(digits));
}

/// Digit convolution: z_r = sum over k + l = r of x_k * y_l. The result
/// order is the sum of the orders and its declared digit bound is the
/// provable rep_bound(n_x + n_y) * t_x * t_y; each convolved digit is
/// checked against it.
inline RingElement mul(const RingElement& x, const RingElement& y,
                       const Caps& caps = {}) {
    const std::uint32_t n = x.profile().n + y.profile().n;
    const mpz_class bound = rep_bound(n) * x.profile().t * y.profile().t;
    Profile profile(n, bound);

    const std::uint64_t pairs =
        static_cast<std::uint64_t>(x.digits().size()) * y.digits().size();
    if (pairs > caps.enumeration)
        throw CapacityError("convolution support of " + std::to_string(pairs) +
                            " pairs exceeds cap " + std::to_string(caps.enumeration));

    RingElement::DigitMap digits;
    for (const auto& [k, xk] : x.digits())
        for (const auto& [l, yl] : y.digits())
            digits[k + l] += xk * yl;
    std::erase_if(digits, [](const auto& kv) { return kv.second == 0; });
    for (const auto& [pos, digit] : digits)
        if (abs(digit) > bound)
            throw CertificationError("convolved digit at position " +
                                     std::to_string(pos) +
                                     " exceeds its provable bound");
    return RingElement(std::move(profile), std::move(digits));
}

/// Embeds a/2^k as a finite element over the default base: after reducing
/// the fraction, the whole numerator lands on the smallest base position
/// s >= k, scaled by 2^(s-k); the digit bound is its magnitude.
inline RingElement dyadic_embed(mpz_class a, std::uint64_t k) {
    DyadicRational value = DyadicRational::make(std::move(a), k);
    if (value.num == 0)
        return RingElement(Profile(1, 1), {});
    const std::uint64_t pos =
        value.exp2 <= 1 ? value.exp2 : std::bit_ceil(value.exp2);
    const mpz_class digit = value.num << static_cast<mp_bitcnt_t>(pos - value.exp2);
    Profile profile(1, abs(digit));
    return RingElement(std::move(profile), {{pos, digit}});
}

// ---------------------------------------------------------------------------
// Rule-generated streams
// ---------------------------------------------------------------------------

/// Every position carries the same digit.
struct ConstantRule {
    mpz_class digit;
};

/// Digits repeat a fixed pattern along the enumeration order of the sumset.
struct CyclicRule {
    std::vector<mpz_class> pattern;
};

/// Digits drawn uniformly from [-t, t], a pure function of (seed, index).
struct SeededUniformRule {
    std::uint64_t seed = 0;
};

using StreamRule = std::variant<ConstantRule, CyclicRule, SeededUniformRule>;

/// An infinite-support element given by a total digit rule over the
/// enumeration order of its sumset. Streams are consumed through truncation
/// (every truncation error is bounded by t / 2^ell).
class DigitStream {
public:
    DigitStream(Profile profile, StreamRule rule,
                BaseSet base = BaseSet::powers_of_two())
        : profile_(std::move(profile)), rule_(std::move(rule)), base_(std::move(base)) {
        if (const auto* c = std::get_if<ConstantRule>(&rule_)) {
            if (abs(c->digit) > profile_.t)
                throw ValidationError("constant digit exceeds bound t");
        } else if (const auto* cy = std::get_if<CyclicRule>(&rule_)) {
            if (cy->pattern.empty())
                throw ValidationError("cyclic rule needs a non-empty pattern");
            for (const auto& d : cy->pattern)
                if (abs(d) > profile_.t)
                    throw ValidationError("cyclic digit exceeds bound t");
        } else {
            if (profile_.t > std::numeric_limits<std::uint32_t>::max())
                throw CapacityError("seeded-uniform rule needs t < 2^32");
        }
    }

    const Profile& profile() const { return profile_; }
    const BaseSet& base() const { return base_; }
    const StreamRule& rule() const { return rule_; }

    /// Digit at the position with the given rank in the sumset enumeration.
    mpz_class digit_at(std::uint64_t index) const {
        if (const auto* c = std::get_if<ConstantRule>(&rule_))
            return c->digit;
        if (const auto* cy = std::get_if<CyclicRule>(&rule_))
            return cy->pattern[index % cy->pattern.size()];
        const auto& u = std::get<SeededUniformRule>(rule_);
        return mpz_class(static_cast<long>(
            indexed_digit(u.seed, index, profile_.t.get_ui())));
    }

    /// True when every digit is zero by rule, i.e. the stream's value is
    /// exactly 0 and all truncation tails vanish.
    bool exactly_zero() const {
        if (const auto* c = std::get_if<ConstantRule>(&rule_))
            return c->digit == 0;
        if (const auto* cy = std::get_if<CyclicRule>(&rule_))
            return std::all_of(cy->pattern.begin(), cy->pattern.end(),
                               [](const mpz_class& d) { return d == 0; });
        return false;
    }

    /// Finite element carrying the stream digits at positions <= ell.
    RingElement head(std::uint64_t ell, const Caps& caps = {}) const {
        const SumsetTable table = build_sumset(base_, profile_.n, ell, caps);
        RingElement::DigitMap digits;
        for (std::size_t i = 0; i < table.elements().size(); ++i) {
            mpz_class d = digit_at(i);
            if (d != 0) digits.emplace(table.elements()[i], std::move(d));
        }
        return RingElement(profile_, std::move(digits));
    }

    /// The first `count` positions of the enumeration order.
    std::vector<std::uint64_t> first_positions(std::uint64_t count,
                                               const Caps& caps = {}) const {
        std::vector<std::uint64_t> positions;
        std::uint64_t limit = 16;
        while (true) {
            const SumsetTable table = build_sumset(base_, profile_.n, limit, caps);
            if (table.elements().size() >= count) {
                positions.assign(table.elements().begin(),
                                 table.elements().begin() + count);
                return positions;
            }
            if (limit >= caps.sumset_limit)
                throw CapacityError("stream prefix of " + std::to_string(count) +
                                    " positions exceeds the sumset cap");
            limit = std::min(caps.sumset_limit, limit * 2);
        }
    }

private:
    Profile profile_;
    StreamRule rule_;
    BaseSet base_;
};

/// Materializes the first `count` (position, digit) pairs of a stream.
inline std::vector<std::pair<std::uint64_t, mpz_class>>
sample_stream(const DigitStream& stream, std::uint64_t count, const Caps& caps = {}) {
    std::vector<std::pair<std::uint64_t, mpz_class>> out;
    if (count == 0) return out;
    const auto positions = stream.first_positions(count, caps);
    out.reserve(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i)
        out.emplace_back(positions[i], stream.digit_at(i));
    return out;
}

/// Seeded random finite element, used by randomized verification sweeps.
/// Digits are nonzero and uniform over +-[1, t]; positions are a random
/// subset of the order-n sumset cut at max_position.
inline RingElement random_element(SplitMix64& rng, std::uint32_t n,
                                  std::uint64_t t, std::uint64_t max_support,
                                  std::uint64_t max_position,
                                  const BaseSet& base = BaseSet::powers_of_two(),
                                  const Caps& caps = {}) {
    const SumsetTable table = build_sumset(base, n, max_position, caps);
    const std::uint64_t available = table.elements().size();
    const std::uint64_t support =
        rng.next_below(std::min(max_support, available) + 1);
    std::set<std::uint64_t> picked;
    while (picked.size() < support)
        picked.insert(table.elements()[rng.next_below(available)]);
    RingElement::DigitMap digits;
    for (std::uint64_t pos : picked) {
        const std::int64_t magnitude = static_cast<std::int64_t>(rng.next_below(t)) + 1;
        const bool negative = rng.next_below(2) == 1;
        digits.emplace(pos, mpz_class(static_cast<long>(negative ? -magnitude : magnitude)));
    }
    return RingElement(Profile(n, mpz_class(static_cast<unsigned long>(t))),
                       std::move(digits));
}

} // namespace nullring
