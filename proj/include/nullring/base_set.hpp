#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "nullring/errors.hpp"
#include "nullring/numeric.hpp"

namespace nullring {

/// The exponent set the whole construction is indexed by: {0} followed by a
/// strictly increasing sequence of positive integers. The default is
/// {0, 1, 2, 4, 8, ...}; generalized sets must keep fewer than
/// `log_density_bound` elements per binary-log unit interval, which is
/// what keeps the sumset counting function polylogarithmic.
class BaseSet {
public:
    enum class Kind { PowersOfTwo, Geometric, ExplicitList };

    /// {0} u {2^j : j >= 0}.
    static BaseSet powers_of_two() {
        BaseSet b;
        b.kind_ = Kind::PowersOfTwo;
        b.ratio_ = 2;
        b.log_density_bound_ = 2.0;
        return b;
    }

    /// {0} u {ratio^j : j >= 0} for an integer ratio >= 2.
    static BaseSet geometric(std::uint64_t ratio, double log_density_bound = 2.0) {
        if (ratio < 2) throw InvalidBaseError("geometric base needs ratio >= 2");
        BaseSet b;
        b.kind_ = ratio == 2 ? Kind::PowersOfTwo : Kind::Geometric;
        b.ratio_ = ratio;
        b.log_density_bound_ = log_density_bound;
        return b;
    }

    /// A complete finite base given by an explicit list. Must start at 0
    /// and be strictly increasing.
    static BaseSet explicit_list(std::vector<std::uint64_t> elements,
                                 double log_density_bound) {
        if (elements.empty() || elements.front() != 0)
            throw InvalidBaseError("base set must contain 0 as its first element");
        for (std::size_t i = 1; i < elements.size(); ++i)
            if (elements[i] <= elements[i - 1])
                throw InvalidBaseError("base set must be strictly increasing");
        if (log_density_bound <= 0)
            throw InvalidBaseError("log_density_bound must be positive");
        BaseSet b;
        b.kind_ = Kind::ExplicitList;
        b.elements_ = std::move(elements);
        b.log_density_bound_ = log_density_bound;
        return b;
    }

    Kind kind() const { return kind_; }
    bool is_default() const { return kind_ == Kind::PowersOfTwo; }
    double log_density_bound() const { return log_density_bound_; }

    /// All base elements <= limit, sorted ascending.
    std::vector<std::uint64_t> enumerate(std::uint64_t limit) const {
        std::vector<std::uint64_t> out;
        switch (kind_) {
        case Kind::PowersOfTwo:
        case Kind::Geometric: {
            out.push_back(0);
            std::uint64_t p = 1;
            while (p <= limit) {
                out.push_back(p);
                if (p > limit / ratio_) break;
                p *= ratio_;
            }
            break;
        }
        case Kind::ExplicitList: {
            // Explicit lists are complete finite bases, so any limit is fine.
            for (std::uint64_t e : elements_) {
                if (e > limit) break;
                out.push_back(e);
            }
            break;
        }
        }
        return out;
    }

    bool contains(std::uint64_t k) const {
        switch (kind_) {
        case Kind::PowersOfTwo:
            return k == 0 || std::has_single_bit(k);
        case Kind::Geometric: {
            if (k == 0 || k == 1) return true;
            std::uint64_t p = 1;
            while (p < k && p <= k / ratio_) p *= ratio_;
            return p == k;
        }
        case Kind::ExplicitList:
            return std::binary_search(elements_.begin(), elements_.end(), k);
        }
        return false;
    }

    /// Checks the log-density condition on [0, limit]: every interval
    /// [m, m+1) of log2 holds fewer than log_density_bound positive
    /// elements. Runs at table-build time for generalized bases.
    void check_log_density(std::uint64_t limit) const {
        const auto elems = enumerate(limit);
        std::vector<std::uint64_t> bin_count;
        for (std::uint64_t e : elems) {
            if (e == 0) continue;
            const std::uint64_t bin = floor_log2_u64(e);
            if (bin >= bin_count.size()) bin_count.resize(bin + 1, 0);
            if (static_cast<double>(++bin_count[bin]) >= log_density_bound_)
                throw InvalidBaseError(
                    "log-density bound " + std::to_string(log_density_bound_) +
                    " violated on [2^" + std::to_string(bin) + ", 2^" +
                    std::to_string(bin + 1) + ")");
        }
    }

private:
    BaseSet() = default;

    Kind kind_ = Kind::PowersOfTwo;
    std::uint64_t ratio_ = 2;
    double log_density_bound_ = 2.0;
    std::vector<std::uint64_t> elements_;
};

/// Convenience wrapper matching the library-wide free-function style.
inline std::vector<std::uint64_t> enumerate_base(const BaseSet& base,
                                                 std::uint64_t limit) {
    return base.enumerate(limit);
}

} // namespace nullring
