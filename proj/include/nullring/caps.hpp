#pragma once

#include <cstdint>
#include <string>

#include "nullring/errors.hpp"

namespace nullring {

/// Resource caps shared by the enumeration and verification routines.
/// All limits are soft in the sense that a caller may raise them; the
/// defaults keep desk-scale runs within a small memory budget.
struct Caps {
    /// Largest admissible sumset enumeration limit (positions live below it).
    std::uint64_t sumset_limit = std::uint64_t{1} << 24;
    /// Largest number of values materialized by an enumeration
    /// (sumset elements, cover centers, convolution support, ...).
    std::uint64_t enumeration = 1'000'000;
    /// Largest k admitted by the representation-count tables.
    std::uint64_t rep_limit = std::uint64_t{1} << 22;
    /// Number of interval-refinement doublings for digit extraction.
    std::uint32_t refine_depth = 20;
};

/// Parses a "key=value,key=value" cap override string, as accepted by the
/// NULLRING_CAPS environment variable. Keys: sumset-limit, enumeration,
/// rep-limit, refine-depth.
inline Caps parse_caps(const std::string& text, Caps caps = {}) {
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find(',', start);
        if (end == std::string::npos) end = text.size();
        const std::string item = text.substr(start, end - start);
        start = end + 1;
        if (item.empty()) continue;
        const std::size_t eq = item.find('=');
        if (eq == std::string::npos)
            throw UsageError("cap override '" + item + "' is not key=value");
        const std::string key = item.substr(0, eq);
        std::uint64_t value = 0;
        try {
            value = std::stoull(item.substr(eq + 1));
        } catch (const std::exception&) {
            throw UsageError("cap override '" + item + "' has a bad number");
        }
        if (key == "sumset-limit") {
            caps.sumset_limit = value;
        } else if (key == "enumeration") {
            caps.enumeration = value;
        } else if (key == "rep-limit") {
            caps.rep_limit = value;
        } else if (key == "refine-depth") {
            caps.refine_depth = static_cast<std::uint32_t>(value);
        } else {
            throw UsageError("unknown cap key '" + key + "'");
        }
    }
    return caps;
}

} // namespace nullring
