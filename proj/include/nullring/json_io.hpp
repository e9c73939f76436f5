#pragma once

#include <charconv>
#include <string>

#include <json.hpp>

#include "nullring/dimension.hpp"
#include "nullring/dyadic.hpp"
#include "nullring/errors.hpp"
#include "nullring/expansion.hpp"
#include "nullring/ring.hpp"
#include "nullring/sumset.hpp"

namespace nullring {

using json = nlohmann::json;

namespace detail {

inline std::int64_t to_json_int(const mpz_class& v, const char* what) {
    if (!v.fits_slong_p())
        throw CapacityError(std::string(what) + " does not fit a JSON integer");
    return v.get_si();
}

inline std::uint64_t parse_position_key(const std::string& key) {
    std::uint64_t pos = 0;
    const auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), pos);
    if (ec != std::errc{} || ptr != key.data() + key.size())
        throw ValidationError("bad digit position key '" + key + "'");
    return pos;
}

} // namespace detail

/// Wire format of an element: {"n": <int>, "t": <int>, "digits":
/// {"<position>": <int>, ...}}. Unknown fields are rejected.
inline json element_to_json(const RingElement& x) {
    json digits = json::object();
    for (const auto& [pos, digit] : x.digits())
        digits[std::to_string(pos)] = detail::to_json_int(digit, "digit");
    return json{{"n", x.profile().n},
                {"t", detail::to_json_int(x.profile().t, "profile bound t")},
                {"digits", std::move(digits)}};
}

inline RingElement element_from_json(const json& j,
                                     const BaseSet& base = BaseSet::powers_of_two(),
                                     const Caps& caps = {}) {
    if (!j.is_object()) throw ValidationError("element JSON must be an object");
    for (const auto& [key, value] : j.items())
        if (key != "n" && key != "t" && key != "digits")
            throw ValidationError("unknown element field '" + key + "'");
    if (!j.contains("n") || !j.contains("t") || !j.contains("digits"))
        throw ValidationError("element JSON needs fields n, t, digits");
    if (!j["n"].is_number_integer() || !j["t"].is_number_integer())
        throw ValidationError("element fields n and t must be integers");
    const std::int64_t n = j["n"].get<std::int64_t>();
    const std::int64_t t = j["t"].get<std::int64_t>();
    if (n < 1 || t < 1) throw ValidationError("element needs n >= 1 and t >= 1");
    if (!j["digits"].is_object())
        throw ValidationError("element digits must be an object");
    RingElement::DigitMap digits;
    for (const auto& [key, value] : j["digits"].items()) {
        if (!value.is_number_integer())
            throw ValidationError("digit at position " + key +
                                  " must be a decimal integer");
        digits.emplace(detail::parse_position_key(key),
                       mpz_class(static_cast<long>(value.get<std::int64_t>())));
    }
    return make_element(Profile(static_cast<std::uint32_t>(n), mpz_class(static_cast<long>(t))),
                        std::move(digits), base, caps);
}

inline json dyadic_to_json(const DyadicRational& d) {
    return json{{"num", d.num.get_str()},
                {"exp2", d.exp2},
                {"value", d.str()}};
}

inline json gap_to_json(const GapWitness& g) {
    return json{{"n", g.n},
                {"threshold", g.threshold},
                {"k", g.k},
                {"k_next", g.k_next},
                {"gap", g.k_next - g.k}};
}

inline json run_to_json(const RunWitness& w) {
    return json{{"start", w.start},
                {"length", w.length},
                {"digit", w.digit},
                {"gap", json::array({w.gap_k, w.gap_k_next})}};
}

inline json density_report_to_json(const DensityReport& r) {
    json j{{"lemma", "density"},
           {"pass", r.pass},
           {"checked", r.checked},
           {"default_base", r.default_base}};
    if (r.first_violation)
        j["first_violation"] = json{{"n", r.first_violation->n},
                                    {"ell", r.first_violation->ell},
                                    {"actual", r.first_violation->actual.get_str()},
                                    {"bound", r.first_violation->bound.get_str()}};
    return j;
}

inline json rep_report_to_json(const RepReport& r) {
    json j{{"lemma", "reps"},
           {"pass", r.pass},
           {"n", r.n},
           {"checked", r.checked},
           {"bound", r.bound.get_str()},
           {"empirical_max", r.empirical_max},
           {"argmax", r.argmax}};
    if (r.first_violation)
        j["first_violation"] = json{{"k", r.first_violation->k},
                                    {"count", r.first_violation->count}};
    return j;
}

inline json certificate_to_json(const CoverCertificate& c) {
    json j{{"n", c.n},
           {"t", detail::to_json_int(c.t, "certificate t")},
           {"s", rational_str(c.s)},
           {"ell", c.ell},
           {"c_ell", c.c_ell},
           {"radius", c.t.get_str() + "/2^" + std::to_string(c.ell)},
           {"hs_bound_upper", rational_str(c.hs_bound_upper)},
           {"hs_exact", c.hs_exact},
           {"epsilon", rational_str(c.epsilon)}};
    if (c.center_bound)
        j["center_bound"] = c.center_bound->get_str();
    else
        j["center_bound"] = "log2=" + std::to_string(c.center_bound_log2);
    return j;
}

inline json cover_check_to_json(const CoverCheckReport& r) {
    json j{{"pass", r.pass},
           {"samples", r.samples},
           {"radius", rational_str(r.radius)},
           {"max_distance", rational_str(r.max_distance)}};
    if (r.first_failure)
        j["first_failure"] = json{{"sample", r.first_failure->sample},
                                  {"distance", rational_str(r.first_failure->distance)}};
    return j;
}

inline json digits_to_json(const BinaryDigits& d) {
    if (!d.determinate)
        return json{{"determinate", false}, {"refinements_used", d.refinements_used}};
    return json{{"determinate", true},
                {"integer_part", d.integer_part.get_str()},
                {"fraction", d.fraction},
                {"display", d.integer_part.get_str() + "." + d.fraction},
                {"refinements_used", d.refinements_used}};
}

inline json expansion_to_json(const PeriodicExpansion& e) {
    return json{{"value", rational_str(e.value)},
                {"preperiod", e.preperiod},
                {"period", e.period},
                {"max_run", e.max_run},
                {"finite", e.finite}};
}

inline json verdict_to_json(const MembershipVerdict& v) {
    json j{{"verdict", v.member_dyadic ? "member-dyadic" : "excluded-by-runs"}};
    if (v.embed) j["embed"] = element_to_json(*v.embed);
    if (v.expansion) {
        j["expansion"] = expansion_to_json(*v.expansion);
        j["max_run"] = v.expansion->max_run;
    }
    return j;
}

/// Exact decimal rendering of 2^-j (it terminates with j digits).
inline std::string pow2_neg_decimal(std::uint32_t j) {
    mpz_class five;
    mpz_ui_pow_ui(five.get_mpz_t(), 5, j);
    std::string digits = five.get_str();
    return "0." + std::string(j - digits.size(), '0') + digits;
}

inline std::string box_series_to_csv(const BoxCountSeries& s) {
    std::string out = "j,delta,N,ratio\n";
    char ratio[32];
    for (const BoxCountRow& row : s.rows) {
        std::snprintf(ratio, sizeof ratio, "%.6f", row.ratio);
        out += std::to_string(row.j) + "," + pow2_neg_decimal(row.j) + "," +
               std::to_string(row.count) + "," + ratio + "\n";
    }
    return out;
}

inline json box_series_to_json(const BoxCountSeries& s) {
    json rows = json::array();
    for (const BoxCountRow& row : s.rows)
        rows.push_back(json{{"j", row.j},
                            {"delta", pow2_neg_decimal(row.j)},
                            {"N", row.count},
                            {"ratio", row.ratio}});
    return json{{"n", s.n},
                {"t", detail::to_json_int(s.t, "box count t")},
                {"depth", s.depth},
                {"rows", std::move(rows)}};
}

} // namespace nullring
