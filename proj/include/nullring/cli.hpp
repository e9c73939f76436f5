#pragma once

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "nullring/caps.hpp"
#include "nullring/dimension.hpp"
#include "nullring/errors.hpp"
#include "nullring/expansion.hpp"
#include "nullring/json_io.hpp"
#include "nullring/ring.hpp"
#include "nullring/sumset.hpp"

namespace nullring::cli {

/// Raised when the command line asked for help text; not a failure.
struct HelpRequested {
    std::string text;
};

struct IoOptions {
    std::string out_path;   // empty = stdout
    std::string format;     // json (default), csv, text
};

struct BaseOptions {
    std::string spec = "powers2"; // powers2 | geometric:<r> | list:a,b,c
    double log_density_bound = 2.0;

    BaseSet build() const {
        if (spec == "powers2" || spec == "2") return BaseSet::powers_of_two();
        if (spec.rfind("geometric:", 0) == 0) {
            const std::uint64_t ratio = std::strtoull(spec.c_str() + 10, nullptr, 10);
            return BaseSet::geometric(ratio, log_density_bound);
        }
        if (spec.rfind("list:", 0) == 0) {
            std::vector<std::uint64_t> elems;
            std::stringstream ss(spec.substr(5));
            std::string item;
            while (std::getline(ss, item, ','))
                elems.push_back(std::strtoull(item.c_str(), nullptr, 10));
            return BaseSet::explicit_list(std::move(elems), log_density_bound);
        }
        throw UsageError("unknown base spec '" + spec + "'");
    }
};

struct SumsetCmd {
    std::uint32_t n = 1;
    std::uint64_t limit = 64;
    BaseOptions base;
};

struct VerifyCmd {
    std::string lemma; // density | reps | gaps | closure | cover
    BaseOptions base;
    std::uint32_t n_max = 3;
    std::uint64_t l_max = 1000;
    std::uint32_t n = 2;
    std::uint64_t k_max = 10000;
    std::uint64_t threshold = 10;
    std::uint64_t trials = 200;
    std::uint32_t t_max = 5;
    std::uint64_t support = 12;
    std::uint64_t positions = 64;
    std::uint64_t t = 1;
    std::uint64_t ell = 2;
    std::uint64_t samples = 100;
    std::uint64_t depth = 0;
    std::optional<std::uint64_t> seed;
};

struct ArithCmd {
    std::string op; // add | neg | mul | value
    std::string lhs;
    std::string rhs;
};

struct ExpandCmd {
    std::string element;  // path or inline JSON
    std::string rule;     // const:<d> | cyclic:<d1,d2,...> | uniform
    std::string rational; // p/q for membership analysis
    std::uint32_t n = 1;
    std::uint64_t t = 1;
    std::uint64_t digits = 16;
    std::uint32_t max_refine = 0; // 0 = take the refine-depth cap
    std::optional<std::uint64_t> seed;
};

struct RunsCmd {
    std::string rule = "const:1";
    std::uint32_t n = 1;
    std::uint64_t t = 1;
    std::uint64_t length = 1;
    std::uint32_t max_refine = 0; // 0 = take the refine-depth cap
    std::optional<std::uint64_t> seed;
};

struct CertifyCmd {
    std::uint32_t n = 1;
    std::uint64_t t = 1;
    std::string s = "1";
    std::string eps = "1e-6";
    std::uint64_t ell_cap = std::uint64_t{1} << 20;
    BaseOptions base;
};

struct BoxcountCmd {
    std::uint32_t n = 1;
    std::uint64_t t = 1;
    std::uint32_t j_max = 8;
    std::uint64_t depth = 8;
    BaseOptions base;
};

using Command = std::variant<SumsetCmd, VerifyCmd, ArithCmd, ExpandCmd, RunsCmd,
                             CertifyCmd, BoxcountCmd>;

struct CommandPlan {
    Command command;
    IoOptions io;
    Caps caps;
};

enum class Status { Pass, Fail, Error };

struct Report {
    Status status = Status::Pass;
    json body;
    double timing_ms = 0.0;
    // Arithmetic results written to a file carry the bare element/value
    // payload, so the file feeds straight back into --lhs/--rhs.
    bool payload_file = false;
};

inline int exit_code(Status s) {
    switch (s) {
    case Status::Pass: return 0;
    case Status::Fail: return 1;
    case Status::Error: return 2;
    }
    return 2;
}

inline const char* status_str(Status s) {
    switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::Error: return "error";
    }
    return "error";
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

inline CommandPlan parse(const std::vector<std::string>& argv) {
    CommandPlan plan;
    if (const char* env = std::getenv("NULLRING_CAPS"))
        plan.caps = parse_caps(env);

    CLI::App app{"exact arithmetic and dimension certificates for a "
                 "digit-restricted subring of the reals"};
    app.require_subcommand(1);

    auto add_io = [&](CLI::App* sub) {
        sub->add_option("--out", plan.io.out_path, "write the report to a file");
        sub->add_option("--format", plan.io.format, "json|csv|text");
    };
    auto add_caps = [&](CLI::App* sub) {
        sub->add_option("--cap-sumset-limit", plan.caps.sumset_limit);
        sub->add_option("--cap-enumeration", plan.caps.enumeration);
        sub->add_option("--cap-rep-limit", plan.caps.rep_limit);
        sub->add_option("--cap-refine-depth", plan.caps.refine_depth);
    };
    auto add_base = [&](CLI::App* sub, BaseOptions& base) {
        sub->add_option("--base", base.spec,
                        "powers2 | geometric:<ratio> | list:a,b,c");
        sub->add_option("--log-density-bound", base.log_density_bound);
    };

    SumsetCmd sumset;
    auto* sumset_app = app.add_subcommand("sumset", "enumerate an order-n sumset");
    sumset_app->add_option("--n", sumset.n)->required();
    sumset_app->add_option("--limit", sumset.limit)->required();
    add_base(sumset_app, sumset.base);
    add_io(sumset_app);
    add_caps(sumset_app);

    VerifyCmd verify;
    auto* verify_app = app.add_subcommand("verify", "run a verification sweep");
    verify_app->add_option("--lemma", verify.lemma, "density|reps|gaps|closure|cover")
        ->required();
    verify_app->add_option("--n-max", verify.n_max);
    verify_app->add_option("--l-max", verify.l_max);
    verify_app->add_option("--n", verify.n);
    verify_app->add_option("--k-max", verify.k_max);
    verify_app->add_option("--b", verify.threshold);
    verify_app->add_option("--trials", verify.trials);
    verify_app->add_option("--t-max", verify.t_max);
    verify_app->add_option("--support", verify.support);
    verify_app->add_option("--positions", verify.positions);
    verify_app->add_option("--t", verify.t);
    verify_app->add_option("--l", verify.ell);
    verify_app->add_option("--samples", verify.samples);
    verify_app->add_option("--depth", verify.depth);
    std::uint64_t verify_seed = 0;
    auto* verify_seed_opt = verify_app->add_option("--seed", verify_seed);
    add_base(verify_app, verify.base);
    add_io(verify_app);
    add_caps(verify_app);

    ArithCmd arith;
    auto* arith_app = app.add_subcommand("arith", "arithmetic on JSON elements");
    arith_app->add_option("--op", arith.op, "add|neg|mul|value")->required();
    arith_app->add_option("--lhs", arith.lhs, "element file or inline JSON")->required();
    arith_app->add_option("--rhs", arith.rhs, "element file or inline JSON");
    add_io(arith_app);
    add_caps(arith_app);

    ExpandCmd expand;
    auto* expand_app =
        app.add_subcommand("expand", "certified digits or rational membership");
    expand_app->add_option("--element", expand.element);
    expand_app->add_option("--rule", expand.rule, "const:<d> | cyclic:<...> | uniform");
    expand_app->add_option("--rational", expand.rational, "p/q membership analysis");
    expand_app->add_option("--n", expand.n);
    expand_app->add_option("--t", expand.t);
    expand_app->add_option("--digits", expand.digits);
    expand_app->add_option("--max-refine", expand.max_refine,
                           "refinement doublings (0 = refine-depth cap)");
    std::uint64_t expand_seed = 0;
    auto* expand_seed_opt = expand_app->add_option("--seed", expand_seed);
    add_io(expand_app);
    add_caps(expand_app);

    RunsCmd runs;
    auto* runs_app = app.add_subcommand("runs", "find an equal-digit run witness");
    runs_app->add_option("--rule", runs.rule);
    runs_app->add_option("--n", runs.n);
    runs_app->add_option("--t", runs.t);
    runs_app->add_option("--len", runs.length)->required();
    runs_app->add_option("--max-refine", runs.max_refine,
                         "refinement doublings (0 = refine-depth cap)");
    std::uint64_t runs_seed = 0;
    auto* runs_seed_opt = runs_app->add_option("--seed", runs_seed);
    add_io(runs_app);
    add_caps(runs_app);

    CertifyCmd certify;
    auto* certify_app = app.add_subcommand("certify", "emit a cover certificate");
    certify_app->add_option("--n", certify.n)->required();
    certify_app->add_option("--t", certify.t)->required();
    certify_app->add_option("--s", certify.s)->required();
    certify_app->add_option("--eps", certify.eps)->required();
    certify_app->add_option("--l-cap", certify.ell_cap);
    add_base(certify_app, certify.base);
    add_io(certify_app);
    add_caps(certify_app);

    BoxcountCmd boxcount;
    auto* boxcount_app = app.add_subcommand("boxcount", "empirical box-count series");
    boxcount_app->add_option("--n", boxcount.n)->required();
    boxcount_app->add_option("--t", boxcount.t)->required();
    boxcount_app->add_option("--jmax", boxcount.j_max)->required();
    boxcount_app->add_option("--depth", boxcount.depth)->required();
    add_base(boxcount_app, boxcount.base);
    add_io(boxcount_app);
    add_caps(boxcount_app);

    std::vector<std::string> args(argv.rbegin(), argv.rend()); // CLI11 order
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested{app.help()};
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    // Randomized work never draws ambient entropy: a stream rule of
    // "uniform" must come with its seed.
    auto require_seed = [](const std::string& rule,
                           const std::optional<std::uint64_t>& seed) {
        if (rule == "uniform" && !seed)
            throw UsageError("the uniform rule needs an explicit --seed");
    };
    if (verify_app->parsed()) {
        if (*verify_seed_opt) verify.seed = verify_seed;
        plan.command = verify;
    } else if (sumset_app->parsed()) {
        plan.command = sumset;
    } else if (arith_app->parsed()) {
        plan.command = arith;
    } else if (expand_app->parsed()) {
        if (*expand_seed_opt) expand.seed = expand_seed;
        require_seed(expand.rule, expand.seed);
        plan.command = expand;
    } else if (runs_app->parsed()) {
        if (*runs_seed_opt) runs.seed = runs_seed;
        require_seed(runs.rule, runs.seed);
        plan.command = runs;
    } else if (certify_app->parsed()) {
        plan.command = certify;
    } else {
        plan.command = boxcount;
    }
    return plan;
}

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

namespace detail {

inline json load_element_json(const std::string& source) {
    if (!source.empty() && source.front() == '{')
        return json::parse(source);
    std::ifstream in(source);
    if (!in) throw UsageError("cannot open element file '" + source + "'");
    json j;
    in >> j;
    return j;
}

inline StreamRule parse_rule(const std::string& spec,
                             const std::optional<std::uint64_t>& seed) {
    if (spec.rfind("const", 0) == 0) {
        std::string digit = spec.substr(5);
        if (!digit.empty() && digit.front() == ':') digit.erase(0, 1);
        if (digit.empty()) throw UsageError("const rule needs a digit, e.g. const:1");
        mpz_class d;
        if (d.set_str(digit, 10) != 0)
            throw UsageError("bad const rule digit '" + digit + "'");
        return ConstantRule{std::move(d)};
    }
    if (spec.rfind("cyclic:", 0) == 0) {
        std::vector<mpz_class> pattern;
        std::stringstream ss(spec.substr(7));
        std::string item;
        while (std::getline(ss, item, ',')) {
            mpz_class d;
            if (d.set_str(item, 10) != 0)
                throw UsageError("bad cyclic rule digit '" + item + "'");
            pattern.push_back(std::move(d));
        }
        return CyclicRule{std::move(pattern)};
    }
    if (spec == "uniform") {
        if (!seed)
            throw UsageError("the uniform rule needs an explicit --seed");
        return SeededUniformRule{*seed};
    }
    throw UsageError("unknown stream rule '" + spec + "'");
}

inline std::pair<mpz_class, mpz_class> parse_fraction(const std::string& text) {
    const mpq_class q = parse_rational(text);
    return {mpz_class(q.get_num()), mpz_class(q.get_den())};
}

inline json execute_sumset(const SumsetCmd& cmd, const Caps& caps, Status& status) {
    const SumsetTable table = build_sumset(cmd.base.build(), cmd.n, cmd.limit, caps);
    json elements = json::array();
    for (std::uint64_t e : table.elements()) elements.push_back(e);
    status = Status::Pass;
    return json{{"n", cmd.n},
                {"limit", cmd.limit},
                {"count", table.elements().size()},
                {"elements", std::move(elements)}};
}

inline json execute_verify(const VerifyCmd& cmd, const Caps& caps, Status& status) {
    const BaseSet base = cmd.base.build();
    if (cmd.lemma == "density") {
        const DensityReport report =
            verify_density_bound(base, cmd.n_max, cmd.l_max, caps);
        status = report.pass ? Status::Pass : Status::Fail;
        return density_report_to_json(report);
    }
    if (cmd.lemma == "reps") {
        const RepReport report = verify_rep_bound(base, cmd.n, cmd.k_max, caps);
        status = report.pass ? Status::Pass : Status::Fail;
        return rep_report_to_json(report);
    }
    if (cmd.lemma == "gaps") {
        const GapWitness witness = find_gap(base, cmd.n, cmd.threshold, caps);
        json j = gap_to_json(witness);
        // Independent recheck: nothing between k and k_next represents.
        if (witness.k_next <= caps.rep_limit) {
            const auto counts = rep_count_table(base, cmd.n, witness.k_next, caps);
            bool clean = counts[witness.k] >= 1 && counts[witness.k_next] >= 1;
            for (std::uint64_t m = witness.k + 1; m < witness.k_next && clean; ++m)
                clean = counts[m] == 0;
            j["recheck"] = clean ? "rep-table" : "FAILED";
            status = clean ? Status::Pass : Status::Fail;
        } else {
            j["recheck"] = "skipped-above-rep-cap";
            status = Status::Pass;
        }
        return j;
    }
    if (cmd.lemma == "closure") {
        if (!cmd.seed) throw UsageError("verify --lemma closure needs --seed");
        SplitMix64 rng(*cmd.seed);
        std::uint64_t failures = 0;
        for (std::uint64_t i = 0; i < cmd.trials; ++i) {
            const std::uint32_t nx = 1 + static_cast<std::uint32_t>(rng.next_below(cmd.n_max));
            const std::uint32_t ny = 1 + static_cast<std::uint32_t>(rng.next_below(cmd.n_max));
            const std::uint64_t tx = 1 + rng.next_below(cmd.t_max);
            const std::uint64_t ty = 1 + rng.next_below(cmd.t_max);
            const RingElement x =
                random_element(rng, nx, tx, cmd.support, cmd.positions, base, caps);
            const RingElement y =
                random_element(rng, ny, ty, cmd.support, cmd.positions, base, caps);
            const mpq_class vx = value_exact(x).to_rational();
            const mpq_class vy = value_exact(y).to_rational();
            const RingElement sum = add(x, y);
            const RingElement prod = mul(x, y, caps);
            bool ok = value_exact(sum).to_rational() == vx + vy;
            ok = ok && value_exact(prod).to_rational() == vx * vy;
            const mpz_class digit_bound =
                rep_bound(x.profile().n + y.profile().n) * x.profile().t * y.profile().t;
            for (const auto& [pos, digit] : prod.digits())
                ok = ok && abs(digit) <= digit_bound;
            if (!ok) ++failures;
        }
        status = failures == 0 ? Status::Pass : Status::Fail;
        return json{{"lemma", "closure"},
                    {"trials", cmd.trials},
                    {"failures", failures},
                    {"seed", *cmd.seed}};
    }
    if (cmd.lemma == "cover") {
        if (!cmd.seed) throw UsageError("verify --lemma cover needs --seed");
        const CoverCheckReport report =
            cover_check(base, cmd.n, mpz_class(static_cast<unsigned long>(cmd.t)),
                        cmd.ell, cmd.samples, *cmd.seed, cmd.depth, caps);
        status = report.pass ? Status::Pass : Status::Fail;
        json j = cover_check_to_json(report);
        j["seed"] = *cmd.seed;
        return j;
    }
    throw UsageError("unknown lemma '" + cmd.lemma +
                     "' (expected density|reps|gaps|closure|cover)");
}

inline json execute_arith(const ArithCmd& cmd, const Caps& caps, Status& status) {
    const RingElement lhs = element_from_json(load_element_json(cmd.lhs),
                                              BaseSet::powers_of_two(), caps);
    status = Status::Pass;
    if (cmd.op == "value") return dyadic_to_json(value_exact(lhs));
    if (cmd.op == "neg") return element_to_json(neg(lhs));
    if (cmd.op == "add" || cmd.op == "mul") {
        if (cmd.rhs.empty())
            throw UsageError("arith --op " + cmd.op + " needs --rhs");
        const RingElement rhs = element_from_json(load_element_json(cmd.rhs),
                                                  BaseSet::powers_of_two(), caps);
        return element_to_json(cmd.op == "add" ? add(lhs, rhs) : mul(lhs, rhs, caps));
    }
    throw UsageError("unknown arith op '" + cmd.op + "' (expected add|neg|mul|value)");
}

inline json execute_expand(const ExpandCmd& cmd, const Caps& caps, Status& status) {
    status = Status::Pass;
    if (!cmd.rational.empty()) {
        const auto [p, q] = parse_fraction(cmd.rational);
        const MembershipVerdict verdict = membership_verdict(p, q, caps);
        return verdict_to_json(verdict);
    }
    if (!cmd.element.empty()) {
        const RingElement x = element_from_json(load_element_json(cmd.element),
                                                BaseSet::powers_of_two(), caps);
        json j = digits_to_json(binary_digits(x, cmd.digits));
        j["source"] = "element";
        return j;
    }
    if (!cmd.rule.empty()) {
        const DigitStream stream(
            Profile(cmd.n, mpz_class(static_cast<unsigned long>(cmd.t))),
            parse_rule(cmd.rule, cmd.seed));
        const std::uint32_t refine =
            cmd.max_refine > 0 ? cmd.max_refine : caps.refine_depth;
        json j = digits_to_json(binary_digits(stream, cmd.digits, refine, caps));
        j["source"] = "stream";
        return j;
    }
    throw UsageError("expand needs one of --rational, --element, --rule");
}

inline json execute_runs(const RunsCmd& cmd, const Caps& caps, Status& status) {
    const DigitStream stream(
        Profile(cmd.n, mpz_class(static_cast<unsigned long>(cmd.t))),
        parse_rule(cmd.rule, cmd.seed));
    const std::uint32_t refine =
        cmd.max_refine > 0 ? cmd.max_refine : caps.refine_depth;
    const RunWitness witness = find_run(stream, cmd.length, refine, caps);
    status = Status::Pass;
    return run_to_json(witness);
}

inline json execute_certify(const CertifyCmd& cmd, const Caps& caps, Status& status) {
    const mpq_class s = parse_rational(cmd.s);
    const mpq_class eps = parse_rational(cmd.eps);
    const CoverCertificate cert =
        certify(cmd.base.build(), cmd.n, mpz_class(static_cast<unsigned long>(cmd.t)),
                s, eps, cmd.ell_cap, caps);
    status = Status::Pass;
    return certificate_to_json(cert);
}

inline json execute_boxcount(const BoxcountCmd& cmd, const Caps& caps, Status& status,
                             std::string& csv) {
    const BoxCountSeries series =
        box_count(cmd.base.build(), cmd.n, mpz_class(static_cast<unsigned long>(cmd.t)),
                  cmd.j_max, cmd.depth, caps);
    status = Status::Pass;
    csv = box_series_to_csv(series);
    return box_series_to_json(series);
}

} // namespace detail

/// Runs a parsed plan. Input and capacity faults surface as status=error;
/// verification mismatches as status=fail.
inline Report execute(const CommandPlan& plan) {
    Report report;
    const auto start = std::chrono::steady_clock::now();
    try {
        std::string csv;
        report.body = std::visit(
            [&](const auto& cmd) -> json {
                using T = std::decay_t<decltype(cmd)>;
                if constexpr (std::is_same_v<T, SumsetCmd>)
                    return detail::execute_sumset(cmd, plan.caps, report.status);
                else if constexpr (std::is_same_v<T, VerifyCmd>)
                    return detail::execute_verify(cmd, plan.caps, report.status);
                else if constexpr (std::is_same_v<T, ArithCmd>) {
                    report.payload_file = true;
                    return detail::execute_arith(cmd, plan.caps, report.status);
                }
                else if constexpr (std::is_same_v<T, ExpandCmd>)
                    return detail::execute_expand(cmd, plan.caps, report.status);
                else if constexpr (std::is_same_v<T, RunsCmd>)
                    return detail::execute_runs(cmd, plan.caps, report.status);
                else if constexpr (std::is_same_v<T, CertifyCmd>)
                    return detail::execute_certify(cmd, plan.caps, report.status);
                else
                    return detail::execute_boxcount(cmd, plan.caps, report.status, csv);
            },
            plan.command);
        if (!csv.empty()) report.body["csv"] = csv;
    } catch (const UsageError&) {
        throw;
    } catch (const CertificationError& e) {
        report.status = Status::Error;
        report.body = json{{"error", e.what()}, {"kind", "internal-certification"}};
    } catch (const Error& e) {
        report.status = Status::Error;
        report.body = json{{"error", e.what()}};
    }
    const auto end = std::chrono::steady_clock::now();
    report.timing_ms =
        std::chrono::duration<double, std::milli>(end - start).count();
    return report;
}

/// Renders a report in the requested format. The body is deterministic for
/// fixed inputs and seeds; timing is carried outside it.
inline std::string render(const Report& report, const IoOptions& io) {
    // Box-count series are natively CSV; everything else defaults to JSON.
    const std::string format =
        !io.format.empty() ? io.format
                           : (report.body.contains("csv") ? std::string("csv")
                                                          : std::string("json"));
    if (format == "json") {
        json out{{"status", status_str(report.status)},
                 {"body", report.body},
                 {"timing_ms", report.timing_ms}};
        return out.dump(2) + "\n";
    }
    if (format == "csv") {
        if (!report.body.contains("csv"))
            throw UsageError("csv format is only available for boxcount reports");
        return report.body["csv"].get<std::string>();
    }
    if (format == "text") {
        std::string out = std::string("status: ") + status_str(report.status) + "\n";
        for (const auto& [key, value] : report.body.items()) {
            if (key == "csv") continue;
            out += key + ": " + (value.is_string() ? value.get<std::string>() : value.dump()) + "\n";
        }
        return out;
    }
    throw UsageError("unknown format '" + format + "' (expected json|csv|text)");
}

/// What goes into --out: arithmetic payloads are written bare so the file
/// round-trips as an element; everything else keeps the report envelope.
inline std::string render_to_file(const Report& report, const IoOptions& io) {
    if (report.payload_file && report.status == Status::Pass &&
        (io.format.empty() || io.format == "json"))
        return report.body.dump(2) + "\n";
    return render(report, io);
}

} // namespace nullring::cli
