#include <catch2/catch_amalgamated.hpp>

#include "nullring/base_set.hpp"
#include "nullring/sumset.hpp"

#include "oracles.hpp"

using namespace nullring;

TEST_CASE("base enumeration") {
    const BaseSet s = BaseSet::powers_of_two();
    CHECK(s.enumerate(16) == std::vector<std::uint64_t>{0, 1, 2, 4, 8, 16});
    CHECK(s.enumerate(0) == std::vector<std::uint64_t>{0});
    CHECK(s.enumerate(15) == std::vector<std::uint64_t>{0, 1, 2, 4, 8});

    const BaseSet t = BaseSet::geometric(3);
    CHECK(t.enumerate(27) == std::vector<std::uint64_t>{0, 1, 3, 9, 27});
}

TEST_CASE("base validation") {
    CHECK_THROWS_AS(BaseSet::explicit_list({1, 2, 4}, 2.0), InvalidBaseError);
    CHECK_THROWS_AS(BaseSet::explicit_list({0, 4, 2}, 2.0), InvalidBaseError);
    CHECK_THROWS_AS(BaseSet::explicit_list({0, 2, 2}, 2.0), InvalidBaseError);
    CHECK_THROWS_AS(BaseSet::geometric(1), InvalidBaseError);

    // A dense base violates its declared log-density bound at build time.
    const BaseSet dense = BaseSet::explicit_list({0, 4, 5, 6, 7, 8}, 2.0);
    CHECK_THROWS_AS(build_sumset(dense, 1, 8), InvalidBaseError);
}

TEST_CASE("sumset construction matches brute force") {
    const BaseSet base = BaseSet::powers_of_two();

    const SumsetTable two10 = build_sumset(base, 2, 10);
    CHECK(two10.elements() ==
          std::vector<std::uint64_t>{0, 1, 2, 3, 4, 5, 6, 8, 9, 10});
    CHECK_FALSE(two10.contains(7));

    const SumsetTable one8 = build_sumset(base, 1, 8);
    CHECK(one8.elements() == std::vector<std::uint64_t>{0, 1, 2, 4, 8});

    CHECK(build_sumset(base, 3, 7).contains(7)); // 1 + 2 + 4

    for (std::uint32_t n = 1; n <= 4; ++n)
        for (std::uint64_t limit : {64ull, 257ull, 2048ull}) {
            const SumsetTable table = build_sumset(base, n, limit);
            CHECK(table.elements() ==
                  oracles::brute_sumset(base.enumerate(limit), n, limit));
            for (std::uint64_t k = 0; k <= limit; ++k)
                CHECK(table.contains(k) == oracles::popcount_member(k, n));
        }
}

TEST_CASE("sumset nesting and caps") {
    const BaseSet base = BaseSet::powers_of_two();
    for (std::uint32_t n = 1; n <= 3; ++n) {
        const SumsetTable smaller = build_sumset(base, n, 512);
        const SumsetTable larger = build_sumset(base, n + 1, 512);
        CHECK(std::includes(larger.elements().begin(), larger.elements().end(),
                            smaller.elements().begin(), smaller.elements().end()));
    }

    Caps caps;
    caps.sumset_limit = 100;
    CHECK_THROWS_AS(build_sumset(base, 1, 1000, caps), CapacityError);
}

TEST_CASE("counting function") {
    const BaseSet base = BaseSet::powers_of_two();
    const SumsetTable one = build_sumset(base, 1, 16);
    CHECK(one.count_upto(8) == 5);
    CHECK(one.count_upto(1) == 2);
    CHECK(build_sumset(base, 2, 16).count_upto(10) == 10);

    CHECK_THROWS_AS(one.count_upto(0), RangeError);
    CHECK_THROWS_AS(one.count_upto(17), RangeError);

    // Non-decreasing, and consistent with a recount of the element list.
    const SumsetTable three = build_sumset(base, 3, 200);
    std::uint64_t prev = 0;
    for (std::uint64_t ell = 1; ell <= 200; ++ell) {
        const std::uint64_t count = three.count_upto(ell);
        CHECK(count >= prev);
        std::uint64_t recount = 0;
        for (std::uint64_t e : three.elements()) recount += e <= ell ? 1 : 0;
        CHECK(count == recount);
        prev = count;
    }
}

TEST_CASE("density bound sweep") {
    const BaseSet base = BaseSet::powers_of_two();
    const DensityReport report = verify_density_bound(base, 3, 1000);
    CHECK(report.pass);
    CHECK_FALSE(report.first_violation.has_value());

    // Closed form anchors: g_1(1) = 2 and g_2(10) = 10 <= g_1(10)^2 = 25.
    const SumsetTable one = build_sumset(base, 1, 10);
    CHECK(one.count_upto(1) == 2);
    CHECK(build_sumset(base, 2, 10).count_upto(10) <= 25);

    const DensityReport base3 = verify_density_bound(BaseSet::geometric(3), 3, 1000);
    CHECK(base3.pass);
    CHECK_FALSE(base3.default_base);
}

TEST_CASE("representation counts") {
    const BaseSet base = BaseSet::powers_of_two();
    CHECK(rep_count(base, 2, 3) == 2);  // (1,2), (2,1)
    CHECK(rep_count(base, 2, 8) == 3);  // (0,8), (8,0), (4,4)
    CHECK(rep_count(base, 3, 7) == 6);  // permutations of (1,2,4)

    for (std::uint32_t n = 1; n <= 3; ++n) {
        const auto table = rep_count_table(base, n, 300);
        const auto brute = oracles::brute_rep_counts(base.enumerate(300), n, 300);
        for (std::uint64_t k = 0; k <= 300; ++k) {
            const auto it = brute.find(k);
            CHECK(table[k] == (it == brute.end() ? 0 : it->second));
        }
    }

    // c_1 is an indicator, and positivity characterizes membership.
    const auto ones = rep_count_table(base, 1, 500);
    const SumsetTable two = build_sumset(base, 2, 500);
    const auto twos = rep_count_table(base, 2, 500);
    for (std::uint64_t k = 1; k <= 500; ++k) {
        CHECK(ones[k] <= 1);
        CHECK((twos[k] >= 1) == two.contains(k));
    }
}

TEST_CASE("representation bound") {
    CHECK(rep_bound(1) == 1);
    CHECK(rep_bound(2) == 4);
    CHECK(rep_bound(3) == 32);
    CHECK(rep_bound(4) == 384);

    // Independent ceiling oracle: for integral m, ceil(m + m log2 i) equals
    // m + ceil(log2(i^m)), and the latter comes straight off the bit length.
    mpz_class b = 1;
    for (std::uint32_t i = 2; i <= 6; ++i) {
        const mpz_class m = i * b;
        mpz_class power;
        mpz_pow_ui(power.get_mpz_t(), mpz_class(i).get_mpz_t(), m.get_ui());
        std::uint64_t ceil_log = mpz_sizeinbase(power.get_mpz_t(), 2) - 1;
        mpz_class check = power;
        if (mpz_popcount(check.get_mpz_t()) != 1) ++ceil_log;
        b = m + mpz_class(static_cast<unsigned long>(ceil_log));
        CHECK(rep_bound(i) == b);
    }

    const RepReport r2 = verify_rep_bound(BaseSet::powers_of_two(), 2, 10000);
    CHECK(r2.pass);
    CHECK(r2.empirical_max == 3); // attained at every k = 2^(a+1)

    const RepReport r1 = verify_rep_bound(BaseSet::powers_of_two(), 1, 10000);
    CHECK(r1.pass);
    CHECK(r1.empirical_max == 1);
}

TEST_CASE("gap witnesses") {
    const BaseSet base = BaseSet::powers_of_two();

    const GapWitness g10 = find_gap(base, 1, 10);
    CHECK(g10.k == 16);
    CHECK(g10.k_next == 32);

    const GapWitness g1 = find_gap(base, 1, 1);
    CHECK(g1.k == 2);
    CHECK(g1.k_next == 4);

    const GapWitness g2 = find_gap(base, 2, 10);
    CHECK(g2.k_next - g2.k > 10);
    CHECK(oracles::popcount_member(g2.k, 2));
    CHECK(oracles::popcount_member(g2.k_next, 2));
    for (std::uint64_t m = g2.k + 1; m < g2.k_next; ++m)
        CHECK_FALSE(oracles::popcount_member(m, 2));

    // Deterministic: the same call yields the same witness.
    const GapWitness again = find_gap(base, 2, 10);
    CHECK(again.k == g2.k);
    CHECK(again.k_next == g2.k_next);

    Caps tiny;
    tiny.sumset_limit = 64;
    CHECK_THROWS_AS(find_gap(base, 1, 1000, tiny), CapacityError);
}
