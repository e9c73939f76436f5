#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "nullring/json_io.hpp"
#include "nullring/ring.hpp"

#include "oracles.hpp"

using namespace nullring;

namespace {

RingElement element(std::uint32_t n, long t,
                    std::initializer_list<std::pair<std::uint64_t, long>> digits) {
    RingElement::DigitMap map;
    for (const auto& [pos, d] : digits) map.emplace(pos, mpz_class(d));
    return make_element(Profile(n, mpz_class(t)), std::move(map));
}

mpq_class value(const RingElement& x) { return value_exact(x).to_rational(); }

} // namespace

TEST_CASE("element validation") {
    CHECK(value(element(1, 1, {{0, 1}})) == 1);
    CHECK(value(element(2, 2, {{3, -2}})) == mpq_class(-1, 4));

    CHECK_THROWS_WITH(element(1, 1, {{3, 1}}),
                      Catch::Matchers::ContainsSubstring("position 3"));
    CHECK_THROWS_AS(element(1, 1, {{3, 1}}), ValidationError);
    CHECK_THROWS_WITH(element(2, 2, {{3, -3}}),
                      Catch::Matchers::ContainsSubstring("digit -3"));
    CHECK_THROWS_AS(Profile(0, mpz_class(1)), ValidationError);
    CHECK_THROWS_AS(Profile(1, mpz_class(0)), ValidationError);
}

TEST_CASE("addition") {
    const RingElement one = element(1, 1, {{0, 1}});
    const RingElement zero = add(one, neg(one));
    CHECK(zero.digits().empty());
    CHECK(value(zero) == 0);
    CHECK(zero.profile().t == 2); // bounds add even when digits cancel

    const RingElement half = element(1, 1, {{1, 1}});
    const RingElement doubled = add(half, half);
    CHECK(doubled.digits().size() == 1);
    CHECK(doubled.digits().at(1) == 2);
    CHECK(value(doubled) == 1);

    const RingElement x = element(1, 1, {{4, 1}});
    const RingElement y = element(2, 3, {{3, 2}});
    const RingElement sum = add(x, y);
    CHECK(sum.profile().n == 2);
    CHECK(sum.profile().t == 4);
    for (const auto& [pos, digit] : sum.digits())
        CHECK(oracles::popcount_member(pos, 2));
}

TEST_CASE("negation") {
    const RingElement x = element(1, 1, {{0, 1}});
    CHECK(neg(x).digits().at(0) == -1);
    CHECK(neg(neg(x)) == x);
    const RingElement zero = element(1, 1, {});
    CHECK(neg(zero) == zero);
}

TEST_CASE("multiplication") {
    const RingElement a = element(1, 1, {{1, 1}});  // 1/2
    const RingElement b = element(1, 3, {{2, 3}});  // 3/4
    const RingElement prod = mul(a, b);
    CHECK(prod.digits().size() == 1);
    CHECK(prod.digits().at(3) == 3);
    CHECK(value(prod) == mpq_class(3, 8));
    CHECK(oracles::popcount_member(3, 2));

    const RingElement one = element(1, 1, {{0, 1}});
    const RingElement x = element(2, 2, {{3, -2}, {6, 1}});
    const RingElement identity = mul(one, x);
    CHECK(identity.digits() == x.digits());
    CHECK(identity.profile().n == 3);

    const RingElement three_halves = element(1, 1, {{0, 1}, {1, 1}});
    const RingElement squared = mul(three_halves, three_halves);
    CHECK(value(squared) == mpq_class(9, 4));
    CHECK(squared.digits().at(0) == 1);
    CHECK(squared.digits().at(1) == 2);
    CHECK(squared.digits().at(2) == 1);
}

TEST_CASE("exact values") {
    CHECK(value_exact(element(1, 1, {{0, 1}})) == DyadicRational::make(1, 0));
    CHECK(value_exact(element(1, 1, {{1, 1}, {2, 1}})).to_rational() ==
          mpq_class(3, 4));
    CHECK(value_exact(element(1, 2, {{4, -2}})).to_rational() == mpq_class(-1, 8));
    CHECK(value_exact(element(1, 1, {})).to_rational() == 0);
}

TEST_CASE("dyadic embedding") {
    const RingElement a = dyadic_embed(3, 3);
    CHECK(a.digits().size() == 1);
    CHECK(a.digits().at(4) == 6);
    CHECK(a.profile().t == 6);
    CHECK(value(a) == mpq_class(3, 8));

    const RingElement b = dyadic_embed(1, 0);
    CHECK(b.digits().at(0) == 1);

    const RingElement c = dyadic_embed(-5, 2);
    CHECK(c.digits().at(2) == -5);
    CHECK(value(c) == mpq_class(-5, 4));

    CHECK(dyadic_embed(0, 7).digits().empty());

    SplitMix64 rng(11);
    for (int i = 0; i < 200; ++i) {
        const long a_raw = static_cast<long>(rng.next_below(4001)) - 2000;
        const std::uint64_t k = rng.next_below(24);
        mpq_class expected(a_raw);
        expected /= pow2_z(k);
        CHECK(value(dyadic_embed(a_raw, k)) == expected);
    }
}

TEST_CASE("streams") {
    const DigitStream ones(Profile(1, 1), ConstantRule{1});
    const auto sample = sample_stream(ones, 5);
    REQUIRE(sample.size() == 5);
    const std::vector<std::uint64_t> expected_pos{0, 1, 2, 4, 8};
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(sample[i].first == expected_pos[i]);
        CHECK(sample[i].second == 1);
    }

    CHECK(sample_stream(ones, 0).empty());

    const DigitStream cyc(Profile(1, 2), CyclicRule{{mpz_class(1), mpz_class(-2)}});
    const auto pattern = sample_stream(cyc, 4);
    CHECK(pattern[0].second == 1);
    CHECK(pattern[1].second == -2);
    CHECK(pattern[2].second == 1);
    CHECK(pattern[3].second == -2);

    const DigitStream u1(Profile(2, 3), SeededUniformRule{7});
    const DigitStream u2(Profile(2, 3), SeededUniformRule{7});
    const auto s1 = sample_stream(u1, 32);
    const auto s2 = sample_stream(u2, 32);
    CHECK(s1 == s2);
    for (const auto& [pos, digit] : s1) {
        CHECK(digit >= -3);
        CHECK(digit <= 3);
    }

    CHECK_THROWS_AS(DigitStream(Profile(1, 1), ConstantRule{2}), ValidationError);
    CHECK_THROWS_AS(DigitStream(Profile(1, 1), CyclicRule{{}}), ValidationError);
}

TEST_CASE("homomorphism and ring axioms") {
    SplitMix64 rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const std::uint32_t nx = 1 + static_cast<std::uint32_t>(rng.next_below(3));
        const std::uint32_t ny = 1 + static_cast<std::uint32_t>(rng.next_below(3));
        const RingElement x = random_element(rng, nx, 1 + rng.next_below(5), 12, 64);
        const RingElement y = random_element(rng, ny, 1 + rng.next_below(5), 12, 64);
        const RingElement z = random_element(rng, 1, 1 + rng.next_below(5), 8, 64);

        CHECK(value(add(x, y)) == value(x) + value(y));
        CHECK(value(mul(x, y)) == value(x) * value(y));

        // Commutativity, associativity, distributivity on exact values.
        CHECK(value(add(x, y)) == value(add(y, x)));
        CHECK(value(mul(x, y)) == value(mul(y, x)));
        CHECK(value(mul(mul(x, y), z)) == value(mul(x, mul(y, z))));
        CHECK(value(mul(x, add(y, z))) == value(add(mul(x, y), mul(x, z))));

        // Closure certificates: the declared mul profile bounds every digit
        // and the support stays inside the right sumset.
        const RingElement prod = mul(x, y);
        CHECK(prod.profile().n == x.profile().n + y.profile().n);
        const mpz_class bound =
            rep_bound(prod.profile().n) * x.profile().t * y.profile().t;
        CHECK(prod.profile().t == bound);
        for (const auto& [pos, digit] : prod.digits()) {
            CHECK(oracles::popcount_member(pos, prod.profile().n));
            CHECK(abs(digit) <= bound);
        }
        const RingElement sum = add(x, y);
        CHECK(sum.profile().n == std::max(x.profile().n, y.profile().n));
        CHECK(sum.profile().t == x.profile().t + y.profile().t);
    }
}

TEST_CASE("digit subsets give distinct values") {
    for (std::uint32_t n : {1u, 2u}) {
        const DigitStream probe(Profile(n, 1), ConstantRule{1});
        const auto positions = probe.first_positions(10);
        std::set<mpq_class> values;
        for (std::uint32_t mask = 0; mask < 1024; ++mask) {
            RingElement::DigitMap digits;
            for (std::uint32_t bit = 0; bit < 10; ++bit)
                if (mask & (1u << bit)) digits.emplace(positions[bit], 1);
            values.insert(value(RingElement(Profile(n, 1), std::move(digits))));
        }
        CHECK(values.size() == 1024);
    }
}

TEST_CASE("element JSON round trip") {
    const RingElement x = element(2, 3, {{0, -2}, {3, 3}, {6, 1}});
    const json j = element_to_json(x);
    const RingElement back = element_from_json(j);
    CHECK(back == x);
    CHECK(element_to_json(back) == j);

    json zero_digit = json::parse(R"({"n":1,"t":1,"digits":{"2":0}})");
    const RingElement with_zero = element_from_json(zero_digit);
    CHECK(with_zero.digits().size() == 1);
    CHECK(element_to_json(with_zero) == zero_digit);

    CHECK_THROWS_AS(element_from_json(json::parse(R"({"n":1,"t":1,"digits":{},"x":0})")),
                    ValidationError);
    CHECK_THROWS_AS(element_from_json(json::parse(R"({"n":1,"t":1})")), ValidationError);
    CHECK_THROWS_AS(element_from_json(json::parse(R"({"n":1,"t":1,"digits":{"a":1}})")),
                    ValidationError);
    CHECK_THROWS_AS(element_from_json(json::parse(R"({"n":1,"t":1,"digits":{"3":1}})")),
                    ValidationError);
    CHECK_THROWS_AS(element_from_json(json::parse(R"({"n":1,"t":1,"digits":{"2":1.5}})")),
                    ValidationError);
    CHECK_THROWS_AS(element_from_json(json::parse(R"({"n":0,"t":1,"digits":{}})")),
                    ValidationError);
}
