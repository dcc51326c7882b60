#include <doctest.h>

#include <cmath>
#include <numeric>

#include "hecke/arithmetic.hpp"
#include "hecke/class_numbers.hpp"

using namespace hecke;

namespace {

// Reduced primitive forms (a,b,c), b^2 - 4ac = D, counted by direct search.
std::uint64_t forms_brute(std::int64_t D) {
    std::uint64_t h = 0;
    for (std::int64_t a = 1; 3 * a * a <= -D; ++a)
        for (std::int64_t b = -a + 1; b <= a; ++b) {
            if ((b * b - D) % (4 * a)) continue;
            const std::int64_t c = (b * b - D) / (4 * a);
            if (c < a || (c == a && b < 0)) continue;
            if (std::gcd(std::gcd(a, std::abs(b)), c) != 1) continue;
            ++h;
        }
    return h;
}

std::uint64_t r3_brute(std::int64_t n) {
    std::uint64_t c = 0;
    const auto s = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n))) + 1;
    for (std::int64_t x = -s; x <= s; ++x)
        for (std::int64_t y = -s; y <= s; ++y) {
            const std::int64_t r = n - x * x - y * y;
            if (r < 0) continue;
            const auto z = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(r))));
            if (z * z == r) c += z == 0 ? 1 : 2;
        }
    return c;
}

}  // namespace

TEST_CASE("class number examples") {
    const auto a = class_number(-3), b = class_number(-4), c = class_number(-23);
    CHECK(a.h == 1);
    CHECK(a.w == 3);
    CHECK(a.h_w == Rational(1, 3));
    CHECK(b.h == 1);
    CHECK(b.w == 2);
    CHECK(b.h_w == Rational(1, 2));
    CHECK(c.h == 3);
    CHECK(c.w == 1);
    CHECK(c.h_w == 3);
    CHECK_THROWS(class_number(-5));
    CHECK_THROWS(class_number(4));
}

TEST_CASE("class numbers against direct enumeration") {
    for (std::int64_t D = -3; D >= -3000; --D) {
        if ((D % 4 + 4) % 4 > 1) continue;
        REQUIRE(class_number(D).h == forms_brute(D));
    }
}

TEST_CASE("fundamental part") {
    CHECK(fundamental_part(-12) == std::pair<std::int64_t, std::uint64_t>{-3, 2});
    CHECK(fundamental_part(-4) == std::pair<std::int64_t, std::uint64_t>{-4, 1});
    CHECK(fundamental_part(-16) == std::pair<std::int64_t, std::uint64_t>{-4, 2});
    CHECK(fundamental_part(-99) == std::pair<std::int64_t, std::uint64_t>{-11, 3});
}

TEST_CASE("hurwitz class numbers") {
    CHECK(hurwitz_H(3) == Rational(1, 3));
    CHECK(hurwitz_H(4) == Rational(1, 2));
    CHECK(hurwitz_H(23) == 3);
    CHECK(hurwitz_H(8) == 1);
    for (std::uint64_t n = 3; n <= 4000; ++n) {
        if (n % 4 == 1 || n % 4 == 2) continue;
        REQUIRE(hurwitz_H_by_divisors(n) == hurwitz_H_by_cohen(n));
    }
    const auto& tab = hurwitz_table(5000);
    for (std::uint64_t n = 3; n <= 5000; n += 1)
        if (n % 4 == 0 || n % 4 == 3) REQUIRE(Rational(tab.six_H(n), 6) == hurwitz_H(n));
}

TEST_CASE("three squares") {
    CHECK(r3(0) == 1);
    CHECK(r3(1) == 6);
    CHECK(r3(7) == 0);
    CHECK(r3_from_hurwitz(3) == 8);
    CHECK(r3_from_hurwitz(2) == 12);
    CHECK(r3_from_hurwitz(15) == 0);
    for (std::uint64_t n = 0; n <= 1500; ++n) REQUIRE(r3(n) == r3_brute(static_cast<std::int64_t>(n)));
    for (std::uint64_t n = 1; n <= 10000; ++n) REQUIRE(r3(n) == r3_from_hurwitz(n));
    const auto tab = r3_table(800);
    for (std::uint64_t n = 0; n <= 800; ++n) REQUIRE(tab[n] == r3(n));
}

TEST_CASE("congruence-restricted four-square counts") {
    CHECK(count_A(1, 1, 1) == 16);
    // brute force over (t, x, y, z)
    for (std::uint64_t N : {1u, 3u, 5u, 6u})
        for (std::uint64_t n : {1u, 5u, 7u, 13u, 21u}) {
            for (std::int64_t n0 = 1; n0 < static_cast<std::int64_t>(2 * N); n0 += 2) {
                std::uint64_t c = 0, all = 0;
                const auto m = static_cast<std::int64_t>(2 * N);
                const auto s = static_cast<std::int64_t>(isqrt(4 * n));
                for (std::int64_t t = -s; t <= s; ++t) {
                    const auto r = r3_brute(static_cast<std::int64_t>(4 * n) - t * t);
                    all += r;
                    if (((t - n0) % m + m) % m == 0) c += r;
                }
                REQUIRE(count_A(N, n, n0) == c);
                REQUIRE(c <= all);
            }
        }
    CHECK_THROWS(count_A(4, 3, 1));
    CHECK_THROWS(count_A(3, 3, 2));
}

TEST_CASE("admissible n0") {
    CHECK(admissible_n0(1, 9) == 1);
    // (3, 5): first odd n0 in {1,3,5} with (n0^2 - 20 | 3) = -1
    std::optional<std::int64_t> expect;
    for (std::int64_t n0 : {1, 3, 5})
        if (!expect && kronecker_chi(n0 * n0 - 20, 3) == -1) expect = n0;
    CHECK(admissible_n0(3, 5) == expect);
    for (std::int64_t n = 1; n < 200; n += 2) {
        std::optional<std::int64_t> e;
        for (std::int64_t n0 = 1; n0 < 30 && !e; n0 += 2)
            if (kronecker_chi(n0 * n0 - 4 * n, 3) == -1 && kronecker_chi(n0 * n0 - 4 * n, 5) == -1) e = n0;
        REQUIRE(admissible_n0(15, static_cast<std::uint64_t>(n)) == e);
    }
}
