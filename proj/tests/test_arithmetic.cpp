#include <doctest.h>

#include <numeric>

#include "hecke/arithmetic.hpp"

using namespace hecke;

namespace {

// brute-force references
std::uint64_t units_mod(std::uint64_t n) {
    std::uint64_t c = 0;
    for (std::uint64_t x = 1; x <= n; ++x) c += std::gcd(x, n) == 1;
    return c;
}

std::uint64_t divisor_power_sum(unsigned t, std::uint64_t n) {
    std::uint64_t s = 0;
    for (std::uint64_t d = 1; d <= n; ++d)
        if (n % d == 0) {
            std::uint64_t p = 1;
            for (unsigned i = 0; i < t; ++i) p *= d;
            s += p;
        }
    return s;
}

int mobius_brute(std::uint64_t n) {
    int sign = 1;
    for (std::uint64_t p = 2; p * p <= n; ++p)
        if (n % p == 0) {
            n /= p;
            if (n % p == 0) return 0;
            sign = -sign;
        }
    return n > 1 ? -sign : sign;
}

}  // namespace

TEST_CASE("factor examples") {
    CHECK(factor(1).factors.empty());
    using F = std::vector<std::pair<std::uint64_t, int>>;
    CHECK(factor(12).factors == F{{2, 2}, {3, 1}});
    CHECK(factor(9120).factors == F{{2, 5}, {3, 1}, {5, 1}, {19, 1}});
}

TEST_CASE("factor reassembles n") {
    for (std::uint64_t n = 1; n <= 5000; ++n) {
        std::uint64_t prod = 1;
        for (auto [p, e] : factor(n).factors)
            for (int i = 0; i < e; ++i) prod *= p;
        REQUIRE(prod == n);
    }
    const std::uint64_t big = 1000003ULL * 1000033ULL;
    CHECK(factor(big).factors.size() == 2);
}

TEST_CASE("mobius, phi, sigma examples") {
    CHECK(mobius(1) == 1);
    CHECK(mobius(6) == 1);
    CHECK(mobius(12) == 0);
    CHECK(euler_phi(1) == 1);
    CHECK(euler_phi(6) == 2);
    CHECK(euler_phi(12) == 4);
    CHECK(sigma(0, factor(12)) == 6);
    CHECK(sigma(1, factor(6)) == 12);
    CHECK(sigma(0, factor(1)) == 1);
    CHECK(nu_index(factor(1)) == 1);
    CHECK(nu_index(factor(6)) == 12);
    CHECK(nu_index(factor(5)) == 6);
}

TEST_CASE("multiplicative functions against brute force") {
    for (std::uint64_t n = 1; n <= 600; ++n) {
        const auto f = factor(n);
        REQUIRE(mobius(f) == mobius_brute(n));
        REQUIRE(euler_phi(f) == units_mod(n));
        REQUIRE(sigma0(f) == divisor_power_sum(0, n));
        REQUIRE(sigma1(f) == divisor_power_sum(1, n));
        REQUIRE(sigma(2, f) == divisor_power_sum(2, n));
        REQUIRE(f.divisors().size() == sigma0(f));
    }
}

TEST_CASE("mod_inverse") {
    CHECK(mod_inverse(1, 7) == 1);
    CHECK(mod_inverse(2, 5) == 3);
    CHECK(mod_inverse(4, 9) == 7);
    for (std::int64_t c = 2; c < 200; ++c)
        for (std::int64_t x = -c; x < 2 * c; ++x)
            if (std::gcd(x, c) == 1) {
                const auto y = mod_inverse(x, c);
                REQUIRE(y >= 0);
                REQUIRE(y < c);
                REQUIRE((((x % c) + c) % c) * y % c == 1);
            }
}

TEST_CASE("kronecker_chi") {
    CHECK(kronecker_chi(-4, 3) == -1);
    CHECK(kronecker_chi(-3, 2) == -1);
    CHECK(kronecker_chi(-7, 1) == 1);
    // odd primes: Euler's criterion
    for (std::int64_t p : {3, 5, 7, 11, 13, 101})
        for (std::int64_t D = -200; D < 0; ++D) {
            if ((D % 4 + 4) % 4 > 1) continue;
            std::int64_t r = ((D % p) + p) % p, acc = 1;
            for (std::int64_t e = 0; e < (p - 1) / 2; ++e) acc = acc * r % p;
            const int expect = r == 0 ? 0 : (acc == 1 ? 1 : -1);
            REQUIRE(kronecker_chi(D, static_cast<std::uint64_t>(p)) == expect);
        }
}

TEST_CASE("count_congruence_roots") {
    CHECK(count_congruence_roots(0, 1, 2) == 1);
    CHECK(count_congruence_roots(5, 7, 1) == 1);
    CHECK(count_congruence_roots(1, 1, 3) == 1);
    CHECK(count_congruence_roots(1, 2, 3) == 0);
    for (std::int64_t K = 1; K <= 60; ++K)
        for (std::int64_t t = -6; t <= 6; ++t)
            for (std::int64_t n = 1; n <= 8; ++n) {
                std::uint64_t c = 0;
                for (std::int64_t x = 0; x < K; ++x) c += ((x * x - t * x + n) % K + K) % K == 0;
                REQUIRE(count_congruence_roots(t, n, static_cast<std::uint64_t>(K)) == c);
            }
}

TEST_CASE("isqrt and squares") {
    for (std::uint64_t n = 0; n < 20000; ++n) {
        const auto r = isqrt(n);
        REQUIRE(r * r <= n);
        REQUIRE((r + 1) * (r + 1) > n);
        REQUIRE(is_square(n) == (r * r == n));
    }
    CHECK(isqrt(~0ULL) == 4294967295ULL);
}
