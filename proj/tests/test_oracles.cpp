#include <doctest.h>

#include <numeric>

#include "hecke/arithmetic.hpp"
#include "hecke/oracles.hpp"

using namespace hecke;

namespace {

using i128 = __int128;

i128 sigma_pow(std::int64_t n, int t) {
    i128 s = 0;
    for (std::int64_t d = 1; d <= n; ++d)
        if (n % d == 0) {
            i128 p = 1;
            for (int i = 0; i < t; ++i) p *= d;
            s += p;
        }
    return s;
}

// tau(n) = (65 s11(n) + 691 s5(n) - 691*252 sum_{j<n} s5(j) s5(n-j)) / 756
std::int64_t tau_by_divisor_sums(std::int64_t n) {
    i128 conv = 0;
    for (std::int64_t j = 1; j < n; ++j) conv += sigma_pow(j, 5) * sigma_pow(n - j, 5);
    const i128 num = 65 * sigma_pow(n, 11) + 691 * sigma_pow(n, 5) - 691 * 252 * conv;
    return static_cast<std::int64_t>(num / 756);
}

}  // namespace

TEST_CASE("tau coefficients") {
    const auto t = delta_tau(300);
    CHECK(t.a(1) == 1);
    CHECK(t.a(2) == -24);
    CHECK(t.a(3) == 252);
    for (std::int64_t n = 1; n <= 300; ++n) REQUIRE(t.a(n) == BigInt(tau_by_divisor_sums(n)));
}

TEST_CASE("level one eigenforms") {
    CHECK(level_one_eigenform(16, 10).a(2) == 216);
    const auto a = level_one_eigenform(12, 200), b = delta_tau(200);
    for (std::size_t n = 1; n <= 200; ++n) REQUIRE(a.a(n) == b.a(n));
    for (int k : {12, 16, 18, 20, 22, 26}) {
        const auto f = level_one_eigenform(k, 400);
        CHECK(f.a(1) == 1);
        CHECK(f.a(6) == f.a(2) * f.a(3));
        for (std::size_t m = 2; m <= 20; ++m)
            for (std::size_t n = 2; m * n <= 400; ++n)
                if (std::gcd(m, n) == 1) REQUIRE(f.a(m * n) == f.a(m) * f.a(n));
        // Hecke recursion at p = 2: a(2^{j+1}) = a(2) a(2^j) - 2^{k-1} a(2^{j-1})
        const BigInt p = BigInt(1) << (k - 1);
        REQUIRE(f.a(8) == f.a(2) * f.a(4) - p * f.a(2));
    }
    CHECK_THROWS(level_one_eigenform(14, 10));
}

TEST_CASE("dimension and genus") {
    CHECK(dim_level_one(12) == 1);
    CHECK(dim_level_one(14) == 0);
    CHECK(dim_level_one(26) == 1);
    CHECK(dim_level_one(24) == 2);
    CHECK(genus_X0(11) == 1);
    CHECK(genus_X0(23) == 2);
    CHECK(genus_X0(1) == 0);
    CHECK(genus_X0(37) == 2);
}
