#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <random>

#include "hecke/arithmetic.hpp"
#include "hecke/kloosterman.hpp"

using namespace hecke;

namespace {

// naive complex summation with a brute-force inverse
std::complex<long double> naive_kloosterman(std::int64_t m, std::int64_t n, std::int64_t c) {
    std::complex<long double> s = 0;
    for (std::int64_t x = 0; x < c; ++x) {
        if (std::gcd(x, c) != 1) continue;
        std::int64_t xi = 1;
        while ((x * xi) % c != 1 % c) ++xi;
        const std::int64_t a = (((m * x + n * xi) % c) + c) % c;
        const long double ang = 2 * std::numbers::pi_v<long double> * a / c;
        s += std::complex<long double>(std::cos(ang), std::sin(ang));
    }
    return s;
}

}  // namespace

TEST_CASE("kloosterman examples") {
    CHECK(kloosterman_sum(3, 7, 1).value == doctest::Approx(1).epsilon(1e-14));
    CHECK(kloosterman_sum(1, 1, 5).value == doctest::Approx(0.3819660112501051).epsilon(1e-12));
    CHECK(kloosterman_sum(1, 2, 3).value == doctest::Approx(2).epsilon(1e-12));
}

TEST_CASE("kloosterman against naive summation") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::int64_t> dc(1, 400), dm(-5000, 5000);
    for (int i = 0; i < 300; ++i) {
        const auto c = dc(rng), m = dm(rng), n = dm(rng);
        const auto ref = naive_kloosterman(m, n, c);
        const auto v = kloosterman_sum(m, n, static_cast<std::uint64_t>(c));
        REQUIRE(std::abs(v.value - static_cast<double>(ref.real())) < 1e-9);
        REQUIRE(std::abs(static_cast<double>(ref.imag())) < 1e-9);
    }
}

TEST_CASE("unit table agrees with the direct sum") {
    for (std::uint32_t c : {1u, 2u, 7u, 64u, 97u, 360u, 2310u, 4096u, 29989u}) {
        UnitTable t(c);
        for (std::int64_t m : {0, 1, -3, 17})
            for (std::int64_t n : {1, 5, 1000003}) {
                double im = 1;
                const double v = t.sum(m, n, &im);
                REQUIRE(std::abs(v - kloosterman_sum(m, n, c).value) < 1e-8);
                REQUIRE(std::abs(im) < 1e-8);
            }
    }
}

TEST_CASE("ramanujan sums") {
    for (std::uint64_t l = 1; l <= 20; ++l) CHECK(ramanujan_sum(1, l) == mobius(l));
    CHECK(ramanujan_sum(6, 6) == 2);
    CHECK(ramanujan_sum(11, 1) == 1);
    for (std::uint64_t c = 1; c <= 500; c += 7)
        for (std::int64_t n : {1, 6, 12, -30, 210})
            REQUIRE(std::abs(kloosterman_sum(static_cast<std::int64_t>(c) * 3, n, c).value - ramanujan_sum(n, c)) <
                    1e-9);
}

TEST_CASE("weil bound examples") {
    CHECK(weil_bound(1, 1, 1) == doctest::Approx(1));
    CHECK(weil_bound(1, 2, 3) == doctest::Approx(2 * std::sqrt(3.0)));
    CHECK(weil_bound(0, 6, 6) == doctest::Approx(24));
}

TEST_CASE("symmetry, reality and Weil bound on random triples") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::uint64_t> dc(1, 3000);
    std::uniform_int_distribution<std::int64_t> dm(-100000, 100000);
    for (int i = 0; i < 400; ++i) {
        const auto c = dc(rng);
        const auto m = dm(rng), n = dm(rng);
        const auto a = kloosterman_sum(m, n, c), b = kloosterman_sum(n, m, c);
        REQUIRE(std::abs(a.value - b.value) < 1e-9);
        REQUIRE(a.imaginary_residual <= 1e-10 * std::max(1.0, std::abs(a.value)));
        REQUIRE(std::abs(a.value) <= weil_bound(m, n, c) + 1e-8);
    }
}
