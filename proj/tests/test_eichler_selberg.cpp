#include <doctest.h>

#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <complex>
#include <numbers>

#include "hecke/arithmetic.hpp"
#include "hecke/class_numbers.hpp"
#include "hecke/eichler_selberg.hpp"
#include "hecke/oracles.hpp"
#include "hecke/special_functions.hpp"

using namespace hecke;

namespace {

// dim S_k(Gamma_0(N)) for squarefree N from the genus and elliptic-point data.
std::int64_t dim_cusp_forms(int k, std::uint64_t N) {
    std::int64_t nu = 1, nu2 = 1, nu3 = 1, cusps = 1;
    for (auto p : factor(N).primes()) {
        nu *= static_cast<std::int64_t>(p + 1);
        nu2 *= p == 2 ? 1 : (p % 4 == 1 ? 2 : 0);
        nu3 *= p == 3 ? 1 : (p % 3 == 1 ? 2 : 0);
        cusps *= 2;
    }
    // 12 g = 12 + nu - 3 nu2 - 4 nu3 - 6 cusps
    const std::int64_t g12 = 12 + nu - 3 * nu2 - 4 * nu3 - 6 * cusps;
    if (k == 2) return g12 / 12;
    return (k - 1) * (g12 / 12 - 1) + (k / 2 - 1) * cusps + nu2 * (k / 4) + nu3 * (k / 3);
}

std::int64_t dim_new(int k, std::uint64_t N) {
    std::int64_t s = 0;
    for (auto M : factor(N).divisors()) {
        std::int64_t beta = 1;
        for ([[maybe_unused]] auto p : factor(N / M).primes()) beta *= -2;
        s += beta * dim_cusp_forms(k, M);
    }
    return s;
}

}  // namespace

TEST_CASE("level one traces") {
    CHECK(trace_full(1, 12, 1).total == doctest::Approx(1).epsilon(1e-12));
    CHECK(std::abs(trace_full(1, 10, 1).total) < 1e-12);
    CHECK(trace_full(2, 12, 1).total == doctest::Approx(-24 / std::pow(2.0, 5.5)).epsilon(1e-12));
    CHECK(trace_new(1, 26, 1).total == doctest::Approx(1).epsilon(1e-12));
    const auto tau = delta_tau(400);
    for (std::uint64_t n = 1; n <= 400; ++n)
        REQUIRE(std::abs(trace_new(n, 12, 1).total - tau.normalized_eigenvalue(n)) < 1e-9);
    for (int k = 4; k <= 60; k += 2)
        REQUIRE(std::abs(trace_full(1, k, 1).total - static_cast<double>(dim_level_one(k))) < 1e-9);
}

TEST_CASE("dimensions from traces at n = 1") {
    for (std::uint64_t N : {1u, 2u, 3u, 5u, 6u, 7u, 10u, 11u, 15u, 23u, 30u})
        for (int k = 2; k <= 40; k += 2) {
            INFO("N=" << N << " k=" << k);
            REQUIRE(std::abs(trace_full(1, k, N).total - static_cast<double>(dim_cusp_forms(k, N))) < 1e-9);
            REQUIRE(std::abs(trace_new(1, k, N).total - static_cast<double>(dim_new(k, N))) < 1e-9);
        }
    CHECK(trace_new(1, 2, 11).total == doctest::Approx(1));
    CHECK(trace_new(1, 2, 15).total == doctest::Approx(1));
    CHECK(trace_new(1, 2, 23).total == doctest::Approx(2));
    // dim S_k(N)* ~ (k-1)/12 phi(N)
    for (std::uint64_t N : {5u, 6u}) {
        const double d = trace_new(1, 2000, N).total;
        CHECK(std::abs(d - 1999.0 / 12 * static_cast<double>(euler_phi(N))) < 5);
    }
}

TEST_CASE("breakdown invariants and Deligne envelope") {
    for (std::uint64_t N : {1u, 2u, 3u, 5u, 6u, 7u, 10u, 15u})
        for (std::uint64_t n = 1; n <= 120; n += 7) {
            if (gcd_u64(n, N) != 1) continue;
            for (int k : {2, 4, 12, 24, 38}) {
                const auto t = trace_new(n, k, N);
                REQUIRE(std::abs(t.term1 + t.term2 + t.term3 + t.term4 - t.total) <= 1e-12 * (1 + std::abs(t.total)));
                if (N > 1) REQUIRE(t.term3 == 0);
                if (k != 2) REQUIRE(t.term4 == 0);
                const double dim = trace_new(1, k, N).total;
                REQUIRE(std::abs(t.total) <= static_cast<double>(sigma0(factor(n))) * dim + 1);
            }
        }
    CHECK_THROWS(trace_full(4, 12, 2));
    CHECK_THROWS(trace_new(3, 12, 4));
}

TEST_CASE("angle data") {
    for (std::uint64_t n = 1; n <= 10000; n = n * 3 + 1) {
        const auto b = static_cast<std::int64_t>(isqrt(4 * n - 1));
        for (std::int64_t t = -b; t <= b; ++t) {
            const auto a = angle_data(t, n);
            const auto z = std::sqrt(static_cast<double>(n)) * std::polar(1.0, a.theta);
            REQUIRE(std::abs(z.real() - t / 2.0) < 1e-12 * std::sqrt(static_cast<double>(n)));
            REQUIRE(std::abs(z.imag() - std::sqrt(static_cast<double>(4 * n - t * t)) / 2) <
                    1e-9 * std::sqrt(static_cast<double>(n)));
            REQUIRE(std::sin(a.theta) >= 1 / (2 * std::sqrt(static_cast<double>(n))) - 1e-15);
            if (t + 1 <= b) REQUIRE(a.theta - angle_data(t + 1, n).theta >= 1 / (2 * std::sqrt(static_cast<double>(n))) - 1e-15);
        }
    }
}

TEST_CASE("D coefficients and mu") {
    CHECK(d_coefficient(1, 1, 1) == doctest::Approx(1 / (2 * std::sqrt(3.0)) / 3).epsilon(1e-12));
    for (std::int64_t t = -5; t <= 5; ++t) CHECK(mu_tilde(t, 1, 7, 1) == 1);
    // direct assembly at level 1: (1/(2 sqrt(4n-t^2))) sum_f h_w((t^2-4n)/f^2)
    for (std::uint64_t n : {5u, 11u, 30u})
        for (std::int64_t t = 0; t * t < static_cast<std::int64_t>(4 * n); ++t) {
            const std::int64_t D = t * t - static_cast<std::int64_t>(4 * n);
            Rational s = 0;
            for (std::int64_t f = 1; f * f <= -D; ++f)
                if (D % (f * f) == 0 && ((D / (f * f)) % 4 + 4) % 4 <= 1) s += class_number(D / (f * f)).h_w;
            const double expect = s.convert_to<double>() / (2 * std::sqrt(static_cast<double>(-D)));
            REQUIRE(std::abs(d_coefficient(t, n, 1)) == doctest::Approx(expect).epsilon(1e-12));
            REQUIRE(d_coefficient(-t, n, 1) == doctest::Approx(d_coefficient(t, n, 1)).epsilon(1e-14));
        }
    // admissible class: mu_tilde = sigma0(N) mu(N)
    for (std::uint64_t N : {3u, 5u, 15u})
        for (std::uint64_t n : {7u, 11u, 13u, 29u}) {
            if (gcd_u64(n, N) != 1) continue;
            const auto n0 = admissible_n0(N, n);
            if (!n0) continue;
            for (std::int64_t t = *n0; t * t < static_cast<std::int64_t>(4 * n); t += static_cast<std::int64_t>(2 * N))
                REQUIRE(mu_tilde(t, 1, n, N) ==
                        static_cast<std::int64_t>(sigma0(factor(N))) * mobius(N));
        }
}

TEST_CASE("trace engine reuse matches fresh evaluation") {
    auto e = trace_engine(105, 2, TraceKind::new_forms);
    for (int k : {4, 30, 100}) {
        const auto a = e->evaluate(k, false);
        const auto b = trace_new(105, k, 2);
        REQUIRE(a.total == doctest::Approx(b.total).epsilon(1e-12).scale(1e-12));
        REQUIRE(e->term2(k) == doctest::Approx(b.term2).epsilon(1e-12).scale(1e-12));
    }
}

TEST_CASE("window average and its main term") {
    WindowSpec w;
    w.K = std::floor(4 * std::numbers::pi * std::sqrt(2280.0));
    w.delta = 0.25;
    const double lhs = averaged_trace_window(2280, 1, w);
    const double main = noweight_main_term(2280, 1, w.K);
    MESSAGE("ratio at n=2280: " << lhs / main);
    CHECK(lhs / main > 0.5);
    CHECK(lhs / main < 1.5);
    // (K/2pi)(sigma1(n)/n) J_K(4 pi sqrt n) by hand; sigma1(9120) = 63*4*6*20
    CHECK(noweight_main_term(9120, 1, w.K) != 0);
    const double k2 = std::floor(4 * std::numbers::pi * std::sqrt(9120.0));
    CHECK(noweight_main_term(9120, 1, k2) ==
          doctest::Approx(k2 / (2 * std::numbers::pi) * 30240.0 / 9120 *
                          boost::math::cyl_bessel_j(k2, 4 * std::numbers::pi * std::sqrt(9120.0)))
              .epsilon(1e-8));
}

TEST_CASE("variance against the diagonal") {
    for (std::uint64_t n : {15u, 27u, 105u})
        for (std::uint64_t N : {2u, 5u}) {
            if (gcd_u64(n, N) != 1) continue;
            const double T = 2 * std::ceil(std::sqrt(static_cast<double>(n)));
            const auto v = variance_window(n, N, T), d = diagonal_side(n, N, T);
            REQUIRE(std::abs(v.value - d.value) <= 10 * std::pow(static_cast<double>(n), 0.6));
        }
    CHECK_THROWS(variance_window(15, 1, 10));
}

TEST_CASE("character sums vanish inside the band") {
    CHECK(std::abs(poisson_character_sum(100, std::numbers::pi / 2).value) <= 1e-9);
    CHECK(std::abs(poisson_character_sum(50, 0.07).value) <= 1e-9);
    // theta -> 0: every phase is close to 1, so the sum approaches sum_k phi((k-1)/T), both signs of k
    const auto near0 = poisson_character_sum(50, 1e-8);
    double plain = 0;
    for (double v : phi_odd_grid(50, 400000)) plain += v;
    CHECK(near0.value > 0);
    CHECK(near0.value == doctest::Approx(2 * plain).epsilon(1e-3));
}
