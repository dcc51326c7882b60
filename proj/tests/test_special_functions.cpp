#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/airy.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <numbers>

#include "hecke/special_functions.hpp"

using namespace hecke;

TEST_CASE("bessel examples") {
    CHECK(bessel_j(0, 0).value == doctest::Approx(1).epsilon(1e-15));
    CHECK(bessel_j(1, 1).value == doctest::Approx(0.4400505857449335).epsilon(1e-12));
    const double ai0 = 0.3550280538878172;
    CHECK(std::abs(bessel_j(1000, 1000).value / (std::cbrt(2.0) * ai0 / 10) - 1) < 1e-2);
}

TEST_CASE("bessel against boost reference") {
    for (std::uint64_t nu : {0u, 1u, 5u, 30u, 99u, 400u, 1000u, 2500u})
        for (double r : {0.05, 0.5, 0.9, 0.99, 1.0, 1.01, 1.3, 2.0, 3.9}) {
            const double x = std::max(1.0, static_cast<double>(nu)) * r;
            const auto b = bessel_j(nu, x);
            const double ref = boost::math::cyl_bessel_j(static_cast<double>(nu), x);
            INFO("nu=" << nu << " x=" << x);
            REQUIRE(b.abs_error_bound <= 1e-10);
            REQUIRE(std::abs(b.value - ref) <= b.abs_error_bound + 1e-12);
            REQUIRE(std::abs(b.value) <= 1.0);
        }
}

TEST_CASE("bessel quadrature doubling stays inside the bound") {
    for (std::uint64_t nu : {10u, 300u, 5000u})
        for (double x : {0.5 * nu, 1.0 * nu, 3.0 * nu}) {
            const auto a = bessel_j_quadrature(nu, x);
            const auto b = bessel_j_quadrature(nu, x, 4 * (static_cast<std::uint64_t>(x) + nu) + 256);
            REQUIRE(std::abs(a.value - b.value) <= a.abs_error_bound + 1e-15);
        }
}

TEST_CASE("bessel_abs_upper bounds |J|") {
    for (double nu : {2.0, 11.0, 120.0, 999.0})
        for (double x : {0.01, 1.0, 10.0, 100.0, 900.0, 2000.0})
            REQUIRE(std::abs(boost::math::cyl_bessel_j(nu, x)) <= bessel_abs_upper(nu, x) * (1 + 1e-12));
}

TEST_CASE("bessel_j_wide reaches large arguments") {
    const auto w = bessel_j_wide(7, 5e7);
    const double ref = boost::math::cyl_bessel_j(7.0, 5e7);
    CHECK(std::abs(w.value - ref) <= w.abs_error_bound + 1e-12);
    CHECK(w.abs_error_bound <= 1e-9);
}

TEST_CASE("bessel order bound with fitted constant") {
    double C = 0;
    for (std::uint64_t nu = 10; nu <= 5000; nu = nu * 3 / 2)
        for (double r = 0.5; r <= 3; r += 0.01)
            C = std::max(C, std::abs(bessel_j(nu, r * nu).value) * std::cbrt(static_cast<double>(nu)));
    MESSAGE("sup |J_nu(x)| nu^{1/3} = " << C);
    CHECK(C <= 5);
}

TEST_CASE("exponentially small regime") {
    for (double nu : {50.0, 200.0})
        for (double r : {0.3, 0.6, 0.9}) {
            const double v = bessel_j(static_cast<std::uint64_t>(nu), nu * r).value;
            REQUIRE(v > 0);
            REQUIRE(std::log(v) <= nu * (1 - r + std::log(r)) + std::log(bessel_j(static_cast<std::uint64_t>(nu), nu).value) + 1e-6);
        }
}

TEST_CASE("airy") {
    CHECK(airy_ai(0) == doctest::Approx(0.3550280538878172).epsilon(1e-12));
    CHECK(airy_ai(5) > 0);
    CHECK(airy_ai(5) < 1e-3);
    for (double x = -8; x <= 6; x += 0.37)
        REQUIRE(std::abs(airy_ai(x) - boost::math::airy_ai(x)) < 1e-11);
    CHECK(bessel_transition_approx(1000, 0) == doctest::Approx(std::cbrt(2.0) * 0.3550280538878172 / 10).epsilon(1e-10));
    CHECK(bessel_transition_approx(500, 1) > 0);
}

TEST_CASE("psi bump") {
    CHECK(psi_eval(1.5) == 0);
    CHECK(psi_eval(-1.0) == 0);
    CHECK(psi_eval(0) == doctest::Approx(psi_normalizer() * std::exp(-1.0)));
    const double mass = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(psi_eval, -1.0, 1.0, 15, 1e-14);
    CHECK(std::abs(mass - 1) < 1e-10);
}

TEST_CASE("phi is even, non-negative, band-limited") {
    CHECK(phi_eval(0) == doctest::Approx(1).epsilon(1e-10));
    for (double x = 0; x < 3000; x += 13.7) {
        REQUIRE(phi_eval(x) >= 0);
        REQUIRE(phi_eval(x) == doctest::Approx(phi_eval(-x)).epsilon(1e-12));
    }
    CHECK(phi_hat_eval(0.02) == 0);
    CHECK(phi_hat_eval(0.0101) == 0);
    CHECK(phi_hat_eval(0.0) > 0);
    // phi(x) = integral of phi-hat(xi) e(x xi); phi-hat is a smooth bump, so the
    // trapezoid rule on its support converges faster than any power
    std::vector<double> hat;
    const int M = 64;
    for (int i = 1; i < M; ++i) hat.push_back(phi_hat_eval(-0.01 + 0.02 * i / M));
    for (double x : {0.0, 20.0, 75.0}) {
        double v = 0;
        for (int i = 1; i < M; ++i) v += hat[i - 1] * std::cos(2 * std::numbers::pi * x * (-0.01 + 0.02 * i / M));
        v *= 0.02 / M;
        REQUIRE(std::abs(v - phi_eval(x)) < 1e-8);
    }
    const auto& env = phi_envelope();
    for (double x = 1; x < 5000; x *= 1.7) REQUIRE(phi_eval(x) <= env.constant * std::pow(x, -env.power) * (1 + 1e-9));
}

TEST_CASE("phi odd grid matches pointwise evaluation") {
    const auto g = phi_odd_grid(40, 50);
    for (std::size_t j = 1; j <= 50; ++j)
        REQUIRE(g[j - 1] == doctest::Approx(phi_eval((2.0 * j - 1) / 40)).epsilon(1e-9).scale(1e-14));
}

TEST_CASE("order-averaged bessel sum at the centre") {
    const double K = 2000;
    const double r = weighted_bessel_order_sum(K, 0.3, K) / bessel_j(2000, K).value;
    CHECK(r >= 0.45);
    CHECK(r <= 0.55);
    double sup = 0;
    for (double x = K - std::pow(K, 0.4) + 0.3; x < K + std::pow(K, 0.4); x += 1.1)
        sup = std::max(sup, std::abs(weighted_bessel_order_sum(K, 0.3, x)));
    CHECK(sup <= 10 * std::pow(K, -1.0 / 3));
    CHECK_THROWS_AS(weighted_bessel_order_sum(K, 0.4, K), std::invalid_argument);
}
