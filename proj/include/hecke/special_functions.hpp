#pragma once
/// @file special_functions.hpp
/// Bessel J of integer order with error bounds, Airy Ai, and the two test
/// functions used for weight averaging (compact bump psi, band-limited phi).

#include <cstdint>
#include <mutex>
#include <string>
#include <vector>

namespace hecke {

enum class BesselMethod { series, quadrature, debye };
std::string to_string(BesselMethod m);

struct BesselEval {
    std::uint64_t order = 0;
    double argument = 0;
    double value = 0;
    double abs_error_bound = 0;
    BesselMethod method = BesselMethod::series;
};

/// J_order(x) for order <= 1e5, 0 <= x <= 1e6.
BesselEval bessel_j(std::uint64_t order, double x);
/// bessel_j extended to x <= 1e12 through the Debye and Hankel expansions
/// (error bound up to 1e-9 beyond x = 1e6).
BesselEval bessel_j_wide(std::uint64_t order, double x);
/// Forced trapezoid evaluation with a given number of nodes on [0, pi]
/// (used by the doubling self-check). nodes = 0 picks the default count.
BesselEval bessel_j_quadrature(std::uint64_t order, double x, std::uint64_t nodes = 0);

/// Upper bound for |J_nu(x)| valid for all x >= 0 (power bound and the
/// exponential-regime bound, whichever is smaller; 1 otherwise).
double bessel_abs_upper(double nu, double x);

double airy_ai(double x);
double bessel_transition_approx(double alpha, double a);

/// c * exp(-1/(1-t^2)) on (-1,1), normalized to unit mass.
double psi_eval(double t);
double psi_normalizer();

/// phi = (g-check / g-check(0))^2 with g(xi) = exp(-1/(1-(xi/h)^2)), h = 1/200.
/// phi(0) = 1 and phi-hat = (g*g)/g-check(0)^2 is supported in [-1/100, 1/100].
double phi_eval(double x);
double phi_hat_eval(double xi);
constexpr double kPhiSeedHalfwidth = 1.0 / 200.0;

/// Envelope phi(x) <= C * |x|^-p, C maximized over a dense table once.
struct PhiEnvelope {
    int power = 12;
    double constant = 0;
    double table_limit = 0;
};
const PhiEnvelope& phi_envelope();

/// phi((2j-1)/T) for j = 1..count, evaluated in bulk.
std::vector<double> phi_odd_grid(double T, std::size_t count);
/// Smallest X such that sum_{k even, (k-1)/T >= X} phi((k-1)/T) * W <= tol.
double phi_truncation_point(double T, double W, double tol);

double weighted_bessel_order_sum(double K, double delta, double x);

}  // namespace hecke
