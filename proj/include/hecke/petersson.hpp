#pragma once
/// @file petersson.hpp
/// Geometric side of the Petersson formula (full level and newforms of
/// squarefree level), the transition-range main term, and the orbital
/// integral A(t, k) by two routes.

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

namespace hecke {

struct PeterssonResult {
    int k = 0;
    std::uint64_t N = 1;
    std::uint64_t m = 1, n = 1;
    double value = 0;
    double truncation_bound = 0;  // bound on everything discarded
    std::uint64_t c_max = 0;      // largest modulus summed (over all l)
    std::uint64_t l_max = 1;      // largest l summed (newform formula)
};

/// delta(m,n) + 2 pi (-1)^{k/2} sum_{N | c} S(m,n;c)/c J_{k-1}(4 pi sqrt(mn)/c).
/// The c-sum stops once the certified tail is below tail_tol, or at a fixed
/// modulus budget, whichever comes first; truncation_bound is the certified
/// tail at the stopping point plus Bessel evaluation error.
PeterssonResult delta_full(int k, std::uint64_t N, std::uint64_t m, std::uint64_t n, double tail_tol = 1e-9);
/// Same for several (m, n) at once; the unit tables are shared.
std::vector<PeterssonResult> delta_full_batch(int k, std::uint64_t N,
                                              const std::vector<std::pair<std::uint64_t, std::uint64_t>>& pairs,
                                              double tail_tol = 1e-9);

/// sum_{LM=N} mu(L)/L sum_{l | L^inf, l <= l_max} (1/l) delta_full(k, M, m l^2, n).
PeterssonResult delta_new(int k, std::uint64_t N, std::uint64_t m, std::uint64_t n, std::uint64_t l_max = 10000,
                          double tail_tol = 1e-9);

/// phi(N)/N delta(m,n) + 2 pi (-1)^{k/2} (mu(N)/N) prod_{p|N}(1-p^-2) J_{k-1}(4 pi sqrt(mn)).
double maint_main_terms(int k, std::uint64_t N, std::uint64_t m, std::uint64_t n);
/// The Bessel part of maint_main_terms alone.
double maint_bessel_term(int k, std::uint64_t N, std::uint64_t m, std::uint64_t n);

struct MaintResidual {
    double residual = 0;
    double main_terms = 0;
    double bessel_term = 0;
    PeterssonResult newform;
};
MaintResidual maint_residual(int k, std::uint64_t N, std::uint64_t m, std::uint64_t n, std::uint64_t l_max = 10000);

struct OrbitalIntegral {
    std::complex<double> quadrature;
    std::complex<double> closed_form;
    double quadrature_error = 0;
};
/// A(t,k): the double integral of the weight-k matrix coefficient over two
/// horocycles, against e(k(y-x)/4pi), by nested adaptive Gauss-Kronrod;
/// and the Bessel closed form evaluated in log space.
OrbitalIntegral orbital_integral_A(double t, int k);

}  // namespace hecke
