#pragma once
/// @file spectral.hpp
/// Spectral measures on [-2, 2]: Plancherel and semicircle laws, empirical
/// eigenvalue measures recovered from Hecke traces, interval discrepancy and
/// moment-based lower bounds for it.

#include <cstdint>
#include <optional>
#include <vector>

#include "hecke/petersson.hpp"

namespace hecke {

struct DiscreteMeasure {
    std::vector<double> atoms;  // sorted
    std::vector<double> weights;
    double total = 0;
};
/// Sorts atoms (carrying weights along) and checks the invariants.
DiscreteMeasure make_discrete(std::vector<double> atoms, std::vector<double> weights);
/// Uniform probability measure on the given atoms.
DiscreteMeasure uniform_discrete(std::vector<double> atoms);

struct ContinuousMeasure {
    enum class Kind { plancherel, semicircle };
    Kind kind = Kind::semicircle;
    std::uint64_t p = 0;  // plancherel only
    double cdf(double x) const;
    double density(double x) const;
};
ContinuousMeasure plancherel_measure(std::uint64_t p);
ContinuousMeasure semicircle_measure();

/// mu_p([-2, x]) by adaptive quadrature in x = 2 cos(theta). x outside
/// [-2, 2] is clamped and *clamped set.
double plancherel_cdf(std::uint64_t p, double x, bool* clamped = nullptr);
double semicircle_cdf(double x);

/// U_m(x/2) by the three-term recurrence.
double chebyshev_u_half(int m, double x);
/// Integral of U_m(x/2); m <= 200.
double chebyshev_moment(const DiscreteMeasure& mu, int m);
double chebyshev_moment(const ContinuousMeasure& mu, int m);

struct EmpiricalSpectrum {
    DiscreteMeasure measure;     // uniform weights 1/d
    std::vector<double> moments;  // c_m = normalized trace of T_{p^m}, m = 0..d
    double roundtrip_error = 0;   // max_m |chebyshev_moment(measure, m) - c_m|
    double max_coefficient_ratio = 0;  // max_j |e_j| / (C(d,j) 2^j)
    bool degraded = false;        // d > 20: recovery is flagged, not trusted to 1e-6
};
/// Limit above which the recovered elementary symmetric functions are
/// declared ill-conditioned: |e_j| > kCoefficientRatioLimit * C(d,j) 2^j.
constexpr double kCoefficientRatioLimit = 4.0;
constexpr int kMaxSpectrumDimension = 40;
/// Eigenvalues of T_p on S_k(N)* from the traces of T_{p^m}, m <= d.
EmpiricalSpectrum empirical_mu_star(int k, std::uint64_t N, std::uint64_t p);

/// delta_new(k, N, 1, p^m): the m-th Chebyshev moment of the harmonic weights.
PeterssonResult nu_moment(int k, std::uint64_t N, std::uint64_t p, int m, std::uint64_t l_max = 10000);

/// sup over closed intervals [a,b] of |d([a,b]) - c([a,b])|; d.total must be 1.
double discrepancy(const DiscreteMeasure& d, const ContinuousMeasure& c);
/// Same for two discrete probability measures.
double discrepancy(const DiscreteMeasure& d, const DiscreteMeasure& e);

/// max |U_m(x/2)| = m + 1 and total variation of U_m(x/2) on [-2, 2].
double chebyshev_total_variation(int m);
/// |moment_diffs[m]| / (2 (m+1) + TV_m).
double discrepancy_lower_bound_moments(const std::vector<double>& moment_diffs, int m);

/// |trace_new(p^m,k,N) - dim delta(n = square)/sqrt(n)| / (2 m^2 dim);
/// empty when dim = 0.
std::optional<double> trace_discrepancy_bound(std::uint64_t n, int k, std::uint64_t N);

}  // namespace hecke
