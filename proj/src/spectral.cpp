#include "hecke/spectral.hpp"

#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>
#include <cmath>
#include <mutex>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "hecke/arithmetic.hpp"
#include "hecke/eichler_selberg.hpp"

namespace hecke {

namespace {

constexpr double kPi = std::numbers::pi;
using mp = boost::multiprecision::cpp_bin_float_50;
using mpc = boost::multiprecision::cpp_complex_50;

void check_prime(std::uint64_t p, const char* who) {
    if (p < 2 || factor(p).factors.size() != 1 || factor(p).factors[0].second != 1)
        throw std::invalid_argument(std::string(who) + ": p must be prime");
}

}  // namespace

DiscreteMeasure make_discrete(std::vector<double> atoms, std::vector<double> weights) {
    if (atoms.size() != weights.size()) throw std::invalid_argument("make_discrete: size mismatch");
    if (atoms.empty()) throw std::invalid_argument("make_discrete: no atoms");
    std::vector<std::size_t> idx(atoms.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto i, auto j) { return atoms[i] < atoms[j]; });
    DiscreteMeasure d;
    for (auto i : idx) {
        if (!(std::abs(atoms[i]) <= 2 + 1e-6)) throw std::invalid_argument("make_discrete: atom outside [-2, 2]");
        if (!(weights[i] > 0)) throw std::invalid_argument("make_discrete: weights must be positive");
        d.atoms.push_back(atoms[i]);
        d.weights.push_back(weights[i]);
        d.total += weights[i];
    }
    return d;
}

DiscreteMeasure uniform_discrete(std::vector<double> atoms) {
    std::vector<double> w(atoms.size(), 1.0 / static_cast<double>(atoms.size()));
    auto d = make_discrete(std::move(atoms), std::move(w));
    d.total = 1;
    return d;
}

double plancherel_cdf(std::uint64_t p, double x, bool* clamped) {
    check_prime(p, "plancherel_cdf");
    bool c = false;
    if (x < -2) x = -2, c = true;
    if (x > 2) x = 2, c = true;
    if (clamped) *clamped = c;
    if (x == -2) return 0;
    // x = 2 cos(theta): density dx = (p+1)/pi * 2 sin^2 / ((sqrt p + 1/sqrt p)^2 - 4 cos^2) dtheta
    const double P = static_cast<double>(p);
    const double s = P + 2 + 1 / P;
    auto g = [&](double th) {
        const double sn = std::sin(th), cs = std::cos(th);
        return (P + 1) / kPi * 2 * sn * sn / (s - 4 * cs * cs);
    };
    const double th = std::acos(std::clamp(x / 2, -1.0, 1.0));
    double err = 0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, th, kPi, 20, 1e-14, &err);
    return std::clamp(v, 0.0, 1.0);
}

double semicircle_cdf(double x) {
    if (x <= -2) return 0;
    if (x >= 2) return 1;
    const double th = std::acos(x / 2);
    return (kPi - th) / kPi + std::sin(2 * th) / (2 * kPi);
}

double ContinuousMeasure::cdf(double x) const {
    return kind == Kind::plancherel ? plancherel_cdf(p, x) : semicircle_cdf(x);
}

double ContinuousMeasure::density(double x) const {
    if (x <= -2 || x >= 2) return 0;
    const double r = std::sqrt(1 - x * x / 4);
    if (kind == Kind::semicircle) return r / kPi;
    const double P = static_cast<double>(p);
    return (P + 1) / kPi * r / (P + 2 + 1 / P - x * x);
}

ContinuousMeasure plancherel_measure(std::uint64_t p) {
    check_prime(p, "plancherel_measure");
    return {ContinuousMeasure::Kind::plancherel, p};
}

ContinuousMeasure semicircle_measure() { return {ContinuousMeasure::Kind::semicircle, 0}; }

double chebyshev_u_half(int m, double x) {
    if (m < 0) throw std::invalid_argument("chebyshev_u_half: m must be >= 0");
    double u0 = 1, u1 = x;
    if (m == 0) return u0;
    for (int j = 1; j < m; ++j) {
        const double u2 = x * u1 - u0;
        u0 = u1;
        u1 = u2;
    }
    return u1;
}

double chebyshev_moment(const DiscreteMeasure& mu, int m) {
    if (m < 0 || m > 200) throw std::invalid_argument("chebyshev_moment: m must lie in [0, 200]");
    double s = 0;
    for (std::size_t i = 0; i < mu.atoms.size(); ++i) s += mu.weights[i] * chebyshev_u_half(m, mu.atoms[i]);
    return s;
}

double chebyshev_moment(const ContinuousMeasure& mu, int m) {
    if (m < 0 || m > 200) throw std::invalid_argument("chebyshev_moment: m must lie in [0, 200]");
    if (mu.kind == ContinuousMeasure::Kind::semicircle) return m == 0 ? 1.0 : 0.0;
    if (m % 2) return 0.0;
    return std::pow(static_cast<double>(mu.p), -m / 2.0);
}

EmpiricalSpectrum empirical_mu_star(int k, std::uint64_t N, std::uint64_t p) {
    check_prime(p, "empirical_mu_star");
    if (gcd_u64(p, N) != 1) throw std::invalid_argument("empirical_mu_star: gcd(p, N) must be 1");
    const double dim_d = trace_new(1, k, N).total;
    const auto d = static_cast<int>(std::llround(dim_d));
    if (d < 1) throw std::invalid_argument("empirical_mu_star: newform space is empty");
    if (d > kMaxSpectrumDimension)
        throw std::invalid_argument("empirical_mu_star: dimension " + std::to_string(d) + " exceeds 40");
    // T_{p^d} needs class numbers up to 4 p^d
    double pd = 1;
    for (int i = 0; i < d; ++i) pd *= static_cast<double>(p);
    if (pd > 1048576.0) throw std::invalid_argument("empirical_mu_star: p^dim exceeds 2^20");

    EmpiricalSpectrum out;
    std::uint64_t pm = 1;
    for (int m = 0; m <= d; ++m, pm *= p) out.moments.push_back(trace_new(pm, k, N).total);

    // power sums P_j = sum_f x_f^j from x^j = sum_i A[j][i] U_i(x/2)
    std::vector<mp> P(d + 1);
    std::vector<mp> A{mp(1)};
    for (int j = 0; j <= d; ++j) {
        mp s = 0;
        for (std::size_t i = 0; i < A.size(); ++i) s += A[i] * mp(out.moments[i]);
        P[j] = s;
        std::vector<mp> B(A.size() + 1, mp(0));
        for (std::size_t i = 0; i < A.size(); ++i) {
            B[i + 1] += A[i];
            if (i) B[i - 1] += A[i];
        }
        A = std::move(B);
    }
    // Newton identities: j e_j = sum_{i=1}^j (-1)^{i-1} e_{j-i} P_i
    std::vector<mp> e(d + 1, mp(0));
    e[0] = 1;
    for (int j = 1; j <= d; ++j) {
        mp s = 0;
        for (int i = 1; i <= j; ++i) s += (i % 2 ? 1 : -1) * e[j - i] * P[i];
        e[j] = s / j;
    }
    double binom = 1;
    for (int j = 1; j <= d; ++j) {
        binom = binom * (d - j + 1) / j;
        const double ratio = std::abs(e[j].convert_to<double>()) / (binom * std::ldexp(1.0, j));
        out.max_coefficient_ratio = std::max(out.max_coefficient_ratio, ratio);
    }
    if (out.max_coefficient_ratio > kCoefficientRatioLimit)
        throw std::runtime_error("empirical_mu_star: characteristic polynomial is ill-conditioned");

    // monic coefficients, highest degree first: x^d - e1 x^{d-1} + e2 x^{d-2} ...
    std::vector<mp> coef(d + 1);
    for (int j = 0; j <= d; ++j) coef[j] = (j % 2 ? -1 : 1) * e[j];
    auto eval = [&](const mpc& z, mpc& dz) {
        mpc v = coef[0];
        dz = 0;
        for (int j = 1; j <= d; ++j) {
            dz = dz * z + v;
            v = v * z + mpc(coef[j]);
        }
        return v;
    };
    // Aberth iteration from points on a circle enclosing [-2, 2]
    std::vector<mpc> z(d);
    for (int i = 0; i < d; ++i) {
        const double a = 2 * kPi * (i + 0.25) / d + 0.4;
        z[i] = mpc(mp(2.5 * std::cos(a)), mp(2.5 * std::sin(a)));
    }
    const mp tiny("1e-40");
    bool converged = false;
    for (int it = 0; it < 1000 && !converged; ++it) {
        mp worst = 0;
        for (int i = 0; i < d; ++i) {
            mpc dv;
            const mpc v = eval(z[i], dv);
            if (abs(v) == 0) continue;
            const mpc w = v / dv;
            mpc s = 0;
            for (int j = 0; j < d; ++j)
                if (j != i) s += mpc(1) / (z[i] - z[j]);
            const mpc step = w / (mpc(1) - w * s);
            z[i] -= step;
            worst = std::max(worst, mp(abs(step)));
        }
        converged = worst < tiny;
    }
    if (!converged) throw std::runtime_error("empirical_mu_star: root finding did not converge");

    std::vector<double> atoms;
    for (auto& r : z) {
        const double re = r.real().convert_to<double>();
        const double im = r.imag().convert_to<double>();
        if (std::abs(im) > 1e-4 || std::abs(re) > 2 + 1e-4)
            throw std::runtime_error("empirical_mu_star: recovered eigenvalue violates the Deligne bound");
        atoms.push_back(std::clamp(re, -2.0, 2.0));
    }
    out.measure = make_discrete(atoms, std::vector<double>(atoms.size(), 1.0 / d));
    for (int m = 0; m <= d; ++m)
        out.roundtrip_error = std::max(out.roundtrip_error, std::abs(d * chebyshev_moment(out.measure, m) - out.moments[m]));
    out.degraded = d > 20;
    return out;
}

PeterssonResult nu_moment(int k, std::uint64_t N, std::uint64_t p, int m, std::uint64_t l_max) {
    check_prime(p, "nu_moment");
    if (m < 0) throw std::invalid_argument("nu_moment: m must be >= 0");
    std::uint64_t pm = 1;
    for (int i = 0; i < m; ++i) pm *= p;
    return delta_new(k, N, 1, pm, l_max);
}

namespace {

// sup over closed [a,b] of D([a,b]) - G([a,b]). Shrinking [a,b] to the
// smallest interval holding the same atoms only lowers G, so both ends can be
// taken at atoms. G(x-) and G(x) come from cdf_left / cdf_right.
template <class L, class R>
double heavy_side(const std::vector<double>& xs, const std::vector<double>& ws, L cdf_left, R cdf_right) {
    const std::size_t A = xs.size();
    std::vector<double> W(A + 1, 0.0), Fl(A), Fr(A);
    for (std::size_t i = 0; i < A; ++i) {
        W[i + 1] = W[i] + ws[i];
        Fl[i] = cdf_left(xs[i]);
        Fr[i] = cdf_right(xs[i]);
    }
    double best = 0;
    for (std::size_t i = 0; i < A; ++i)
        for (std::size_t j = i; j < A; ++j) best = std::max(best, (W[j + 1] - W[i]) - (Fr[j] - Fl[i]));
    return best;
}

// sup over closed [a,b] of G([a,b]) - D([a,b]) for continuous G: grow [a,b]
// until it meets an excluded atom or an end of [-2, 2]. The supremum over
// intervals strictly inside the gap (x_i, x_j) is G(x_j) - G(x_i) minus the
// atoms in between.
template <class F>
double light_side(const std::vector<double>& xs, const std::vector<double>& ws, F cdf) {
    const std::size_t A = xs.size();
    std::vector<double> W(A + 1, 0.0), Fx(A);
    for (std::size_t i = 0; i < A; ++i) {
        W[i + 1] = W[i] + ws[i];
        Fx[i] = cdf(xs[i]);
    }
    double best = 0;
    for (std::size_t i = 0; i <= A; ++i) {
        const double Fa = i == 0 ? 0.0 : Fx[i - 1];
        for (std::size_t j = i; j <= A; ++j) {
            const double Fb = j == A ? 1.0 : Fx[j];
            best = std::max(best, (Fb - Fa) - (W[j] - W[i]));
        }
    }
    return best;
}

}  // namespace

double discrepancy(const DiscreteMeasure& d, const ContinuousMeasure& c) {
    if (std::abs(d.total - 1) > 1e-9) throw std::invalid_argument("discrepancy: discrete measure must have total 1");
    auto F = [&](double x) { return c.cdf(x); };
    return std::max(heavy_side(d.atoms, d.weights, F, F), light_side(d.atoms, d.weights, F));
}

double discrepancy(const DiscreteMeasure& d, const DiscreteMeasure& e) {
    if (std::abs(d.total - 1) > 1e-9 || std::abs(e.total - 1) > 1e-9)
        throw std::invalid_argument("discrepancy: measures must have total 1");
    auto mass_below = [](const DiscreteMeasure& m, double x, bool inclusive) {
        double s = 0;
        for (std::size_t i = 0; i < m.atoms.size() && (inclusive ? m.atoms[i] <= x : m.atoms[i] < x); ++i)
            s += m.weights[i];
        return s;
    };
    auto side = [&](const DiscreteMeasure& a, const DiscreteMeasure& b) {
        return heavy_side(
            a.atoms, a.weights, [&](double x) { return mass_below(b, x, false); },
            [&](double x) { return mass_below(b, x, true); });
    };
    return std::max(side(d, e), side(e, d));
}

double chebyshev_total_variation(int m) {
    if (m < 0 || m > 200) throw std::invalid_argument("chebyshev_total_variation: m must lie in [0, 200]");
    static std::mutex mu;
    static std::array<double, 201> memo{};
    static std::array<bool, 201> have{};
    {
        std::lock_guard lock(mu);
        if (have[m]) return memo[m];
    }
    // U_m(cos th) = sin((m+1) th)/sin th; monotone in x between its critical
    // points, so TV is the sum of jumps between consecutive extrema.
    auto f = [m](double th) {
        const double s = std::sin(th);
        if (std::abs(s) < 1e-300) return th < 1 ? m + 1.0 : ((m % 2) ? -(m + 1.0) : m + 1.0);
        return std::sin((m + 1) * th) / s;
    };
    const int G = 64 * (m + 1);
    std::vector<double> ext{f(0.0)};
    double prev = f(0.0), cur = f(kPi / G);
    for (int i = 1; i < G; ++i) {
        const double next = f(kPi * (i + 1) / G);
        if ((cur - prev) * (next - cur) < 0) {
            // golden-section refinement of the extremum in [th_{i-1}, th_{i+1}]
            const double sgn = cur > prev ? 1.0 : -1.0;
            double a = kPi * (i - 1) / G, b = kPi * (i + 1) / G;
            const double gr = (std::sqrt(5.0) - 1) / 2;
            double c = b - gr * (b - a), d = a + gr * (b - a);
            for (int it = 0; it < 80; ++it) {
                if (sgn * f(c) > sgn * f(d))
                    b = d;
                else
                    a = c;
                c = b - gr * (b - a);
                d = a + gr * (b - a);
            }
            ext.push_back(std::max(sgn * f(0.5 * (a + b)), sgn * cur) * sgn);
        }
        prev = cur;
        cur = next;
    }
    ext.push_back(f(kPi));
    double tv = 0;
    for (std::size_t i = 1; i < ext.size(); ++i) tv += std::abs(ext[i] - ext[i - 1]);
    std::lock_guard lock(mu);
    memo[m] = tv;
    have[m] = true;
    return tv;
}

double discrepancy_lower_bound_moments(const std::vector<double>& moment_diffs, int m) {
    if (m < 1) throw std::invalid_argument("discrepancy_lower_bound_moments: m must be >= 1");
    if (static_cast<std::size_t>(m) >= moment_diffs.size())
        throw std::invalid_argument("discrepancy_lower_bound_moments: index out of range");
    return std::abs(moment_diffs[m]) / (2.0 * (m + 1) + chebyshev_total_variation(m));
}

std::optional<double> trace_discrepancy_bound(std::uint64_t n, int k, std::uint64_t N) {
    auto F = factor(n);
    if (F.factors.size() != 1) throw std::invalid_argument("trace_discrepancy_bound: n must be a prime power");
    const auto [p, m] = F.factors[0];
    if (gcd_u64(p, N) != 1) throw std::invalid_argument("trace_discrepancy_bound: gcd(n, N) must be 1");
    const auto dim = std::llround(trace_new(1, k, N).total);
    if (dim == 0) return std::nullopt;
    const double main = m % 2 ? 0.0 : static_cast<double>(dim) / std::sqrt(static_cast<double>(n));
    return std::abs(trace_new(n, k, N).total - main) / (2.0 * m * m * static_cast<double>(dim));
}

}  // namespace hecke
