#include "hecke/petersson.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "hecke/arithmetic.hpp"
#include "hecke/kloosterman.hpp"
#include "hecke/special_functions.hpp"

namespace hecke {

namespace {

constexpr double kPi = std::numbers::pi;

struct Series {
    std::uint64_t a = 1, b = 1;
    double weight = 1;
    double x0 = 0;  // 4 pi sqrt(ab)
    std::uint64_t c_max = 0;
    double tail = 0;
};

// Moduli beyond this are only summed when the Bessel argument is still above
// the order there; past it the reported tail is whatever the bound gives.
constexpr std::uint64_t kModulusBudget = 20000;

// Certified bound on sum_{c > C} |S(a,b;c)|/c |J_nu(x0/c)| for x0/C <= nu,
// using |J_nu(x0/c)| <= B (C/c)^nu with B >= |J_nu(x0/C)| and the Weil bound.
// Two estimates, the smaller is kept:
//  sigma0(c) <= 2 sqrt(c):           2 sqrt(g) B C / (nu - 1)
//  partial summation with sum_{c<=t} sigma0(c) <= t (log t + 1):
//    sqrt(g) B sqrt(C) (nu + 1/2) ((log C + 1)/(nu - 1/2) + 1/(nu - 1/2)^2)
double tail_bound(double x0, double nu, double g, double C) {
    const double B = bessel_abs_upper(nu, x0 / C);
    const double crude = 2 * std::sqrt(g) * B * C / (nu - 1);
    const double a = nu - 0.5;
    const double abel = std::sqrt(g) * B * std::sqrt(C) * (nu + 0.5) * ((std::log(C) + 1) / a + 1 / (a * a));
    return std::min(crude, abel);
}

// Smallest C (up to the budget) past which 2 pi times the tail is <= tol.
void choose_cutoff(Series& s, double nu, double tol) {
    const double g = static_cast<double>(gcd_u64(s.a, s.b));
    const auto C0 = static_cast<std::uint64_t>(std::max(1.0, std::ceil(s.x0 / nu)));
    const std::uint64_t cap = std::max(C0, kModulusBudget);
    std::uint64_t C = C0;
    for (;;) {
        const double bound = tail_bound(s.x0, nu, g, static_cast<double>(C));
        if (2 * kPi * bound <= tol || C == cap) {
            s.c_max = C;
            s.tail = bound;
            return;
        }
        C = std::min(cap, C + std::max<std::uint64_t>(1, C / 64));
    }
}

// Runs the shared modulus loop: for each multiple c of M up to the largest
// cutoff, one unit table serves every series that still needs c. Per series,
// values[i] = 2 pi (-1)^{k/2} sum_c S/c J and errs[i] bounds the Bessel
// evaluation error in it (weights are not applied).
void kloosterman_bessel_sums(int k, std::uint64_t M, std::vector<Series>& series, double tol,
                             std::vector<double>* values, std::vector<double>* errs) {
    const double nu = k - 1;
    std::uint64_t c_top = 0;
    for (auto& s : series) {
        choose_cutoff(s, nu, tol);
        c_top = std::max(c_top, s.c_max);
    }
    std::vector<double> acc(series.size(), 0.0), comp(series.size(), 0.0), err(series.size(), 0.0);
    for (std::uint64_t c = M; c <= c_top; c += M) {
        if (c >= (1ULL << 31)) throw std::runtime_error("petersson: modulus out of range");
        UnitTable U(static_cast<std::uint32_t>(c));
        for (std::size_t i = 0; i < series.size(); ++i) {
            const auto& s = series[i];
            if (c > s.c_max) continue;
            const double S = U.sum(static_cast<std::int64_t>(s.a % c), static_cast<std::int64_t>(s.b % c));
            const auto J = bessel_j_wide(static_cast<std::uint64_t>(k - 1), s.x0 / static_cast<double>(c));
            const double term = S / static_cast<double>(c) * J.value;
            err[i] += 2 * kPi * std::abs(S) / static_cast<double>(c) * J.abs_error_bound;
            const double y = term - comp[i];
            const double t = acc[i] + y;
            comp[i] = (t - acc[i]) - y;
            acc[i] = t;
        }
    }
    const double sign = (k / 2) % 2 ? -1.0 : 1.0;
    values->assign(series.size(), 0.0);
    for (std::size_t i = 0; i < series.size(); ++i) (*values)[i] = 2 * kPi * sign * acc[i];
    *errs = std::move(err);
}

void check_weight(int k, const char* who) {
    if (k % 2) throw std::invalid_argument(std::string(who) + ": k must be even");
    if (k < 4) throw std::invalid_argument(std::string(who) + ": k must be >= 4");
}

}  // namespace

std::vector<PeterssonResult> delta_full_batch(int k, std::uint64_t N,
                                              const std::vector<std::pair<std::uint64_t, std::uint64_t>>& pairs,
                                              double tail_tol) {
    check_weight(k, "delta_full");
    if (N == 0) throw std::invalid_argument("delta_full: N must be positive");
    std::vector<Series> series;
    for (auto [m, n] : pairs) {
        if (m == 0 || n == 0) throw std::invalid_argument("delta_full: m, n must be positive");
        Series s;
        s.a = m;
        s.b = n;
        s.x0 = 4 * kPi * std::sqrt(static_cast<double>(m) * static_cast<double>(n));
        series.push_back(s);
    }
    std::vector<PeterssonResult> out;
    if (series.empty()) return out;
    std::vector<double> values, errs;
    kloosterman_bessel_sums(k, N, series, tail_tol, &values, &errs);
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto [m, n] = pairs[i];
        PeterssonResult r{k, N, m, n, 0, 0, series[i].c_max, 1};
        r.value = (m == n ? 1.0 : 0.0) + values[i];
        r.truncation_bound = 2 * kPi * series[i].tail + errs[i];
        out.push_back(r);
    }
    return out;
}

PeterssonResult delta_full(int k, std::uint64_t N, std::uint64_t m, std::uint64_t n, double tail_tol) {
    return delta_full_batch(k, N, {{m, n}}, tail_tol).front();
}

PeterssonResult delta_new(int k, std::uint64_t N, std::uint64_t m, std::uint64_t n, std::uint64_t l_max,
                          double tail_tol) {
    check_weight(k, "delta_new");
    auto F = factor(N);
    if (!F.squarefree()) throw std::invalid_argument("delta_new: N must be squarefree");
    if (m == 0 || n == 0) throw std::invalid_argument("delta_new: m, n must be positive");
    if (gcd_u64(m, N) != 1 || gcd_u64(n, N) != 1) throw std::invalid_argument("delta_new: gcd(mn, N) must be 1");
    if (l_max == 0) throw std::invalid_argument("delta_new: l_max must be positive");

    PeterssonResult r{k, N, m, n, 0, 0, 0, 1};
    const double x_mn = 4 * kPi * std::sqrt(static_cast<double>(m) * static_cast<double>(n));
    const double s0mn = static_cast<double>(sigma0(factor(m)) * sigma0(factor(n)));
    for (auto L : F.divisors()) {
        const std::uint64_t M = N / L;
        const auto primes = factor(L).primes();
        // l | L^infinity up to and including the first one past l_max
        std::vector<std::uint64_t> ls{1};
        const std::uint64_t reach = l_max * (primes.empty() ? 1 : primes.back());
        for (auto p : primes) {
            const std::size_t cur = ls.size();
            for (std::size_t i = 0; i < cur; ++i)
                for (std::uint64_t v = ls[i] * p; v <= reach; v *= p) ls.push_back(v);
        }
        std::sort(ls.begin(), ls.end());
        if (auto it = std::upper_bound(ls.begin(), ls.end(), l_max); it != ls.end()) ls.erase(it + 1, ls.end());
        const double outer = mobius(factor(L)) / static_cast<double>(L);
        std::vector<Series> series;
        for (auto l : ls) {
            Series s;
            s.a = m * l * l;
            s.b = n;
            s.weight = outer / static_cast<double>(l);
            s.x0 = x_mn * static_cast<double>(l);
            series.push_back(s);
            if (s.a == n) r.value += s.weight;
        }
        std::vector<double> values, errs;
        kloosterman_bessel_sums(k, M, series, tail_tol, &values, &errs);
        double bound = 0;
        for (std::size_t i = 0; i < series.size(); ++i) {
            const double w = series[i].weight;
            r.value += w * values[i];
            bound += std::abs(w) * (2 * kPi * series[i].tail + errs[i]);
            r.c_max = std::max(r.c_max, series[i].c_max);
        }
        r.l_max = std::max(r.l_max, ls.back());
        if (L > 1) {
            // |Delta_{k,M}(a,b)| <= sigma0(a) sigma0(b) Delta_{k,M}(1,1) for a, b coprime to M;
            // sum_{l | L^inf} sigma0(l^2)/l = prod (1+1/p)/(1-1/p)^2.
            double full = 1, partial = 0;
            for (auto p : primes) {
                const double q = 1.0 / static_cast<double>(p);
                full *= (1 + q) / ((1 - q) * (1 - q));
            }
            for (auto l : ls) partial += static_cast<double>(sigma0(factor(l * l))) / static_cast<double>(l);
            auto d11 = delta_full(k, M, 1, 1, tail_tol);
            bound += std::abs(outer) * s0mn * (d11.value + d11.truncation_bound) * std::max(0.0, full - partial);
        }
        r.truncation_bound += bound;
    }
    return r;
}

namespace {

void check_window(int k, std::uint64_t N, std::uint64_t m, std::uint64_t n, const char* who) {
    check_weight(k, who);
    if (!factor(N).squarefree()) throw std::invalid_argument(std::string(who) + ": N must be squarefree");
    if (gcd_u64(m, N) != 1 || gcd_u64(n, N) != 1) throw std::invalid_argument(std::string(who) + ": gcd(mn, N) must be 1");
    const double x = 4 * kPi * std::sqrt(static_cast<double>(m) * static_cast<double>(n));
    if (!(std::abs(x - k) < 2 * std::cbrt(static_cast<double>(k))))
        throw std::invalid_argument(std::string(who) + ": (m, n) outside the transition window");
}

}  // namespace

double maint_bessel_term(int k, std::uint64_t N, std::uint64_t m, std::uint64_t n) {
    check_window(k, N, m, n, "maint_bessel_term");
    auto F = factor(N);
    double prod = 1;
    for (auto p : F.primes()) prod *= 1 - 1.0 / (static_cast<double>(p) * static_cast<double>(p));
    const double x = 4 * kPi * std::sqrt(static_cast<double>(m) * static_cast<double>(n));
    const double J = bessel_j(static_cast<std::uint64_t>(k - 1), x).value;
    const double sign = (k / 2) % 2 ? -1.0 : 1.0;
    return 2 * kPi * sign * mobius(F) / static_cast<double>(N) * prod * J;
}

double maint_main_terms(int k, std::uint64_t N, std::uint64_t m, std::uint64_t n) {
    const double b = maint_bessel_term(k, N, m, n);
    const double diag = m == n ? static_cast<double>(euler_phi(N)) / static_cast<double>(N) : 0.0;
    return diag + b;
}

MaintResidual maint_residual(int k, std::uint64_t N, std::uint64_t m, std::uint64_t n, std::uint64_t l_max) {
    MaintResidual r;
    r.main_terms = maint_main_terms(k, N, m, n);
    r.bessel_term = maint_bessel_term(k, N, m, n);
    r.newform = delta_new(k, N, m, n, l_max);
    r.residual = r.newform.value - r.main_terms;
    return r;
}

OrbitalIntegral orbital_integral_A(double t, int k) {
    if (k < 8 || k > 60 || k % 2) throw std::invalid_argument("orbital_integral_A: k must be even in [8, 60]");
    if (!(t >= 0.3 && t <= 3)) throw std::invalid_argument("orbital_integral_A: t must lie in [0.3, 3]");
    using C = std::complex<double>;
    using boost::math::quadrature::gauss_kronrod;
    constexpr double inf = std::numeric_limits<double>::infinity();
    // With s = x + y and d = y - x the matrix
    //   (1 -x; 0 1)(0 -1/t; t 0)(1 y; 0 1) = (-xt, -1/t - xty; t, ty)
    // gives -b + c + (a+d) i = alpha + beta s^2 with
    //   alpha = 1/t + t - t d^2/4 + i t d,  beta = t/4,  dx dy = ds dd / 2.
    double inner_err = 0;
    auto inner = [&](double d) {
        const C alpha(1 / t + t - t * d * d / 4, t * d);
        const double beta = t / 4;
        auto g = [&](double s) { return std::pow(C(0, 2) / (alpha + beta * s * s), static_cast<double>(k)); };
        double e = 0;
        C v = gauss_kronrod<double, 31>::integrate(g, 0.0, inf, 15, 1e-12, &e);
        inner_err = std::max(inner_err, e);
        return 2.0 * v * std::exp(C(0, k * d / 2));  // integrand even in s
    };
    double outer_err = 0;
    C I = gauss_kronrod<double, 31>::integrate(inner, -inf, inf, 15, 1e-11, &outer_err);
    const double pref = (k - 1) / (4 * kPi) * 0.5;
    I *= pref;

    OrbitalIntegral out;
    out.quadrature = I;
    out.quadrature_error = pref * outer_err;
    // e^{-k} i^k 4 pi k^{k-1} / (2 t (k-2)!) J_{k-1}(k/t), magnitude in log space
    const auto J = bessel_j(static_cast<std::uint64_t>(k - 1), k / t);
    const double logmag = -k + std::log(4 * kPi) + (k - 1) * std::log(static_cast<double>(k)) - std::log(2 * t) -
                          std::lgamma(static_cast<double>(k - 1));
    const double sign = (k / 2) % 2 ? -1.0 : 1.0;
    out.closed_form = C(sign * std::exp(logmag) * J.value, 0);
    if (!(out.quadrature_error <= 1e-8 * std::abs(I) + 1e-15) || !std::isfinite(I.real()))
        throw std::runtime_error("orbital_integral_A: adaptive quadrature did not converge");
    return out;
}

}  // namespace hecke
