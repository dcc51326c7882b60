#include "hecke/special_functions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <stdexcept>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

namespace hecke {

namespace {

using std::numbers::pi;
using mp50 = boost::multiprecision::cpp_bin_float_50;
using mp100 = boost::multiprecision::cpp_bin_float_100;

constexpr double kEps = 2.220446049250313e-16;
constexpr double kEpsLong = 1.0842021724855044e-19;

// ---------------------------------------------------------------- Debye

constexpr int kDebyeTerms = 20;

struct DebyePolys {
    // coeff[k][j] multiplies p^j in u_k(p)
    std::array<std::vector<long double>, kDebyeTerms + 1> coeff;
    DebyePolys() {
        coeff[0] = {1.0L};
        for (int k = 0; k < kDebyeTerms; ++k) {
            const auto& a = coeff[k];
            std::vector<long double> b(a.size() + 3, 0.0L);
            for (std::size_t j = 0; j < a.size(); ++j) {
                long double jj = static_cast<long double>(j);
                // (1/2) p^2 (1 - p^2) u'
                if (j > 0) {
                    b[j + 1] += 0.5L * jj * a[j];
                    b[j + 3] -= 0.5L * jj * a[j];
                }
                // (1/8) int_0^p (1 - 5 q^2) u(q) dq
                b[j + 1] += a[j] / (8.0L * (jj + 1));
                b[j + 3] -= 5.0L * a[j] / (8.0L * (jj + 3));
            }
            coeff[k + 1] = std::move(b);
        }
    }
};

const DebyePolys& debye_polys() {
    static const DebyePolys polys;
    return polys;
}

struct DebyeResult {
    double value, err;
};

// J_nu(x) for x != nu from the Debye expansions; nullopt when the series
// does not reach the requested accuracy.
std::optional<DebyeResult> bessel_debye(double nu, double x) {
    if (nu < 20 || x <= 0) return std::nullopt;
    const auto& P = debye_polys();
    const long double lnu = nu, lx = x;
    if (x > nu) {
        long double s = std::sqrt((lx - lnu) * (lx + lnu));  // nu tan(beta)
        long double tanb = s / lnu;
        long double cotb = lnu / s;
        long double beta = std::atan2(s, lnu);
        long double xi = s - lnu * beta - static_cast<long double>(pi) / 4;
        long double se = 0, so = 0, last = 0, prev = INFINITY, nupow = 1;
        bool converged = false;
        for (int k = 0; k <= kDebyeTerms; ++k) {
            // u_k(i c): even k real, odd k purely imaginary
            long double acc = 0, cp = 1;
            for (std::size_t j = 0; j < P.coeff[k].size(); ++j) {
                if (P.coeff[k][j] != 0) {
                    int r = static_cast<int>(j % 4);
                    long double sign = (r == 0 || r == 1) ? 1.0L : -1.0L;
                    acc += sign * P.coeff[k][j] * cp;
                }
                cp *= cotb;
            }
            long double term = acc / nupow;
            long double mag = std::fabs(term);
            if (k > 1 && mag > prev) break;
            if (k % 2 == 0)
                se += term;
            else
                so += term;
            last = mag;
            prev = mag;
            if (k > 0 && mag < 1e-18L) {
                converged = true;
                break;
            }
            nupow *= lnu;
        }
        if (!converged && last > 1e-15L) return std::nullopt;
        long double pref = std::sqrt(2.0L / (static_cast<long double>(pi) * lnu * tanb));
        long double v = pref * (std::cos(xi) * se + std::sin(xi) * so);
        double err = static_cast<double>(pref * (2 * last + 8 * kEpsLong * (std::fabs(xi) + 1)));
        return DebyeResult{static_cast<double>(v), err};
    }
    if (x < nu) {
        long double s = std::sqrt((lnu - lx) * (lnu + lx));  // nu tanh(alpha)
        long double th = s / lnu;
        long double p = lnu / s;
        long double alpha = std::atanh(th);
        long double expo = s - lnu * alpha;
        long double sum = 0, last = 0, prev = INFINITY, nupow = 1;
        bool converged = false;
        for (int k = 0; k <= kDebyeTerms; ++k) {
            long double acc = 0;
            for (std::size_t j = P.coeff[k].size(); j-- > 0;) acc = acc * p + P.coeff[k][j];
            long double term = acc / nupow;
            long double mag = std::fabs(term);
            if (k > 1 && mag > prev) break;
            sum += term;
            last = mag;
            prev = mag;
            if (k > 0 && mag < 1e-18L) {
                converged = true;
                break;
            }
            nupow *= lnu;
        }
        if (!converged && last > 1e-15L) return std::nullopt;
        long double pref = std::exp(expo) / std::sqrt(2 * static_cast<long double>(pi) * s);
        long double v = pref * sum;
        double err = static_cast<double>(pref * (2 * last + 8 * kEpsLong * (std::fabs(expo) + 1)));
        return DebyeResult{static_cast<double>(v), err};
    }
    return std::nullopt;
}

// ---------------------------------------------------------------- series

BesselEval bessel_series(std::uint64_t order, double x) {
    BesselEval out{order, x, 0, 0, BesselMethod::series};
    if (x == 0) {
        out.value = order == 0 ? 1.0 : 0.0;
        return out;
    }
    const double nu = static_cast<double>(order);
    const double q = x * x / 4;
    if (q < nu + 1) {
        // Terms decrease in magnitude from the first one: no cancellation.
        double lfirst = nu * std::log(x / 2) - std::lgamma(nu + 1);
        if (lfirst < -740) {
            out.value = 0;
            out.abs_error_bound = std::exp(std::max(lfirst, -745.0)) + 1e-300;
            return out;
        }
        double term = std::exp(lfirst), sum = 0;
        int j = 0;
        for (; j < 400; ++j) {
            sum += term;
            double next = -term * q / ((j + 1) * (j + 1 + nu));
            if (std::fabs(next) < 1e-18 * std::fabs(sum)) {
                term = next;
                break;
            }
            term = next;
        }
        out.value = sum;
        out.abs_error_bound = std::fabs(term) + 4 * (j + 2) * kEps * std::fabs(sum) + 1e-300;
        return out;
    }
    // Alternating series with large intermediate terms: 50-digit arithmetic.
    mp50 half = mp50(x) / 2, qq = half * half;
    mp50 term = 1;
    for (std::uint64_t i = 1; i <= order; ++i) term = term * half / i;
    mp50 sum = 0, maxterm = 0;
    for (int j = 0; j < 2000; ++j) {
        sum += term;
        maxterm = std::max(maxterm, mp50(abs(term)));
        term = -term * qq / ((j + 1) * (j + 1 + nu));
        if (abs(term) < mp50(1e-30) && j > static_cast<int>(x)) break;
    }
    out.value = static_cast<double>(sum);
    out.abs_error_bound =
        static_cast<double>(abs(term)) + static_cast<double>(maxterm) * 1e-45 + kEps * std::fabs(out.value);
    return out;
}

std::uint64_t default_half_nodes(double nu, double x) {
    double full = std::ceil(x + nu + 12 * std::cbrt(x) + 32);
    auto f = static_cast<std::uint64_t>(full);
    if (f % 2) ++f;
    return std::max<std::uint64_t>(f / 2, 16);
}

}  // namespace

std::string to_string(BesselMethod m) {
    switch (m) {
        case BesselMethod::series: return "series";
        case BesselMethod::quadrature: return "quadrature";
        case BesselMethod::debye: return "debye";
    }
    return "?";
}

double bessel_abs_upper(double nu, double x) {
    double b = 1.0;
    if (nu > 0) b = std::min(b, 0.6749 * std::pow(nu, -1.0 / 3.0));
    if (x > 0) b = std::min(b, 0.7858 * std::pow(x, -1.0 / 3.0));
    if (x <= 0) return nu == 0 ? 1.0 : 0.0;
    if (nu > 0 && x < nu) {
        double lp = nu * std::log(x / 2) - std::lgamma(nu + 1);
        // Kapteyn: J_nu(nu s) <= exp(nu (sqrt(1-s^2) - log((1+sqrt(1-s^2))/s)))
        double s = x / nu;
        double r = std::sqrt((1 - s) * (1 + s));
        double le = nu * (r - std::log1p(r) + std::log(s));
        double l = std::min(lp, le);
        if (l < -745) return 0.0;
        b = std::min(b, std::exp(l));
    }
    return b;
}

BesselEval bessel_j_quadrature(std::uint64_t order, double x, std::uint64_t nodes) {
    const double nu = static_cast<double>(order);
    const std::uint64_t Mh = nodes ? nodes : default_half_nodes(nu, x);
    const std::uint64_t Mfull = 2 * Mh;
    BesselEval out{order, x, 0, 0, BesselMethod::quadrature};
    const std::uint64_t nmod = order % Mfull;
    const bool wide = x > 2e4;
    double sum = 0, comp = 0;
    for (std::uint64_t j = 0; j <= Mh; ++j) {
        // nu * tau_j reduced exactly: tau_j = pi j / Mh
        std::uint64_t r = static_cast<std::uint64_t>((static_cast<unsigned __int128>(nmod) * j) % Mfull);
        double f;
        if (wide) {
            long double tau = static_cast<long double>(pi) * j / Mh;
            long double ph = static_cast<long double>(pi) * r / Mh - static_cast<long double>(x) * std::sin(tau);
            ph = std::fmod(ph, 2 * static_cast<long double>(pi));
            f = std::cos(static_cast<double>(ph));
        } else {
            double tau = pi * static_cast<double>(j) / static_cast<double>(Mh);
            double ph = pi * static_cast<double>(r) / static_cast<double>(Mh) - x * std::sin(tau);
            f = std::cos(ph);
        }
        if (j == 0 || j == Mh) f *= 0.5;
        double y = f - comp, t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    out.value = sum / static_cast<double>(Mh);
    double alias = 0;
    for (std::uint64_t r = 1; r < 64; ++r) {
        double a = bessel_abs_upper(static_cast<double>(r * Mfull) - nu, x) +
                   bessel_abs_upper(static_cast<double>(r * Mfull) + nu, x);
        alias += a;
        if (a < 1e-300 || static_cast<double>(r * Mfull) - nu > 4 * x + 100) break;
    }
    double eps_phase = wide ? 1.1e-19 : kEps;
    out.abs_error_bound = alias + 4 * eps_phase * (x + 10) + 4 * kEps;
    return out;
}

BesselEval bessel_j(std::uint64_t order, double x) {
    if (order > 100000 || !(x >= 0) || x > 1e6)
        throw std::invalid_argument("bessel_j: parameters outside supported envelope");
    if (x <= 30) return bessel_series(order, x);
    const double nu = static_cast<double>(order);
    if (order >= 20 && std::fabs(x - nu) > 2 * std::cbrt(nu)) {
        if (auto d = bessel_debye(nu, x); d && d->err < 1e-12) {
            BesselEval out{order, x, d->value, d->err, BesselMethod::debye};
            return out;
        }
    }
    return bessel_j_quadrature(order, x);
}

BesselEval bessel_j_wide(std::uint64_t order, double x) {
    if (x <= 1e6) return bessel_j(order, x);
    if (order > 100000 || !(x <= 1e12)) throw std::invalid_argument("bessel_j_wide: parameters outside supported envelope");
    const double nu = static_cast<double>(order);
    if (order >= 20 && x > nu + 2 * std::cbrt(nu)) {
        if (auto d = bessel_debye(nu, x); d && d->err < 1e-9) return BesselEval{order, x, d->value, d->err, BesselMethod::debye};
    }
    if (x > 100 * (nu * nu + 1)) {
        // Hankel expansion; terms shrink like (4 nu^2 / 8x)^j, so a few suffice.
        const long double mu = 4.0L * nu * nu, lx = x;
        long double P = 0, Q = 0, term = 1, last = 0;
        for (int j = 0; j < 30; ++j) {
            // term_j = prod_{i<j} (mu - (2i+1)^2) / (j! (8x)^j)
            if (j % 2 == 0)
                P += (j / 2) % 2 ? -term : term;
            else
                Q += (j / 2) % 2 ? -term : term;
            last = std::fabs(term);
            term *= (mu - (2.0L * j + 1) * (2.0L * j + 1)) / ((j + 1) * 8.0L * lx);
            if (std::fabs(term) < 1e-22L) break;
        }
        const long double pil = static_cast<long double>(pi);
        long double chi = std::fmod(lx, 2 * pil) - (nu / 2 + 0.25L) * pil;
        long double pref = std::sqrt(2.0L / (pil * lx));
        double v = static_cast<double>(pref * (P * std::cos(chi) - Q * std::sin(chi)));
        double err = static_cast<double>(pref * (last + 8 * kEpsLong * lx));
        return BesselEval{order, x, v, err, BesselMethod::debye};
    }
    throw std::invalid_argument("bessel_j_wide: no accurate method for these parameters");
}

// ---------------------------------------------------------------- Airy

double airy_ai(double x) {
    if (std::fabs(x) > 20) throw std::invalid_argument("airy_ai: |x| must be <= 20");
    // Ai(x) = c1 f(x) - c2 g(x) with the two Maclaurin series.
    const mp100 c1("0.355028053887817239260063186004183176397979174199177573");
    const mp100 c2("0.258819403792806798405183560189203963479091138354934582");
    mp100 X(x), x3 = X * X * X;
    mp100 f = 0, g = 0, tf = 1, tg = X;
    for (int k = 0; k < 400; ++k) {
        f += tf;
        g += tg;
        // f: x^{3k} / ((3k)! / (1*4*...*(3k-2))) ; recursion on consecutive terms
        tf = tf * x3 / ((3 * k + 2) * (3 * k + 3));
        tg = tg * x3 / ((3 * k + 3) * (3 * k + 4));
        if (abs(tf) + abs(tg) < mp100(1e-60) && k > 10) break;
    }
    return static_cast<double>(c1 * f - c2 * g);
}

double bessel_transition_approx(double alpha, double a) {
    const double c = std::cbrt(2.0);
    return c / std::cbrt(alpha) * airy_ai(-c * a);
}

// ---------------------------------------------------------------- psi

double psi_normalizer() {
    static const double c = [] {
        boost::math::quadrature::tanh_sinh<double> ts;
        double I = ts.integrate([](double t) { return std::exp(-1.0 / (1.0 - t * t)); }, -1.0, 1.0);
        return 1.0 / I;
    }();
    return c;
}

double psi_eval(double t) {
    if (!(std::fabs(t) < 1)) return 0.0;
    return psi_normalizer() * std::exp(-1.0 / (1.0 - t * t));
}

// ---------------------------------------------------------------- phi

namespace {

double bump(double u) { return std::fabs(u) < 1 ? std::exp(-1.0 / (1.0 - u * u)) : 0.0; }

// Trapezoid nodes for int_{-1}^{1} bump(u) cos(w u) du, symmetric half.
struct BumpNodes {
    std::vector<double> u, wgt;  // u in (0,1), weight includes symmetry factor
    double h = 0;
};

BumpNodes bump_nodes(std::size_t Q) {
    BumpNodes b;
    b.h = 2.0 / static_cast<double>(Q);
    b.u.push_back(0.0);
    b.wgt.push_back(b.h * bump(0.0));
    for (std::size_t j = 1; 2 * j < Q; ++j) {
        double u = b.h * static_cast<double>(j);
        b.u.push_back(u);
        b.wgt.push_back(2 * b.h * bump(u));
    }
    return b;
}

// g-check(x) with g(xi) = bump(xi / h): (h) * int bump(u) cos(2 pi x h u) du
double gcheck_raw(double x, std::size_t Q) {
    auto nodes = bump_nodes(Q);
    const double w = 2 * pi * x * kPhiSeedHalfwidth;
    double s = 0;
    for (std::size_t i = 0; i < nodes.u.size(); ++i) s += nodes.wgt[i] * std::cos(w * nodes.u[i]);
    return s * kPhiSeedHalfwidth;
}

std::size_t nodes_for(double x) {
    return static_cast<std::size_t>(std::ceil(std::fabs(x) * kPhiSeedHalfwidth * 2)) + 1200;
}

double gcheck0() {
    static const double v = gcheck_raw(0.0, 1200);
    return v;
}

}  // namespace

double phi_eval(double x) {
    double r = gcheck_raw(x, nodes_for(x)) / gcheck0();
    return r * r;
}

double phi_hat_eval(double xi) {
    // (g * g)(xi) = int g(s) g(xi - s) ds over the support of both factors
    const double h = kPhiSeedHalfwidth;
    if (std::fabs(xi) >= 2 * h) return 0.0;
    double lo = std::max(-h, xi - h), hi = std::min(h, xi + h);
    boost::math::quadrature::tanh_sinh<double> ts;
    double I = ts.integrate([&](double s) { return bump(s / h) * bump((xi - s) / h); }, lo, hi);
    double g0 = gcheck0();
    return I / (g0 * g0);
}

const PhiEnvelope& phi_envelope() {
    static const PhiEnvelope env = [] {
        PhiEnvelope e;
        e.power = 12;
        e.table_limit = 40000;
        double best = 0;
        for (double x = 1; x <= e.table_limit; x += 0.5) {
            double v = std::log(phi_eval(x) + 1e-300) + e.power * std::log(x);
            best = std::max(best, v);
        }
        e.constant = 1.05 * std::exp(best);
        return e;
    }();
    return env;
}

std::vector<double> phi_odd_grid(double T, std::size_t count) {
    std::vector<double> out(count, 0.0);
    if (count == 0) return out;
    const double xmax = (2.0 * static_cast<double>(count) - 1) / T;
    auto nodes = bump_nodes(nodes_for(xmax));
    const double g0 = gcheck0();
    // x_j = (2j-1)/T; cos(w u (2j-1)/T) advanced by a three-term recurrence,
    // re-seeded every block to keep drift at rounding level.
    constexpr std::size_t kBlock = 256;
    std::vector<double> acc(count, 0.0);
    for (std::size_t q = 0; q < nodes.u.size(); ++q) {
        const double wq = 2 * pi * kPhiSeedHalfwidth * nodes.u[q];
        const double step = wq * 2.0 / T;
        const double twoc = 2 * std::cos(step);
        const double wt = nodes.wgt[q];
        if (wt < 1e-300) continue;
        for (std::size_t j0 = 0; j0 < count; j0 += kBlock) {
            std::size_t j1 = std::min(count, j0 + kBlock);
            double xa = (2.0 * static_cast<double>(j0 + 1) - 1) / T;
            double cprev = std::cos(wq * (xa - 2.0 / T));
            double ccur = std::cos(wq * xa);
            for (std::size_t j = j0; j < j1; ++j) {
                acc[j] += wt * ccur;
                double nx = twoc * ccur - cprev;
                cprev = ccur;
                ccur = nx;
            }
        }
    }
    for (std::size_t j = 0; j < count; ++j) {
        double r = acc[j] * kPhiSeedHalfwidth / g0;
        out[j] = r * r;
    }
    return out;
}

double phi_truncation_point(double T, double W, double tol) {
    // sum over x_j = (2j-1)/T >= X of C x^-p W <= W C (T/2) int_{X-2/T} x^-p dx
    const auto& env = phi_envelope();
    const double p = env.power;
    double X = 1.0;
    for (int it = 0; it < 200; ++it) {
        double base = X - 2.0 / T;
        if (base > 0) {
            double tail = W * env.constant * (T / 2) * std::pow(base, 1 - p) / (p - 1);
            if (tail <= tol) return X;
        }
        X *= 1.1;
    }
    return X;
}

// ---------------------------------------------------------------- order sum

double weighted_bessel_order_sum(double K, double delta, double x) {
    if (K < 100) throw std::invalid_argument("weighted_bessel_order_sum: K must be >= 100");
    if (!(delta > 0 && delta < 1.0 / 3.0)) throw std::invalid_argument("weighted_bessel_order_sum: delta out of range");
    const double W = std::pow(K, delta);
    auto lo = static_cast<std::int64_t>(std::ceil(K - W));
    auto hi = static_cast<std::int64_t>(std::floor(K + W));
    if (lo % 2 == 0) ++lo;
    double s = 0;
    for (std::int64_t l = lo; l <= hi; l += 2) {
        if (l < 0) continue;
        double w = psi_eval((static_cast<double>(l) - K) / W);
        if (w == 0) continue;
        s += w * bessel_j(static_cast<std::uint64_t>(l), x).value;
    }
    return s / W;
}

}  // namespace hecke
