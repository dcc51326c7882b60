#include "hecke/oracles.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hecke {

namespace {

using Series = std::vector<BigInt>;  // index = power of q

Series multiply(const Series& a, const Series& b, std::size_t len) {
    Series c(len, BigInt(0));
    for (std::size_t i = 0; i < a.size() && i < len; ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size() && i + j < len; ++j) c[i + j] += a[i] * b[j];
    }
    return c;
}

Series eisenstein(unsigned r, std::int64_t scale, std::size_t len) {
    Series e(len, BigInt(0));
    e[0] = 1;
    for (std::size_t n = 1; n < len; ++n) e[n] = scale * sigma(r, factor(n));
    return e;
}

}  // namespace

double QExpansion::normalized_eigenvalue(std::size_t n) const {
    double lead = a(n).convert_to<double>();
    return lead / std::pow(static_cast<double>(n), (weight - 1) / 2.0);
}

QExpansion delta_tau(std::size_t n_max) {
    if (n_max > 100000) throw std::invalid_argument("delta_tau: n_max must be <= 1e5");
    // F = prod (1-q^m)^24 satisfies q F' P = 24 q P' F with P = prod (1-q^m),
    // which gives n f_n = sum_{j>=1} p_j (25 j - n) f_{n-j}; P is sparse
    // (pentagonal numbers).
    std::vector<std::pair<std::size_t, int>> pent;
    for (std::int64_t k = 1;; ++k) {
        std::int64_t a = k * (3 * k - 1) / 2, b = k * (3 * k + 1) / 2;
        if (static_cast<std::size_t>(a) >= n_max) break;
        int s = (k % 2) ? -1 : 1;
        pent.emplace_back(static_cast<std::size_t>(a), s);
        if (static_cast<std::size_t>(b) < n_max) pent.emplace_back(static_cast<std::size_t>(b), s);
    }
    std::vector<BigInt> f(n_max, BigInt(0));
    if (n_max) f[0] = 1;
    for (std::size_t n = 1; n < n_max; ++n) {
        BigInt s = 0;
        for (auto [j, sign] : pent) {
            if (j > n) continue;
            auto w = static_cast<std::int64_t>(25 * j) - static_cast<std::int64_t>(n);
            s += BigInt(sign * w) * f[n - j];
        }
        f[n] = s / static_cast<std::int64_t>(n);
    }
    QExpansion out;
    out.weight = 12;
    out.coefficients = std::move(f);  // a(i+1) = f_i
    return out;
}

QExpansion level_one_eigenform(int k, std::size_t n_max) {
    int a = 0, b = 0;
    switch (k) {
        case 12: break;
        case 16: a = 1; break;
        case 18: b = 1; break;
        case 20: a = 2; break;
        case 22: a = 1; b = 1; break;
        case 26: a = 2; b = 1; break;
        default: throw std::invalid_argument("level_one_eigenform: weight not one-dimensional");
    }
    QExpansion d = delta_tau(n_max);
    if (k == 12) return d;
    // Series in q^0.. for E4^a E6^b, times Delta = sum tau(n) q^n.
    Series delta(n_max + 1, BigInt(0));
    for (std::size_t i = 0; i < n_max; ++i) delta[i + 1] = d.coefficients[i];
    Series acc = delta;
    auto e4 = eisenstein(3, 240, n_max + 1), e6 = eisenstein(5, -504, n_max + 1);
    for (int i = 0; i < a; ++i) acc = multiply(acc, e4, n_max + 1);
    for (int i = 0; i < b; ++i) acc = multiply(acc, e6, n_max + 1);
    QExpansion out;
    out.weight = k;
    out.coefficients.assign(acc.begin() + 1, acc.end());
    return out;
}

std::uint64_t dim_level_one(int k) {
    if (k < 4 || k % 2) throw std::invalid_argument("dim_level_one: k must be even >= 4");
    auto d = static_cast<std::uint64_t>(k / 12);
    if (k % 12 == 2) return d == 0 ? 0 : d - 1;
    return d;
}

std::uint64_t genus_X0(std::uint64_t N) {
    auto F = factor(N);
    std::int64_t mu = static_cast<std::int64_t>(nu_index(F));
    std::int64_t e2 = 1, e3 = 1, cusps = 0;
    for (auto [p, e] : F.factors) {
        if (p == 2) {
            e2 *= (e == 1) ? 1 : 0;
        } else {
            e2 *= 1 + kronecker_chi(-4, p);
        }
        if (p == 3) {
            e3 *= (e == 1) ? 1 : 0;
        } else {
            e3 *= 1 + kronecker_chi(-3, p);
        }
    }
    for (auto d : F.divisors()) cusps += static_cast<std::int64_t>(euler_phi(factor(std::gcd(d, N / d))));
    // 12 g = 12 + mu - 3 e2 - 4 e3 - 6 cusps
    std::int64_t twelve_g = 12 + mu - 3 * e2 - 4 * e3 - 6 * cusps;
    if (twelve_g < 0 || twelve_g % 12) throw InconsistencyError("genus_X0: non-integral genus");
    return static_cast<std::uint64_t>(twelve_g / 12);
}

}  // namespace hecke
