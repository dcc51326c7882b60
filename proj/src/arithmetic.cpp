#include "hecke/arithmetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hecke {

std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b) { return std::gcd(a, b); }

std::uint64_t isqrt(std::uint64_t n) {
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(n)));
    while (r > 0 && static_cast<unsigned __int128>(r) * r > n) --r;
    while (static_cast<unsigned __int128>(r + 1) * (r + 1) <= n) ++r;
    return r;
}

bool is_square(std::uint64_t n) {
    auto r = isqrt(n);
    return r * r == n;
}

FactoredInt factor(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("factor: n must be positive");
    FactoredInt out;
    out.value = n;
    auto take = [&](std::uint64_t p) {
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        if (e) out.factors.emplace_back(p, e);
    };
    take(2);
    take(3);
    for (std::uint64_t p = 5; p <= n / p; p += 6) {
        take(p);
        take(p + 2);
    }
    if (n > 1) out.factors.emplace_back(n, 1);
    return out;
}

std::vector<std::uint64_t> FactoredInt::divisors() const {
    std::vector<std::uint64_t> d{1};
    for (auto [p, e] : factors) {
        std::size_t sz = d.size();
        std::uint64_t pk = 1;
        for (int i = 0; i < e; ++i) {
            pk *= p;
            for (std::size_t j = 0; j < sz; ++j) d.push_back(d[j] * pk);
        }
    }
    std::sort(d.begin(), d.end());
    return d;
}

bool FactoredInt::squarefree() const {
    return std::all_of(factors.begin(), factors.end(), [](auto& f) { return f.second == 1; });
}

std::vector<std::uint64_t> FactoredInt::primes() const {
    std::vector<std::uint64_t> ps;
    for (auto& f : factors) ps.push_back(f.first);
    return ps;
}

int mobius(const FactoredInt& n) {
    if (!n.squarefree()) return 0;
    return n.factors.size() % 2 ? -1 : 1;
}

std::uint64_t euler_phi(const FactoredInt& n) {
    std::uint64_t r = 1;
    for (auto [p, e] : n.factors) {
        r *= p - 1;
        for (int i = 1; i < e; ++i) r *= p;
    }
    return r;
}

int mobius(std::uint64_t n) { return mobius(factor(n)); }
std::uint64_t euler_phi(std::uint64_t n) { return euler_phi(factor(n)); }

BigInt sigma(unsigned t, const FactoredInt& n) {
    BigInt r = 1;
    for (auto [p, e] : n.factors) {
        BigInt pt = boost::multiprecision::pow(BigInt(p), t);
        BigInt s = 1, term = 1;
        for (int i = 0; i < e; ++i) {
            term *= pt;
            s += term;
        }
        r *= s;
    }
    return r;
}

std::uint64_t sigma0(const FactoredInt& n) {
    std::uint64_t r = 1;
    for (auto& f : n.factors) r *= static_cast<std::uint64_t>(f.second + 1);
    return r;
}

std::uint64_t sigma1(const FactoredInt& n) {
    std::uint64_t r = 1;
    for (auto [p, e] : n.factors) {
        std::uint64_t s = 1, term = 1;
        for (int i = 0; i < e; ++i) {
            term *= p;
            s += term;
        }
        r *= s;
    }
    return r;
}

std::uint64_t nu_index(const FactoredInt& N) {
    std::uint64_t r = N.value;
    for (auto& f : N.factors) r = r / f.first * (f.first + 1);
    return r;
}

std::int64_t mod_inverse(std::int64_t x, std::int64_t c) {
    if (c <= 0) throw std::invalid_argument("mod_inverse: modulus must be positive");
    if (c == 1) return 0;
    std::int64_t a = ((x % c) + c) % c, b = c, u = 1, v = 0;
    while (b) {
        std::int64_t q = a / b;
        a -= q * b;
        std::swap(a, b);
        u -= q * v;
        std::swap(u, v);
    }
    if (a != 1) throw std::domain_error("mod_inverse: argument not invertible");
    return ((u % c) + c) % c;
}

namespace {
// Jacobi symbol (a|n) for odd positive n.
int jacobi(std::int64_t a, std::uint64_t n) {
    a %= static_cast<std::int64_t>(n);
    if (a < 0) a += static_cast<std::int64_t>(n);
    std::uint64_t x = static_cast<std::uint64_t>(a);
    int s = 1;
    while (x != 0) {
        while (x % 2 == 0) {
            x /= 2;
            auto r = n % 8;
            if (r == 3 || r == 5) s = -s;
        }
        std::swap(x, n);
        if (x % 4 == 3 && n % 4 == 3) s = -s;
        x %= n;
    }
    return n == 1 ? s : 0;
}
}  // namespace

int kronecker_chi(std::int64_t D, std::uint64_t m) {
    auto r = ((D % 4) + 4) % 4;
    if (r == 2 || r == 3) throw std::invalid_argument("kronecker_chi: D must be 0 or 1 mod 4");
    if (m == 0) throw std::invalid_argument("kronecker_chi: m must be positive");
    int s = 1;
    while (m % 2 == 0) {
        m /= 2;
        if (D % 2 == 0) return 0;
        auto d8 = ((D % 8) + 8) % 8;
        if (d8 == 3 || d8 == 5) s = -s;
    }
    if (m == 1) return s;
    return s * jacobi(D, m);
}

std::uint64_t count_congruence_roots(std::int64_t t, std::int64_t n, std::uint64_t K) {
    if (K == 0) throw std::invalid_argument("count_congruence_roots: K must be positive");
    auto k = static_cast<std::int64_t>(K);
    std::int64_t tr = ((t % k) + k) % k, nr = ((n % k) + k) % k;
    std::uint64_t cnt = 0;
    for (std::int64_t x = 0; x < k; ++x) {
        auto v = static_cast<std::int64_t>((static_cast<__int128>(x) * (x - tr) + nr) % k);
        if (v == 0) ++cnt;
    }
    return cnt;
}

}  // namespace hecke
