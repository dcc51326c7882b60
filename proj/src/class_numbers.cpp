#include "hecke/class_numbers.hpp"

#include <memory>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>

#include "hecke/cache.hpp"

namespace hecke {

namespace {

bool is_discriminant(std::int64_t D) {
    auto r = ((D % 4) + 4) % 4;
    return r == 0 || r == 1;
}

int unit_weight(std::int64_t D) { return D == -3 ? 3 : (D == -4 ? 2 : 1); }

std::uint64_t count_reduced_forms(std::int64_t D) {
    const std::int64_t M = -D;
    std::uint64_t h = 0;
    for (std::int64_t a = 1; 3 * a * a <= M; ++a) {
        for (std::int64_t b = -a + 1; b <= a; ++b) {
            if (((b - D) % 2 + 2) % 2) continue;
            std::int64_t num = b * b - D;
            if (num % (4 * a)) continue;
            std::int64_t c = num / (4 * a);
            if (c < a) continue;
            if (b < 0 && a == c) continue;
            if (std::gcd(std::gcd(a, b < 0 ? -b : b), c) != 1) continue;
            ++h;
        }
    }
    return h;
}

}  // namespace

ClassNumberRecord class_number(std::int64_t D) {
    if (D >= 0 || !is_discriminant(D)) throw std::invalid_argument("class_number: D must be a negative discriminant");
    if (D < -10000000) throw std::invalid_argument("class_number: |D| must be <= 1e7");
    auto& cache = global_cache();
    const std::string key = "class_number:" + std::to_string(D);
    ClassNumberRecord rec;
    rec.discriminant = D;
    rec.w = unit_weight(D);
    if (auto v = cache.get(key)) {
        rec.h = std::stoull(*v);
    } else {
        rec.h = count_reduced_forms(D);
        cache.put(key, std::to_string(rec.h));
    }
    rec.h_w = Rational(static_cast<long>(rec.h), rec.w);
    return rec;
}

std::pair<std::int64_t, std::uint64_t> fundamental_part(std::int64_t D) {
    if (D >= 0 || !is_discriminant(D)) throw std::invalid_argument("fundamental_part: D must be a negative discriminant");
    auto F = factor(static_cast<std::uint64_t>(-D));
    std::uint64_t m = 1, s = 1;
    for (auto [p, e] : F.factors) {
        if (e % 2) m *= p;
        for (int i = 0; i < e / 2; ++i) s *= p;
    }
    std::int64_t D0 = -static_cast<std::int64_t>(m);
    if (((D0 % 4) + 4) % 4 != 1) {
        D0 *= 4;
        s /= 2;
    }
    return {D0, s};
}

Rational hurwitz_H_by_divisors(std::uint64_t n) {
    Rational H = 0;
    for (std::uint64_t f = 1; f * f <= n; ++f) {
        if (n % (f * f)) continue;
        auto D = -static_cast<std::int64_t>(n / (f * f));
        if (!is_discriminant(D)) continue;
        H += class_number(D).h_w;
    }
    return H;
}

Rational hurwitz_H_by_cohen(std::uint64_t n) {
    auto [D0, f] = fundamental_part(-static_cast<std::int64_t>(n));
    Rational base = class_number(D0).h_w;
    std::int64_t s = 0;
    for (auto d : factor(f).divisors()) {
        int mu = mobius(d);
        if (!mu) continue;
        s += mu * kronecker_chi(D0, d) * static_cast<std::int64_t>(sigma1(factor(f / d)));
    }
    return base * s;
}

Rational hurwitz_H(std::uint64_t n) {
    if (n == 0 || !is_discriminant(-static_cast<std::int64_t>(n)))
        throw std::invalid_argument("hurwitz_H: n must be positive and 0 or 3 mod 4");
    auto& cache = global_cache();
    const std::string key = "hurwitz_H:" + std::to_string(n);
    if (auto v = cache.get(key)) return Rational(*v);
    Rational a = hurwitz_H_by_divisors(n), b = hurwitz_H_by_cohen(n);
    if (a != b) throw InconsistencyError("hurwitz_H: divisor route and Cohen route disagree at n=" + std::to_string(n));
    cache.put(key, a.str());
    return a;
}

std::uint64_t r3(std::uint64_t n) {
    if (n > 10000000) throw std::invalid_argument("r3: n must be <= 1e7");
    std::uint64_t cnt = 0;
    const std::uint64_t r = isqrt(n);
    for (std::uint64_t x = 0; x <= r; ++x) {
        const std::uint64_t rem = n - x * x;
        const std::uint64_t ry = isqrt(rem);
        for (std::uint64_t y = 0; y <= ry; ++y) {
            const std::uint64_t z2 = rem - y * y;
            const std::uint64_t z = isqrt(z2);
            if (z * z != z2) continue;
            // signed lattice points: factor 2 for each nonzero coordinate
            std::uint64_t w = (x ? 2 : 1) * (y ? 2 : 1) * (z ? 2 : 1);
            cnt += w;
        }
    }
    return cnt;
}

std::uint64_t r3_from_hurwitz(std::uint64_t n) {
    if (n > 10000000) throw std::invalid_argument("r3_from_hurwitz: n must be <= 1e7");
    if (n == 0) return 1;
    if (n % 4 == 0) return r3_from_hurwitz(n / 4);
    if (n % 8 == 7) return 0;
    Rational v;
    if (n % 8 == 3)
        v = 24 * hurwitz_H(n);
    else
        v = 12 * hurwitz_H(4 * n);
    if (denominator(v) != 1) throw InconsistencyError("r3_from_hurwitz: non-integral value");
    return numerator(v).convert_to<std::uint64_t>();
}

namespace {

std::shared_ptr<const std::vector<std::uint64_t>> shared_r3_table(std::uint64_t limit) {
    static std::mutex mu;
    static std::shared_ptr<const std::vector<std::uint64_t>> table;
    std::lock_guard lock(mu);
    if (!table || table->size() <= limit) {
        const std::uint64_t want = std::max<std::uint64_t>(limit, table ? 2 * (table->size() - 1) : 4096);
        table = std::make_shared<const std::vector<std::uint64_t>>(r3_table(want));
    }
    return table;
}

}  // namespace

std::uint64_t count_A(std::uint64_t N, std::uint64_t n, std::int64_t n0) {
    if (!(n0 > 0 && n0 < static_cast<std::int64_t>(2 * N) && n0 % 2 == 1))
        throw std::invalid_argument("count_A: need odd 0 < n0 < 2N");
    if (!factor(N).squarefree()) throw std::invalid_argument("count_A: N must be squarefree");
    const std::int64_t m = 2 * static_cast<std::int64_t>(N);
    const auto bound = static_cast<std::int64_t>(isqrt(4 * n));
    auto tab = shared_r3_table(4 * n);
    std::uint64_t cnt = 0;
    for (std::int64_t t = -bound; t <= bound; ++t) {
        if (((t - n0) % m + m) % m) continue;
        cnt += (*tab)[4 * n - static_cast<std::uint64_t>(t * t)];
    }
    return cnt;
}

std::optional<std::int64_t> admissible_n0(std::uint64_t N, std::uint64_t n) {
    auto F = factor(N);
    for (std::int64_t n0 = 1; n0 < static_cast<std::int64_t>(2 * N); n0 += 2) {
        bool ok = true;
        for (auto [p, e] : F.factors) {
            if (p == 2) continue;
            std::int64_t v = n0 * n0 - 4 * static_cast<std::int64_t>(n);
            // Legendre symbol (v | p)
            auto P = static_cast<std::int64_t>(p);
            std::int64_t r = ((v % P) + P) % P;
            int leg = 0;
            if (r != 0) {
                // Euler's criterion
                std::uint64_t base = static_cast<std::uint64_t>(r), ex = (p - 1) / 2, acc = 1;
                while (ex) {
                    if (ex & 1) acc = static_cast<std::uint64_t>(static_cast<unsigned __int128>(acc) * base % p);
                    base = static_cast<std::uint64_t>(static_cast<unsigned __int128>(base) * base % p);
                    ex >>= 1;
                }
                leg = acc == 1 ? 1 : -1;
            }
            if (leg != -1) {
                ok = false;
                break;
            }
        }
        if (ok) return n0;
    }
    return std::nullopt;
}

HurwitzTable::HurwitzTable(std::uint64_t limit) : limit_(limit), sixH_(limit + 1, 0) {
    // Every reduced form (a,b,c), primitive or not, with 4ac - b^2 = m counts
    // toward H(m); forms equivalent to a(x^2+y^2) or a(x^2+xy+y^2) carry the
    // weights 1/2 and 1/3.
    const auto L = static_cast<std::int64_t>(limit);
    for (std::int64_t a = 1; 3 * a * a <= L; ++a) {
        for (std::int64_t b = -a + 1; b <= a; ++b) {
            std::int64_t c0 = a;
            std::int64_t m = 4 * a * c0 - b * b;
            const std::int64_t step = 4 * a;
            for (std::int64_t c = c0; m <= L; ++c, m += step) {
                if (b < 0 && c == a) continue;
                std::int64_t wt = 6;
                if (b == 0 && c == a) wt = 3;
                else if (b == a && c == a) wt = 2;
                sixH_[static_cast<std::size_t>(m)] += wt;
            }
        }
    }
}

std::int64_t HurwitzTable::six_hw(std::uint64_t m) const {
    // h_w(-m) = sum_{g^2 | m} mu(g) H(m/g^2)
    std::int64_t s = 0;
    for (std::uint64_t g = 1; g * g <= m; ++g) {
        if (m % (g * g)) continue;
        int mu = mobius(g);
        if (mu) s += mu * sixH_.at(m / (g * g));
    }
    return s;
}

const HurwitzTable& hurwitz_table(std::uint64_t limit) {
    static std::mutex mu;
    static std::shared_ptr<const HurwitzTable> table;
    static std::vector<std::shared_ptr<const HurwitzTable>> retired;  // keep references valid
    std::lock_guard lock(mu);
    if (!table || table->limit() < limit) {
        std::uint64_t want = std::max<std::uint64_t>(limit, table ? 2 * table->limit() : 4096);
        if (table) retired.push_back(table);
        table = std::make_shared<const HurwitzTable>(want);
    }
    return *table;
}

std::vector<std::uint64_t> r3_table(std::uint64_t limit) {
    std::vector<std::uint64_t> r1(limit + 1, 0), r2(limit + 1, 0), r3v(limit + 1, 0);
    for (std::uint64_t x = 0; x * x <= limit; ++x) r1[x * x] += x ? 2 : 1;
    for (std::uint64_t i = 0; i <= limit; ++i)
        if (r1[i])
            for (std::uint64_t j = 0; i + j <= limit; ++j)
                if (r1[j]) r2[i + j] += r1[i] * r1[j];
    for (std::uint64_t i = 0; i <= limit; ++i)
        if (r1[i])
            for (std::uint64_t j = 0; i + j <= limit; ++j) r3v[i + j] += r1[i] * r2[j];
    return r3v;
}

}  // namespace hecke
