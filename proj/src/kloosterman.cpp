#include "hecke/kloosterman.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "hecke/arithmetic.hpp"

namespace hecke {

namespace {

struct Kahan {
    double s = 0, comp = 0;
    void add(double v) {
        double y = v - comp;
        double t = s + y;
        comp = (t - s) - y;
        s = t;
    }
};

std::uint64_t reduce(std::int64_t a, std::uint64_t c) {
    auto r = a % static_cast<std::int64_t>(c);
    return static_cast<std::uint64_t>(r < 0 ? r + static_cast<std::int64_t>(c) : r);
}

}  // namespace

KloostermanValue kloosterman_sum(std::int64_t m, std::int64_t n, std::uint64_t c) {
    if (c == 0) throw std::invalid_argument("kloosterman_sum: c must be positive");
    KloostermanValue out{m, n, c, 0, 0};
    if (c == 1) {
        out.value = 1;
        return out;
    }
    const std::uint64_t a = reduce(m, c), b = reduce(n, c);
    const double w = 2 * std::numbers::pi / static_cast<double>(c);
    Kahan re, im;
    for (std::uint64_t x = 1; x < c; ++x) {
        if (std::gcd(x, c) != 1) continue;
        auto xi = static_cast<std::uint64_t>(mod_inverse(static_cast<std::int64_t>(x), static_cast<std::int64_t>(c)));
        auto ph = static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * x + static_cast<unsigned __int128>(b) * xi) % c);
        re.add(std::cos(w * static_cast<double>(ph)));
        im.add(std::sin(w * static_cast<double>(ph)));
    }
    out.value = re.s;
    out.imaginary_residual = std::abs(im.s);
    return out;
}

std::int64_t ramanujan_sum(std::int64_t n, std::uint64_t c) {
    if (c == 0) throw std::invalid_argument("ramanujan_sum: c must be positive");
    auto g = std::gcd(static_cast<std::uint64_t>(n < 0 ? -n : n), c);
    if (g == 0) g = c;
    std::int64_t s = 0;
    for (auto d : factor(g).divisors()) s += mobius(c / d) * static_cast<std::int64_t>(d);
    return s;
}

double weil_bound(std::int64_t m, std::int64_t n, std::uint64_t c) {
    auto am = static_cast<std::uint64_t>(m < 0 ? -m : m), an = static_cast<std::uint64_t>(n < 0 ? -n : n);
    auto g = std::gcd(std::gcd(am, an), c);
    return static_cast<double>(sigma0(factor(c))) * std::sqrt(static_cast<double>(g)) *
           std::sqrt(static_cast<double>(c));
}

UnitTable::UnitTable(std::uint32_t c) : c_(c), inv_c_(1.0 / c) {
    if (c == 0) throw std::invalid_argument("UnitTable: modulus must be positive");
    if (c == 1) {
        x_ = {0};
        xinv_ = {0};
        cos_ = {1.0};
        sin_ = {0.0};
        return;
    }
    std::vector<char> unit(c, 1);
    unit[0] = 0;
    std::uint32_t rest = c;
    for (std::uint32_t p = 2; p * p <= rest; ++p) {
        if (rest % p) continue;
        while (rest % p == 0) rest /= p;
        for (std::uint32_t j = p; j < c; j += p) unit[j] = 0;
    }
    if (rest > 1)
        for (std::uint32_t j = rest; j < c; j += rest) unit[j] = 0;
    for (std::uint32_t x = 1; x < c; ++x)
        if (unit[x]) x_.push_back(x);
    // Batch inversion over G interleaved chains (one extended gcd each) so the
    // multiply-reduce latency of one chain hides behind the others.
    constexpr std::size_t G = 8;
    const std::size_t U = x_.size();
    std::vector<std::uint32_t> prefix(U);
    std::uint64_t acc[G];
    for (std::size_t g = 0; g < G; ++g) acc[g] = 1;
    for (std::size_t i = 0; i < U; ++i) {
        acc[i % G] = mulmod(acc[i % G], x_[i]);
        prefix[i] = static_cast<std::uint32_t>(acc[i % G]);
    }
    std::uint64_t inv[G];
    for (std::size_t g = 0; g < G; ++g) inv[g] = static_cast<std::uint64_t>(mod_inverse(static_cast<std::int64_t>(acc[g]), c));
    xinv_.resize(U);
    for (std::size_t i = U; i-- > 0;) {
        const std::size_t g = i % G;
        std::uint64_t before = i >= G ? prefix[i - G] : 1;
        xinv_[i] = static_cast<std::uint32_t>(mulmod(inv[g], before));
        inv[g] = mulmod(inv[g], x_[i]);
    }
    // Roots of unity by rotation, re-seeded from sin/cos every 64 steps.
    cos_.resize(c);
    sin_.resize(c);
    const double w = 2 * std::numbers::pi / c;
    const double cw = std::cos(w), sw = std::sin(w);
    for (std::uint32_t j = 0; 2 * j <= c; ++j) {
        if (j % 64 == 0) {
            cos_[j] = std::cos(w * j);
            sin_[j] = std::sin(w * j);
        } else {
            cos_[j] = cos_[j - 1] * cw - sin_[j - 1] * sw;
            sin_[j] = sin_[j - 1] * cw + cos_[j - 1] * sw;
        }
        if (j) {
            cos_[c - j] = cos_[j];
            sin_[c - j] = -sin_[j];
        }
    }
}

std::uint64_t UnitTable::mulmod(std::uint64_t a, std::uint64_t b) const {
    // a, b < c < 2^31: the quotient estimate is off by at most one
    const std::uint64_t v = a * b;
    auto q = static_cast<std::uint64_t>(static_cast<double>(v) * inv_c_);
    auto r = static_cast<std::int64_t>(v - q * c_);
    if (r < 0) r += c_;
    else if (r >= static_cast<std::int64_t>(c_)) r -= c_;
    return static_cast<std::uint64_t>(r);
}

double UnitTable::sum(std::int64_t m, std::int64_t n, double* imag) const {
    const std::uint64_t a = reduce(m, c_), b = reduce(n, c_), c = c_;
    Kahan re, im;
    for (std::size_t i = 0; i < x_.size(); ++i) {
        std::uint64_t ph = mulmod(a, x_[i]) + mulmod(b, xinv_[i]);
        if (ph >= c) ph -= c;
        re.add(cos_[ph]);
        if (imag) im.add(sin_[ph]);
    }
    if (imag) *imag = std::abs(im.s);
    return re.s;
}

}  // namespace hecke
