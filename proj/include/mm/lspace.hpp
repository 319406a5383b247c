#ifndef MM_LSPACE_HPP
#define MM_LSPACE_HPP

#include <optional>

#include "projline.hpp"

namespace mm {

namespace detail {

// r mod q^n for an RF whose denominator is invertible mod q (result: poly of
// degree < n deg q).
inline PolyV<FE> rf_mod(const RF& r, const PolyV<FE>& q, int n) {
    PolyV<FE> qn = p_pow(q, static_cast<unsigned>(n));
    PolyV<FE> d = p_rem(r.den(), qn);
    if (p_deg(p_gcd(r.den(), q)) > 0)
        throw ConditionViolated("denominator not invertible at the place");
    return p_rem(p_mul(p_rem(r.num(), qn), inv_mod(d, qn)), qn);
}

// CRT for two coprime moduli.
inline PolyV<FE> crt2(const PolyV<FE>& v1, const PolyV<FE>& m1,
                      const PolyV<FE>& v2, const PolyV<FE>& m2) {
    auto [g, u, v] = p_xgcd(m1, m2);
    if (p_deg(g) != 0) throw InternalInconsistency("crt moduli not coprime");
    FE gi = inv(g[0]);
    PolyV<FE> m = p_mul(m1, m2);
    // u*m1 == g - v*m2, so (v*m2/g) is 1 mod m1, 0 mod m2
    PolyV<FE> e1 = p_smul(gi, p_mul(v, m2));
    PolyV<FE> e2 = p_smul(gi, p_mul(u, m1));
    return p_rem(p_add(p_mul(v1, e1), p_mul(v2, e2)), m);
}

// inverse of a power series mod s^k (constant term invertible)
inline PolyV<FE> series_inv(const PolyV<FE>& a, int k) {
    if (a.empty() || is_zero(a[0])) throw ZeroDivisor("series with zero constant term");
    PolyV<FE> r{inv(a[0])};
    for (int i = 1; i < k; ++i) {
        FE c(0);
        for (int j = 1; j <= i; ++j) {
            FE aj = j < static_cast<int>(a.size()) ? a[static_cast<size_t>(j)] : FE(0);
            c = c + aj * r[static_cast<size_t>(i - j)];
        }
        r.push_back(-c * inv(a[0]));
    }
    return r;
}

} // namespace detail

// Pole-part coefficients of w at a squarefree place polynomial q, orders
// lo..hi: w = sum_j r_j / q^j + (regular at q) with deg r_j < deg q. Returns
// the r_j flattened low order first, each padded to deg q entries. Throws when
// the pole order at q exceeds hi.
inline std::vector<FE> polar_coords(const RF& w, const PolyV<FE>& q, int lo, int hi) {
    const int e = p_deg(q);
    std::vector<FE> out(static_cast<size_t>((hi - lo + 1) * e), FE(0));
    if (is_zero(w)) return out;
    RF h = w * RF::from_poly(p_pow(q, static_cast<unsigned>(hi)));
    if (p_deg(p_gcd(h.den(), q)) > 0)
        throw ConditionViolated("pole order exceeds the allowed bound");
    PolyV<FE> a = detail::rf_mod(h, q, hi);
    // digits of a base q: a = sum d_i q^i; coefficient of 1/q^j is d_{hi-j}
    for (int i = 0; i < hi; ++i) {
        auto [quo, rem] = p_divmod(a, q);
        int j = hi - i;
        if (j >= lo && j <= hi)
            for (int c = 0; c < e && c < static_cast<int>(rem.size()); ++c)
                out[static_cast<size_t>((j - lo) * e + c)] = rem[static_cast<size_t>(c)];
        a = quo;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Riemann-Roch spaces on P^1. L(D) = {f : div(f) + D >= 0} has the basis
// {t^j A/B : 0 <= j <= deg D} with A the product of places with negative
// multiplicity and B the one with positive multiplicity. Differentials w dt
// are handled through the same machinery via D - 2(infinity).
// ---------------------------------------------------------------------------

struct LBasis {
    Divisor D;
    PolyV<FE> numf{FE(1)}, denf{FE(1)};
    int maxj = -1; // basis t^j numf/denf, j = 0..maxj; empty when maxj < 0
    std::vector<RF> elems;

    int dim() const { return maxj < 0 ? 0 : maxj + 1; }
};

inline LBasis l_space(const Divisor& D) {
    LBasis b;
    b.D = D;
    for (const auto& [p, m] : D.terms()) {
        if (p.infinite || m == 0) continue;
        if (m > 0)
            b.denf = p_mul(b.denf, p_pow(p.poly, static_cast<unsigned>(m)));
        else
            b.numf = p_mul(b.numf, p_pow(p.poly, static_cast<unsigned>(-m)));
    }
    b.maxj = D.mult_at_infinity() + p_deg(b.denf) - p_deg(b.numf);
    if (b.maxj != D.degree()) throw InternalInconsistency("genus-0 dimension mismatch");
    // numf and denf are coprime by the gcd-free divisor form; the only common
    // factor of t^j numf and denf is a power of t, cancelled by hand so the
    // elements need no gcd
    size_t v0 = 0;
    while (v0 < b.denf.size() && is_zero(b.denf[v0])) ++v0;
    for (int j = 0; j <= b.maxj; ++j) {
        size_t v = std::min(v0, static_cast<size_t>(j));
        PolyV<FE> den(b.denf.begin() + static_cast<long>(v), b.denf.end());
        PolyV<FE> num(static_cast<size_t>(j) - v, FE(0));
        num.insert(num.end(), b.numf.begin(), b.numf.end());
        b.elems.push_back(RF::reduced(std::move(num), std::move(den)));
    }
    return b;
}

// Differentials w dt with div(w dt) + D >= 0.
inline LBasis omega_space(const Divisor& D) {
    return l_space(D - 2 * Divisor::single(Place::infinity(0)));
}

// Coordinates of x in the L(D) basis; nullopt when x is outside the space.
inline std::optional<std::vector<FE>> l_coords(const LBasis& b, const RF& x) {
    std::vector<FE> out(static_cast<size_t>(b.dim()), FE(0));
    if (is_zero(x)) return out;
    if (b.dim() == 0) return std::nullopt;
    // x = (c/1) numf/denf iff den(x) numf divides num(x) denf; one division
    // beats forming the product as a normalized rational function
    auto [q, r] = p_divmod(p_mul(x.num(), b.denf), p_mul(x.den(), b.numf));
    if (!p_is_zero(r)) return std::nullopt;
    if (p_deg(q) > b.maxj) return std::nullopt;
    for (size_t i = 0; i < q.size(); ++i) out[i] = q[i];
    return out;
}

} // namespace mm

#endif
