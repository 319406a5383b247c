#ifndef MM_POLY_HPP
#define MM_POLY_HPP

#include <utility>
#include <vector>

#include "errors.hpp"
#include "rational.hpp"

// Dense polynomials over an exact field, represented as coefficient vectors
// (index = degree, no trailing zeros, zero polynomial = empty vector). The
// scalar type T needs +,-,*, T(long), and the free functions is_zero / inv.

namespace mm {

template <class T>
using PolyV = std::vector<T>;

template <class T>
void p_norm(PolyV<T>& p) {
    while (!p.empty() && is_zero(p.back())) p.pop_back();
}

template <class T>
int p_deg(const PolyV<T>& p) { return static_cast<int>(p.size()) - 1; }

template <class T>
bool p_is_zero(const PolyV<T>& p) { return p.empty(); }

template <class T>
bool p_eq(const PolyV<T>& a, const PolyV<T>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (!(a[i] == b[i])) return false;
    return true;
}

template <class T>
PolyV<T> p_add(const PolyV<T>& a, const PolyV<T>& b) {
    PolyV<T> r(std::max(a.size(), b.size()), T(0));
    for (size_t i = 0; i < a.size(); ++i) r[i] = r[i] + a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] = r[i] + b[i];
    p_norm(r);
    return r;
}

template <class T>
PolyV<T> p_neg(const PolyV<T>& a) {
    PolyV<T> r(a);
    for (auto& c : r) c = T(0) - c;
    return r;
}

template <class T>
PolyV<T> p_sub(const PolyV<T>& a, const PolyV<T>& b) { return p_add(a, p_neg(b)); }

template <class T>
PolyV<T> p_smul(const T& s, const PolyV<T>& a) {
    if (is_zero(s)) return {};
    PolyV<T> r(a);
    for (auto& c : r) c = c * s;
    p_norm(r);
    return r;
}

template <class T>
PolyV<T> p_mul(const PolyV<T>& a, const PolyV<T>& b) {
    if (a.empty() || b.empty()) return {};
    PolyV<T> r(a.size() + b.size() - 1, T(0));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] = r[i + j] + a[i] * b[j];
    p_norm(r);
    return r;
}

template <class T>
PolyV<T> p_pow(PolyV<T> base, unsigned e) {
    PolyV<T> r{T(1)};
    while (e) {
        if (e & 1u) r = p_mul(r, base);
        e >>= 1u;
        if (e) base = p_mul(base, base);
    }
    return r;
}

// Euclidean division; the divisor's leading coefficient is inverted exactly.
template <class T>
std::pair<PolyV<T>, PolyV<T>> p_divmod(const PolyV<T>& a, const PolyV<T>& b) {
    if (b.empty()) throw ZeroDivisor("polynomial division by zero");
    PolyV<T> rem(a), quo;
    const T lead_inv = inv(b.back());
    const int db = p_deg(b);
    if (p_deg(rem) >= db) quo.assign(rem.size() - b.size() + 1, T(0));
    while (p_deg(rem) >= db) {
        const int k = p_deg(rem) - db;
        T c = rem.back() * lead_inv;
        quo[k] = c;
        for (size_t i = 0; i < b.size(); ++i)
            rem[k + i] = rem[k + i] - c * b[i];
        rem.pop_back();
        p_norm(rem);
    }
    p_norm(quo);
    return {quo, rem};
}

template <class T>
PolyV<T> p_quo(const PolyV<T>& a, const PolyV<T>& b) { return p_divmod(a, b).first; }

template <class T>
PolyV<T> p_rem(const PolyV<T>& a, const PolyV<T>& b) { return p_divmod(a, b).second; }

template <class T>
PolyV<T> p_monic(const PolyV<T>& a) {
    if (a.empty()) return a;
    return p_smul(inv(a.back()), a);
}

template <class T>
PolyV<T> p_gcd(PolyV<T> a, PolyV<T> b) {
    while (!b.empty()) {
        PolyV<T> r = p_rem(a, b);
        a = std::move(b);
        b = std::move(r);
    }
    return p_monic(a);
}

// Returns (g, u, v) with u*a + v*b = g, g monic (or zero).
template <class T>
std::tuple<PolyV<T>, PolyV<T>, PolyV<T>> p_xgcd(PolyV<T> a, PolyV<T> b) {
    PolyV<T> u0{T(1)}, v0{}, u1{}, v1{T(1)};
    while (!b.empty()) {
        auto [q, r] = p_divmod(a, b);
        a = std::move(b);
        b = std::move(r);
        PolyV<T> u2 = p_sub(u0, p_mul(q, u1));
        PolyV<T> v2 = p_sub(v0, p_mul(q, v1));
        u0 = std::move(u1); v0 = std::move(v1);
        u1 = std::move(u2); v1 = std::move(v2);
    }
    if (!a.empty()) {
        T s = inv(a.back());
        a = p_smul(s, a);
        u0 = p_smul(s, u0);
        v0 = p_smul(s, v0);
    }
    return {a, u0, v0};
}

template <class T>
PolyV<T> p_deriv(const PolyV<T>& a) {
    if (a.size() <= 1) return {};
    PolyV<T> r(a.size() - 1, T(0));
    for (size_t i = 1; i < a.size(); ++i) r[i - 1] = a[i] * T(static_cast<long>(i));
    p_norm(r);
    return r;
}

template <class T>
T p_eval(const PolyV<T>& a, const T& x) {
    T r(0);
    for (size_t i = a.size(); i-- > 0;) r = r * x + a[i];
    return r;
}

template <class T>
PolyV<T> p_compose(const PolyV<T>& a, const PolyV<T>& inner) {
    PolyV<T> r;
    for (size_t i = a.size(); i-- > 0;) r = p_add(p_mul(r, inner), PolyV<T>{a[i]});
    p_norm(r);
    return r;
}

template <class T>
bool p_is_squarefree(const PolyV<T>& a) {
    if (p_deg(a) <= 0) return p_deg(a) == 0;
    return p_deg(p_gcd(a, p_deriv(a))) == 0;
}

template <class T>
PolyV<T> p_squarefree_part(const PolyV<T>& a) {
    if (a.empty()) return a;
    PolyV<T> g = p_gcd(a, p_deriv(a));
    return p_monic(p_quo(a, g));
}

// Yun's algorithm (characteristic zero): a = prod f_i^i with the f_i monic,
// squarefree and pairwise coprime. Returns the (f_i, i) with f_i nonconstant.
template <class T>
std::vector<std::pair<PolyV<T>, int>> p_squarefree_decomp(const PolyV<T>& a0) {
    std::vector<std::pair<PolyV<T>, int>> out;
    PolyV<T> a = p_monic(a0);
    if (p_deg(a) <= 0) return out;
    PolyV<T> da = p_deriv(a);
    PolyV<T> g = p_gcd(a, da);
    PolyV<T> w = p_quo(a, g);
    PolyV<T> y = p_quo(da, g);
    int i = 1;
    PolyV<T> z = p_sub(y, p_deriv(w));
    while (!(p_deg(w) == 0)) {
        PolyV<T> f = p_gcd(w, z);
        if (p_deg(f) > 0) out.emplace_back(f, i);
        w = p_quo(w, f);
        y = p_quo(z, f);
        z = p_sub(y, p_deriv(w));
        ++i;
    }
    return out;
}

} // namespace mm

#endif
