#ifndef MM_PROJLINE_HPP
#define MM_PROJLINE_HPP

#include <algorithm>
#include <map>
#include <vector>

#include "ratfun.hpp"

namespace mm {

// ---------------------------------------------------------------------------
// Places and divisors on P^1 (and finite disjoint unions of copies).
//
// Chart conventions, fixed once for the whole library: the affine coordinate
// is t, infinity is the point s = 0 in the chart s = 1/t, and ds = -dt/t^2.
// Places are monic squarefree polynomials, not irreducible ones; everything
// downstream works with gcd-free bases instead of factorizations.
// ---------------------------------------------------------------------------

struct Place {
    int component = 0;
    bool infinite = false;
    PolyV<FE> poly; // monic squarefree, deg >= 1 (finite places only)

    static Place infinity(int comp = 0) {
        Place p;
        p.component = comp;
        p.infinite = true;
        return p;
    }
    static Place finite(PolyV<FE> q, int comp = 0) {
        p_norm(q);
        if (p_deg(q) < 1) throw NonSquarefreePlace("finite place needs degree >= 1");
        if (!is_one(q.back())) q = p_monic(q);
        if (!p_is_squarefree(q)) throw NonSquarefreePlace("place polynomial is not squarefree");
        Place p;
        p.component = comp;
        p.poly = std::move(q);
        return p;
    }

    int deg() const { return infinite ? 1 : p_deg(poly); }

    friend int cmp3(const Place& a, const Place& b) {
        if (a.component != b.component) return a.component < b.component ? -1 : 1;
        if (a.infinite != b.infinite) return a.infinite ? 1 : -1; // finite places first
        if (a.infinite) return 0;
        if (a.poly.size() != b.poly.size()) return a.poly.size() < b.poly.size() ? -1 : 1;
        for (size_t i = a.poly.size(); i-- > 0;) {
            int c = cmp3(a.poly[i], b.poly[i]);
            if (c != 0) return c;
        }
        return 0;
    }
    friend bool operator==(const Place& a, const Place& b) { return cmp3(a, b) == 0; }
    friend bool operator<(const Place& a, const Place& b) { return cmp3(a, b) < 0; }
};

// Effective (or, internally, arbitrary integral) divisor in gcd-free canonical
// form: finite-place polynomials on one component are pairwise coprime, at
// most one infinity term per component, terms sorted.
class Divisor {
public:
    Divisor() = default;
    explicit Divisor(std::vector<std::pair<Place, int>> terms) { insert_all(std::move(terms)); }

    static Divisor single(const Place& p, int mult = 1) {
        return Divisor({{p, mult}});
    }

    const std::vector<std::pair<Place, int>>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    int degree() const {
        int d = 0;
        for (const auto& [p, m] : terms_) d += m * p.deg();
        return d;
    }

    bool is_effective() const {
        for (const auto& [p, m] : terms_)
            if (m < 0) return false;
        return true;
    }

    Divisor red() const {
        std::vector<std::pair<Place, int>> t;
        for (const auto& [p, m] : terms_)
            if (m != 0) t.emplace_back(p, m > 0 ? 1 : -1);
        return Divisor(std::move(t));
    }

    Divisor restrict_component(int comp) const {
        std::vector<std::pair<Place, int>> t;
        for (const auto& [p, m] : terms_)
            if (p.component == comp) t.emplace_back(p, m);
        return Divisor(std::move(t));
    }

    int mult_at_infinity(int comp = 0) const {
        for (const auto& [p, m] : terms_)
            if (p.infinite && p.component == comp) return m;
        return 0;
    }

    // Product of the finite-place polynomials (multiplicity 1 each) on comp.
    PolyV<FE> finite_support_poly(int comp = 0) const {
        PolyV<FE> q{FE(1)};
        for (const auto& [p, m] : terms_)
            if (!p.infinite && p.component == comp && m != 0) q = p_mul(q, p.poly);
        return q;
    }

    // Product of p^mult over finite places on comp (effective part only).
    PolyV<FE> finite_poly_with_mult(int comp = 0) const {
        PolyV<FE> q{FE(1)};
        for (const auto& [p, m] : terms_)
            if (!p.infinite && p.component == comp && m > 0)
                q = p_mul(q, p_pow(p.poly, static_cast<unsigned>(m)));
        return q;
    }

    friend Divisor operator+(const Divisor& a, const Divisor& b) {
        std::vector<std::pair<Place, int>> t = a.terms_;
        for (const auto& x : b.terms_) t.push_back(x);
        return Divisor(std::move(t));
    }
    friend Divisor operator-(const Divisor& a, const Divisor& b) {
        std::vector<std::pair<Place, int>> t = a.terms_;
        for (const auto& [p, m] : b.terms_) t.emplace_back(p, -m);
        return Divisor(std::move(t));
    }
    friend Divisor operator*(int s, const Divisor& a) {
        std::vector<std::pair<Place, int>> t;
        for (const auto& [p, m] : a.terms_) t.emplace_back(p, s * m);
        return Divisor(std::move(t));
    }
    // Equality through the difference, so that a place written as one
    // squarefree polynomial matches its refinement into coprime factors.
    friend bool operator==(const Divisor& a, const Divisor& b) {
        return (a - b).terms_.empty();
    }
    friend bool operator!=(const Divisor& a, const Divisor& b) { return !(a == b); }

private:
    void insert_all(std::vector<std::pair<Place, int>> in) {
        // Build a gcd-free basis of all finite-place polynomials per component,
        // splitting entries until pairwise coprime, then accumulate
        // multiplicities on the basis.
        std::map<int, std::vector<PolyV<FE>>> basis;
        std::map<int, int> inf_mult;
        for (const auto& [p, m] : in) {
            if (p.infinite) {
                inf_mult[p.component] += m;
                continue;
            }
            PolyV<FE> q = p.poly;
            auto& bs = basis[p.component];
            for (size_t i = 0; i < bs.size() && p_deg(q) > 0; ++i) {
                PolyV<FE> g = p_gcd(q, bs[i]);
                if (p_deg(g) == 0) continue;
                if (!p_eq(g, bs[i])) {
                    PolyV<FE> rest = p_quo(bs[i], g);
                    bs[i] = g;
                    bs.push_back(std::move(rest));
                }
                q = p_quo(q, g);
            }
            if (p_deg(q) > 0) bs.push_back(std::move(q));
        }
        terms_.clear();
        for (auto& [comp, bs] : basis) {
            std::sort(bs.begin(), bs.end(), [](const PolyV<FE>& a, const PolyV<FE>& b) {
                Place pa, pb;
                pa.poly = a;
                pb.poly = b;
                return cmp3(pa, pb) < 0;
            });
            for (const auto& b : bs) {
                int m = 0;
                for (const auto& [p, n] : in)
                    if (!p.infinite && p.component == comp && p_is_zero(p_rem(p.poly, b)))
                        m += n;
                if (m != 0) terms_.emplace_back(Place::finite(b, comp), m);
            }
        }
        for (const auto& [comp, m] : inf_mult)
            if (m != 0) terms_.emplace_back(Place::infinity(comp), m);
        std::sort(terms_.begin(), terms_.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
    }

    std::vector<std::pair<Place, int>> terms_;
};

inline Divisor divisor_red(const Divisor& d) { return d.red(); }

inline bool divisor_leq(const Divisor& d, const Divisor& e) { return (e - d).is_effective(); }

inline bool supports_disjoint(const Divisor& a, const Divisor& b) {
    for (const auto& [p, m] : a.terms()) {
        for (const auto& [q, n] : b.terms()) {
            if (p.component != q.component) continue;
            if (p.infinite && q.infinite) return false;
            if (p.infinite || q.infinite) continue;
            if (p_deg(p_gcd(p.poly, q.poly)) > 0) return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Rational maps between P^1 components.
// ---------------------------------------------------------------------------

struct RationalMap {
    RF f;             // coprime num/den, monic den (kept by RF)
    int src_comp = 0;
    int dst_comp = 0;

    RationalMap() = default;
    RationalMap(RF fun, int src = 0, int dst = 0) : f(std::move(fun)), src_comp(src), dst_comp(dst) {
        if (p_is_zero(f.den()) || (p_deg(f.num()) <= 0 && p_deg(f.den()) <= 0 && is_zero(f)))
            throw ConstantMap("zero map");
    }

    int degree() const { return std::max(p_deg(f.num()), p_deg(f.den())); }
    bool constant() const { return degree() <= 0; }

    friend bool operator==(const RationalMap& a, const RationalMap& b) {
        return a.f == b.f && a.src_comp == b.src_comp && a.dst_comp == b.dst_comp;
    }
};

inline RationalMap map_identity(int comp = 0) { return RationalMap(RF::var(), comp, comp); }

// g then f.
inline RationalMap map_compose(const RationalMap& f, const RationalMap& g) {
    if (g.dst_comp != f.src_comp) throw NotAMorphism("component mismatch in composition");
    return RationalMap(f.f.compose(g.f), g.src_comp, f.dst_comp);
}

inline Divisor divisor_pullback(const RationalMap& f, const Divisor& d) {
    if (f.constant()) throw ConstantMap("pullback along constant map");
    const int n = f.degree();
    std::vector<std::pair<Place, int>> out;
    const int dnum = p_deg(f.f.num()), dden = p_deg(f.f.den());
    for (const auto& [p, m] : d.terms()) {
        if (p.component != f.dst_comp) continue;
        if (p.infinite) {
            for (const auto& [q, j] : p_squarefree_decomp(f.f.den()))
                out.emplace_back(Place::finite(q, f.src_comp), m * j);
            if (dnum > dden) out.emplace_back(Place::infinity(f.src_comp), m * (dnum - dden));
        } else {
            // numerator of p(f): sum p_i num^i den^(e-i)
            const int e = p_deg(p.poly);
            PolyV<FE> a;
            for (int i = 0; i <= e; ++i) {
                PolyV<FE> term = p_smul(p.poly[static_cast<size_t>(i)],
                                        p_mul(p_pow(f.f.num(), static_cast<unsigned>(i)),
                                              p_pow(f.f.den(), static_cast<unsigned>(e - i))));
                a = p_add(a, term);
            }
            for (const auto& [q, j] : p_squarefree_decomp(a))
                out.emplace_back(Place::finite(q, f.src_comp), m * j);
            int defect = e * n - p_deg(a);
            if (defect > 0) out.emplace_back(Place::infinity(f.src_comp), m * defect);
        }
    }
    return Divisor(std::move(out));
}

// ---------------------------------------------------------------------------
// Modulus triples and the two morphism predicates.
// ---------------------------------------------------------------------------

struct ModulusTriple {
    int components = 1;
    Divisor Y, Z;

    ModulusTriple() = default;
    ModulusTriple(Divisor y, Divisor z, int ncomp = 1) : components(ncomp), Y(std::move(y)), Z(std::move(z)) {
        if (!Y.is_effective() || !Z.is_effective())
            throw SupportsOverlap("modulus divisors must be effective");
        if (!supports_disjoint(Y, Z)) throw SupportsOverlap("|Y| and |Z| must be disjoint");
        for (const auto& [p, m] : Y.terms())
            if (p.component < 0 || p.component >= components) throw BadIndex("Y component out of range");
        for (const auto& [p, m] : Z.terms())
            if (p.component < 0 || p.component >= components) throw BadIndex("Z component out of range");
    }

    friend bool operator==(const ModulusTriple& a, const ModulusTriple& b) {
        return a.components == b.components && a.Y == b.Y && a.Z == b.Z;
    }
};

// A morphism of disjoint unions of P^1's: one rational map per source
// component, with its target component assignment.
struct MMap {
    std::vector<RationalMap> maps; // index = source component

    static MMap single(RationalMap f) {
        MMap m;
        f.src_comp = 0;
        m.maps = {std::move(f)};
        return m;
    }
};

inline Divisor mmap_pullback(const MMap& f, const Divisor& d) {
    Divisor out;
    for (const auto& g : f.maps) out = out + divisor_pullback(g, d);
    return out;
}

inline bool is_morphism_bar(const MMap& f, const ModulusTriple& src, const ModulusTriple& dst) {
    if (static_cast<int>(f.maps.size()) != src.components) return false;
    for (int i = 0; i < src.components; ++i) {
        if (f.maps[i].src_comp != i) return false;
        if (f.maps[i].dst_comp < 0 || f.maps[i].dst_comp >= dst.components) return false;
        if (f.maps[i].constant()) return false;
    }
    if (!divisor_leq(src.Y, mmap_pullback(f, dst.Y))) return false;
    Divisor pz = mmap_pullback(f, dst.Z);
    Divisor fz_nonred = mmap_pullback(f, dst.Z - dst.Z.red());
    if (!divisor_leq(fz_nonred, src.Z - src.Z.red())) return false;
    if (!divisor_leq(pz.red(), src.Z.red())) return false;
    return true;
}

inline bool is_morphism_under(const MMap& f, const ModulusTriple& src, const ModulusTriple& dst) {
    if (static_cast<int>(f.maps.size()) != src.components) return false;
    for (int i = 0; i < src.components; ++i) {
        if (f.maps[i].src_comp != i) return false;
        if (f.maps[i].dst_comp < 0 || f.maps[i].dst_comp >= dst.components) return false;
        if (f.maps[i].constant()) return false;
    }
    Divisor fy_nonred = mmap_pullback(f, dst.Y - dst.Y.red());
    if (!divisor_leq(fy_nonred, src.Y - src.Y.red())) return false;
    Divisor py = mmap_pullback(f, dst.Y);
    if (!divisor_leq(py.red(), src.Y.red())) return false;
    if (!divisor_leq(src.Z, mmap_pullback(f, dst.Z))) return false;
    return true;
}

inline bool is_morphism_bar(const RationalMap& f, const ModulusTriple& src, const ModulusTriple& dst) {
    return is_morphism_bar(MMap::single(f), src, dst);
}
inline bool is_morphism_under(const RationalMap& f, const ModulusTriple& src, const ModulusTriple& dst) {
    return is_morphism_under(MMap::single(f), src, dst);
}

// ---------------------------------------------------------------------------
// Residues. Higher-order poles are removed by subtracting exact differentials
// (Hermite-style), then the simple-pole residue at a squarefree place p is
// Tr_{(k[t]/p)/k}(r(theta)/p'(theta)). At infinity we compute in s = 1/t with
// ds = -dt/t^2.
// ---------------------------------------------------------------------------

namespace detail {

inline PolyV<FE> inv_mod(const PolyV<FE>& a, const PolyV<FE>& m) {
    auto [g, u, v] = p_xgcd(a, m);
    (void)v;
    if (p_deg(g) != 0) throw ZeroDivisor("non-invertible element in inv_mod");
    return p_rem(p_smul(inv(g[0]), u), m);
}

inline FE trace_mod(const PolyV<FE>& alpha, const PolyV<FE>& p) {
    // trace of multiplication by alpha on k[t]/(p)
    const int e = p_deg(p);
    FE tr(0);
    PolyV<FE> cur = p_rem(alpha, p);
    PolyV<FE> tpow{FE(1)};
    for (int i = 0; i < e; ++i) {
        PolyV<FE> col = p_rem(p_mul(alpha, tpow), p);
        if (static_cast<int>(col.size()) > i) tr = tr + col[static_cast<size_t>(i)];
        tpow = p_rem(p_mul(tpow, PolyV<FE>{FE(0), FE(1)}), p);
    }
    (void)cur;
    return tr;
}

inline FE residue_finite(const RF& w, const PolyV<FE>& p0) {
    PolyV<FE> p = p_monic(p0);
    if (!p_is_squarefree(p)) throw NonSquarefreePlace("residue at non-squarefree place");
    PolyV<FE> c = p_gcd(w.den(), p);
    if (p_deg(c) == 0) return FE(0);
    if (!p_eq(c, p)) {
        // the pole meets only part of the place: split and add
        return residue_finite(w, c) + residue_finite(w, p_quo(p, c));
    }
    // den = p^m * rest with rest coprime to p
    PolyV<FE> rest = w.den();
    int m = 0;
    while (true) {
        auto [q, r] = p_divmod(rest, p);
        if (!p_is_zero(r)) break;
        rest = q;
        ++m;
    }
    // local expansion numerator: A = num * rest^{-1} mod p^m
    PolyV<FE> pm = p_pow(p, static_cast<unsigned>(m));
    PolyV<FE> a = p_rem(p_mul(p_rem(w.num(), pm), inv_mod(p_rem(rest, pm), pm)), pm);
    // p-adic digits of A, low to high
    std::vector<PolyV<FE>> digits;
    for (int i = 0; i < m; ++i) {
        auto [q, r] = p_divmod(a, p);
        digits.push_back(r);
        a = q;
    }
    // parts[j] / p^j for j = 1..m; reduce pole order down to 1
    std::vector<PolyV<FE>> parts(static_cast<size_t>(m) + 1);
    for (int j = 1; j <= m; ++j) parts[static_cast<size_t>(j)] = digits[static_cast<size_t>(m - j)];
    PolyV<FE> dp = p_deriv(p);
    for (int j = m; j >= 2; --j) {
        PolyV<FE> r = parts[static_cast<size_t>(j)];
        if (p_is_zero(r)) continue;
        // choose h with r + (j-1) h p' = 0 mod p; then
        // r/p^j - d(h/p^{j-1}) = (u - h')/p^{j-1} with u = (r + (j-1) h p')/p
        PolyV<FE> h = p_rem(p_neg(p_mul(r, inv_mod(p_smul(FE(static_cast<long>(j - 1)), dp), p))), p);
        PolyV<FE> u = p_quo(p_add(r, p_smul(FE(static_cast<long>(j - 1)), p_mul(h, dp))), p);
        parts[static_cast<size_t>(j - 1)] =
            p_rem(p_add(parts[static_cast<size_t>(j - 1)], p_sub(u, p_deriv(h))), p);
        // (u - h') has degree < deg p, so no carry to lower orders is needed
    }
    if (p_is_zero(parts[1])) return FE(0);
    return trace_mod(p_rem(p_mul(parts[1], inv_mod(dp, p)), p), p);
}

} // namespace detail

// Residue at P of the differential w dt.
inline FE residue(const RF& w, const Place& p) {
    if (p.infinite) {
        // substitute t = 1/s: w(t) dt = -w(1/s)/s^2 ds
        RF ws = RF(-1) * w.subst_inverse() / RF::from_poly({FE(0), FE(0), FE(1)});
        return detail::residue_finite(ws, {FE(0), FE(1)});
    }
    return detail::residue_finite(w, p.poly);
}

// All places where w dt can have poles (zeros of the denominator refined to
// squarefree places, plus infinity), for residue-theorem sweeps.
inline std::vector<Place> polar_places(const RF& w, int comp = 0) {
    std::vector<Place> out;
    for (const auto& [q, j] : p_squarefree_decomp(w.den()))
        out.push_back(Place::finite(q, comp));
    out.push_back(Place::infinity(comp));
    return out;
}

// ---------------------------------------------------------------------------
// Trace along a finite map: trace of multiplication by g on k(t)/k(t') where
// t' = f(t), computed modulo the bivariate relation num_f(T) - t' den_f(T).
// ---------------------------------------------------------------------------

inline RF trace_along(const RationalMap& f, const RF& g) {
    if (f.constant()) throw ConstantMap("trace along constant map");
    const int n = f.degree();
    const RF tp = RF::var(); // the target coordinate t'
    PolyV<RF> phi(static_cast<size_t>(n) + 1, RF(0));
    for (size_t i = 0; i < phi.size(); ++i) {
        FE ni = i < f.f.num().size() ? f.f.num()[i] : FE(0);
        FE di = i < f.f.den().size() ? f.f.den()[i] : FE(0);
        phi[i] = RF(ni) - tp * RF(di);
    }
    p_norm(phi);
    if (p_deg(phi) != n) throw InternalInconsistency("relation degree mismatch");

    auto lift = [](const PolyV<FE>& p) {
        PolyV<RF> out(p.size());
        for (size_t i = 0; i < p.size(); ++i) out[i] = RF(p[i]);
        p_norm(out);
        return out;
    };
    PolyV<RF> a = p_rem(lift(g.num()), phi);
    PolyV<RF> b = p_rem(lift(g.den()), phi);
    auto [gg, u, v] = p_xgcd(b, phi);
    (void)v;
    if (p_deg(gg) != 0) throw PoleOnBranchLocus("denominator shares a factor with the relation");
    PolyV<RF> alpha = p_rem(p_mul(p_mul(a, u), PolyV<RF>{inv(gg[0])}), phi);

    RF tr(0);
    PolyV<RF> tpow{RF(1)};
    for (int i = 0; i < n; ++i) {
        PolyV<RF> col = p_rem(p_mul(alpha, tpow), phi);
        if (static_cast<int>(col.size()) > i) tr = tr + col[static_cast<size_t>(i)];
        tpow = p_rem(p_mul(tpow, PolyV<RF>{RF(0), RF(1)}), phi);
    }
    return tr;
}

} // namespace mm

#endif
