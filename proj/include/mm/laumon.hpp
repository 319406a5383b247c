#ifndef MM_LAUMON_HPP
#define MM_LAUMON_HPP

#include <cstdlib>
#include <numeric>

#include "hdr.hpp"

namespace mm {

// ---------------------------------------------------------------------------
// Linear model of a two-term motive [F -> G] with G = T x U a product of a
// multiplicative and a unipotent vector part (no abelian quotient, which is
// faithful on unions of projective lines). The data is stored blockwise:
//
//   L      etale rank (geometric points of the finite part, degree zero),
//   Vinf   infinitesimal part, modeled on V(X, Z),
//   LieT   multiplicative Lie part, the functionals on simple-pole forms,
//   LieU   unipotent Lie part, modeled on U(X, Y),
//   u_inf  the structure map Vinf -> LieT + LieU (T rows first),
//   u_et   unit classes of the etale basis (rational functions modulo Y, up
//          to scalars), kept only when every finite-part place is rational,
//   u_et_uni  the unipotent logarithms of the unit classes, LieU x L.
// ---------------------------------------------------------------------------

struct LinearLaumonMotive {
    int components = 1;
    int dimL = 0, dimVinf = 0, dimLieT = 0, dimLieU = 0;
    KMat u_inf;           // (dimLieT + dimLieU) x dimVinf
    std::vector<RF> u_et; // one class per etale basis vector; empty when abstract
    bool u_et_abstract = true;
    KMat u_et_uni;        // dimLieU x dimL
    int torsion_cap = 24;

    int total_dim() const { return dimL + dimVinf + dimLieT + dimLieU; }
};

inline void lm_validate(const LinearLaumonMotive& m) {
    if (m.dimL < 0 || m.dimVinf < 0 || m.dimLieT < 0 || m.dimLieU < 0)
        throw BadIndex("negative block dimension");
    if (m.u_inf.rows() != static_cast<size_t>(m.dimLieT + m.dimLieU) ||
        m.u_inf.cols() != static_cast<size_t>(m.dimVinf))
        throw InternalInconsistency("structure map has the wrong shape");
    if (m.u_et_uni.rows() != static_cast<size_t>(m.dimLieU) ||
        m.u_et_uni.cols() != static_cast<size_t>(m.dimL))
        throw InternalInconsistency("unit logarithm block has the wrong shape");
    if (!m.u_et_abstract && static_cast<int>(m.u_et.size()) != m.dimL)
        throw InternalInconsistency("unit class count does not match the etale rank");
}

namespace detail {

inline LinearLaumonMotive lm_make(int l, int v, int t, int u) {
    LinearLaumonMotive m;
    m.dimL = l;
    m.dimVinf = v;
    m.dimLieT = t;
    m.dimLieU = u;
    m.u_inf = KMat(static_cast<size_t>(t + u), static_cast<size_t>(v));
    m.u_et_uni = KMat(static_cast<size_t>(u), static_cast<size_t>(l));
    return m;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Filtration by subobject type: level 1 drops the infinitesimal part, level 2
// keeps only the unipotent kernel, level 3 is zero. The graded pieces are the
// infinitesimal part (degree 0), the lattice-with-torus part (degree 1), and
// the unipotent part (degree 2).
// ---------------------------------------------------------------------------

inline LinearLaumonMotive fil(const LinearLaumonMotive& m, int i) {
    lm_validate(m);
    switch (i) {
        case 0: return m;
        case 1: {
            LinearLaumonMotive out = m;
            out.dimVinf = 0;
            out.u_inf = KMat(static_cast<size_t>(m.dimLieT + m.dimLieU), 0);
            return out;
        }
        case 2: {
            LinearLaumonMotive out = detail::lm_make(0, 0, 0, m.dimLieU);
            out.components = m.components;
            out.torsion_cap = m.torsion_cap;
            return out;
        }
        case 3: return detail::lm_make(0, 0, 0, 0);
        default: throw BadIndex("filtration level out of range");
    }
}

inline LinearLaumonMotive gr(const LinearLaumonMotive& m, int i) {
    lm_validate(m);
    switch (i) {
        case 0: {
            LinearLaumonMotive out = detail::lm_make(0, m.dimVinf, 0, 0);
            out.components = m.components;
            return out;
        }
        case 1: {
            LinearLaumonMotive out = detail::lm_make(m.dimL, 0, m.dimLieT, 0);
            out.components = m.components;
            out.u_et = m.u_et;
            out.u_et_abstract = m.u_et_abstract;
            out.torsion_cap = m.torsion_cap;
            return out;
        }
        case 2: {
            LinearLaumonMotive out = detail::lm_make(0, 0, 0, m.dimLieU);
            out.components = m.components;
            return out;
        }
        default: throw BadIndex("graded level out of range");
    }
}

// Quotient by the unipotent kernel: [F -> T].
inline LinearLaumonMotive times(const LinearLaumonMotive& m) {
    lm_validate(m);
    LinearLaumonMotive out = detail::lm_make(m.dimL, m.dimVinf, m.dimLieT, 0);
    out.components = m.components;
    out.u_inf = m.u_inf.block(0, 0, static_cast<size_t>(m.dimLieT),
                              static_cast<size_t>(m.dimVinf));
    out.u_et = m.u_et;
    out.u_et_abstract = m.u_et_abstract;
    out.torsion_cap = m.torsion_cap;
    return out;
}

// ---------------------------------------------------------------------------
// Universal vector extension and the de Rham space. The group of extensions
// of [F -> T] by the additive group is Hom(F, G_a): there are no homs from a
// torus to G_a and no higher extensions of F or T by G_a in this model, so
// its dual is (L tensor k) + Vinf. The sharp object is the fibre product of
// the universal extension of the quotient [F -> T] with the given motive; in
// the block coordinates [U | L | V | T] the structure maps below realize the
// two exact rows and columns, and the canonical retraction s onto U is pinned
// down by i s = p - v q.
// ---------------------------------------------------------------------------

struct RdRSpace {
    int del = 0, inf = 0, uni = 0;
    int total() const { return del + inf + uni; }
};

struct SharpModel {
    int ext_dual = 0;       // dim of the dual extension group (L tensor k) + Vinf
    KMat i;                 // U -> G
    KMat j;                 // U -> sharp (kernel of q)
    KMat q;                 // sharp -> universal extension of the quotient
    KMat p;                 // sharp -> G
    KMat v_nat;             // universal extension of the quotient -> G
    KMat s;                 // the canonical retraction sharp -> U
    RdRSpace rdr;
};

inline SharpModel sharp(const LinearLaumonMotive& m) {
    lm_validate(m);
    const size_t U = static_cast<size_t>(m.dimLieU), L = static_cast<size_t>(m.dimL),
                 V = static_cast<size_t>(m.dimVinf), T = static_cast<size_t>(m.dimLieT);
    const size_t tot = U + L + V + T;
    SharpModel sh;
    sh.ext_dual = static_cast<int>(L + V);

    KMat cV = m.u_inf.block(T, 0, U, V); // unipotent rows of the structure map
    const KMat& cL = m.u_et_uni;

    sh.j = KMat(tot, U);
    sh.j.set_block(0, 0, KMat::identity(U));

    sh.i = KMat(T + U, U);
    sh.i.set_block(T, 0, KMat::identity(U));

    sh.q = KMat(L + V + T, tot);
    sh.q.set_block(0, U, KMat::identity(L + V + T));

    sh.p = KMat(T + U, tot);
    sh.p.set_block(0, U + L + V, KMat::identity(T));
    sh.p.set_block(T, 0, KMat::identity(U));

    sh.v_nat = KMat(T + U, L + V + T);
    sh.v_nat.set_block(0, L + V, KMat::identity(T));
    sh.v_nat.set_block(T, 0, cL);
    sh.v_nat.set_block(T, L, cV);

    sh.s = KMat(U, tot);
    sh.s.set_block(0, 0, KMat::identity(U));
    for (size_t r = 0; r < U; ++r) {
        for (size_t c = 0; c < L; ++c) sh.s(r, U + c) = -cL(r, c);
        for (size_t c = 0; c < V; ++c) sh.s(r, U + L + c) = -cV(r, c);
    }
    if (!(sh.i * sh.s == sh.p - sh.v_nat * sh.q))
        throw InternalInconsistency("retraction characterization fails");

    sh.rdr = RdRSpace{static_cast<int>(T + L), static_cast<int>(V), static_cast<int>(U)};
    return sh;
}

inline RdRSpace r_dr(const LinearLaumonMotive& m) { return sharp(m).rdr; }

// Dimension-level duality: the lattice trades places with the torus, the
// infinitesimal part with the unipotent one.
inline LinearLaumonMotive cartier_dual_dims(const LinearLaumonMotive& m) {
    lm_validate(m);
    LinearLaumonMotive out =
        detail::lm_make(m.dimLieT, m.dimLieU, m.dimL, m.dimVinf);
    out.components = m.components;
    out.torsion_cap = m.torsion_cap;
    return out;
}

// ---------------------------------------------------------------------------
// Germ splitting along a thickened place. k[t]/p^n contains a unique copy of
// the residue field lifting the identity (Hensel root of the separable place
// polynomial), so every germ splits canonically into a residue-field part and
// a part in (p)/(p^n); the latter is a unipotent coordinate block.
// ---------------------------------------------------------------------------

namespace detail {

inline PolyV<FE> poly_eval_mod(const PolyV<FE>& a, const PolyV<FE>& x,
                               const PolyV<FE>& mod) {
    PolyV<FE> r;
    for (size_t i = a.size(); i-- > 0;)
        r = p_rem(p_add(p_mul(r, x), PolyV<FE>{a[i]}), mod);
    return r;
}

// the root of p in k[t]/p^n that reduces to t modulo p
inline PolyV<FE> hensel_root(const PolyV<FE>& p, int n) {
    PolyV<FE> pn = p_pow(p, static_cast<unsigned>(n));
    PolyV<FE> x{FE(0), FE(1)};
    PolyV<FE> dp = p_deriv(p);
    for (int it = 0; it < 2 * n + 2; ++it) {
        PolyV<FE> fx = poly_eval_mod(p, x, pn);
        if (p_is_zero(fx)) return x;
        PolyV<FE> dfx = poly_eval_mod(dp, x, pn);
        x = p_rem(p_sub(x, p_mul(fx, inv_mod(dfx, pn))), pn);
    }
    if (!p_is_zero(poly_eval_mod(p, x, pn)))
        throw InternalInconsistency("place polynomial does not lift");
    return x;
}

// coordinates in the block basis {p t^j} of the non-residue-field part of the
// germ of g at the block's place
inline std::vector<FE> uni_block_coords(const UBlock& b, const RF& g) {
    if (b.p.infinite) {
        PolyV<FE> m = rf_mod(g.subst_inverse(), {FE(0), FE(1)}, b.n);
        std::vector<FE> out(static_cast<size_t>(b.n - 1), FE(0));
        for (int j = 1; j < b.n && j < static_cast<int>(m.size()) + 0; ++j)
            out[static_cast<size_t>(j - 1)] =
                j < static_cast<int>(m.size()) ? m[static_cast<size_t>(j)] : FE(0);
        return out;
    }
    const int e = b.p.deg();
    PolyV<FE> pn = p_pow(b.p.poly, static_cast<unsigned>(b.n));
    PolyV<FE> m = rf_mod(g, b.p.poly, b.n);
    PolyV<FE> a0 = p_rem(m, b.p.poly);
    PolyV<FE> th = hensel_root(b.p.poly, b.n);
    PolyV<FE> sig = poly_eval_mod(a0, th, pn);
    auto [quo, rem] = p_divmod(p_sub(m, sig), b.p.poly);
    if (!p_is_zero(rem))
        throw InternalInconsistency("residue-field part does not split off");
    std::vector<FE> out(static_cast<size_t>((b.n - 1) * e), FE(0));
    for (size_t i = 0; i < out.size() && i < quo.size(); ++i) out[i] = quo[i];
    return out;
}

// same splitting multiplicatively: coordinates of log of the unipotent factor
// of an invertible germ
inline std::vector<FE> uni_block_log(const UBlock& b, const RF& g) {
    PolyV<FE> mod, w;
    if (b.p.infinite) {
        mod = p_pow(PolyV<FE>{FE(0), FE(1)}, static_cast<unsigned>(b.n));
        PolyV<FE> m = rf_mod(g.subst_inverse(), {FE(0), FE(1)}, b.n);
        if (m.empty() || is_zero(m[0])) throw ZeroDivisor("germ is not a unit");
        w = p_rem(p_smul(inv(m[0]), m), mod);
    } else {
        mod = p_pow(b.p.poly, static_cast<unsigned>(b.n));
        PolyV<FE> m = rf_mod(g, b.p.poly, b.n);
        PolyV<FE> a0 = p_rem(m, b.p.poly);
        if (p_is_zero(a0)) throw ZeroDivisor("germ is not a unit");
        PolyV<FE> th = hensel_root(b.p.poly, b.n);
        PolyV<FE> sig = poly_eval_mod(a0, th, mod);
        w = p_rem(p_mul(m, inv_mod(sig, mod)), mod);
    }
    w = p_sub(w, PolyV<FE>{FE(1)}); // now in the maximal ideal of the block
    PolyV<FE> lg, pw{FE(1)};
    for (int j = 1; j < b.n * (b.p.infinite ? 1 : b.p.deg()) + 1; ++j) {
        pw = p_rem(p_mul(pw, w), mod);
        if (p_is_zero(pw)) break;
        lg = p_add(lg, p_smul(FE(rat(j % 2 == 1 ? 1 : -1, j)), pw));
    }
    lg = p_rem(lg, mod);
    if (b.p.infinite) {
        std::vector<FE> out(static_cast<size_t>(b.n - 1), FE(0));
        for (int j = 1; j < b.n && j < static_cast<int>(lg.size()) + 0; ++j)
            out[static_cast<size_t>(j - 1)] =
                j < static_cast<int>(lg.size()) ? lg[static_cast<size_t>(j)] : FE(0);
        return out;
    }
    auto [quo, rem] = p_divmod(lg, b.p.poly);
    if (!p_is_zero(rem)) throw InternalInconsistency("logarithm is not unipotent");
    std::vector<FE> out(static_cast<size_t>((b.n - 1) * b.p.deg()), FE(0));
    for (size_t i = 0; i < out.size() && i < quo.size(); ++i) out[i] = quo[i];
    return out;
}

// move a divisor living on one component to component zero
inline Divisor retag0(const Divisor& d) {
    std::vector<std::pair<Place, int>> t;
    for (const auto& [p, m] : d.terms())
        t.emplace_back(p.infinite ? Place::infinity(0) : Place::finite(p.poly, 0), m);
    return Divisor(std::move(t));
}

} // namespace detail

// Equality of unit classes modulo Y up to scalars and torsion: the smallest
// m <= cap with r^m constant along Y, if one exists.
inline std::optional<int> unit_class_trivial(const RF& r, const Divisor& Y, int cap) {
    if (Y.empty()) return 1;
    RF cur(1);
    for (int m = 1; m <= cap; ++m) {
        cur = cur * r;
        bool ok = true;
        std::optional<FE> val;
        for (const auto& [p, n] : Y.terms()) {
            PolyV<FE> g = p.infinite
                              ? detail::rf_mod(cur.subst_inverse(), {FE(0), FE(1)}, n)
                              : detail::rf_mod(cur, p.poly, n);
            if (p_deg(g) > 0 || g.empty() || is_zero(g[0])) {
                ok = false;
                break;
            }
            if (!val) val = g[0];
            else if (!(*val == g[0])) {
                ok = false;
                break;
            }
        }
        if (ok) return m;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// The motive of a modulus triple: [F(X,Z) -> J(X,Y)]. The etale rank counts
// geometric points of the reduced infinity part minus one per component; the
// infinitesimal part is V(X,Z); the torus Lie part is dual to the simple-pole
// forms along Y_red via residues; the unipotent part is U(X,Y). The structure
// map sends a V-class v to the germ of v along Y: its torus coordinates are
// the residue functionals against Z, its unipotent coordinates come from the
// germ splitting above.
// ---------------------------------------------------------------------------

inline LinearLaumonMotive lm_construct(const ModulusTriple& T, int torsion_cap = 24) {
    if (T.components < 1) throw UnsupportedGeometry("need at least one component");
    USpace us = u_space(T.Y);
    VSpace vs = v_space(T.Z);

    LinearLaumonMotive m;
    m.components = T.components;
    m.torsion_cap = torsion_cap;
    m.dimLieU = us.dim;
    m.dimVinf = vs.dim;

    std::vector<int> t_offset(static_cast<size_t>(T.components) + 1, 0);
    std::vector<LBasis> omegas;
    for (int c = 0; c < T.components; ++c) {
        Divisor yr = detail::retag0(T.Y.restrict_component(c).red());
        Divisor zr = detail::retag0(T.Z.restrict_component(c).red());
        omegas.push_back(omega_space(yr));
        m.dimLieT += omegas.back().dim();
        m.dimL += zr.empty() ? 0 : zr.degree() - 1;
        t_offset[static_cast<size_t>(c) + 1] = m.dimLieT;
    }

    m.u_inf = KMat(static_cast<size_t>(m.dimLieT + m.dimLieU),
                   static_cast<size_t>(m.dimVinf));
    size_t col = 0;
    for (const auto& vb : vs.blocks) {
        const int c = vb.p.component;
        Divisor zr = detail::retag0(T.Z.restrict_component(c).red());
        for (const auto& v : vb.reps) {
            const LBasis& w = omegas[static_cast<size_t>(c)];
            for (int j = 0; j < w.dim(); ++j) {
                FE r(0);
                for (const auto& [pz, mz] : zr.terms())
                    r = r + residue(v * w.elems[static_cast<size_t>(j)], pz);
                m.u_inf(static_cast<size_t>(t_offset[static_cast<size_t>(c)] + j), col) = r;
            }
            size_t row = static_cast<size_t>(m.dimLieT);
            for (const auto& ub : us.blocks) {
                if (ub.p.component == c) {
                    std::vector<FE> coords = detail::uni_block_coords(ub, v);
                    for (size_t i = 0; i < coords.size(); ++i)
                        m.u_inf(row + i, col) = coords[i];
                }
                row += ub.reps.size();
            }
            ++col;
        }
    }

    m.u_et_uni = KMat(static_cast<size_t>(m.dimLieU), static_cast<size_t>(m.dimL));
    Divisor zred = T.Z.red();
    bool explicit_ok = T.components == 1 && !zred.empty();
    for (const auto& [p, mm_] : zred.terms())
        if (p.deg() != 1) explicit_ok = false;
    if (explicit_ok) {
        auto place_fun = [](const Place& p) {
            return p.infinite ? RF(1) : RF::from_poly(p.poly);
        };
        const auto& terms = zred.terms();
        for (size_t i = 1; i < terms.size(); ++i)
            m.u_et.push_back(place_fun(terms[i].first) / place_fun(terms[0].first));
        m.u_et_abstract = false;
        for (size_t j = 0; j < m.u_et.size(); ++j) {
            size_t row = 0;
            for (const auto& ub : us.blocks) {
                std::vector<FE> lg = detail::uni_block_log(ub, m.u_et[j]);
                for (size_t i = 0; i < lg.size(); ++i) m.u_et_uni(row + i, j) = lg[i];
                row += ub.reps.size();
            }
        }
    }
    lm_validate(m);
    return m;
}

// ---------------------------------------------------------------------------
// Functoriality along a map of triples (contravariant): the returned blocks
// carry the motive of the destination triple to the motive of the source.
// Cycles pull back with ramification multiplicities, read off through the
// trace pairing; torus functionals pull back dually to the trace of forms,
// computed through germ representatives; the other two blocks are the germ
// pullbacks on U and V.
// ---------------------------------------------------------------------------

struct LmMaps {
    KMat on_L, on_Vinf, on_LieT, on_LieU;
    int u_et_power = 0; // torsion exponent used by the unit-class comparison
};

namespace detail {

// trace-pairing Gram matrix of the coordinate big space of a reduced divisor
inline KMat cycle_gram(const Divisor& zr) {
    size_t n = static_cast<size_t>(zr.degree());
    KMat g(n, n);
    size_t off = 0;
    for (const auto& [p, m] : zr.terms()) {
        if (p.infinite) {
            g(off, off) = FE(1);
            off += 1;
            continue;
        }
        const size_t e = static_cast<size_t>(p.deg());
        for (size_t a = 0; a < e; ++a)
            for (size_t b = 0; b < e; ++b)
                g(off + a, off + b) = trace_mod(
                    p_rem(p_pow(PolyV<FE>{FE(0), FE(1)}, static_cast<unsigned>(a + b)),
                          p.poly),
                    p.poly);
        off += e;
    }
    return g;
}

// the degree functional (sum over geometric points) as a row matrix
inline KMat cycle_degree_row(const Divisor& zr) {
    KMat row(1, static_cast<size_t>(zr.degree()));
    size_t off = 0;
    for (const auto& [p, m] : zr.terms()) {
        if (p.infinite) {
            row(0, off) = FE(1);
            off += 1;
            continue;
        }
        const size_t e = static_cast<size_t>(p.deg());
        for (size_t a = 0; a < e; ++a)
            row(0, off + a) = trace_mod(
                p_rem(p_pow(PolyV<FE>{FE(0), FE(1)}, static_cast<unsigned>(a)), p.poly),
                p.poly);
        off += e;
    }
    return row;
}

// basis of the degree-zero cycles: within the first place the trace-zero
// vectors, and for every further place its full coordinate block balanced
// against the constant germ of the first place. For rational places this is
// the difference basis P_i - P_0 that also indexes the unit classes.
inline KMat cycle_kernel_basis(const Divisor& zr) {
    const size_t n = static_cast<size_t>(zr.degree());
    KMat k(n, n == 0 ? 0 : n - 1);
    if (zr.terms().empty()) return k;
    const Place& p0 = zr.terms()[0].first;
    const size_t e0 = static_cast<size_t>(p0.deg());
    KMat deg_row = cycle_degree_row(zr);
    size_t col = 0;
    for (size_t a = 1; a < e0; ++a) {
        k(a, col) = FE(1);
        k(0, col) = -deg_row(0, a) * FE(rat(1, static_cast<long>(e0)));
        ++col;
    }
    size_t off = e0;
    for (size_t i = 1; i < zr.terms().size(); ++i) {
        const size_t e = static_cast<size_t>(zr.terms()[i].first.deg());
        for (size_t a = 0; a < e; ++a) {
            k(off + a, col) = FE(1);
            k(0, col) = -deg_row(0, off + a) * FE(rat(1, static_cast<long>(e0)));
            ++col;
        }
        off += e;
    }
    return k;
}

// first-order germ coordinates of g along a reduced divisor, in the big-space
// layout of cycle_gram
inline std::vector<FE> cycle_values(const Divisor& zr, const RF& g) {
    std::vector<FE> out;
    for (const auto& [p, m] : zr.terms()) {
        if (p.infinite) {
            PolyV<FE> v = rf_mod(g.subst_inverse(), {FE(0), FE(1)}, 1);
            out.push_back(v.empty() ? FE(0) : v[0]);
        } else {
            PolyV<FE> v = rf_mod(g, p.poly, 1);
            for (int i = 0; i < p.deg(); ++i)
                out.push_back(i < static_cast<int>(v.size()) ? v[static_cast<size_t>(i)]
                                                             : FE(0));
        }
    }
    return out;
}

} // namespace detail

inline LmMaps lm_pull(const RationalMap& f, const ModulusTriple& src,
                      const ModulusTriple& dst) {
    if (src.components != 1 || dst.components != 1)
        throw UnsupportedGeometry("functoriality is implemented per component");
    if (!is_morphism_bar(f, src, dst)) throw NotAMorphism("pullback needs an edge");
    LinearLaumonMotive ms = lm_construct(src), md = lm_construct(dst);
    LmMaps out;

    out.on_LieU = u_pull(f, src.Y, dst.Y);
    out.on_Vinf = v_pull(f, src.Z, dst.Z);

    // torus functionals: dual of the trace of simple-pole forms, through germs
    Divisor yrs = src.Y.red(), yrd = dst.Y.red();
    out.on_LieT = KMat(static_cast<size_t>(ms.dimLieT), static_cast<size_t>(md.dimLieT));
    if (md.dimLieT > 0) {
        LBasis wd = omega_space(yrd);
        LBasis cands = l_space(yrd.degree() * Divisor::single(detail::point_off(yrd)));
        auto [gb, germmat] = detail::span_germs(yrd, cands.elems);
        (void)germmat;
        KMat fprime(static_cast<size_t>(md.dimLieT), gb.size());
        for (size_t b = 0; b < gb.size(); ++b)
            for (int j = 0; j < wd.dim(); ++j) {
                FE r(0);
                for (const auto& [p, mm_] : yrd.terms())
                    r = r + residue(gb[b] * wd.elems[static_cast<size_t>(j)], p);
                fprime(static_cast<size_t>(j), b) = r;
            }
        if (fprime.rows() != fprime.cols() || !is_invertible(fprime))
            throw InternalInconsistency("germ classes do not span the torus dual");
        if (ms.dimLieT > 0) {
            LBasis ws = omega_space(yrs);
            KMat a(static_cast<size_t>(ms.dimLieT), gb.size());
            for (size_t b = 0; b < gb.size(); ++b) {
                RF h = gb[b].compose(f.f);
                for (int j = 0; j < ws.dim(); ++j) {
                    FE r(0);
                    for (const auto& [p, mm_] : yrs.terms())
                        r = r + residue(h * ws.elems[static_cast<size_t>(j)], p);
                    a(static_cast<size_t>(j), b) = r;
                }
            }
            out.on_LieT = a * inverse(fprime);
        }
    }

    // cycle pullback through the trace pairing
    Divisor zrs = src.Z.red(), zrd = dst.Z.red();
    out.on_L = KMat(static_cast<size_t>(ms.dimL), static_cast<size_t>(md.dimL));
    if (md.dimL > 0) {
        KMat ks = detail::cycle_kernel_basis(zrs);
        KMat kd = detail::cycle_kernel_basis(zrd);
        Place aux = detail::point_off(zrs + divisor_pullback(f, zrd));
        LBasis space = l_space((zrs.degree() + 1) * Divisor::single(aux));
        KMat tf(static_cast<size_t>(zrd.degree()), static_cast<size_t>(zrs.degree()));
        size_t col0 = 0;
        for (const auto& [p, mm_] : zrs.terms()) {
            const int e = p.deg();
            for (int a = 0; a < e; ++a) {
                PolyV<FE> target = p_pow(PolyV<FE>{FE(0), FE(1)}, static_cast<unsigned>(a));
                RF g = detail::germ_matched(space, zrs, p, target);
                RF tr = trace_along(f, g);
                std::vector<FE> vals = detail::cycle_values(zrd, tr);
                for (size_t i = 0; i < vals.size(); ++i) tf(i, col0) = vals[i];
                ++col0;
            }
        }
        KMat psi = inverse(detail::cycle_gram(zrs)) * tf.transpose() *
                   detail::cycle_gram(zrd);
        out.on_L = express_in_basis(ks, psi * kd);

        // unit classes: the pulled class must agree with the monomial in the
        // source classes given by the cycle map, up to scalars and torsion
        if (!ms.u_et_abstract && !md.u_et_abstract) {
            int power = 1;
            for (size_t j = 0; j < md.u_et.size(); ++j) {
                long den = 1;
                for (size_t i = 0; i < ms.u_et.size(); ++i) {
                    Rat x = out.on_L(i, j).rational_value();
                    den = std::lcm(den, x.get_den().get_si());
                }
                RF num = RF(1), dn = RF(1);
                RF pulled = md.u_et[j].compose(f.f);
                for (long s = 0; s < den; ++s) num = num * pulled;
                for (size_t i = 0; i < ms.u_et.size(); ++i) {
                    Rat x = out.on_L(i, j).rational_value() * Rat(den);
                    long e = x.get_num().get_si();
                    for (long s = 0; s < std::abs(e); ++s) {
                        if (e > 0) dn = dn * ms.u_et[i];
                        else num = num * ms.u_et[i];
                    }
                }
                auto mpow = unit_class_trivial(num / dn, src.Y, ms.torsion_cap);
                if (!mpow)
                    throw Mismatch("unit classes disagree beyond the torsion cap");
                power = std::max(power, static_cast<int>(den) * *mpow);
            }
            out.u_et_power = power;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Comparison with the two-chart cohomology: same unipotent and infinitesimal
// bases, and the remaining block dimensions agree.
// ---------------------------------------------------------------------------

struct CompatReport {
    RdRSpace lm;
    int red_dim = 0, u_dim = 0, v_dim = 0;
};

inline CompatReport compati_check(const ModulusTriple& T) {
    LinearLaumonMotive m = lm_construct(T);
    CompatReport rep;
    rep.lm = r_dr(m);
    for (int c = 0; c < T.components; ++c) {
        Divisor yc = detail::retag0(T.Y.restrict_component(c));
        Divisor zc = detail::retag0(T.Z.restrict_component(c));
        if (yc.empty() && zc.empty()) continue;
        GradedCoh g = hdr_compute(ModulusTriple(yc, zc));
        rep.red_dim += g.red_dim();
        rep.u_dim += g.u.dim;
        rep.v_dim += g.v.dim;
        // the bases must literally coincide blockwise
        USpace uc = u_space(yc);
        if (uc.dim != g.u.dim || uc.blocks.size() != g.u.blocks.size())
            throw Mismatch("unipotent bases differ");
        for (size_t b = 0; b < uc.blocks.size(); ++b)
            for (size_t r = 0; r < uc.blocks[b].reps.size(); ++r)
                if (!p_eq(uc.blocks[b].reps[r], g.u.blocks[b].reps[r]))
                    throw Mismatch("unipotent bases differ");
        VSpace vc = v_space(zc);
        if (vc.dim != g.v.dim || vc.blocks.size() != g.v.blocks.size())
            throw Mismatch("infinitesimal bases differ");
        for (size_t b = 0; b < vc.blocks.size(); ++b)
            for (size_t r = 0; r < vc.blocks[b].reps.size(); ++r)
                if (!(vc.blocks[b].reps[r] == g.v.blocks[b].reps[r]))
                    throw Mismatch("infinitesimal bases differ");
    }
    if (rep.lm.uni != rep.u_dim)
        throw Mismatch("unipotent dimension: expected " + std::to_string(rep.u_dim) +
                       ", got " + std::to_string(rep.lm.uni));
    if (rep.lm.inf != rep.v_dim)
        throw Mismatch("infinitesimal dimension: expected " + std::to_string(rep.v_dim) +
                       ", got " + std::to_string(rep.lm.inf));
    if (rep.lm.del != rep.red_dim)
        throw Mismatch("reduced dimension: expected " + std::to_string(rep.red_dim) +
                       ", got " + std::to_string(rep.lm.del));
    return rep;
}

} // namespace mm

#endif
