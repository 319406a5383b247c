#ifndef MM_CECH_HPP
#define MM_CECH_HPP

#include "uv.hpp"

namespace mm {

// ---------------------------------------------------------------------------
// Two-chart Cech model for the hypercohomology of [I_F -> I_G^{-1} Omega] on
// P^1. The cover is built once per unordered support pair: chart A removes
// S_A = |Z_red| + one auxiliary rational point, chart B removes
// S_B = |Y_red| + another one, so Y lives on chart A and Z on chart B and the
// same cover serves the triple with Y and Z exchanged (charts swap roles).
// Pole orders at removed points are truncated at N (functions) and N+1
// (forms).
// ---------------------------------------------------------------------------

struct CechCover {
    Divisor SZ; // removed from the chart containing Y: |Z_red| + aux point
    Divisor SY; // removed from the chart containing Z: |Y_red| + aux point
};

inline CechCover make_cover(const Divisor& Y, const Divisor& Z) {
    std::vector<Rat> aux;
    for (long k = 0; k < 1000 && aux.size() < 2; ++k) {
        long cand = (k % 2 == 0) ? k / 2 : -(k / 2 + 1);
        FE c(cand);
        bool ok = true;
        for (const Divisor* d : {&Y, &Z})
            for (const auto& [p, m] : d->terms())
                if (!p.infinite && is_zero(p_eval(p.poly, c))) ok = false;
        if (ok) aux.push_back(Rat(cand));
    }
    if (aux.size() < 2) throw AuxiliaryPointUnavailable("no rational auxiliary points");
    CechCover cov;
    cov.SZ = Z.red() + Divisor::single(Place::finite({FE(-aux[0]), FE(1)}));
    cov.SY = Y.red() + Divisor::single(Place::finite({FE(-aux[1]), FE(1)}));
    return cov;
}

// Truncated total complex of [I_F -> I_G^{-1} Omega] over the cover, with
// chart A the one where the support of F lives (F <= divisor on chart A side).
// Df is added to all function spaces (typically -F), Dw to all form spaces
// (typically +G, possibly with a forced vanishing part for the intermediate
// complexes).
struct CechVariant {
    Divisor SA, SB;
    int N = 0;
    LBasis c0a, c0b;      // functions on the charts
    LBasis c1a, c1b, c1f; // forms on the charts, functions on the overlap
    LBasis c2;            // forms on the overlap
    KMat d0, d1;
    KMat b1;     // image of d0 inside C1 coordinates
    KMat h1;     // chosen cocycle basis columns
    int h1dim = 0;

    int c1dim() const { return c1a.dim() + c1b.dim() + c1f.dim(); }
};

namespace detail {

inline RF rf_from_coords(const LBasis& b, const std::vector<FE>& v, size_t off) {
    // all basis elements share numf/denf, so assemble t-coefficients first
    PolyV<FE> c(static_cast<size_t>(b.dim()), FE(0));
    for (int i = 0; i < b.dim(); ++i) c[static_cast<size_t>(i)] = v[off + static_cast<size_t>(i)];
    p_norm(c);
    if (c.empty()) return RF();
    return RF(p_mul(c, b.numf), b.denf);
}

inline void put_coords(std::vector<FE>& dst, size_t off, const std::vector<FE>& src) {
    for (size_t i = 0; i < src.size(); ++i) dst[off + i] = src[i];
}

inline std::vector<FE> must_l_coords(const LBasis& b, const RF& x, const char* what) {
    auto c = l_coords(b, x);
    if (!c) throw InternalInconsistency(std::string("section outside truncated space: ") + what);
    return *c;
}

// Coordinates of every src basis element (differentiated when dif is set) in
// the tgt basis. Since elem_j = t^j numf/denf, a single exact division gives
// the coordinates of elem_0 and the rest are shifts:
//   elem_j   = t^j q0 . tgt,  q0 = numf den_t / (denf num_t)
//   elem_j'  = (j t^{j-1} q0 + t^j q1) . tgt,  q1 = (numf/denf)' den_t / num_t
inline KMat basis_transport(const LBasis& tgt, const LBasis& src, bool dif) {
    KMat out(static_cast<size_t>(tgt.dim()), static_cast<size_t>(src.dim()));
    if (src.dim() == 0 || tgt.dim() == 0) return out;
    auto exact_div = [](const PolyV<FE>& a, const PolyV<FE>& b) {
        auto [q, r] = p_divmod(a, b);
        if (!p_is_zero(r))
            throw InternalInconsistency("section outside truncated space: basis transport");
        return q;
    };
    auto shifted = [](const PolyV<FE>& p, int by) {
        PolyV<FE> r(static_cast<size_t>(by), FE(0));
        r.insert(r.end(), p.begin(), p.end());
        p_norm(r);
        return r;
    };
    PolyV<FE> q0 = exact_div(p_mul(src.numf, tgt.denf), p_mul(src.denf, tgt.numf));
    PolyV<FE> q1;
    if (dif) {
        PolyV<FE> w = p_sub(p_mul(p_deriv(src.numf), src.denf),
                            p_mul(src.numf, p_deriv(src.denf)));
        q1 = exact_div(p_mul(w, tgt.denf),
                       p_mul(p_mul(src.denf, src.denf), tgt.numf));
    }
    for (int j = 0; j < src.dim(); ++j) {
        PolyV<FE> c;
        if (!dif) {
            c = shifted(q0, j);
        } else {
            c = shifted(q1, j);
            if (j > 0) c = p_add(c, p_smul(FE(static_cast<long>(j)), shifted(q0, j - 1)));
        }
        if (p_deg(c) > tgt.maxj)
            throw InternalInconsistency("section outside truncated space: basis transport");
        for (size_t i = 0; i < c.size(); ++i) out(i, static_cast<size_t>(j)) = c[i];
    }
    return out;
}

// basis_transport with a per-element fallback for source spaces whose first
// element falls outside the target even though the needed images do not
inline KMat basis_transport_or(const LBasis& tgt, const LBasis& src, bool dif,
                               const char* what) {
    try {
        return basis_transport(tgt, src, dif);
    } catch (const InternalInconsistency&) {
        KMat out(static_cast<size_t>(tgt.dim()), static_cast<size_t>(src.dim()));
        for (int j = 0; j < src.dim(); ++j) {
            const RF& e = src.elems[static_cast<size_t>(j)];
            auto c = must_l_coords(tgt, dif ? e.deriv() : e, what);
            for (size_t i = 0; i < c.size(); ++i) out(i, static_cast<size_t>(j)) = c[i];
        }
        return out;
    }
}

} // namespace detail

struct CechTriple {
    RF wa, wb, f; // (form on chart A, form on chart B, function on the overlap)
};

inline CechTriple cech_components(const CechVariant& v, const std::vector<FE>& c1) {
    CechTriple t;
    t.wa = detail::rf_from_coords(v.c1a, c1, 0);
    t.wb = detail::rf_from_coords(v.c1b, c1, static_cast<size_t>(v.c1a.dim()));
    t.f = detail::rf_from_coords(v.c1f, c1,
                                 static_cast<size_t>(v.c1a.dim() + v.c1b.dim()));
    return t;
}

inline std::vector<FE> cech_pack(const CechVariant& v, const RF& wa, const RF& wb,
                                 const RF& f) {
    std::vector<FE> out(static_cast<size_t>(v.c1dim()), FE(0));
    detail::put_coords(out, 0, detail::must_l_coords(v.c1a, wa, "form on chart A"));
    detail::put_coords(out, static_cast<size_t>(v.c1a.dim()),
                       detail::must_l_coords(v.c1b, wb, "form on chart B"));
    detail::put_coords(out, static_cast<size_t>(v.c1a.dim() + v.c1b.dim()),
                       detail::must_l_coords(v.c1f, f, "overlap function"));
    return out;
}

inline CechVariant cech_variant(const Divisor& SA, const Divisor& SB, int N,
                                const Divisor& Df, const Divisor& Dw) {
    CechVariant v;
    v.SA = SA;
    v.SB = SB;
    v.N = N;
    v.c0a = l_space(N * SA + Df);
    v.c0b = l_space(N * SB + Df);
    v.c1a = omega_space((N + 1) * SA + Dw);
    v.c1b = omega_space((N + 1) * SB + Dw);
    v.c1f = l_space(N * (SA + SB) + Df);
    v.c2 = omega_space((N + 1) * (SA + SB) + Dw);

    const size_t n1 = static_cast<size_t>(v.c1dim());
    const size_t offb = static_cast<size_t>(v.c1a.dim());
    const size_t offf = static_cast<size_t>(v.c1a.dim() + v.c1b.dim());
    v.d0 = KMat(n1, static_cast<size_t>(v.c0a.dim() + v.c0b.dim()));
    v.d0.set_block(0, 0, detail::basis_transport_or(v.c1a, v.c0a, true, "d0 form"));
    v.d0.set_block(offf, 0, detail::basis_transport_or(v.c1f, v.c0a, false, "d0 overlap"));
    v.d0.set_block(offb, static_cast<size_t>(v.c0a.dim()),
                   detail::basis_transport_or(v.c1b, v.c0b, true, "d0 form"));
    KMat fb = detail::basis_transport_or(v.c1f, v.c0b, false, "d0 overlap");
    for (size_t i = 0; i < fb.rows(); ++i)
        for (size_t j = 0; j < fb.cols(); ++j)
            v.d0(offf + i, static_cast<size_t>(v.c0a.dim()) + j) = -fb(i, j);

    v.d1 = KMat(static_cast<size_t>(v.c2.dim()), n1);
    v.d1.set_block(0, 0, detail::basis_transport_or(v.c2, v.c1a, false, "d1"));
    KMat db = detail::basis_transport_or(v.c2, v.c1b, false, "d1");
    KMat df = detail::basis_transport_or(v.c2, v.c1f, true, "d1");
    for (size_t i = 0; i < db.rows(); ++i) {
        for (size_t j = 0; j < db.cols(); ++j) v.d1(i, offb + j) = -db(i, j);
        for (size_t j = 0; j < df.cols(); ++j) v.d1(i, offf + j) = -df(i, j);
    }

    // H1: cocycles modulo the image of d0, with basis chosen deterministically
    KMat z1 = solve_kernel(v.d1);
    v.b1 = v.d0;
    KMat combined = KMat(n1, v.b1.cols() + z1.cols());
    combined.set_block(0, 0, v.b1);
    combined.set_block(0, v.b1.cols(), z1);
    KMat red = combined;
    auto pivots = rref(red);
    std::vector<size_t> h1cols;
    for (size_t p : pivots)
        if (p >= v.b1.cols()) h1cols.push_back(p - v.b1.cols());
    v.h1 = KMat(n1, h1cols.size());
    for (size_t j = 0; j < h1cols.size(); ++j)
        for (size_t i = 0; i < n1; ++i) v.h1(i, j) = z1(i, h1cols[j]);
    v.h1dim = static_cast<int>(h1cols.size());
    return v;
}

// Class coordinates of cocycles (given as columns) in the chosen H1 basis.
inline KMat cech_h1_coords_many(const CechVariant& v, const KMat& cols) {
    KMat mat(v.b1.rows(), v.b1.cols() + v.h1.cols());
    mat.set_block(0, 0, v.b1);
    mat.set_block(0, v.b1.cols(), v.h1);
    auto x = solve_linear_many(mat, cols);
    if (!x) throw InternalInconsistency("vector is not a cocycle of the model");
    return x->block(v.b1.cols(), 0, v.h1.cols(), cols.cols());
}

inline std::vector<FE> cech_h1_coords(const CechVariant& v, const std::vector<FE>& c1) {
    KMat h = cech_h1_coords_many(v, KMat::from_col(c1));
    std::vector<FE> out(h.rows());
    for (size_t i = 0; i < out.size(); ++i) out[i] = h(i, 0);
    return out;
}

// Matrix of the map on H1 induced by the identity chain map between two
// variants over the same cover (requires componentwise containment).
inline KMat cech_induced(const CechVariant& src, const CechVariant& dst) {
    KMat packed(static_cast<size_t>(dst.c1dim()), static_cast<size_t>(src.h1dim));
    for (int j = 0; j < src.h1dim; ++j) {
        std::vector<FE> col(src.h1.rows());
        for (size_t i = 0; i < col.size(); ++i) col[i] = src.h1(i, static_cast<size_t>(j));
        CechTriple t = cech_components(src, col);
        std::vector<FE> p = cech_pack(dst, t.wa, t.wb, t.f);
        for (size_t i = 0; i < p.size(); ++i) packed(i, static_cast<size_t>(j)) = p[i];
    }
    return cech_h1_coords_many(dst, packed);
}

// Cocycle for a class given by a global form on chart A: solve
// w - wb - df = 0 with wb in C1_B and f in C1_f.
inline std::vector<FE> cech_inject_form(const CechVariant& v, const RF& w) {
    std::vector<FE> target = detail::must_l_coords(v.c2, w, "injected form");
    KMat sys(static_cast<size_t>(v.c2.dim()),
             static_cast<size_t>(v.c1b.dim() + v.c1f.dim()));
    sys.set_block(0, 0, detail::basis_transport_or(v.c2, v.c1b, false, "inj"));
    sys.set_block(0, static_cast<size_t>(v.c1b.dim()),
                  detail::basis_transport_or(v.c2, v.c1f, true, "inj"));
    auto x = solve_linear(sys, target);
    if (!x) throw TruncationUnstable("form class has no cocycle at this truncation");
    std::vector<FE> c1(static_cast<size_t>(v.c1dim()), FE(0));
    detail::put_coords(c1, 0, detail::must_l_coords(v.c1a, w, "inj a"));
    for (int j = 0; j < v.c1b.dim(); ++j)
        c1[static_cast<size_t>(v.c1a.dim() + j)] = (*x)[static_cast<size_t>(j)];
    for (int j = 0; j < v.c1f.dim(); ++j)
        c1[static_cast<size_t>(v.c1a.dim() + v.c1b.dim() + j)] =
            (*x)[static_cast<size_t>(v.c1b.dim() + j)];
    return c1;
}

// Evaluation of the cup product of a class of [I_Y -> I_Z^{-1}O] with a class
// of the swapped complex [I_Z -> I_Y^{-1}O] over the shared cover, through
// H2_dR = k. The second variant must use the same cover with the chart roles
// exchanged.
inline FE cech_cup(const CechVariant& va, const std::vector<FE>& ca,
                   const CechVariant& vb, const std::vector<FE>& cb) {
    if (!(va.SA == vb.SB) || !(va.SB == vb.SA))
        throw MismatchedDivisor("cup product needs the shared cover with swapped charts");
    CechTriple x = cech_components(va, ca);
    CechTriple y = cech_components(vb, cb);
    RF eta = x.f * y.wa + x.wa * y.f;
    FE total(0);
    for (const auto& [p, m] : va.SA.terms()) total = total + residue(eta, p);
    return total;
}

} // namespace mm

#endif
