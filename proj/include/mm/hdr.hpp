#ifndef MM_HDR_HPP
#define MM_HDR_HPP

#include <memory>

#include "cech.hpp"

namespace mm {

// ---------------------------------------------------------------------------
// Reduced cohomology (both divisors reduced). When Z is nonempty the group is
// the cokernel of d : I_Y O_A -> Omega_A on the affine chart A = X minus
// |Z|, with a canonical basis of differentials: per finite place p of Z the
// forms t^j dt/p (j <= deg p - 2), log forms dp/p (all of them when infinity
// lies in Z, otherwise weighted differences carrying one global relation),
// and for Y the differentials of greedily chosen functions whose values on Y
// span the functions on Y modulo constants. When Z is empty the group is the
// functions on Y modulo constants, via the connecting map of
// 0 -> I_Y -> O -> O_Y -> 0; basis classes are represented by functions with
// poles at one auxiliary point.
// ---------------------------------------------------------------------------

struct ReducedModel {
    Divisor Yred, Zred;
    bool on_y = false;    // Z empty: classes are functions on Y mod constants
    std::vector<RF> forms; // differentials, or function representatives when on_y
    KMat germsolve;        // on_y: columns are the Y-germs of 1, forms[0], ...

    int dim() const { return static_cast<int>(forms.size()); }
};

namespace detail {

// germ coordinates of g along a reduced divisor (values in O/I)
inline std::vector<FE> germ_on(const Divisor& red, const RF& g) {
    std::vector<FE> out;
    for (const auto& [p, m] : red.terms()) {
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

// greedy completion: functions from the candidate list whose Y-germs extend
// the constants to all of O_Y; returns the chosen functions and the full germ
// matrix with the germ of 1 in the first column
inline std::pair<std::vector<RF>, KMat> span_germs(const Divisor& Yred,
                                                   const std::vector<RF>& cands) {
    const size_t y = static_cast<size_t>(Yred.degree());
    KMat germmat(y, 1);
    std::vector<FE> one = germ_on(Yred, RF(1));
    for (size_t i = 0; i < y; ++i) germmat(i, 0) = one[i];
    size_t cur = rank(germmat);
    std::vector<RF> chosen;
    for (const auto& cand : cands) {
        if (germmat.cols() == y) break;
        std::vector<FE> g = germ_on(Yred, cand);
        KMat trial(y, germmat.cols() + 1);
        trial.set_block(0, 0, germmat);
        for (size_t i = 0; i < y; ++i) trial(i, germmat.cols()) = g[i];
        if (rank(trial) > cur) {
            germmat = trial;
            cur += 1;
            chosen.push_back(cand);
        }
    }
    if (germmat.cols() != y)
        throw InternalInconsistency("could not span the functions on Y");
    return {chosen, germmat};
}

// a rational point outside the support of D
inline Place point_off(const Divisor& D) {
    for (long k = 0; k < 1000; ++k) {
        long cand = (k % 2 == 0) ? k / 2 : -(k / 2 + 1);
        FE c(cand);
        bool ok = true;
        for (const auto& [p, m] : D.terms())
            if (!p.infinite && is_zero(p_eval(p.poly, c))) ok = false;
        if (ok) return Place::finite({FE(-cand), FE(1)});
    }
    throw AuxiliaryPointUnavailable("no rational point off the support");
}

} // namespace detail

inline ReducedModel build_reduced_model(const Divisor& Yred, const Divisor& Zred) {
    if (!(Yred == Yred.red()) || !(Zred == Zred.red()))
        throw NonReducedInput("reduced model needs reduced divisors");
    if (!supports_disjoint(Yred, Zred)) throw SupportsOverlap("supports must be disjoint");
    ReducedModel m;
    m.Yred = Yred;
    m.Zred = Zred;

    if (Zred.empty()) {
        if (Yred.empty()) throw UnsupportedGeometry("model needs a nonempty divisor");
        m.on_y = true;
        LBasis cands = l_space(Yred.degree() * Divisor::single(detail::point_off(Yred)));
        auto [chosen, germmat] = detail::span_germs(Yred, cands.elems);
        m.forms = std::move(chosen);
        m.germsolve = std::move(germmat);
        return m;
    }

    std::vector<std::pair<PolyV<FE>, int>> finz; // (place poly, degree)
    bool inf_in_z = false;
    for (const auto& [p, mm_] : Zred.terms()) {
        if (p.infinite)
            inf_in_z = true;
        else
            finz.emplace_back(p.poly, p.deg());
    }
    for (const auto& [p, e] : finz)
        for (int j = 0; j + 2 <= e; ++j)
            m.forms.emplace_back(p_pow(PolyV<FE>{FE(0), FE(1)}, static_cast<unsigned>(j)),
                                 p);
    if (inf_in_z) {
        for (const auto& [p, e] : finz) m.forms.emplace_back(p_deriv(p), p);
    } else if (finz.size() >= 2) {
        RF base =
            RF(p_deriv(finz[0].first), finz[0].first) * RF(FE(rat(1, finz[0].second)));
        for (size_t i = 1; i < finz.size(); ++i)
            m.forms.push_back(RF(p_deriv(finz[i].first), finz[i].first) *
                                  RF(FE(rat(1, finz[i].second))) -
                              base);
    }

    if (Yred.degree() >= 1) {
        LBasis cands = l_space((Yred.degree() + 1) * Zred);
        auto [chosen, germmat] = detail::span_germs(Yred, cands.elems);
        for (const auto& g : chosen) m.forms.push_back(g.deriv());
        m.germsolve = std::move(germmat);
    }
    return m;
}

// Coordinates of a class: the class of the differential w dt when Z is
// nonempty (solving against the coboundaries d(I_Y O_A) in a truncated
// space), the class of the function w on Y otherwise.
inline std::vector<FE> reduced_coords(const ReducedModel& m, const RF& w) {
    if (m.on_y) {
        auto x = solve_linear(m.germsolve, detail::germ_on(m.Yred, w));
        if (!x) throw InternalInconsistency("germ matrix does not span");
        return std::vector<FE>(x->begin() + 1, x->end());
    }
    int M0 = m.Yred.degree() + 2;
    int M = std::max(M0, p_deg(w.den()) + 2);
    if (w.ord_at_infinity() < 0) M = std::max(M, -w.ord_at_infinity() + 2);
    for (int attempt = 0; attempt < 3; ++attempt, M += 5) {
        LBasis fun = l_space(M * m.Zred);
        // coboundary generators: functions vanishing on Y
        std::vector<RF> gens;
        if (m.Yred.empty()) {
            gens = fun.elems;
        } else {
            KMat germs(static_cast<size_t>(m.Yred.degree()),
                       static_cast<size_t>(fun.dim()));
            for (int j = 0; j < fun.dim(); ++j) {
                std::vector<FE> g =
                    detail::germ_on(m.Yred, fun.elems[static_cast<size_t>(j)]);
                for (size_t i = 0; i < g.size(); ++i) germs(i, static_cast<size_t>(j)) = g[i];
            }
            KMat ker = solve_kernel(germs);
            for (size_t c = 0; c < ker.cols(); ++c) {
                RF g;
                for (size_t i = 0; i < ker.rows(); ++i)
                    g = g + RF(ker(i, c)) * fun.elems[i];
                gens.push_back(g);
            }
        }
        LBasis om = omega_space((M + 1) * m.Zred);
        auto rhs = l_coords(om, w);
        if (!rhs) continue;
        KMat sys(static_cast<size_t>(om.dim()), m.forms.size() + gens.size());
        bool ok = true;
        for (size_t j = 0; j < m.forms.size() && ok; ++j) {
            auto c = l_coords(om, m.forms[j]);
            if (!c) { ok = false; break; }
            for (size_t i = 0; i < c->size(); ++i) sys(i, j) = (*c)[i];
        }
        for (size_t j = 0; j < gens.size() && ok; ++j) {
            auto c = l_coords(om, gens[j].deriv());
            if (!c) { ok = false; break; }
            for (size_t i = 0; i < c->size(); ++i) sys(i, m.forms.size() + j) = (*c)[i];
        }
        if (!ok) continue;
        auto x = solve_linear(sys, *rhs);
        if (!x) continue;
        return std::vector<FE>(x->begin(), x->begin() + static_cast<long>(m.forms.size()));
    }
    throw Mismatch("differential does not represent a class of the reduced model");
}

// ---------------------------------------------------------------------------
// The graded decomposition of H^1(X, [I_Y -> I_Z^{-1} Omega]).
// ---------------------------------------------------------------------------

struct GradedCoh {
    ModulusTriple T;
    CechCover cover;
    std::shared_ptr<ReducedModel> red; // null when Y and Z are both empty
    USpace u;
    VSpace v;
    CechVariant main; // (Y, Z)
    CechVariant vred; // (Y_red, Z_red)
    KMat a_cech, b_cech; // between H1(vred) and H1(main)
    KMat red_to_cech;    // reduced coordinates -> H1(vred)
    KMat a_map, b_map;   // reduced coordinates vs H1(main)
    KMat iota_u, iota_v;
    KMat phi; // [a_map | iota_u | iota_v], square and invertible

    int red_dim() const { return red ? red->dim() : 0; }
    int total_dim() const { return red_dim() + u.dim + v.dim; }
    std::vector<FE> graded_coords(const std::vector<FE>& h1) const {
        auto x = solve_linear(phi, h1);
        if (!x) throw InternalInconsistency("class outside the decomposition");
        return *x;
    }
};

inline int hdr_dim_oracle(const ModulusTriple& T) {
    int total = 0;
    for (int c = 0; c < T.components; ++c) {
        int y = T.Y.restrict_component(c).degree();
        int z = T.Z.restrict_component(c).degree();
        if (y == 0 && z == 0) continue;
        total += y + z - 2 + (y == 0 ? 1 : 0) + (z == 0 ? 1 : 0);
    }
    return total;
}

namespace detail {

inline CechVariant variant_for(const CechCover& cov, bool swapped, int N,
                               const Divisor& Df, const Divisor& Dw) {
    return swapped ? cech_variant(cov.SY, cov.SZ, N, Df, Dw)
                   : cech_variant(cov.SZ, cov.SY, N, Df, Dw);
}

// function in L(space) matching the prescribed germs blockwise along the
// terms of D (order n per block); absent blocks get the zero germ
inline RF germ_matched(const LBasis& space, const Divisor& D,
                       const Place& at, const PolyV<FE>& target) {
    size_t nrows = 0;
    for (const auto& [p, n] : D.terms()) nrows += static_cast<size_t>(n * p.deg());
    KMat sys(nrows, static_cast<size_t>(space.dim()));
    std::vector<FE> rhs(nrows, FE(0));
    for (int j = 0; j < space.dim(); ++j) {
        size_t row = 0;
        for (const auto& [p, n] : D.terms()) {
            PolyV<FE> g =
                p.infinite
                    ? rf_mod(space.elems[static_cast<size_t>(j)].subst_inverse(),
                             {FE(0), FE(1)}, n)
                    : rf_mod(space.elems[static_cast<size_t>(j)], p.poly, n);
            const size_t len = static_cast<size_t>(n * p.deg());
            for (size_t i = 0; i < len; ++i)
                sys(row + i, static_cast<size_t>(j)) = i < g.size() ? g[i] : FE(0);
            row += len;
        }
    }
    {
        size_t row = 0;
        for (const auto& [p, n] : D.terms()) {
            const size_t len = static_cast<size_t>(n * p.deg());
            if (p == at)
                for (size_t i = 0; i < len && i < target.size(); ++i)
                    rhs[row + i] = target[i];
            row += len;
        }
    }
    auto x = solve_linear(sys, rhs);
    if (!x) throw TruncationUnstable("no lift with the prescribed germs");
    RF out;
    for (int j = 0; j < space.dim(); ++j)
        out = out + RF((*x)[static_cast<size_t>(j)]) * space.elems[static_cast<size_t>(j)];
    return out;
}

// function matching the germs of h along Yred with poles bounded by M*poles
inline RF germ_lift_of(const Divisor& Yred, const Divisor& poles, const RF& h) {
    int M = Yred.degree() + 1;
    for (int attempt = 0; attempt < 3; ++attempt, M += 3) {
        LBasis space = l_space(M * poles);
        KMat sys(static_cast<size_t>(Yred.degree()), static_cast<size_t>(space.dim()));
        for (int j = 0; j < space.dim(); ++j) {
            std::vector<FE> g = germ_on(Yred, space.elems[static_cast<size_t>(j)]);
            for (size_t i = 0; i < g.size(); ++i) sys(i, static_cast<size_t>(j)) = g[i];
        }
        auto x = solve_linear(sys, germ_on(Yred, h));
        if (!x) continue;
        RF out;
        for (int j = 0; j < space.dim(); ++j)
            out = out +
                  RF((*x)[static_cast<size_t>(j)]) * space.elems[static_cast<size_t>(j)];
        return out;
    }
    throw InternalInconsistency("no function with the prescribed germs");
}

} // namespace detail

inline GradedCoh hdr_compute(const ModulusTriple& T, const CechCover* shared_cover = nullptr,
                             bool swapped_orientation = false, int trunc = -1) {
    if (T.components != 1) throw UnsupportedGeometry("graded computation is per component");
    const Divisor &Y = T.Y, &Z = T.Z;
    const Divisor Yr = Y.red(), Zr = Z.red();
    CechCover cover = shared_cover ? *shared_cover : make_cover(Y, Z);
    int N0 = trunc > 0 ? trunc : std::max(Y.degree(), Z.degree()) + 3;

    for (int N : {N0, N0 + 5}) {
        try {
            GradedCoh g;
            g.T = T;
            g.cover = cover;
            const bool sw = swapped_orientation;
            g.main = detail::variant_for(cover, sw, N, Divisor() - Y, Z);
            CechVariant vry = detail::variant_for(cover, sw, N, Divisor() - Yr, Z);
            g.vred = detail::variant_for(cover, sw, N, Divisor() - Yr, Zr);
            CechVariant ku = detail::variant_for(cover, sw, N, Divisor() - Y, Z - (Y - Yr));
            CechVariant kv =
                detail::variant_for(cover, sw, N, (Divisor() - Yr) + (Z - Zr), Z);

            KMat ku_to_vry = cech_induced(ku, vry);
            if (ku_to_vry.rows() != ku_to_vry.cols() || !is_invertible(ku_to_vry))
                throw TruncationUnstable("U-step comparison not invertible");
            KMat a_u = cech_induced(ku, g.main) * inverse(ku_to_vry);
            KMat b_u = cech_induced(g.main, vry);
            KMat vred_to_kv = cech_induced(g.vred, kv);
            if (vred_to_kv.rows() != vred_to_kv.cols() || !is_invertible(vred_to_kv))
                throw TruncationUnstable("V-step comparison not invertible");
            KMat a_v = cech_induced(g.vred, vry);
            KMat b_v = inverse(vred_to_kv) * cech_induced(vry, kv);
            g.a_cech = a_u * a_v;
            g.b_cech = b_v * b_u;
            if (!(g.b_cech * g.a_cech == KMat::identity(g.a_cech.cols())))
                throw InternalInconsistency("b after a is not the identity");

            g.u = u_space(Y);
            g.v = v_space(Z);
            {
                KMat cols(static_cast<size_t>(g.main.c1dim()),
                          static_cast<size_t>(g.u.dim));
                LBasis lift = l_space(N * g.main.SA - Yr);
                size_t col = 0;
                for (const auto& b : g.u.blocks)
                    for (const auto& rep : b.reps) {
                        RF ut = detail::germ_matched(lift, Y, b.p, rep);
                        auto c = cech_pack(g.main, ut.deriv(), RF(0), ut);
                        for (size_t i = 0; i < c.size(); ++i) cols(i, col) = c[i];
                        ++col;
                    }
                g.iota_u = cech_h1_coords_many(g.main, cols);
            }
            {
                KMat cols(static_cast<size_t>(g.main.c1dim()),
                          static_cast<size_t>(g.v.dim));
                size_t col = 0;
                for (const auto& b : g.v.blocks)
                    for (const auto& rep : b.reps) {
                        RF dv = rep.deriv();
                        auto c = cech_pack(g.main, dv, dv, RF(0));
                        for (size_t i = 0; i < c.size(); ++i) cols(i, col) = c[i];
                        ++col;
                    }
                g.iota_v = cech_h1_coords_many(g.main, cols);
            }

            // identification of the reduced block
            if (!Yr.empty() || !Zr.empty()) {
                g.red = std::make_shared<ReducedModel>(build_reduced_model(Yr, Zr));
                if (g.red->dim() != g.vred.h1dim)
                    throw TruncationUnstable("reduced dimension mismatch");
                KMat cols(static_cast<size_t>(g.vred.c1dim()),
                          static_cast<size_t>(g.red->dim()));
                LBasis lift = l_space(N * g.vred.SA);
                for (int j = 0; j < g.red->dim(); ++j) {
                    std::vector<FE> c1;
                    const RF& rep = g.red->forms[static_cast<size_t>(j)];
                    if (g.red->on_y) {
                        // connecting-map cocycle of a function class on Y
                        RF gt = detail::germ_lift_of(Yr, g.vred.SA, rep);
                        if (!l_coords(lift, gt))
                            throw TruncationUnstable("lift outside the truncated space");
                        c1 = cech_pack(g.vred, gt.deriv(), RF(0), gt);
                    } else {
                        c1 = cech_inject_form(g.vred, rep);
                    }
                    for (size_t i = 0; i < c1.size(); ++i)
                        cols(i, static_cast<size_t>(j)) = c1[i];
                }
                g.red_to_cech = cech_h1_coords_many(g.vred, cols);
                if (!is_invertible(g.red_to_cech))
                    throw TruncationUnstable("reduced basis does not span");
            } else {
                if (g.vred.h1dim != 0) throw TruncationUnstable("reduced block not zero");
                g.red_to_cech = KMat(0, 0);
            }
            g.a_map = g.a_cech * g.red_to_cech;
            g.b_map = inverse(g.red_to_cech) * g.b_cech;

            g.phi =
                KMat(static_cast<size_t>(g.main.h1dim), static_cast<size_t>(g.total_dim()));
            g.phi.set_block(0, 0, g.a_map);
            g.phi.set_block(0, static_cast<size_t>(g.red_dim()), g.iota_u);
            g.phi.set_block(0, static_cast<size_t>(g.red_dim() + g.u.dim), g.iota_v);
            if (g.phi.rows() != g.phi.cols() || !is_invertible(g.phi))
                throw TruncationUnstable("decomposition is not an isomorphism");
            return g;
        } catch (const TruncationUnstable&) {
            if (N == N0 + 5) throw;
        }
    }
    throw TruncationUnstable("unreachable");
}

struct CechH1 {
    int dim = 0;
    CechVariant model;
};

inline CechH1 cech_truncated(const ModulusTriple& T, int N = -1) {
    if (T.components != 1) throw UnsupportedGeometry("truncated model is per component");
    if (N < 0) N = std::max(T.Y.degree(), T.Z.degree()) + 3;
    CechCover cover = make_cover(T.Y, T.Z);
    CechVariant a = detail::variant_for(cover, false, N, Divisor() - T.Y, T.Z);
    CechVariant b = detail::variant_for(cover, false, N + 5, Divisor() - T.Y, T.Z);
    if (a.h1dim != b.h1dim)
        throw TruncationUnstable("dimension changed between N and N+5");
    return CechH1{a.h1dim, std::move(a)};
}

// ---------------------------------------------------------------------------
// Duality and functoriality.
// ---------------------------------------------------------------------------

inline ModulusTriple triple_swap(const ModulusTriple& T) {
    return ModulusTriple(T.Z, T.Y, T.components);
}

// residue cup pairing between the reduced blocks of (Y,Z) and (Z,Y) over the
// shared cover
inline KMat red_cup_gram(const GradedCoh& g1, const GradedCoh& g2) {
    KMat r1 = g1.vred.h1 * g1.red_to_cech;
    KMat r2 = g2.vred.h1 * g2.red_to_cech;
    KMat m(r1.cols(), r2.cols());
    for (size_t i = 0; i < r1.cols(); ++i) {
        std::vector<FE> ci(r1.rows());
        for (size_t r = 0; r < ci.size(); ++r) ci[r] = r1(r, i);
        for (size_t j = 0; j < r2.cols(); ++j) {
            std::vector<FE> cj(r2.rows());
            for (size_t r = 0; r < cj.size(); ++r) cj[r] = r2(r, j);
            m(i, j) = cech_cup(g1.vred, ci, g2.vred, cj);
        }
    }
    return m;
}

struct DualityResult {
    GradedCoh left;  // for (Y, Z)
    GradedCoh right; // for (Z, Y)
    KMat gram;       // rows: graded basis of left, cols: graded basis of right
};

inline DualityResult hdr_duality(const ModulusTriple& T) {
    CechCover cover = make_cover(T.Y, T.Z);
    DualityResult r{hdr_compute(T, &cover, false),
                    hdr_compute(triple_swap(T), &cover, true), KMat(0, 0)};
    const GradedCoh &L = r.left, &R = r.right;
    KMat g(static_cast<size_t>(L.total_dim()), static_cast<size_t>(R.total_dim()));
    if (L.red_dim() > 0) g.set_block(0, 0, red_cup_gram(L, R));
    // U(X,Y) of the left against V(X,Y) of the right
    if (L.u.dim > 0)
        g.set_block(static_cast<size_t>(L.red_dim()),
                    static_cast<size_t>(R.red_dim() + R.u.dim),
                    uv_pairing(u_space(T.Y), v_space(T.Y)));
    // V(X,Z) of the left against U(X,Z) of the right
    if (L.v.dim > 0)
        g.set_block(static_cast<size_t>(L.red_dim() + L.u.dim),
                    static_cast<size_t>(R.red_dim()),
                    uv_pairing(u_space(T.Z), v_space(T.Z)).transpose());
    r.gram = g;
    return r;
}

// Pullback of reduced classes. When the destination block lives on Z the
// basis differentials transport as (w o f) f'; when it lives on Y (Z empty)
// the function classes transport by composition, entering a Z-side model
// through a germ-matched lift.
inline KMat red_pull(const RationalMap& f, const GradedCoh& src, const GradedCoh& dst) {
    KMat m(static_cast<size_t>(src.red_dim()), static_cast<size_t>(dst.red_dim()));
    if (src.red_dim() == 0 || dst.red_dim() == 0) return m;
    for (int j = 0; j < dst.red_dim(); ++j) {
        const RF& rep = dst.red->forms[static_cast<size_t>(j)];
        std::vector<FE> c;
        if (!dst.red->on_y) {
            if (src.red->on_y)
                throw InternalInconsistency("Z-side class pulled into a Y-side model");
            c = reduced_coords(*src.red, rep.compose(f.f) * f.f.deriv());
        } else {
            RF h = rep.compose(f.f);
            if (src.red->on_y) {
                c = reduced_coords(*src.red, h);
            } else if (src.red->Yred.empty()) {
                c.assign(static_cast<size_t>(src.red_dim()), FE(0));
            } else {
                RF ht = detail::germ_lift_of(src.red->Yred, src.red->Zred, h);
                c = reduced_coords(*src.red, ht.deriv());
            }
        }
        for (size_t i = 0; i < c.size(); ++i) m(i, static_cast<size_t>(j)) = c[i];
    }
    return m;
}

inline KMat hdr_pull(const RationalMap& f, const GradedCoh& src, const GradedCoh& dst) {
    if (!is_morphism_bar(f, src.T, dst.T)) throw NotAMorphism("pullback needs an edge");
    KMat m(static_cast<size_t>(src.total_dim()), static_cast<size_t>(dst.total_dim()));
    m.set_block(0, 0, red_pull(f, src, dst));
    if (src.u.dim > 0 && dst.u.dim > 0)
        m.set_block(static_cast<size_t>(src.red_dim()), static_cast<size_t>(dst.red_dim()),
                    u_pull(f, src.T.Y, dst.T.Y));
    if (src.v.dim > 0 && dst.v.dim > 0)
        m.set_block(static_cast<size_t>(src.red_dim() + src.u.dim),
                    static_cast<size_t>(dst.red_dim() + dst.u.dim),
                    v_pull(f, src.T.Z, dst.T.Z));
    return m;
}

inline KMat hdr_pull(const RationalMap& f, const ModulusTriple& src,
                     const ModulusTriple& dst) {
    GradedCoh s = hdr_compute(src), d = hdr_compute(dst);
    return hdr_pull(f, s, d);
}

} // namespace mm

#endif
