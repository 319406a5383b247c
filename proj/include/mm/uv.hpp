#ifndef MM_UV_HPP
#define MM_UV_HPP

#include "lspace.hpp"

namespace mm {

// ---------------------------------------------------------------------------
// U(C,D) and V(C,D) for an effective divisor D on P^1. Both decompose into
// blocks indexed by the places of D with multiplicity >= 2.
//
// U block at a finite place (p, n): germs in p k[t]/(p^n), basis p t^j for
// j = 0..(n-1)deg(p)-1, stored as local polynomials in t. At infinity the
// local coordinate is s = 1/t and the basis is s, s^2, ..., s^{n-1}.
//
// V block at a finite place: global representatives t^i/p^{n-1} for
// i = 0..(n-1)deg(p)-1, taken modulo regular functions. At infinity: t^j for
// j = 1..n-1 modulo constants.
// ---------------------------------------------------------------------------

struct UBlock {
    Place p;
    int n;
    std::vector<PolyV<FE>> reps; // local coordinate polynomials
};

struct USpace {
    Divisor D;
    std::vector<UBlock> blocks;
    int dim = 0;
};

struct VBlock {
    Place p;
    int n;
    std::vector<RF> reps; // global rational functions
};

struct VSpace {
    Divisor D;
    std::vector<VBlock> blocks;
    int dim = 0;
};

inline USpace u_space(const Divisor& D) {
    if (!D.is_effective()) throw ConditionViolated("U space needs an effective divisor");
    USpace u;
    u.D = D;
    for (const auto& [p, n] : D.terms()) {
        if (n < 2) continue;
        UBlock b{p, n, {}};
        if (p.infinite) {
            for (int j = 1; j < n; ++j)
                b.reps.push_back(p_pow(PolyV<FE>{FE(0), FE(1)}, static_cast<unsigned>(j)));
        } else {
            const int e = p.deg();
            for (int j = 0; j < (n - 1) * e; ++j)
                b.reps.push_back(p_mul(p.poly, p_pow(PolyV<FE>{FE(0), FE(1)},
                                                     static_cast<unsigned>(j))));
        }
        u.dim += static_cast<int>(b.reps.size());
        u.blocks.push_back(std::move(b));
    }
    return u;
}

inline VSpace v_space(const Divisor& D) {
    if (!D.is_effective()) throw ConditionViolated("V space needs an effective divisor");
    VSpace v;
    v.D = D;
    for (const auto& [p, n] : D.terms()) {
        if (n < 2) continue;
        VBlock b{p, n, {}};
        if (p.infinite) {
            for (int j = 1; j < n; ++j)
                b.reps.push_back(RF::from_poly(
                    p_pow(PolyV<FE>{FE(0), FE(1)}, static_cast<unsigned>(j))));
        } else {
            const int e = p.deg();
            PolyV<FE> den = p_pow(p.poly, static_cast<unsigned>(n - 1));
            for (int i = 0; i < (n - 1) * e; ++i)
                b.reps.emplace_back(
                    p_pow(PolyV<FE>{FE(0), FE(1)}, static_cast<unsigned>(i)), den);
        }
        v.dim += static_cast<int>(b.reps.size());
        v.blocks.push_back(std::move(b));
    }
    return v;
}

// ---------------------------------------------------------------------------
// d-isomorphism matrices (per block, square): for U, u maps to u' dt read in
// Omega_P/m^{n-1}Omega_P; for V, v maps to dv read off by the pole parts of
// order 2..n.
// ---------------------------------------------------------------------------

inline KMat u_d_matrix(const UBlock& b) {
    const int e = b.p.deg();
    const size_t d = b.reps.size();
    KMat m(static_cast<size_t>((b.n - 1) * e), d);
    for (size_t c = 0; c < d; ++c) {
        PolyV<FE> der = p_deriv(b.reps[c]);
        PolyV<FE> red = b.p.infinite
                            ? p_rem(der, p_pow(PolyV<FE>{FE(0), FE(1)},
                                               static_cast<unsigned>(b.n - 1)))
                            : p_rem(der, p_pow(b.p.poly, static_cast<unsigned>(b.n - 1)));
        for (size_t i = 0; i < red.size(); ++i) m(i, c) = red[i];
    }
    return m;
}

inline KMat v_d_matrix(const VBlock& b) {
    const int e = b.p.deg();
    const size_t d = b.reps.size();
    KMat m(static_cast<size_t>((b.n - 1) * e), d);
    for (size_t c = 0; c < d; ++c) {
        std::vector<FE> pc;
        if (b.p.infinite) {
            // v dt in the s-chart: w_s = -v(1/s)/s^2
            RF ws = RF(-1) * b.reps[c].deriv().subst_inverse() /
                    RF::from_poly({FE(0), FE(0), FE(1)});
            pc = polar_coords(ws, {FE(0), FE(1)}, 2, b.n);
        } else {
            pc = polar_coords(b.reps[c].deriv(), b.p.poly, 2, b.n);
        }
        for (size_t i = 0; i < pc.size(); ++i) m(i, c) = pc[i];
    }
    return m;
}

// Coordinates in V(D) of a rational function whose pole parts lie within the
// blocks of D (finite part) and whose polynomial part is bounded by the block
// at infinity.
inline std::vector<FE> v_coords(const VSpace& v, const RF& g) {
    std::vector<FE> out;
    out.reserve(static_cast<size_t>(v.dim));
    for (const auto& b : v.blocks) {
        if (b.p.infinite) {
            PolyV<FE> q = p_quo(g.num(), g.den());
            if (p_deg(q) > b.n - 1)
                throw ConditionViolated("polynomial part exceeds the block at infinity");
            for (int j = 1; j < b.n; ++j)
                out.push_back(j < static_cast<int>(q.size()) ? q[static_cast<size_t>(j)]
                                                             : FE(0));
        } else {
            // sum_j r_j/p^j = (sum_j r_j p^{n-1-j}) / p^{n-1}
            const int e = b.p.deg();
            std::vector<FE> pc = polar_coords(g, b.p.poly, 1, b.n - 1);
            PolyV<FE> num;
            for (int j = 1; j <= b.n - 1; ++j) {
                PolyV<FE> rj(pc.begin() + static_cast<long>((j - 1) * e),
                             pc.begin() + static_cast<long>(j * e));
                p_norm(rj);
                num = p_add(num, p_mul(rj, p_pow(b.p.poly,
                                                 static_cast<unsigned>(b.n - 1 - j))));
            }
            for (int i = 0; i < (b.n - 1) * e; ++i)
                out.push_back(i < static_cast<int>(num.size()) ? num[static_cast<size_t>(i)]
                                                               : FE(0));
        }
    }
    return out;
}

// Coordinates in V(D) of the class whose image under d is the differential
// w dt (block-by-block linear solve against the d-isomorphism).
inline std::vector<FE> v_from_differential(const VSpace& v, const RF& w) {
    std::vector<FE> out;
    out.reserve(static_cast<size_t>(v.dim));
    for (const auto& b : v.blocks) {
        std::vector<FE> pc;
        if (b.p.infinite) {
            RF ws = RF(-1) * w.subst_inverse() / RF::from_poly({FE(0), FE(0), FE(1)});
            pc = polar_coords(ws, {FE(0), FE(1)}, 2, b.n);
        } else {
            pc = polar_coords(w, b.p.poly, 2, b.n);
        }
        auto x = solve_linear(v_d_matrix(b), pc);
        if (!x) throw InternalInconsistency("differential not in the image of d");
        out.insert(out.end(), x->begin(), x->end());
    }
    return out;
}

// Residue pairing <u, v> = sum over places of res(u dv), the duality between
// U(C,D) and V(C,D). Rows are indexed by U, columns by V.
inline KMat uv_pairing(const USpace& u, const VSpace& v) {
    if (!(u.D == v.D)) throw MismatchedDivisor("pairing needs matching divisors");
    KMat g(static_cast<size_t>(u.dim), static_cast<size_t>(v.dim));
    size_t row = 0;
    for (const auto& ub : u.blocks) {
        for (const auto& ur : ub.reps) {
            size_t col = 0;
            for (const auto& vb : v.blocks) {
                for (const auto& vr : vb.reps) {
                    FE val(0);
                    if (ub.p.infinite) {
                        RF dvs = RF(-1) * vr.deriv().subst_inverse() /
                                 RF::from_poly({FE(0), FE(0), FE(1)});
                        val = detail::residue_finite(RF::from_poly(ur) * dvs,
                                                     {FE(0), FE(1)});
                    } else {
                        val = detail::residue_finite(RF::from_poly(ur) * vr.deriv(),
                                                     ub.p.poly);
                    }
                    g(row, col) = val;
                    ++col;
                }
            }
            ++row;
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// Functoriality along a finite map f. Case (1), D <= f*D': pullback on U and
// pushforward on V. Case (2), D - D_red >= f*(D'-D'_red) and
// D_red >= (f*D')_red: pullback on V and pushforward on U.
// ---------------------------------------------------------------------------

namespace detail {

inline void require_case1(const RationalMap& f, const Divisor& d, const Divisor& dp) {
    if (!divisor_leq(d, divisor_pullback(f, dp)))
        throw ConditionViolated("case 1: D <= f*D' fails");
}
inline void require_case2(const RationalMap& f, const Divisor& d, const Divisor& dp) {
    if (!divisor_leq(divisor_pullback(f, dp - dp.red()), d - d.red()))
        throw ConditionViolated("case 2: D - D_red >= f*(D' - D'_red) fails");
    if (!divisor_leq(divisor_pullback(f, dp).red(), d.red()))
        throw ConditionViolated("case 2: D_red >= (f*D')_red fails");
}

// numerator of p(f) after clearing denominators (degree e * deg f minus the
// deficit at infinity)
inline PolyV<FE> pull_numerator(const RationalMap& f, const PolyV<FE>& p) {
    const int e = p_deg(p);
    PolyV<FE> a;
    for (int i = 0; i <= e; ++i)
        a = p_add(a, p_smul(p[static_cast<size_t>(i)],
                            p_mul(p_pow(f.f.num(), static_cast<unsigned>(i)),
                                  p_pow(f.f.den(), static_cast<unsigned>(e - i)))));
    return a;
}

} // namespace detail

// Matrix of f^* : U(D') -> U(D); rows U(D), columns U(D').
inline KMat u_pull(const RationalMap& f, const Divisor& d, const Divisor& dp) {
    detail::require_case1(f, d, dp);
    USpace us = u_space(d), ud = u_space(dp);
    KMat m(static_cast<size_t>(us.dim), static_cast<size_t>(ud.dim));
    const PolyV<FE> svar{FE(0), FE(1)};
    size_t row0 = 0;
    for (const auto& sb : us.blocks) {
        const int n = sb.n;
        size_t col = 0;
        for (const auto& db : ud.blocks) {
            // local expression of the destination coordinate pulled back, and
            // the part of the source place lying over this destination block
            for (const auto& rep : db.reps) {
                std::vector<FE> coords;
                if (!sb.p.infinite) {
                    PolyV<FE> c;
                    RF expr;
                    if (db.p.infinite) {
                        c = p_gcd(sb.p.poly, f.f.den());
                        expr = RF::from_poly(rep).compose(inv(f.f));
                    } else {
                        c = p_gcd(sb.p.poly, detail::pull_numerator(f, db.p.poly));
                        expr = RF::from_poly(rep).compose(f.f);
                    }
                    if (p_deg(c) == 0) {
                        col += 1;
                        continue;
                    }
                    c = p_monic(c);
                    PolyV<FE> x = detail::rf_mod(expr, c, n);
                    if (!p_eq(c, sb.p.poly)) {
                        PolyV<FE> q = p_quo(sb.p.poly, c);
                        x = detail::crt2(x, p_pow(c, static_cast<unsigned>(n)), {},
                                         p_pow(q, static_cast<unsigned>(n)));
                    }
                    auto [g, r] = p_divmod(x, sb.p.poly);
                    if (!p_is_zero(r))
                        throw InternalInconsistency("pulled germ not in the maximal ideal");
                    const int len = (n - 1) * sb.p.deg();
                    coords.assign(static_cast<size_t>(len), FE(0));
                    for (int i = 0; i < len && i < static_cast<int>(g.size()); ++i)
                        coords[static_cast<size_t>(i)] = g[static_cast<size_t>(i)];
                } else {
                    const int dnum = p_deg(f.f.num()), dden = p_deg(f.f.den());
                    bool matched;
                    RF expr;
                    if (db.p.infinite) {
                        matched = dnum > dden;
                        if (matched)
                            expr = RF::from_poly(rep).compose(inv(f.f).subst_inverse());
                    } else {
                        int deficit = db.p.deg() * f.degree() -
                                      p_deg(detail::pull_numerator(f, db.p.poly));
                        matched = deficit > 0;
                        if (matched)
                            expr = RF::from_poly(rep).compose(f.f.subst_inverse());
                    }
                    if (!matched) {
                        col += 1;
                        continue;
                    }
                    PolyV<FE> x = detail::rf_mod(expr, svar, n);
                    if (!x.empty() && !is_zero(x[0]))
                        throw InternalInconsistency("pulled germ not in the maximal ideal");
                    coords.assign(static_cast<size_t>(n - 1), FE(0));
                    for (int i = 1; i < n && i < static_cast<int>(x.size()); ++i)
                        coords[static_cast<size_t>(i - 1)] = x[static_cast<size_t>(i)];
                }
                for (size_t i = 0; i < coords.size(); ++i) m(row0 + i, col) = coords[i];
                ++col;
            }
        }
        row0 += sb.reps.size();
    }
    return m;
}

// Matrix of f^* : V(D') -> V(D); rows V(D), columns V(D'). Composition with f
// realizes the d-transport since f^*(dv') = d(v' o f).
inline KMat v_pull(const RationalMap& f, const Divisor& d, const Divisor& dp) {
    detail::require_case2(f, d, dp);
    VSpace vs = v_space(d), vd = v_space(dp);
    KMat m(static_cast<size_t>(vs.dim), static_cast<size_t>(vd.dim));
    size_t col = 0;
    for (const auto& db : vd.blocks)
        for (const auto& rep : db.reps) {
            std::vector<FE> coords = v_coords(vs, rep.compose(f.f));
            for (size_t i = 0; i < coords.size(); ++i) m(i, col) = coords[i];
            ++col;
        }
    return m;
}

// Matrix of f_* : V(D) -> V(D'); rows V(D'), columns V(D). Pushes dv through
// the trace on differentials, then inverts d.
inline KMat v_push(const RationalMap& f, const Divisor& d, const Divisor& dp) {
    detail::require_case1(f, d, dp);
    VSpace vs = v_space(d), vd = v_space(dp);
    RF fprime = f.f.deriv();
    KMat m(static_cast<size_t>(vd.dim), static_cast<size_t>(vs.dim));
    size_t col = 0;
    for (const auto& sb : vs.blocks)
        for (const auto& rep : sb.reps) {
            RF pushed = trace_along(f, rep.deriv() / fprime);
            std::vector<FE> coords = v_from_differential(vd, pushed);
            for (size_t i = 0; i < coords.size(); ++i) m(i, col) = coords[i];
            ++col;
        }
    return m;
}

namespace detail {

// Rational point c avoiding the finite places of d, the poles of f, and whose
// image under f stays away from the finite places of dp.
inline Rat aux_point_for_push(const RationalMap& f, const Divisor& d, const Divisor& dp) {
    for (long k = 0; k < 1000; ++k) {
        long cand = (k % 2 == 0) ? k / 2 : -(k / 2 + 1);
        FE c(cand);
        bool ok = true;
        for (const auto& [p, mlt] : d.terms())
            if (!p.infinite && is_zero(p_eval(p.poly, c))) ok = false;
        if (!ok) continue;
        if (is_zero(p_eval(f.f.den(), c))) continue;
        FE img = f.f.eval(c);
        for (const auto& [p, mlt] : dp.terms())
            if (!p.infinite && is_zero(p_eval(p.poly, img))) ok = false;
        if (ok) return Rat(cand);
    }
    throw AuxiliaryPointUnavailable("no rational auxiliary point found");
}

} // namespace detail

// Matrix of f_* : U(D) -> U(D'); rows U(D'), columns U(D). Builds a global
// representative with a controlled auxiliary pole, traces it along f, and
// reduces germwise.
inline KMat u_push(const RationalMap& f, const Divisor& d, const Divisor& dp) {
    detail::require_case2(f, d, dp);
    USpace us = u_space(d), ud = u_space(dp);
    Rat c = detail::aux_point_for_push(f, d, dp);
    const PolyV<FE> tc{FE(-c), FE(1)};
    const PolyV<FE> svar{FE(0), FE(1)};
    const int minf = d.mult_at_infinity();

    KMat m(static_cast<size_t>(ud.dim), static_cast<size_t>(us.dim));
    size_t col = 0;
    for (const auto& sb : us.blocks) {
        for (size_t ri = 0; ri < sb.reps.size(); ++ri) {
            RF x;
            if (!sb.p.infinite) {
                // congruences: x == rep (t-c)^{-mm} ... assembled as z/(t-c)^mm
                PolyV<FE> pn = p_pow(sb.p.poly, static_cast<unsigned>(sb.n));
                PolyV<FE> z, zmod = pn;
                int mm = p_deg(pn);
                for (const auto& [q, nq] : d.terms()) {
                    if (q.infinite || q == sb.p) continue;
                    mm += nq * q.deg();
                }
                mm += minf;
                PolyV<FE> tcm = p_pow(tc, static_cast<unsigned>(mm));
                z = p_rem(p_mul(sb.reps[ri], tcm), pn);
                for (const auto& [q, nq] : d.terms()) {
                    if (q.infinite || q == sb.p) continue;
                    PolyV<FE> qn = p_pow(q.poly, static_cast<unsigned>(nq));
                    z = detail::crt2(z, zmod, {}, qn);
                    zmod = p_mul(zmod, qn);
                }
                x = RF(z, tcm);
            } else {
                // rep = s^j; x = QD y/(t-c)^mm with expansion s^j + O(s^minf)
                const int j = static_cast<int>(ri) + 1;
                PolyV<FE> qd{FE(1)};
                for (const auto& [q, nq] : d.terms())
                    if (!q.infinite) qd = p_mul(qd, p_pow(q.poly, static_cast<unsigned>(nq)));
                const int dy = minf - j - 1;
                const int mm = j + p_deg(qd) + dy;
                // rev y = (1 - c s)^mm / rev(qd) mod s^{minf-j}
                PolyV<FE> oneminus{FE(1), FE(-c)};
                PolyV<FE> pw = p_pow(oneminus, static_cast<unsigned>(mm));
                PolyV<FE> revqd(qd.rbegin(), qd.rend());
                p_norm(revqd);
                PolyV<FE> revy = p_mul(pw, detail::series_inv(revqd, minf - j));
                revy.resize(static_cast<size_t>(minf - j), FE(0));
                PolyV<FE> y(static_cast<size_t>(dy) + 1, FE(0));
                for (int i = 0; i <= dy; ++i) y[static_cast<size_t>(dy - i)] = revy[static_cast<size_t>(i)];
                p_norm(y);
                x = RF(p_mul(qd, y), p_pow(tc, static_cast<unsigned>(mm)));
            }

            RF traced = trace_along(f, x);
            // germwise reduction in U(D')
            std::vector<FE> coords;
            for (const auto& db : ud.blocks) {
                if (db.p.infinite) {
                    PolyV<FE> v = detail::rf_mod(traced.subst_inverse(), svar, db.n);
                    if (!v.empty() && !is_zero(v[0]))
                        throw InternalInconsistency("pushed germ not in the maximal ideal");
                    for (int i = 1; i < db.n; ++i)
                        coords.push_back(i < static_cast<int>(v.size())
                                             ? v[static_cast<size_t>(i)]
                                             : FE(0));
                } else {
                    PolyV<FE> v = detail::rf_mod(traced, db.p.poly, db.n);
                    auto [g, r] = p_divmod(v, db.p.poly);
                    if (!p_is_zero(r))
                        throw InternalInconsistency("pushed germ not in the maximal ideal");
                    const int len = (db.n - 1) * db.p.deg();
                    for (int i = 0; i < len; ++i)
                        coords.push_back(i < static_cast<int>(g.size())
                                             ? g[static_cast<size_t>(i)]
                                             : FE(0));
                }
            }
            for (size_t i = 0; i < coords.size(); ++i) m(i, col) = coords[i];
            ++col;
        }
    }
    return m;
}

} // namespace mm

#endif
