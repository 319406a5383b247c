#ifndef MM_NORI_HPP
#define MM_NORI_HPP

#include <algorithm>
#include <map>
#include <set>
#include <string>

#include "hdr.hpp"

namespace mm {

// ---------------------------------------------------------------------------
// Finite quiver representations over Q, the intertwiner endomorphism algebra,
// its dual coalgebra with comodules, and directed systems over nested full
// subquivers.
// ---------------------------------------------------------------------------

struct Quiver {
    struct Edge {
        std::string src, dst, label;
    };
    std::vector<std::string> vertices;
    std::vector<Edge> edges;
};

// Edge matrices act covariantly (shape dim dst x dim src) or contravariantly
// (shape dim src x dim dst), declared once per representation.
struct QuiverRep {
    Quiver q;
    bool contravariant = false;
    std::map<std::string, int> dims;
    std::map<std::string, QMat> maps; // keyed by edge label
};

struct EndAlgebra {
    std::vector<std::string> verts; // kept in quiver order
    std::map<std::string, int> dims;
    QMat basis;             // columns: echelonized intertwiner tuples, flattened
    std::vector<QMat> mult; // mult[i] column j = coordinates of basis_i * basis_j
    std::vector<Rat> unit;  // coordinates of the identity tuple

    int dim() const { return static_cast<int>(basis.cols()); }
    size_t offset(const std::string& v) const {
        size_t off = 0;
        for (const auto& w : verts) {
            if (w == v) return off;
            int d = dims.at(w);
            off += static_cast<size_t>(d) * static_cast<size_t>(d);
        }
        throw BadIndex("vertex not in the restriction");
    }
    QMat block(int i, const std::string& v) const {
        const size_t d = static_cast<size_t>(dims.at(v));
        const size_t off = offset(v);
        QMat b(d, d);
        for (size_t r = 0; r < d; ++r)
            for (size_t c = 0; c < d; ++c)
                b(r, c) = basis(off + r * d + c, static_cast<size_t>(i));
        return b;
    }
};

namespace detail {

inline QMat flat_to_block(const QMat& flat, size_t col, size_t off, size_t d) {
    QMat b(d, d);
    for (size_t r = 0; r < d; ++r)
        for (size_t c = 0; c < d; ++c) b(r, c) = flat(off + r * d + c, col);
    return b;
}

inline QMat kron(const QMat& a, const QMat& b) {
    QMat r(a.rows() * b.rows(), a.cols() * b.cols());
    for (size_t i = 0; i < a.rows(); ++i)
        for (size_t j = 0; j < a.cols(); ++j) {
            if (is_zero(a(i, j))) continue;
            for (size_t k = 0; k < b.rows(); ++k)
                for (size_t l = 0; l < b.cols(); ++l)
                    r(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
        }
    return r;
}

} // namespace detail

// Basis of all tuples (e_v) with e_dst T(m) = T(m) e_src for every edge m of
// the full subquiver on the given vertices (contravariant representations
// intertwine in the opposite order).
inline EndAlgebra end_compute(const QuiverRep& rep,
                              const std::vector<std::string>& restrict_to = {}) {
    EndAlgebra a;
    std::set<std::string> keep(restrict_to.begin(), restrict_to.end());
    for (const auto& v : rep.q.vertices)
        if (restrict_to.empty() || keep.count(v)) {
            a.verts.push_back(v);
            a.dims[v] = rep.dims.at(v);
        }
    size_t total = 0;
    for (const auto& v : a.verts)
        total += static_cast<size_t>(a.dims[v]) * static_cast<size_t>(a.dims[v]);

    // one row block of equations per edge inside the subquiver
    std::vector<QMat> eqs;
    size_t nrows = 0;
    for (const auto& e : rep.q.edges) {
        if (!a.dims.count(e.src) || !a.dims.count(e.dst)) continue;
        const QMat& t = rep.maps.at(e.label);
        // covariant: e_dst t - t e_src = 0 over entries of t's shape
        const std::string& left = rep.contravariant ? e.src : e.dst;
        const std::string& right = rep.contravariant ? e.dst : e.src;
        const size_t dl = static_cast<size_t>(a.dims[left]);
        const size_t dr = static_cast<size_t>(a.dims[right]);
        QMat rows(dl * dr, total);
        for (size_t i = 0; i < dl; ++i)
            for (size_t j = 0; j < dr; ++j) {
                const size_t r = i * dr + j;
                // (e_left t)(i,j): e_left(i,s) t(s,j)
                for (size_t s = 0; s < dl; ++s)
                    rows(r, a.offset(left) + i * dl + s) =
                        rows(r, a.offset(left) + i * dl + s) + t(s, j);
                // -(t e_right)(i,j): -t(i,s) e_right(s,j)
                for (size_t s = 0; s < dr; ++s)
                    rows(r, a.offset(right) + s * dr + j) =
                        rows(r, a.offset(right) + s * dr + j) - t(i, s);
            }
        nrows += rows.rows();
        eqs.push_back(std::move(rows));
    }
    QMat sys(nrows, total);
    {
        size_t at = 0;
        for (const auto& m : eqs) {
            sys.set_block(at, 0, m);
            at += m.rows();
        }
    }
    QMat ker = solve_kernel(sys);
    // echelonize deterministically: rref on the transposed kernel
    QMat rows = ker.transpose();
    rref(rows);
    size_t nz = 0;
    for (size_t i = 0; i < rows.rows(); ++i) {
        bool z = true;
        for (size_t j = 0; j < rows.cols(); ++j)
            if (!is_zero(rows(i, j))) z = false;
        if (!z) ++nz;
    }
    a.basis = QMat(total, nz);
    for (size_t i = 0; i < nz; ++i)
        for (size_t j = 0; j < total; ++j) a.basis(j, i) = rows(i, j);

    // structure constants and the unit coordinates
    const size_t n = a.basis.cols();
    std::vector<QMat> blocks(n);
    QMat products(total, n * n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            size_t off = 0;
            for (const auto& v : a.verts) {
                const size_t d = static_cast<size_t>(a.dims[v]);
                QMat p = detail::flat_to_block(a.basis, i, off, d) *
                         detail::flat_to_block(a.basis, j, off, d);
                for (size_t r = 0; r < d; ++r)
                    for (size_t c = 0; c < d; ++c)
                        products(off + r * d + c, i * n + j) = p(r, c);
                off += d * d;
            }
        }
    QMat idtuple(total, 1);
    {
        size_t off = 0;
        for (const auto& v : a.verts) {
            const size_t d = static_cast<size_t>(a.dims[v]);
            for (size_t r = 0; r < d; ++r) idtuple(off + r * d + r, 0) = Rat(1);
            off += d * d;
        }
    }
    QMat all = QMat::hstack(products, idtuple);
    QMat coords = express_in_basis(a.basis, all);
    a.mult.assign(n, QMat(n, n));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            for (size_t k = 0; k < n; ++k) a.mult[i](k, j) = coords(k, i * n + j);
    a.unit.assign(n, Rat(0));
    for (size_t k = 0; k < n; ++k) a.unit[k] = coords(k, n * n);
    return a;
}

struct DualCoalgebra {
    int dimension = 0;
    QMat comultiplication; // dim^2 x dim
    QMat counit;           // 1 x dim
};

// The linear dual: comultiplication from the multiplication table, counit
// from the unit coordinates; coassociativity and the counit laws are checked
// exactly.
inline DualCoalgebra coalgebra_dual(const EndAlgebra& a) {
    const size_t n = static_cast<size_t>(a.dim());
    DualCoalgebra c;
    c.dimension = static_cast<int>(n);
    c.comultiplication = QMat(n * n, n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            for (size_t k = 0; k < n; ++k)
                c.comultiplication(i * n + j, k) = a.mult[i](k, j);
    c.counit = QMat(1, n);
    for (size_t k = 0; k < n; ++k) c.counit(0, k) = a.unit[k];

    QMat id = QMat::identity(n);
    QMat lhs = detail::kron(c.comultiplication, id) * c.comultiplication;
    QMat rhs = detail::kron(id, c.comultiplication) * c.comultiplication;
    if (!(lhs == rhs)) throw AxiomViolation("comultiplication is not coassociative");
    if (!(detail::kron(c.counit, id) * c.comultiplication == id) ||
        !(detail::kron(id, c.counit) * c.comultiplication == id))
        throw AxiomViolation("counit law fails");
    return c;
}

struct Comodule {
    int dimension = 0;
    QMat coaction; // (coalgebra dim * dimension) x dimension
};

// T(p) as a left comodule over the dual coalgebra: the coaction row block i
// is the transpose of the action of the i-th basis intertwiner.
inline Comodule comodule_structure(const QuiverRep& rep,
                                   const std::vector<std::string>& restrict_to,
                                   const EndAlgebra& a, const std::string& p) {
    (void)rep;
    const size_t n = static_cast<size_t>(a.dim());
    const size_t d = static_cast<size_t>(a.dims.at(p));
    Comodule m;
    m.dimension = static_cast<int>(d);
    m.coaction = QMat(n * d, d);
    for (size_t i = 0; i < n; ++i) {
        QMat b = a.block(static_cast<int>(i), p).transpose();
        m.coaction.set_block(i * d, 0, b);
    }
    (void)restrict_to;

    DualCoalgebra c = coalgebra_dual(a);
    QMat idd = QMat::identity(d), idn = QMat::identity(n);
    if (!(detail::kron(c.comultiplication, idd) * m.coaction ==
          detail::kron(idn, m.coaction) * m.coaction))
        throw AxiomViolation("comodule coassociativity square fails");
    if (!(detail::kron(c.counit, idd) * m.coaction == idd))
        throw AxiomViolation("comodule counit triangle fails");
    return m;
}

struct DirectedSystem {
    std::vector<EndAlgebra> ends;
    std::vector<DualCoalgebra> coalgebras;
    std::vector<QMat> transitions; // C_{E_i} -> C_{E_{i+1}}
    std::vector<size_t> transition_ranks;
};

// Restriction End(E_{i+1}) -> End(E_i) along a nested chain of full
// subquivers; the transposes are the coalgebra transition maps. Ranks are
// reported, injectivity is not assumed.
inline DirectedSystem directed_system(const QuiverRep& rep,
                                      const std::vector<std::vector<std::string>>& chain) {
    DirectedSystem s;
    for (const auto& e : chain) {
        s.ends.push_back(end_compute(rep, e));
        s.coalgebras.push_back(coalgebra_dual(s.ends.back()));
    }
    for (size_t i = 0; i + 1 < chain.size(); ++i) {
        const EndAlgebra &small = s.ends[i], &big = s.ends[i + 1];
        size_t small_total = small.basis.rows();
        QMat restricted(small_total, big.basis.cols());
        for (size_t col = 0; col < big.basis.cols(); ++col)
            for (const auto& v : small.verts) {
                const size_t d = static_cast<size_t>(small.dims.at(v));
                for (size_t x = 0; x < d * d; ++x)
                    restricted(small.offset(v) + x, col) =
                        big.basis(big.offset(v) + x, col);
            }
        QMat r = express_in_basis(small.basis, restricted);
        s.transitions.push_back(r.transpose());
        s.transition_ranks.push_back(rank(r));
    }
    return s;
}

// true iff the column span of K is stable under every basis intertwiner at p
inline bool kernel_is_submodule(const EndAlgebra& a, const std::string& p, const QMat& K) {
    size_t base = rank(K);
    for (int i = 0; i < a.dim(); ++i) {
        QMat img = a.block(i, p) * K;
        if (rank(QMat::hstack(K, img)) != base) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// The representation on the modulus pairs P_n = (P^1, n[infinity], 0),
// with the scaling, shift, and inclusion maps, all matrices computed from
// the cohomology pullbacks and then restricted to Q.
// ---------------------------------------------------------------------------

inline std::vector<FE> mpo_default_multipliers(const NFPtr& k, int n_max) {
    std::vector<FE> out{FE(Rat(2)).promote(k)};
    FE g = FE::gen(k);
    for (int i = 0; i < n_max; ++i) {
        FE c = g + FE(static_cast<long>(i));
        if (is_zero(c)) continue;
        bool dup = false;
        for (const auto& x : out)
            if (x == c) dup = true;
        if (!dup) out.push_back(c);
    }
    return out;
}

inline QuiverRep mpo_build(int n_max, const NFPtr& k, std::vector<FE> multipliers = {}) {
    if (n_max < 2) throw BadIndex("need at least the vertex P_2");
    if (multipliers.empty()) multipliers = mpo_default_multipliers(k, n_max);
    for (auto& a : multipliers) {
        a = a.promote(k);
        if (is_zero(a)) throw ZeroInput("multiplier must be nonzero");
    }
    QuiverRep rep;
    rep.contravariant = true;
    const int d = k->deg();
    std::vector<GradedCoh> coh;
    for (int n = 2; n <= n_max; ++n) {
        std::string v = "P" + std::to_string(n);
        rep.q.vertices.push_back(v);
        coh.push_back(hdr_compute(
            ModulusTriple(n * Divisor::single(Place::infinity()), Divisor())));
        rep.dims[v] = coh.back().total_dim() * d;
    }
    auto vtx = [&](int n) { return "P" + std::to_string(n); };
    auto add_edge = [&](int src, int dst, const std::string& label, const RF& f) {
        rep.q.edges.push_back({vtx(src), vtx(dst), label});
        KMat m = hdr_pull(RationalMap(f), coh[static_cast<size_t>(src - 2)],
                          coh[static_cast<size_t>(dst - 2)]);
        rep.maps[label] = restrict_scalars(k, m);
    };
    for (int n = 2; n <= n_max; ++n) {
        for (size_t ai = 0; ai < multipliers.size(); ++ai)
            add_edge(n, n, "scale" + std::to_string(ai) + "_" + vtx(n),
                     RF::from_poly({FE(0), multipliers[ai]}));
        add_edge(n, n, "shift_" + vtx(n), RF::from_poly({FE(-1), FE(1)}));
        for (int m = n; m <= n_max; ++m)
            add_edge(n, m, "incl_" + vtx(n) + "_" + vtx(m), RF::var());
    }
    return rep;
}

// the diagonal action of a field element on every vertex space of the
// restriction, as an intertwiner tuple flattened in the EndAlgebra layout
inline std::vector<Rat> mpo_field_tuple(const EndAlgebra& a, const NFPtr& k, const FE& x) {
    size_t total = a.basis.rows();
    const size_t d = static_cast<size_t>(k->deg());
    std::vector<Rat> out(total, Rat(0));
    QMat mul = mul_matrix(k, x);
    for (const auto& v : a.verts) {
        const size_t dv = static_cast<size_t>(a.dims.at(v));
        for (size_t blk = 0; blk < dv / d; ++blk)
            for (size_t r = 0; r < d; ++r)
                for (size_t c = 0; c < d; ++c)
                    out[a.offset(v) + (blk * d + r) * dv + (blk * d + c)] = mul(r, c);
    }
    return out;
}

} // namespace mm

#endif
