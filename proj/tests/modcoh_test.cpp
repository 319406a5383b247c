#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <mm/hdr.hpp>

using namespace mm;

static PolyV<FE> lin(long c) { return {FE(-c), FE(1)}; }
static Divisor pt(long c, int m = 1) { return m * Divisor::single(Place::finite(lin(c))); }
static Divisor inf(int m = 1) { return m * Divisor::single(Place::infinity()); }
static RationalMap fsq() { return RationalMap(RF::from_poly({FE(0), FE(0), FE(1)})); }

TEST_CASE("Riemann-Roch spaces") {
    LBasis b = l_space(pt(0, 3) + inf(2));
    CHECK(b.dim() == 6);
    for (const auto& e : b.elems) {
        auto c = l_coords(b, e);
        REQUIRE(c.has_value());
    }
    // 1/t^3 is in the space, 1/t^4 and 1/(t-1) are not
    CHECK(l_coords(b, RF({FE(1)}, p_pow(lin(0), 3))).has_value());
    CHECK(!l_coords(b, RF({FE(1)}, p_pow(lin(0), 4))).has_value());
    CHECK(!l_coords(b, RF({FE(1)}, lin(1))).has_value());
    // degree bound at infinity
    CHECK(l_coords(b, RF::from_poly({FE(0), FE(0), FE(1)})).has_value());
    CHECK(!l_coords(b, RF::from_poly({FE(0), FE(0), FE(0), FE(1)})).has_value());

    // negative part forces vanishing
    LBasis c = l_space(inf(3) - pt(1, 2));
    CHECK(c.dim() == 2);
    for (const auto& e : c.elems) CHECK(e.ord_at(lin(1)) >= 2);

    CHECK(l_space(inf(-1)).dim() == 0);
    CHECK(omega_space(inf(2)).dim() == 1); // only dt
}

TEST_CASE("polar coordinates") {
    // w = 1/t^2 + 3/t + regular
    RF w = RF({FE(1)}, p_pow(lin(0), 2)) + RF({FE(3)}, lin(0)) + RF::from_poly({FE(7), FE(1)});
    auto pc = polar_coords(w, lin(0), 1, 3);
    CHECK(pc == std::vector<FE>{FE(3), FE(1), FE(0)});
    CHECK_THROWS_AS(polar_coords(RF({FE(1)}, p_pow(lin(0), 4)), lin(0), 1, 3),
                    ConditionViolated);

    // degree-2 place
    PolyV<FE> p{FE(-2), FE(0), FE(1)};
    RF w2 = RF({FE(1), FE(5)}, p_pow(p, 2)); // (1+5t)/p^2
    auto pc2 = polar_coords(w2, p, 1, 2);
    CHECK(pc2 == std::vector<FE>{FE(0), FE(0), FE(1), FE(5)});
}

TEST_CASE("U and V space dimensions") {
    USpace u3 = u_space(pt(0, 3));
    CHECK(u3.dim == 2);
    REQUIRE(u3.blocks.size() == 1);
    CHECK(p_eq(u3.blocks[0].reps[0], lin(0)));                  // t
    CHECK(p_eq(u3.blocks[0].reps[1], p_mul(lin(0), lin(0)))); // t^2

    CHECK(u_space(pt(0) + pt(1) + inf()).dim == 0); // reduced
    CHECK(v_space(pt(0) + pt(1) + inf()).dim == 0);

    Divisor d2 = 2 * Divisor::single(Place::finite({FE(-2), FE(0), FE(1)}));
    CHECK(u_space(d2).dim == 2);
    CHECK(v_space(d2).dim == 2);

    Divisor mix = pt(0, 3) + inf(4) + pt(1, 1);
    CHECK(u_space(mix).dim == (mix.degree() - mix.red().degree()));
    CHECK(v_space(mix).dim == u_space(mix).dim);
}

TEST_CASE("d-isomorphisms are invertible") {
    for (const Divisor& d : {pt(0, 3) + inf(4), 2 * Divisor::single(Place::finite(
                                                        {FE(-2), FE(0), FE(1)})) +
                                                    pt(1, 2)}) {
        for (const auto& b : u_space(d).blocks) CHECK(is_invertible(u_d_matrix(b)));
        for (const auto& b : v_space(d).blocks) CHECK(is_invertible(v_d_matrix(b)));
    }
}

TEST_CASE("residue pairing is the anti-diagonal model on n(0)") {
    int n = 4;
    USpace u = u_space(pt(0, n));
    VSpace v = v_space(pt(0, n));
    KMat g = uv_pairing(u, v);
    for (int a = 0; a < n - 1; ++a)
        for (int b = 0; b < n - 1; ++b) {
            FE expect = (a + b == n - 2) ? FE(-(static_cast<long>(a) + 1)) : FE(0);
            CHECK(g(static_cast<size_t>(a), static_cast<size_t>(b)) == expect);
        }
}

TEST_CASE("residue pairing Gram matrices are invertible") {
    NFPtr k = nf_create({Rat(-2), Rat(0), Rat(1)}, "r");
    FE r = FE::gen(k);
    std::vector<Divisor> ds{
        pt(0, 2) + inf(3),
        3 * Divisor::single(Place::finite({FE(-2), FE(0), FE(1)})),
        pt(0, 2) + pt(1, 2) + inf(2),
        2 * Divisor::single(Place::finite({-r, FE(1)})) + inf(2),
    };
    for (const auto& d : ds) {
        KMat g = uv_pairing(u_space(d), v_space(d));
        REQUIRE(g.rows() == g.cols());
        CHECK(is_invertible(g));
    }
}

TEST_CASE("identity map gives identity on all four transports") {
    RationalMap id = map_identity();
    Divisor d = pt(0, 3) + inf(3);
    size_t n = static_cast<size_t>(u_space(d).dim);
    CHECK(u_pull(id, d, d) == KMat::identity(n));
    CHECK(v_pull(id, d, d) == KMat::identity(n));
    CHECK(u_push(id, d, d) == KMat::identity(n));
    CHECK(v_push(id, d, d) == KMat::identity(n));
}

TEST_CASE("scaling map is diagonal on U at infinity") {
    int n = 4;
    RationalMap f(RF::from_poly({FE(0), FE(2)})); // t -> 2t
    KMat m = u_pull(f, inf(n), inf(n));
    KMat expect(static_cast<size_t>(n - 1), static_cast<size_t>(n - 1));
    FE a(2), pw = inv(a);
    for (int j = 0; j < n - 1; ++j) {
        expect(static_cast<size_t>(j), static_cast<size_t>(j)) = pw;
        pw = pw * inv(a);
    }
    CHECK(m == expect);
}

TEST_CASE("translation map on U at infinity") {
    // t -> t-1: s' = s/(1-s), so s maps to s + s^2 + ... + s^{n-1}
    int n = 5;
    RationalMap f(RF::from_poly({FE(-1), FE(1)}));
    KMat m = u_pull(f, inf(n), inf(n));
    for (int i = 0; i < n - 1; ++i) CHECK(m(static_cast<size_t>(i), 0) == FE(1));
}

TEST_CASE("v_pull along t -> t^2 sends [t'] to [t^2]") {
    KMat m = v_pull(fsq(), inf(3), inf(2));
    REQUIRE(m.rows() == 2);
    REQUIRE(m.cols() == 1);
    CHECK(m(0, 0) == FE(0));
    CHECK(m(1, 0) == FE(1));
}

TEST_CASE("condition violations are reported") {
    CHECK_THROWS_AS(u_pull(fsq(), pt(0, 5), pt(0, 2)), ConditionViolated);
    CHECK_THROWS_AS(v_pull(fsq(), pt(0, 2), pt(0, 2)), ConditionViolated);
}

static void check_case1_adjoint(const RationalMap& f, const Divisor& d, const Divisor& dp) {
    KMat pu = u_pull(f, d, dp);
    KMat pv = v_push(f, d, dp);
    KMat g = uv_pairing(u_space(d), v_space(d));
    KMat gp = uv_pairing(u_space(dp), v_space(dp));
    // <f^*u', v>_D = <u', f_*v>_D'
    CHECK(pu.transpose() * g == gp * pv);
}

static void check_case2_adjoint(const RationalMap& f, const Divisor& d, const Divisor& dp) {
    KMat pu = u_push(f, d, dp);
    KMat pv = v_pull(f, d, dp);
    KMat g = uv_pairing(u_space(d), v_space(d));
    KMat gp = uv_pairing(u_space(dp), v_space(dp));
    // <f_*u, v'>_D' = <u, f^*v'>_D
    CHECK(pu.transpose() * gp == g * pv);
}

TEST_CASE("pushforwards are the pairing adjoints of pullbacks") {
    check_case1_adjoint(fsq(), pt(0, 3) + inf(3), pt(0, 2) + inf(2));
    check_case2_adjoint(fsq(), pt(0, 3) + inf(3), pt(0, 2) + inf(2));
    check_case1_adjoint(fsq(), pt(0, 4), pt(0, 2));
    check_case2_adjoint(fsq(), pt(0, 3), pt(0, 2));

    // a source place lying over two destination places (CRT path)
    Divisor d = 2 * Divisor::single(Place::finite(p_mul(lin(1), lin(-2))));
    Divisor dp = pt(1, 2) + pt(4, 2);
    check_case1_adjoint(fsq(), d, dp);

    // denominator map 1/t swaps 0 and infinity
    RationalMap finv(RF({FE(1)}, lin(0)));
    check_case1_adjoint(finv, pt(0, 3) + inf(2), pt(0, 2) + inf(3));
    check_case2_adjoint(finv, pt(0, 2) + inf(3), pt(0, 3) + inf(2));
}

TEST_CASE("pull composition law on U") {
    RationalMap f(RF::from_poly({FE(-1), FE(1)})); // t - 1
    RationalMap g = fsq();
    RationalMap gf = map_compose(g, f); // (t-1)^2
    Divisor d = inf(4);
    CHECK(u_pull(gf, d, d) == u_pull(f, d, d) * u_pull(g, d, d));
}
TEST_CASE("two-chart model dimensions match the closed form") {
    struct Case { Divisor y, z; int dim; };
    std::vector<Case> cases{
        {Divisor(), Divisor(), 0},
        {pt(0) + pt(1), inf(), 1},
        {pt(0, 2), inf(3), 3},
        {inf(3), Divisor(), 2},
        {Divisor(), pt(0, 2) + pt(1), 2},
        {pt(0, 2) + pt(-1), inf(2) + pt(1), 4},
    };
    for (const auto& c : cases) {
        ModulusTriple t(c.y, c.z);
        CHECK(hdr_dim_oracle(t) == c.dim);
        CechH1 h = cech_truncated(t);
        CHECK(h.dim == c.dim);
    }
}

TEST_CASE("cup product vanishes on coboundaries") {
    Divisor y = pt(0, 2), z = inf(2);
    CechCover cov = make_cover(y, z);
    CechVariant va = cech_variant(cov.SZ, cov.SY, 8, Divisor() - y, z);
    CechVariant vb = cech_variant(cov.SY, cov.SZ, 8, Divisor() - z, y);
    REQUIRE(va.h1dim == hdr_dim_oracle(ModulusTriple(y, z)));
    // a coboundary of va against every cocycle of vb
    std::vector<FE> cob(va.b1.rows());
    for (size_t i = 0; i < cob.size(); ++i)
        for (size_t j = 0; j < va.b1.cols(); ++j) cob[i] = cob[i] + va.b1(i, j);
    for (int j = 0; j < vb.h1dim; ++j) {
        std::vector<FE> cj(vb.h1.rows());
        for (size_t i = 0; i < cj.size(); ++i) cj[i] = vb.h1(i, static_cast<size_t>(j));
        CHECK(cech_cup(va, cob, vb, cj) == FE(0));
    }
}

TEST_CASE("graded decomposition dimensions and invertibility") {
    for (const auto& t : {ModulusTriple(pt(0, 2), inf(3)), ModulusTriple(pt(0) + pt(1), inf()),
                          ModulusTriple(inf(4), Divisor()), ModulusTriple(Divisor(), pt(0, 3))}) {
        GradedCoh g = hdr_compute(t);
        CHECK(g.total_dim() == hdr_dim_oracle(t));
        CHECK(g.main.h1dim == g.total_dim());
        CHECK(is_invertible(g.phi));
    }
}

TEST_CASE("pure U example: all classes are infinitesimal along Y") {
    int n = 4;
    GradedCoh g = hdr_compute(ModulusTriple(inf(n), Divisor()));
    CHECK(g.red_dim() == 0);
    CHECK(g.u.dim == n - 1);
    CHECK(g.v.dim == 0);
    CHECK(g.total_dim() == n - 1);
}

TEST_CASE("reduced coordinates recover the basis") {
    ReducedModel m = build_reduced_model(pt(0) + pt(1), inf() + pt(2));
    for (int j = 0; j < m.dim(); ++j) {
        auto c = reduced_coords(m, m.forms[static_cast<size_t>(j)]);
        for (int i = 0; i < m.dim(); ++i)
            CHECK(c[static_cast<size_t>(i)] == (i == j ? FE(1) : FE(0)));
    }
    // a coboundary of a function vanishing on Y reduces to zero
    RF h = RF({FE(0), FE(-1), FE(1)}, lin(2)); // t(t-1)/(t-2)
    auto c = reduced_coords(m, h.deriv());
    for (const auto& x : c) CHECK(x == FE(0));
}

TEST_CASE("duality Gram matrices are invertible") {
    for (const auto& t : {ModulusTriple(pt(0, 2), inf(3)), ModulusTriple(pt(0) + pt(1), inf()),
                          ModulusTriple(inf(3), Divisor()), ModulusTriple(Divisor(), pt(0, 2) + pt(1))}) {
        DualityResult d = hdr_duality(t);
        REQUIRE(d.gram.rows() == d.gram.cols());
        CHECK(is_invertible(d.gram));
    }
}

TEST_CASE("pullback along the identity is the identity") {
    for (const auto& t : {ModulusTriple(pt(0, 2), inf(2)), ModulusTriple(pt(0) + pt(1), inf())}) {
        GradedCoh g = hdr_compute(t);
        CHECK(hdr_pull(map_identity(), g, g) ==
              KMat::identity(static_cast<size_t>(g.total_dim())));
    }
}

TEST_CASE("pullback composition law on full cohomology") {
    RationalMap f(RF::from_poly({FE(-1), FE(1)})); // t - 1
    RationalMap g = fsq();                         // t^2
    RationalMap gf = map_compose(g, f);            // (t-1)^2
    GradedCoh s = hdr_compute(ModulusTriple(pt(1, 2) + pt(2), inf(2)));
    GradedCoh m = hdr_compute(ModulusTriple(pt(0, 2) + pt(1), inf(2)));
    GradedCoh d = hdr_compute(ModulusTriple(pt(0) + pt(1), inf()));
    CHECK(hdr_pull(gf, s, d) == hdr_pull(f, s, m) * hdr_pull(g, m, d));
}

TEST_CASE("pullback of log classes along t -> t^2") {
    // Y empty on both sides; the reduced groups are spanned by log forms
    GradedCoh s = hdr_compute(ModulusTriple(Divisor(), pt(0) + pt(1) + pt(-1)));
    GradedCoh d = hdr_compute(ModulusTriple(Divisor(), pt(0) + pt(1)));
    REQUIRE(s.total_dim() == 2);
    REQUIRE(d.total_dim() == 1);
    KMat m = hdr_pull(fsq(), s, d);
    // the pulled class, written in the source basis independently
    RF w = d.red->forms[0].compose(fsq().f) * fsq().f.deriv();
    auto c = reduced_coords(*s.red, w);
    CHECK(m(0, 0) == c[0]);
    CHECK(m(1, 0) == c[1]);
}

TEST_CASE("pullback rejects non-edges") {
    GradedCoh s = hdr_compute(ModulusTriple(pt(0), inf()));
    GradedCoh d = hdr_compute(ModulusTriple(pt(0), pt(1)));
    CHECK_THROWS_AS(hdr_pull(fsq(), s, d), NotAMorphism);
}
